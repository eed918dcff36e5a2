"""Automated tests. Run with pytest."""

"""For using as 'python3 -m realforms'."""

from .cli import cli

if __name__ == "__main__":
    cli(prog_name="realforms")

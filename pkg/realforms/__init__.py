r"""Realforms.

Components, stabilizers and invariants of real realizations of classifying
spaces BG and quotient stacks [G\X] for finite groups with an involution.
"""

import logging

from .realforms import RealForms
from .version import __version__

__all__ = ["RealForms", "__version__", "cli"]


# A do-nothing logging handler
# https://docs.python.org/3.3/howto/logging.html#configuring-logging-for-a-library
logging.getLogger("realforms").addHandler(logging.NullHandler())

"""Certified arithmetic progressions in the primitive length spectrum of SL(2, Z)."""

import sys

# Witness matrices carry entries with tens of thousands of digits.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

__version__ = "0.1.0"


class CapExceededError(RuntimeError):
    """A search or iteration hit its configured cap before finishing."""

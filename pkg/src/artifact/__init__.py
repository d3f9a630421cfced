"""Exact infinite-dimensional majorization toolkit."""

import sys

# exact rationals in certificates can have very long numerators
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

__version__ = "0.1.0"

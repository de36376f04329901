"""High-precision evaluation helpers for the sample-size calculators."""
from __future__ import annotations

import mpmath

DIGITS = 50


def workdps():
    return mpmath.workdps(DIGITS)


def mp(x):
    """Exact conversion of a float (or int/str) to an mpf at the working precision."""
    return mpmath.mpf(x)


def ceil_int(x) -> int:
    return int(mpmath.ceil(x))

"""Exact integer/rational helpers shared by the measure, code and test modules."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

# Outcome sentinel for T(x|P) when P{x} = 0.
POS_INF = math.inf


def as_probability(p) -> Fraction:
    """Convert ``p`` to an exact rational in [0, 1].

    Floats are converted exactly (their binary expansion), strings may be
    ``"3/10"`` or decimals.
    """
    if isinstance(p, Fraction):
        q = p
    elif isinstance(p, (int, float, str)):
        q = Fraction(p)
    elif isinstance(p, np.floating):
        q = Fraction(float(p))
    else:
        raise TypeError(f"unsupported probability type {type(p).__name__}")
    if not 0 <= q <= 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    return q


def floor_log2(r: Fraction | int) -> int:
    """Exact ``floor(log2 r)`` for a positive rational."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    num, den = r.numerator, r.denominator
    m = num.bit_length() - den.bit_length()
    if m >= 0:
        if num < den << m:
            m -= 1
    elif num << -m < den:
        m -= 1
    return m


def ceil_log2(r: Fraction | int) -> int:
    """Exact ``ceil(log2 r)`` for a positive rational."""
    r = Fraction(r)
    return -floor_log2(1 / r)


def log2_int(m: int) -> np.longdouble:
    """log2 of a positive (possibly huge) integer in extended precision."""
    if m <= 0:
        raise ValueError("log2_int needs a positive integer")
    shift = max(m.bit_length() - 64, 0)
    head = m >> shift
    return np.log2(np.longdouble(head)) + np.longdouble(shift)


def log2_fraction(r: Fraction) -> np.longdouble:
    """log2 of a rational in extended precision; -inf for 0."""
    if r == 0:
        return np.longdouble(-np.inf)
    if r < 0:
        raise ValueError("log2 of a negative number")
    return log2_int(r.numerator) - log2_int(r.denominator)


def double_factorial_odd(k: int) -> int:
    """(2k-1)!! = 1*3*...*(2k-1) = (2k)! / (2^k k!); equals 1 for k = 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.factorial(2 * k) // (math.factorial(k) << k)

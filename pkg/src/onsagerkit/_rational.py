"""Exact-rational helpers shared by the exponent algebra and the region
classifier.  Infinite exponents are handled through their reciprocals:
1/inf = 0 exactly."""

from __future__ import annotations

import math
from fractions import Fraction

Rat = Fraction


def as_rational(x) -> Fraction:
    """Exact conversion to Fraction; floats convert via their binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            raise ValueError(f"cannot convert {x} to a rational")
        return Fraction(*x.as_integer_ratio())
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a rational-like number, got {type(x).__name__}")


def is_infinite(x) -> bool:
    return isinstance(x, float) and math.isinf(x) and x > 0


def reciprocal(x) -> Fraction:
    """1/x as an exact rational; +inf maps to 0."""
    if is_infinite(x):
        return Fraction(0)
    r = as_rational(x)
    if r == 0:
        raise ZeroDivisionError("reciprocal of zero exponent")
    return 1 / r


def from_reciprocal(inv: Fraction) -> Fraction | float:
    """Inverse of reciprocal(): 0 maps back to +inf."""
    if inv == 0:
        return math.inf
    return 1 / inv

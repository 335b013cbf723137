"""Parsing and formatting of exact rationals."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import InputError


def q(value) -> Fraction:
    """Coerce ``value`` to a Fraction.

    Accepts ints, Fractions and strings such as ``"3"``, ``"-2/7"``.  Floats
    are rejected because they usually signal a lossy round trip through JSON.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"boolean is not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise InputError(f"not a rational string: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational string: {value!r}") from exc
    raise InputError(f"cannot interpret {value!r} as an exact rational")


def fmt(value: Fraction) -> str:
    """Lowest-terms ``p/q`` string (integers print without a denominator)."""
    return str(Fraction(value))


def qvec(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(q(v) for v in values)


def fvec(values: Iterable) -> list[str]:
    return [fmt(v) for v in values]


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fracs = [Fraction(x) for x in vec]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)

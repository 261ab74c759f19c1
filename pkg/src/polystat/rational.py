"""Exact rational arithmetic backend.

Everything in this package computes over the rationals; floats are rejected
at the boundary so that every verdict stays decidable. The backend is
gmpy2.mpq when available (much faster) and fractions.Fraction otherwise.
Set POLYSTAT_RATIONAL=fraction to force the stdlib backend.
"""

import os
from fractions import Fraction

_forced = os.environ.get("POLYSTAT_RATIONAL", "").strip().lower()

if _forced in {"fraction", "fractions", "stdlib"}:
    _Q = Fraction
    RATIONAL_BACKEND = "fraction"
else:
    try:
        from gmpy2 import mpq as _Q

        RATIONAL_BACKEND = "gmpy2"
    except ImportError:  # pragma: no cover - environment dependent
        _Q = Fraction
        RATIONAL_BACKEND = "fraction"

#: Constructor for the active rational type.
Q = _Q

ZERO = Q(0)
ONE = Q(1)


def rat(value):
    """Coerce ``value`` to the active rational type.

    Accepts ints, rationals of either backend, and strings like "3", "-4/7"
    or "0.25". Floats are refused: binary rounding would silently poison an
    exact computation.
    """
    if isinstance(value, float):
        raise TypeError(
            "floats are not exact; pass a string like '1/3' or an int"
        )
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty string is not a rational")
        try:
            if "." in text or "e" in text or "E" in text:
                # Decimal literal: go through Fraction, which parses exactly.
                return Q(Fraction(text))
            return Q(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError("cannot parse %r as a rational" % (value,)) from exc
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    if type(value) is type(ZERO):
        return value
    # Last resort: anything exposing exact numerator/denominator.
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if isinstance(num, int) and isinstance(den, int):
        return Q(num, den)
    raise TypeError("cannot interpret %r as a rational" % (value,))


def rat_str(q):
    """Render a rational as "p" or "p/q" (the CLI / JSON wire format)."""
    q = rat(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


def rat_vector(values):
    """Coerce a sequence to a tuple of rationals."""
    return tuple(rat(v) for v in values)


def parse_vector(text):
    """Parse a comma-separated list of rationals ("1,-1/2,0")."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty vector")
    return tuple(rat(p) for p in parts)


def vector_str(vec):
    return ",".join(rat_str(v) for v in vec)


def dot(u, v):
    """Exact inner product of two equal-length sequences."""
    if len(u) != len(v):
        raise ValueError("dimension mismatch in dot product")
    total = ZERO
    for a, b in zip(u, v):
        total += a * b
    return total


def scale(vec, factor):
    return tuple(factor * v for v in vec)


def add_vec(u, v):
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return tuple(a + b for a, b in zip(u, v))


def sub_vec(u, v):
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return tuple(a - b for a, b in zip(u, v))


def is_zero_vector(vec):
    return all(v == 0 for v in vec)


def gcd_int(a, b):
    import math

    return math.gcd(a, b)


def primitive(vec):
    """Scale a rational vector to coprime integers (sign preserved).

    The zero vector stays zero. Used to canonicalize constraint rows and
    ray/line generators so that syntactic equality means geometric equality.
    """
    from math import gcd, lcm

    denominators = [v.denominator for v in vec]
    if not denominators:
        return tuple(vec)
    common = 1
    for d in denominators:
        common = lcm(common, d)
    ints = [int(v * common) for v in vec]
    g = 0
    for i in ints:
        g = gcd(g, abs(i))
    if g == 0:
        return tuple(ZERO for _ in vec)
    return tuple(Q(i // g) for i in ints)

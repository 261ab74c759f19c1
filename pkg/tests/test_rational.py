"""Exactness and parsing checks for the rational backend."""

import pytest

from polystat.rational import (
    ONE,
    RATIONAL_BACKEND,
    ZERO,
    dot,
    rat,
    rat_str,
    rat_vector,
)


def test_backend_is_reported():
    assert RATIONAL_BACKEND in ("gmpy2", "fraction")


def test_parse_forms():
    assert rat("3") == 3
    assert rat("-4/7") * 7 == -4
    assert rat("0.25") * 4 == 1
    assert rat(5) == 5
    assert rat(rat("2/3")) == rat("2/3")


def test_floats_are_refused():
    with pytest.raises(TypeError):
        rat(0.1)
    with pytest.raises(TypeError):
        rat(True)


def test_garbage_is_refused():
    with pytest.raises(ValueError):
        rat("abc")
    with pytest.raises((ValueError, ZeroDivisionError)):
        rat("1/0")


def test_arithmetic_is_exact():
    # classic float trap: 0.1 + 0.2 != 0.3
    a = rat("1/10") + rat("2/10")
    assert a == rat("3/10")
    # telescoping sum of 1/(k(k+1)) has closed form n/(n+1)
    total = ZERO
    for k in range(1, 200):
        total += ONE / (rat(k) * rat(k + 1))
    assert total == rat(199) / rat(200)


def test_rat_str_round_trip():
    for text in ("0", "7", "-3", "5/9", "-22/7", "1000000000000000001/3"):
        assert rat_str(rat(text)) == text
        assert rat(rat_str(rat(text))) == rat(text)


def test_rat_str_normalizes():
    assert rat_str(rat("2/4")) == "1/2"
    assert rat_str(rat("-0")) == "0"
    assert rat_str(rat("9/3")) == "3"


def test_vector_helpers():
    v = rat_vector(["1/2", 3, "-1"])
    assert v == (rat("1/2"), rat(3), rat(-1))
    w = rat_vector([2, "1/3", 0])
    assert dot(v, w) == 1 + 1 + 0
    assert dot((), ()) == 0


def test_numerator_denominator_access():
    q = rat("-6/8")
    assert q.numerator == -3
    assert q.denominator == 4

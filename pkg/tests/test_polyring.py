from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polys
from gts.polyring import (
    CoefField,
    Grading,
    PolyParseError,
    PolyRing,
    binomial_in_field,
    multidegree,
    parse_polynomial,
)

GF2 = PolyRing(CoefField(2), ("s", "t"))
GF3 = PolyRing(CoefField(3), ("x", "y", "z"))
QQ = PolyRing(CoefField(None), ("a", "b"))


def test_non_prime_modulus_rejected():
    with pytest.raises(ValueError, match="not prime"):
        CoefField(4)
    with pytest.raises(ValueError):
        CoefField(1)


def test_field_coercion():
    assert CoefField(5)(Fraction(1, 2)) == 3
    assert CoefField(None)(3) == Fraction(3)
    with pytest.raises(ZeroDivisionError):
        CoefField(3)(Fraction(1, 3))


def test_parse_and_print():
    f = GF3("x^2*y - 2*x + 1")
    assert f == GF3("x**2*y + x + 1")
    assert parse_polynomial(f.to_text(), GF3) == f
    assert GF2("(s+t)^2") == GF2("s^2 + t^2")
    assert QQ("a/2 + b").terms[(1, 0)] == Fraction(1, 2)


def test_parse_error_offset():
    with pytest.raises(PolyParseError) as err:
        GF2("s + * t")
    assert err.value.offset == 4
    with pytest.raises(PolyParseError):
        GF2("u")


def test_substitute_and_extend():
    R = GF2.extend(["z"])
    f = GF2("s*t + t")
    g = f.substitute(R.gens()[:2], R)
    assert g == R("s*t + t")
    assert f.substitute([GF2("s+t"), GF2("t")]) == GF2("s*t + t^2 + t")


def test_grading():
    G = Grading(((1, 1), (1, 2)))
    assert G.degree_of((2, 1)) == (3, 4)
    assert multidegree(GF2("s^2*t"), G) == (3, 4)


def test_binomial_in_field():
    assert binomial_in_field(4, 2, CoefField(2)) == 0
    assert binomial_in_field(4, 2, CoefField(5)) == 1
    assert binomial_in_field(4, 2, CoefField(None)) == 6


@given(polys(GF3), polys(GF3), polys(GF3))
def test_ring_axioms_gf3(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == GF3.zero()
    assert f * GF3.one() == f


@given(polys(QQ), polys(QQ))
def test_ring_axioms_qq(f, g):
    assert (f + g) * (f - g) == f * f - g * g


@given(st.sampled_from([2, 3, 5]), st.data())
def test_frobenius(p, data):
    R = PolyRing(CoefField(p), ("u", "v"))
    f = data.draw(polys(R))
    g = data.draw(polys(R))
    assert (f + g) ** p == f ** p + g ** p


@given(st.integers(0, 12), st.data())
def test_binomial_matches_comb(n, data):
    k = data.draw(st.integers(0, n))
    for p in (2, 3, 7):
        assert binomial_in_field(n, k, CoefField(p)) == math.comb(n, k) % p


@given(polys(GF3, max_deg=3))
def test_print_parse_round_trip(f):
    assert GF3(f.to_text()) == f

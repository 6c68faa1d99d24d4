from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import polys
from gts.modgb import FreeModule
from gts.polyring import CoefField, PolyRing
from gts.tensoralg import (
    GuardrailExceeded,
    OrbitTensor,
    TensorPower,
    compose,
    gamma_expand,
    inverse,
    multi_indices,
    multinomial_count,
    orbit_basis,
    shuffle,
    shuffle_bruteforce,
    shuffles,
    symmetric_generators,
)

R2 = PolyRing(CoefField(2), ("s", "t"))
R3 = PolyRing(CoefField(3), ("s", "t"))


def test_orbit_basis_size():
    for m in range(1, 4):
        for n in range(0, 4):
            assert len(orbit_basis(n, m, R2)) == math.comb(m + n - 1, n)


def test_guardrail():
    with pytest.raises(GuardrailExceeded):
        TensorPower(FreeModule(R2, 10), 6)
    TensorPower(FreeModule(R2, 10), 6, guardrail=10**6)


def test_permutations():
    assert len(symmetric_generators(4)) == 3
    p = (1, 2, 0)
    assert compose(p, inverse(p)) == (0, 1, 2)
    assert len(list(shuffles(2, 3))) == math.comb(5, 2)


def test_sigma_moves_slots():
    F = FreeModule(R2, 2)
    T = TensorPower(F, 3)
    v = T.basis((0, 0, 1))
    # the factor in slot k goes to slot perm[k]
    assert T.sigma((2, 0, 1), v) == T.basis((0, 1, 0))


def test_shuffle_examples():
    e1 = OrbitTensor.basis(R2, (1, 0))
    assert shuffle(e1, e1) == OrbitTensor(R2, 2, 2, {(2, 0): R2.zero()})  # 2 e_(2,0) = 0 in char 2
    e1_3 = OrbitTensor.basis(R3, (1, 0))
    assert shuffle(e1_3, e1_3) == OrbitTensor.basis(R3, (2, 0)).scale(2)


def test_embedded_orbit_sums_symmetric():
    for m, n in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        T = TensorPower(FreeModule(R3, m), n)
        for v in T.orbit_vectors:
            assert T.is_symmetric(v)
        for nu, v in zip(multi_indices(m, n), T.orbit_vectors):
            assert sum(1 for c in v.coords if c) == multinomial_count(nu)


def _orbit(data, ring, m, n):
    return OrbitTensor(ring, m, n, {nu: data.draw(polys(ring, max_deg=1, max_terms=2))
                                    for nu in multi_indices(m, n)})


@settings(max_examples=30)
@given(st.sampled_from([R2, R3]), st.integers(0, 2), st.integers(0, 2), st.data())
def test_shuffle_matches_definition(ring, k, l, data):
    F = FreeModule(ring, 2)
    z, w = _orbit(data, ring, 2, k), _orbit(data, ring, 2, l)
    T = TensorPower(F, k + l)
    assert T.embed(shuffle(z, w)) == shuffle_bruteforce(z, w, F)


@settings(max_examples=30)
@given(st.sampled_from([R2, R3]), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_shuffle_commutative_associative(ring, a, b, c, data):
    x, y, z = _orbit(data, ring, 2, a), _orbit(data, ring, 2, b), _orbit(data, ring, 2, c)
    assert shuffle(x, y) == shuffle(y, x)
    assert shuffle(shuffle(x, y), z) == shuffle(x, shuffle(y, z))
    assert shuffle(OrbitTensor.unit(ring, 2), x) == x


@settings(max_examples=30)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 3), st.integers(0, 3), st.data())
def test_gamma_law(p, s, t, data):
    """γ^s(x) × γ^t(x) = C(s+t, s) γ^{s+t}(x)."""
    ring = PolyRing(CoefField(p), ("u",))
    F = FreeModule(ring, 2)
    x = F([data.draw(polys(ring, max_deg=1)) for _ in range(2)])
    lhs = shuffle(gamma_expand(x, s), gamma_expand(x, t))
    rhs = gamma_expand(x, s + t).scale(math.comb(s + t, s))
    assert lhs == rhs


@settings(max_examples=20)
@given(st.sampled_from([None, 2, 3]), st.integers(1, 3), st.data())
def test_gamma_embeds_to_power(p, n, data):
    """γ^n(x) embeds to x^{⊗n}."""
    ring = PolyRing(CoefField(p), ("u",))
    F = FreeModule(ring, 2)
    x = F([data.draw(polys(ring, max_deg=1)) for _ in range(2)])
    T = TensorPower(F, n)
    assert T.embed(gamma_expand(x, n)) == T.power(x)

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import polys
from gts.modgb import (
    POT,
    TOP,
    AmbientMismatch,
    FreeModule,
    QuotientRing,
    Submodule,
    intersect,
    kernel,
    lift,
    preimage,
    using_order,
)
from gts.polyring import CoefField, PolyRing

R = PolyRing(CoefField(2), ("s", "t"))
R3 = PolyRing(CoefField(3), ("s", "t"))
Q = PolyRing(CoefField(None), ("s", "t"))


def vec(F, *coords):
    return F([F.base(c) for c in coords])


def test_quotient_reduce():
    A = QuotientRing(R.extend(["z"]), ["z*(s+t)"])
    assert A.is_zero(A.base("z*s + z*t"))
    assert A.reduce(A.base("z*s")) == A.reduce(A.base("z*t"))
    assert not A.is_zero(A.base("z"))


def test_membership_and_witness():
    F = FreeModule(R, 2)
    U = Submodule(F, [vec(F, "s", "t")])
    assert U.contains(vec(F, "s^2", "s*t"))
    assert not U.contains(vec(F, "s", "0"))
    cmp = F.full().is_subset(U)
    assert not cmp.holds and cmp.witness is not None
    assert not cmp.certificate.is_zero()


def test_membership_over_quotient():
    A = QuotientRing(R.extend(["z"]), ["z*(s+t)"])
    F = FreeModule(A, 2)
    U = Submodule(F, [vec(F, "s", "t")])
    # z*(s, t) = z*s*(1, 1) and z*(s+t) = 0, so z*s*(1,1) is in U
    assert U.contains(vec(F, "z*s", "z*s"))


def test_intersect_methods_agree():
    F = FreeModule(R3, 2)
    U = Submodule(F, [vec(F, "s", "0"), vec(F, "t", "t")])
    V = Submodule(F, [vec(F, "s*t", "0"), vec(F, "0", "s")])
    a = intersect(U, V, "tag")
    b = intersect(U, V, "syzygy")
    assert a.equals(b)
    assert a.is_subset(U) and a.is_subset(V)


def test_preimage_and_kernel():
    F = FreeModule(R, 1)
    cols = [vec(F, "s"), vec(F, "t")]
    K = kernel(cols)
    D = FreeModule(R, 2)
    assert K.equals(Submodule(D, [vec(D, "t", "s")]))
    P = preimage(cols, Submodule(F, [vec(F, "s")]))
    assert P.contains(vec(D, "1", "0"))
    assert not P.contains(vec(D, "0", "1"))


def test_lift():
    F = FreeModule(R3, 2)
    U = Submodule(F, [vec(F, "s", "0"), vec(F, "t", "s")])
    v = vec(F, "s^2 + t^2", "s*t")
    c = lift(v, U)
    assert c is not None
    assert c[0] * U.gens[0] + c[1] * U.gens[1] == v
    assert lift(vec(F, "1", "0"), U) is None


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        Submodule(FreeModule(R, 2), [FreeModule(R, 3).basis(0)])


def _random_submodule(data, ring, rank, k):
    F = FreeModule(ring, rank)
    gens = [F([data.draw(polys(ring)) for _ in range(rank)]) for _ in range(k)]
    return F, Submodule(F, gens)


@settings(max_examples=30)
@given(st.data())
def test_intersection_properties(data):
    F, U = _random_submodule(data, R3, 2, 2)
    _, V0 = _random_submodule(data, R3, 2, 2)
    V = Submodule(F, V0.gens)
    W = intersect(U, V)
    assert W.is_subset(U) and W.is_subset(V)
    assert intersect(U, U).equals(U)
    assert intersect(U, F.full()).equals(U)
    # an element of U lies in U ∩ V exactly when it lies in V
    x = data.draw(polys(R3)) * U.gens[0] + data.draw(polys(R3)) * U.gens[1]
    assert W.contains(x) == V.contains(x)
    y = V.gens[0].coords[0] * U.gens[0]
    assert W.contains(y) == V.contains(y)


@settings(max_examples=30)
@given(st.data())
def test_preimage_correctness(data):
    F, W = _random_submodule(data, R, 2, 2)
    cols = [F([data.draw(polys(R)) for _ in range(2)]) for _ in range(2)]
    P = preimage(cols, W)
    for c in P.gens:
        img = F.zero()
        for ci, col in zip(c.coords, cols):
            img = img + ci * col
        assert W.contains(img)
    # anything mapping into W is in the preimage
    for g in W.gens:
        c = lift(g, Submodule(F, cols))
        if c is not None:
            assert P.contains(P.ambient(list(c)))


@settings(max_examples=25)
@given(st.data())
def test_orders_agree(data):
    F, U = _random_submodule(data, Q, 2, 2)
    v = F([data.draw(polys(Q)) for _ in range(2)])
    inside = data.draw(polys(Q)) * U.gens[0] + data.draw(polys(Q)) * U.gens[1]
    for x in (v, inside, v + inside):
        with using_order(TOP):
            a = Submodule(F, U.gens).contains(x)
        with using_order(POT):
            assert Submodule(F, U.gens).order == POT
            b = Submodule(F, U.gens).contains(x)
        assert a == b
    with using_order(POT):
        assert Submodule(F, U.gens).contains(inside)

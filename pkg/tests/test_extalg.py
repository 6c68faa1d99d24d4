from __future__ import annotations

import math
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import char3_module, nine_module, polys, random_module, residue_field, st_module
from gts.extalg import (
    algebra_degreewise_check,
    diagonal_submodule,
    polarization_holds,
    sym_power,
    ts_module_structure_obstruction,
    wedge_kernel_check,
)
from gts.gammats import PresentedModule, canonical_data
from gts.modgb import FreeModule
from gts.polyring import CoefField, PolyRing
from gts.tensoralg import TensorPower


def test_sym_power_small_degrees():
    M = char3_module()
    assert sym_power(M, 1).relations == M.relations
    S0 = sym_power(M, 0)
    assert S0.rank == 1 and not S0.relations


def test_sym_power_degree_two_by_hand():
    M = char3_module()
    S2 = sym_power(M, 2)
    R = M.ring.base
    assert S2.rank == 3  # m1^2, m1*m2, m2^2
    rows = {tuple(r.coords) for r in S2.relations}
    # (s m1 - t m2)·m1 and (s m1 - t m2)·m2
    assert rows == {(R("s"), R("-t"), R.zero()), (R.zero(), R("s"), R("-t"))}


def test_sym_power_counts():
    for M in (char3_module(), residue_field(2), nine_module(False)):
        for k in range(4):
            assert sym_power(M, k).rank == math.comb(M.rank + k - 1, k)


def test_degreewise_examples():
    (a,) = algebra_degreewise_check(residue_field(3), 3, [1])
    assert not a.report.injective.holds
    (b,) = algebra_degreewise_check(char3_module(), 3, [1])
    assert not b.report.surjective.holds
    R = PolyRing(CoefField(3), ("s", "t"))
    for d in algebra_degreewise_check(PresentedModule(R, 2, ()), 3, [1, 2]):
        assert d.report.injective.holds and d.report.surjective.holds


def test_diagonal_equals_orbit_span():
    R = PolyRing(CoefField(2), ("s",))
    for m in range(1, 5):
        F = FreeModule(R, m)
        assert diagonal_submodule(F).equals(TensorPower(F, 2).span_submodule())


@settings(max_examples=25)
@given(st.sampled_from([2, 3, None]), st.data())
def test_polarization(p, data):
    R = PolyRing(CoefField(p), ("s", "t"))
    F = FreeModule(R, 3)
    x = F([data.draw(polys(R)) for _ in range(3)])
    y = F([data.draw(polys(R)) for _ in range(3)])
    assert polarization_holds(x, y)


def test_wedge_on_free_and_examples():
    R = PolyRing(CoefField(2), ("s",))
    free = wedge_kernel_check(PresentedModule(R, 2, ()))
    assert free.holds and not free.kernel_proper
    for M in (st_module(), char3_module(), residue_field(2)):
        assert wedge_kernel_check(M).holds
    rep = wedge_kernel_check(nine_module(True))
    assert rep.holds and rep.kernel_proper


def test_obstruction_found_and_sound():
    M = nine_module(True)
    rep = ts_module_structure_obstruction(M)
    assert rep.found
    D = canonical_data(M, 2)
    assert D.in_L(rep.eta)
    u = M.ring.base("x1*z2 + y2*z1") * D.T.basis((0, 1))
    assert D.span_plus_N.contains(rep.eta - u)
    assert not rep.certificate.is_zero()


def test_no_obstruction_for_free_and_two_generators():
    R = PolyRing(CoefField(2), ("s", "t"))
    assert not ts_module_structure_obstruction(PresentedModule(R, 3, ())).found
    rng = random.Random(7)
    for p in (2, 3):
        R = PolyRing(CoefField(p), ("s", "t"))
        for _ in range(5):
            assert not ts_module_structure_obstruction(random_module(rng, R, 2, 2)).found

from __future__ import annotations

import ast
import math
from fractions import Fraction
from itertools import permutations
from pathlib import Path

import pytest

from conftest import char3_module, nine_module, residue_field, st_module
from gts import oracle
from gts.gammats import PresentedModule, check_surjective
from gts.oracle import (
    Echelon,
    InhomogeneousInput,
    brute_fixed_subspace,
    element_degree,
    graded_verdict,
    nullspace,
)
from gts.polyring import CoefField, Grading, PolyRing

GF2 = CoefField(2)
QQ = CoefField(None)


def test_oracle_is_independent_of_groebner_code():
    tree = ast.parse(Path(oracle.__file__).read_text())
    imported = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            imported.add(node.module or "")
        elif isinstance(node, ast.Import):
            imported.update(a.name for a in node.names)
    assert not any(m.endswith(("modgb", "_gbcore", "tensoralg", "gammats")) for m in imported)


def test_echelon_rank():
    E = Echelon(QQ)
    assert E.add({0: Fraction(1), 1: Fraction(2)})
    assert E.add({1: Fraction(1)})
    assert not E.add({0: Fraction(3), 1: Fraction(7)})
    assert E.rank == 2


def test_nullspace():
    basis = nullspace([{0: 1, 1: 1}], 3, GF2)
    assert len(basis) == 2


def test_fixed_subspaces():
    ident = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
    assert len(brute_fixed_subspace([ident], GF2)) == 3
    swap = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            swap[2 * j + i][2 * i + j] = 1
    assert len(brute_fixed_subspace([swap], GF2)) == 3
    # regular representation of S3 over QQ
    group = list(permutations(range(3)))
    index = {g: k for k, g in enumerate(group)}

    def left(h):
        mat = [[0] * 6 for _ in range(6)]
        for g in group:
            hg = tuple(h[g[i]] for i in range(3))
            mat[index[hg]][index[g]] = 1
        return mat

    assert len(brute_fixed_subspace([left((1, 0, 2)), left((0, 2, 1))], QQ)) == 1


@pytest.mark.parametrize("p", [2, 3])
def test_residue_field_defects(p):
    tab = graded_verdict(residue_field(p), p, d_max=6)
    by_deg = {r.degree: r for r in tab.rows}
    assert tab.first_injectivity_defect == 1
    for d in range(1, 7):
        assert by_deg[d].injectivity_defect == (1 if d < p else 0)
    assert tab.surjective_up_to_dmax


def test_char3_surjectivity_defect_degree_one():
    M = char3_module()
    tab = graded_verdict(M, 3, d_max=3)
    assert tab.first_surjectivity_defect == 1
    rep = check_surjective(M, 3)
    assert element_degree(rep.witness.reduced().coords, 2, 3, tab.shifts) == 1


def test_free_module_no_defects_and_layer_dimension():
    R = PolyRing(CoefField(3), ("s", "t"))
    for m, n in [(2, 2), (2, 3), (3, 2)]:
        tab = graded_verdict(PresentedModule(R, m, ()), n, d_max=3)
        assert tab.injective_up_to_dmax and tab.surjective_up_to_dmax
        assert tab.rows[0].degree == 0
        assert tab.rows[0].fixed_dim == math.comb(m + n - 1, n)


def test_st_module_agrees():
    tab = graded_verdict(st_module(), 2, d_max=4)
    assert tab.injective_up_to_dmax and tab.surjective_up_to_dmax


def test_multigrading_labels():
    M = nine_module(True)
    G = Grading(tuple((1, i) for _ in range(3) for i in (1, 2, 3)))
    tab = graded_verdict(M, 2, d_max=2, grading=G)
    assert tab.first_surjectivity_defect == 2
    assert tab.defect_labels("surjective") == [(2, 2)]


def test_inhomogeneous_rejected():
    R = PolyRing(CoefField(2), ("x",))
    with pytest.raises(InhomogeneousInput):
        graded_verdict(PresentedModule.from_rows(R, 1, [["x + 1"]]), 2)

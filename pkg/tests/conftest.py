from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gts.gammats import PresentedModule, clear_cache
from gts.modgb import QuotientRing
from gts.polyring import CoefField, PolyRing

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")

NINE = ("x1", "x2", "x3", "y1", "y2", "y3", "z1", "z2", "z3")
IDEAL_45 = ["x1*z2 + y2*z1 + x2*z1 + y1*z2"] + [
    f"x{i}*z{j} + y{j}*z{i}" for i in (1, 2, 3) for j in (1, 2, 3) if {i, j} != {1, 2}
]


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(autouse=True)
def _fresh_cache():
    clear_cache()
    yield


def residue_field(p: int) -> PresentedModule:
    R = PolyRing(CoefField(p), ("x",))
    return PresentedModule.from_rows(R, 1, [["x"]], "B")


def st_module() -> PresentedModule:
    R = PolyRing(CoefField(2), ("s", "t"))
    return PresentedModule.from_rows(R, 2, [["s", "t"]])


def st_extension() -> QuotientRing:
    R = PolyRing(CoefField(2), ("s", "t", "z"))
    return QuotientRing(R, [R("z*(s+t)")])


def char3_module(p: int = 3) -> PresentedModule:
    R = PolyRing(CoefField(p), ("s", "t"))
    return PresentedModule.from_rows(R, 2, [["s", "-t"]])


def nine_ring() -> PolyRing:
    return PolyRing(CoefField(2), NINE)


def nine_quotient() -> QuotientRing:
    R = nine_ring()
    return QuotientRing(R, [R(f) for f in IDEAL_45])


def nine_module(over_quotient: bool) -> PresentedModule:
    A = nine_quotient() if over_quotient else nine_ring()
    return PresentedModule.from_rows(A, 3, [["z1", "z2", "z3"]], "M'" if over_quotient else "M")


# --- strategies -----------------------------------------------------------------------


@st.composite
def polys(draw, ring: PolyRing, max_deg: int = 2, max_terms: int = 4, coeffs=None):
    """Random polynomial of total degree <= max_deg."""
    p = ring.field.p
    coeff = coeffs or (st.integers(0, p - 1) if p else st.integers(-3, 3))
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        d = draw(st.integers(0, max_deg))
        exps = [0] * ring.nvars
        for _ in range(d):
            exps[draw(st.integers(0, ring.nvars - 1))] += 1
        terms[tuple(exps)] = draw(coeff)
    return ring.from_terms(terms)


@st.composite
def homogeneous_polys(draw, ring: PolyRing, deg: int):
    p = ring.field.p
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        exps = [0] * ring.nvars
        for _ in range(deg):
            exps[draw(st.integers(0, ring.nvars - 1))] += 1
        terms[tuple(exps)] = draw(st.integers(0, p - 1) if p else st.integers(-3, 3))
    return ring.from_terms(terms)


def random_module(rng, ring, rank: int, nrels: int, max_deg: int = 2, homogeneous: bool = True):
    """Presented module with random relations; homogeneous relations share one degree per row."""
    p = ring.field.p
    rows = []
    for _ in range(nrels):
        d = rng.randint(1, max_deg)
        row = []
        for _ in range(rank):
            terms = {}
            for _ in range(rng.randint(0, 2)):
                deg = d if homogeneous else rng.randint(0, d)
                exps = [0] * ring.nvars
                for _ in range(deg):
                    exps[rng.randrange(ring.nvars)] += 1
                terms[tuple(exps)] = rng.randint(1, p - 1) if p else rng.randint(-3, 3)
            row.append(ring.from_terms(terms))
        rows.append(row)
    return PresentedModule.from_rows(ring, rank, rows)

"""Graded algebras, the exterior square, and the obstruction to a TS²-module
structure on ∧².

For a graded A-algebra B = S_A(M) the canonical map on B splits into the maps
on its graded pieces S^k(M), so a failure in one degree k is a failure for B.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gammats import (
    CanonicalMapReport,
    InternalError,
    PresentedModule,
    canonical_data,
    check_canonical,
    check_surjective,
    tensor_text,
)
from .modgb import FreeModule, ModElement, Submodule, intersect
from .tensoralg import TensorPower, multi_indices


def sym_power(M: PresentedModule, k: int) -> PresentedModule:
    """S^k(M) on the degree-k monomials in m_1..m_m with relations p·(degree k−1 monomials)."""
    if k < 0:
        raise ValueError("symmetric power degree must be >= 0")
    A = M.ring
    if k == 0:
        return PresentedModule(A, 1, (), f"S^0({M.name})")
    monos = multi_indices(M.rank, k)
    index = {mu: i for i, mu in enumerate(monos)}
    G = FreeModule(A, len(monos))
    R = A.base
    rels = []
    for p in M.relations:
        for mu in multi_indices(M.rank, k - 1):
            coords = [R.zero()] * len(monos)
            for i, a in enumerate(p.coords):
                if a:
                    nu = list(mu)
                    nu[i] += 1
                    j = index[tuple(nu)]
                    coords[j] = coords[j] + a
            v = ModElement(G, tuple(coords))
            if not v.is_zero():
                rels.append(v)
    return PresentedModule(A, len(monos), tuple(rels), f"S^{k}({M.name})")


@dataclass
class DegreeReport:
    k: int
    report: CanonicalMapReport

    def to_dict(self) -> dict:
        return {"k": self.k, **self.report.to_dict()}


def algebra_degreewise_check(M: PresentedModule, n: int, degrees: list[int],
                             guardrail: int | None = None) -> list[DegreeReport]:
    """Canonical-map checks on the graded pieces S^k(M) of B = S_A(M).

    A failure in any degree is a failure of Γⁿ_A(B) → TSⁿ_A(B).
    """
    return [DegreeReport(k, check_canonical(sym_power(M, k), n, guardrail)) for k in degrees]


def diagonal_submodule(F: FreeModule) -> Submodule:
    """D ⊆ T²(F) generated by e_i⊗e_i and e_i⊗e_j + e_j⊗e_i."""
    T = TensorPower(F, 2)
    gens = []
    for i in range(F.rank):
        gens.append(T.basis((i, i)))
        for j in range(i + 1, F.rank):
            gens.append(T.basis((i, j)) + T.basis((j, i)))
    return Submodule(T.space, gens)


def polarization_holds(x: ModElement, y: ModElement) -> bool:
    """x⊗y + y⊗x = (x+y)⊗(x+y) − x⊗x − y⊗y in T²(F)."""
    T = TensorPower(x.ambient, 2)
    lhs = T.tensor([x, y]) + T.tensor([y, x])
    rhs = T.power(x + y) - T.power(x) - T.power(y)
    return lhs == rhs


@dataclass
class WedgeReport:
    holds: bool
    diagonal_in_L: bool
    kernel_is_image: bool
    kernel_proper: bool

    @property
    def verdict(self) -> str:
        return "HOLDS" if self.holds else "FAIL"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "diagonal_in_L": self.diagonal_in_L,
            "kernel_equals_image": self.kernel_is_image,
            "kernel_proper_in_TS2": self.kernel_proper,
        }


def wedge_kernel_check(M: PresentedModule, guardrail: int | None = None) -> WedgeReport:
    """ker(TS²(M) → ∧²(M)) equals the image of Γ²(M), checked as (D+N) ∩ L = D+N."""
    data = canonical_data(M, 2, guardrail)
    D = diagonal_submodule(M.F)
    DN = Submodule(data.space, D.gens + data.N.gens)
    in_L = bool(DN.is_subset(data.L))
    pulled = intersect(data.L, DN)
    same = bool(pulled.equals(DN))
    proper = not data.L.is_subset(DN).holds
    return WedgeReport(in_L and same, in_L, same, proper)


@dataclass
class ObstructionReport:
    found: bool
    eta: ModElement | None = None
    eta_text: str | None = None
    certificate: ModElement | None = None

    def to_dict(self) -> dict:
        if not self.found:
            return {"obstruction": "no obstruction found"}
        return {
            "obstruction": "found",
            "eta": self.eta_text,
            "coordinates": [c.to_text() for c in self.eta.coords],
            "certificate": [c.to_text() for c in self.certificate.coords],
        }


def ts_module_structure_obstruction(M: PresentedModule, guardrail: int | None = None) -> ObstructionReport:
    """An η ∈ TS²(M) with nonzero image in ∧²(M), if the canonical map is not surjective.

    Such an η rules out a TS²-module structure on ∧² making T² → ∧² linear.
    """
    rep = check_surjective(M, 2, guardrail)
    if rep.holds:
        return ObstructionReport(False)
    data = canonical_data(M, 2, guardrail)
    eta = rep.witness
    D = diagonal_submodule(M.F)
    DN = Submodule(data.space, D.gens + data.N.gens)
    if not data.in_L(eta):
        raise InternalError("obstruction element is not symmetric in T²(M)")
    nf = DN.normal_form(eta)
    if nf.is_zero():
        raise InternalError("obstruction element vanishes in the exterior square")
    return ObstructionReport(True, eta, tensor_text(eta, M.rank, 2, M.labels()), nf)

"""The canonical map Γⁿ_A(M) → TSⁿ_A(M) for a finitely presented module.

With M = F/P, F = A^m, everything is computed inside the free module Tⁿ(F):

* N   kernel of Tⁿ(F) → Tⁿ(M), spanned by relations inserted into one slot;
* K   ⟨γ^s(p) × e_ν⟩, the relations of Γⁿ(M) as a quotient of TSⁿ(F);
* N^S = N ∩ Span(e_ν), the symmetric part of N;
* L   = ⋂_j {x : (1 − σ_j) x ∈ N}, whose image in Tⁿ(M) is TSⁿ(M).

The map is injective iff K = N^S and surjective iff Span(e_ν) + N = L.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

from .modgb import (
    FreeModule,
    ModElement,
    ModuleOrder,
    Presentation,
    QuotientRing,
    Submodule,
    as_quotient,
    current_order,
    intersect,
    lift,
    preimage,
    sorted_by_degree,
)
from .polyring import Polynomial
from .tensoralg import (
    OrbitTensor,
    TensorPower,
    gamma_expand,
    multi_indices,
    orbit_basis,
    representative,
    shuffle,
    symmetric_generators,
)


class InternalError(RuntimeError):
    """A computed object violated an invariant that must always hold."""


@dataclass(frozen=True)
class PresentedModule:
    """M = A^rank / ⟨relations⟩."""

    ring: QuotientRing
    rank: int
    relations: tuple[ModElement, ...] = ()
    name: str = "M"

    def __post_init__(self):
        object.__setattr__(self, "ring", as_quotient(self.ring))
        if self.rank < 1:
            raise ValueError("a presented module needs at least one generator")
        F = self.F
        rels = []
        for r in self.relations:
            if not isinstance(r, ModElement):
                r = F(r)
            elif r.ambient != F:
                raise ValueError("relation outside the free cover")
            rels.append(r)
        object.__setattr__(self, "relations", tuple(rels))

    @classmethod
    def from_rows(cls, ring, rank: int, rows: Sequence[Sequence], name: str = "M") -> PresentedModule:
        A = as_quotient(ring)
        F = FreeModule(A, rank)
        return cls(A, rank, tuple(F([A.base(c) for c in row]) for row in rows), name)

    @property
    def F(self) -> FreeModule:
        return FreeModule(self.ring, self.rank)

    def relation_submodule(self) -> Submodule:
        return Submodule(self.F, self.relations)

    def is_zero_module(self) -> bool:
        return bool(self.F.full().is_subset(self.relation_submodule()))

    def is_free_presentation(self) -> bool:
        zero = self.F.zero_submodule()
        return all(zero.contains(r) for r in self.relations)

    def labels(self) -> list[str]:
        return [f"m{i + 1}" for i in range(self.rank)]


# --- pretty printing ---------------------------------------------------------------------


def _coef_text(c: Polynomial) -> str:
    s = c.to_text()
    return f"({s})" if len(c.terms) > 1 else s


def _term_text(c: Polynomial, basis: str) -> str:
    s = _coef_text(c)
    if s == "1":
        return basis
    return f"{s}*{basis}"


def tensor_text(v: ModElement, m: int, n: int, labels: Sequence[str] | None = None) -> str:
    """``v ∈ Tⁿ(F)`` written with generator symbols, coefficients reduced mod I."""
    labels = list(labels) if labels else [f"m{i + 1}" for i in range(m)]
    v = v.reduced()
    parts = []
    for k, t in enumerate(itertools.product(range(m), repeat=n)):
        c = v.coords[k]
        if c:
            parts.append(_term_text(c, "⊗".join(labels[i] for i in t) if n else "1"))
    return " + ".join(parts) or "0"


def orbit_text(z: OrbitTensor, labels: Sequence[str] | None = None) -> str:
    labels = list(labels) if labels else [f"m{i + 1}" for i in range(z.m)]
    parts = []
    for nu in multi_indices(z.m, z.n):
        c = z.coords.get(nu)
        if not c:
            continue
        rep = representative(nu)
        sym = "⊗".join(labels[i] for i in rep) if rep else "1"
        if len(set(rep)) > 1:
            sym = f"sym({sym})"
        parts.append(_term_text(c, sym))
    return " + ".join(parts) or "0"


# --- reports ----------------------------------------------------------------------------


@dataclass
class CheckReport:
    """Verdict for one property, with a re-verified witness when it fails."""

    kind: str
    n: int
    holds: bool
    witness: ModElement | None = None
    certificate: ModElement | None = None
    witness_text: str | None = None
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "HOLDS" if self.holds else "FAIL"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "verdict": self.verdict}
        if self.note:
            d["note"] = self.note
        if self.witness is not None:
            d["witness"] = {
                "class": self.witness_text,
                "coordinates": [c.to_text() for c in self.witness.coords],
                "certificate": [c.to_text() for c in self.certificate.coords] if self.certificate else None,
            }
        d.update(self.extra)
        return d


@dataclass
class CanonicalMapReport:
    n: int
    injective: CheckReport
    surjective: CheckReport
    timing: float | None = None

    def to_dict(self) -> dict:
        d = {"n": self.n, "injective": self.injective.to_dict(), "surjective": self.surjective.to_dict()}
        if self.timing is not None:
            d["seconds"] = round(self.timing, 3)
        return d


# --- the per-(M, n) computation ---------------------------------------------------------


class CanonicalMapData:
    """Lazily computed submodules of Tⁿ(F) attached to (M, n)."""

    def __init__(self, M: PresentedModule, n: int, guardrail: int | None = None):
        if n < 0:
            raise ValueError("tensor degree must be >= 0")
        self.M = M
        self.n = n
        self.T = TensorPower(M.F, n, guardrail)

    @property
    def space(self) -> FreeModule:
        return self.T.space

    @cached_property
    def N(self) -> Submodule:
        T, M, n = self.T, self.M, self.n
        gens = []
        seen = set()
        for p in M.relations:
            for q in range(n):
                for others in itertools.product(range(M.rank), repeat=n - 1):
                    g = T.insert(p, q, others)
                    if not g.is_zero() and g not in seen:
                        seen.add(g)
                        gens.append(g)
        return Submodule(self.space, gens)

    @cached_property
    def K_orbits(self) -> list[OrbitTensor]:
        M, n = self.M, self.n
        R = M.ring.base
        out = []
        for p in M.relations:
            for s in range(1, n + 1):
                g = gamma_expand(p, s)
                for y in orbit_basis(n - s, M.rank, R) if s < n else [OrbitTensor.unit(R, M.rank)]:
                    z = shuffle(g, y)
                    if z.coords and z not in out:
                        out.append(z)
        return out

    @cached_property
    def K(self) -> Submodule:
        return Submodule(self.space, [self.T.embed(z) for z in self.K_orbits])

    @cached_property
    def span(self) -> Submodule:
        return self.T.span_submodule()

    @cached_property
    def invariants(self) -> Submodule:
        return intersect(self.N, self.span)

    @cached_property
    def L(self) -> Submodule:
        T = self.T
        L = None
        for g in symmetric_generators(self.n):
            Lj = preimage(T.one_minus_sigma_columns(g), self.N)
            L = Lj if L is None else intersect(L, Lj)
        if L is None:
            return self.space.full()
        return L

    @cached_property
    def span_plus_N(self) -> Submodule:
        return Submodule(self.space, list(self.T.orbit_vectors) + list(self.N.gens))

    def in_L(self, v: ModElement) -> bool:
        return all(self.N.contains(v - self.T.sigma(g, v)) for g in symmetric_generators(self.n))

    # -- presentations -------------------------------------------------------

    @cached_property
    def orbit_space(self) -> FreeModule:
        return FreeModule(self.M.ring, len(multi_indices(self.M.rank, self.n)))

    @cached_property
    def ts_generators(self) -> tuple[ModElement, ...]:
        """Orbit sums followed by the generators of L not already in Span + N."""
        S = self.span_plus_N
        extra = []
        for g in sorted_by_degree(self.L.gens):
            if not S.contains(g):
                extra.append(g)
                S = Submodule(self.space, S.gens + (g,))
        return tuple(self.T.orbit_vectors) + tuple(extra)

    @cached_property
    def ts_relations(self) -> Submodule:
        return preimage(list(self.ts_generators), self.N)


@lru_cache(maxsize=64)
def _cached_data(M: PresentedModule, n: int, guardrail: int | None, order: ModuleOrder) -> CanonicalMapData:
    return CanonicalMapData(M, n, guardrail)


def canonical_data(M: PresentedModule, n: int, guardrail: int | None = None) -> CanonicalMapData:
    """Shared per-(M, n) data, cached per module order."""
    return _cached_data(M, n, guardrail, current_order())


def clear_cache():
    _cached_data.cache_clear()


# --- public operations ------------------------------------------------------------------


def compute_N(M: PresentedModule, n: int, guardrail: int | None = None) -> Submodule:
    return canonical_data(M, n, guardrail).N


def compute_K(M: PresentedModule, n: int, guardrail: int | None = None) -> Submodule:
    return canonical_data(M, n, guardrail).K


def compute_K_orbits(M: PresentedModule, n: int, guardrail: int | None = None) -> list[OrbitTensor]:
    return canonical_data(M, n, guardrail).K_orbits


def compute_invariants(M: PresentedModule, n: int, guardrail: int | None = None) -> Submodule:
    return canonical_data(M, n, guardrail).invariants


def compute_L(M: PresentedModule, n: int, guardrail: int | None = None) -> Submodule:
    return canonical_data(M, n, guardrail).L


def _degenerate(M: PresentedModule, n: int, kind: str) -> CheckReport | None:
    if n == 0:
        return CheckReport(kind, n, True, note="degree 0: both sides equal A")
    if n == 1:
        return CheckReport(kind, n, True, note="degree 1: both sides equal M")
    if M.is_zero_module():
        return CheckReport(kind, n, True, note="zero module: both sides vanish")
    return None


def check_injective(M: PresentedModule, n: int, guardrail: int | None = None,
                    verify: bool = True) -> CheckReport:
    """Γⁿ(M) → TSⁿ(M) is injective iff K = N^S."""
    short = _degenerate(M, n, "injective")
    if short is not None:
        return short
    D = canonical_data(M, n, guardrail)
    if not D.K.is_subset(D.invariants):
        raise InternalError("K is not contained in the symmetric part of N")
    cmp = D.invariants.is_subset(D.K)
    if cmp.holds:
        return CheckReport("injective", n, True)
    w, nf = cmp.witness, cmp.certificate
    if verify:
        if not D.N.contains(w) or not D.T.is_symmetric(w, D.space.zero_submodule()):
            raise InternalError("injectivity witness is not a symmetric element of N")
        if D.K.contains(w):
            raise InternalError("injectivity witness lies in K")
    return CheckReport(
        "injective", n, False, w, nf, tensor_text(w, M.rank, n, M.labels()),
        note="witness lies in N^S but not in K",
        extra={"witness_orbit": orbit_text(D.T.to_orbit(w.reduced()), M.labels())},
    )


def check_surjective(M: PresentedModule, n: int, guardrail: int | None = None,
                     verify: bool = True) -> CheckReport:
    """Γⁿ(M) → TSⁿ(M) is surjective iff Span(e_ν) + N = L."""
    short = _degenerate(M, n, "surjective")
    if short is not None:
        return short
    D = canonical_data(M, n, guardrail)
    cmp = D.L.is_subset(D.span_plus_N)
    if cmp.holds:
        return CheckReport("surjective", n, True)
    w, nf = cmp.witness, cmp.certificate
    if verify:
        if not D.in_L(w):
            raise InternalError("surjectivity witness does not have a symmetric image")
        if D.span_plus_N.contains(w):
            raise InternalError("surjectivity witness lies in Span + N")
    return CheckReport(
        "surjective", n, False, w, nf, tensor_text(w, M.rank, n, M.labels()),
        note="witness has a symmetric image in Tⁿ(M) that does not lift to a symmetric tensor",
    )


def check_canonical(M: PresentedModule, n: int, guardrail: int | None = None,
                    verify: bool = True) -> CanonicalMapReport:
    t0 = time.perf_counter()
    inj = check_injective(M, n, guardrail, verify)
    sur = check_surjective(M, n, guardrail, verify)
    return CanonicalMapReport(n, inj, sur, time.perf_counter() - t0)


def gamma_presentation(M: PresentedModule, n: int, guardrail: int | None = None) -> PresentedModule:
    """Γⁿ(M) = TSⁿ(F)/K on the orbit basis."""
    if n == 0:
        return PresentedModule(M.ring, 1, (), f"Γ^0({M.name})")
    D = canonical_data(M, n, guardrail)
    O = D.orbit_space
    return PresentedModule(M.ring, O.rank, tuple(z.vector(O) for z in D.K_orbits), f"Γ^{n}({M.name})")


@dataclass(frozen=True)
class TSPresentation:
    """TSⁿ(M) ≅ L/N presented on ``generators`` ⊆ L."""

    module: PresentedModule
    generators: tuple[ModElement, ...]


def ts_presentation(M: PresentedModule, n: int, guardrail: int | None = None) -> TSPresentation:
    if n == 0:
        return TSPresentation(PresentedModule(M.ring, 1, (), f"TS^0({M.name})"), ())
    D = canonical_data(M, n, guardrail)
    gens = D.ts_generators
    rels = tuple(g for g in D.ts_relations.gens if not g.reduced().is_zero())
    return TSPresentation(PresentedModule(M.ring, len(gens), rels, f"TS^{n}({M.name})"), gens)


def ts_as_presentation(M: PresentedModule, n: int, guardrail: int | None = None) -> Presentation:
    D = canonical_data(M, n, guardrail)
    return Presentation(D.ts_generators, D.ts_relations)


def canonical_map_matrix(M: PresentedModule, n: int, guardrail: int | None = None) -> list[list[Polynomial]]:
    """Matrix (rows: TS generators, columns: orbit basis) of Γⁿ(M) → TSⁿ(M).

    Each e_ν is divided by the TS generators together with N; the N part is
    discarded.  Well-definedness (K maps into the relations) is asserted.
    """
    R = M.ring.base
    if n == 0:
        return [[R.one()]]
    D = canonical_data(M, n, guardrail)
    gens = list(D.ts_generators)
    U = Submodule(D.space, gens + list(D.N.gens))
    cols = []
    for e in D.T.orbit_vectors:
        c = lift(e, U)
        if c is None:
            raise InternalError("orbit sum is not in L")
        cols.append(c[: len(gens)])
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(gens))]
    target = FreeModule(M.ring, len(gens))
    rel = D.ts_relations
    for z in D.K_orbits:
        img = target.zero()
        for j, nu in enumerate(multi_indices(M.rank, n)):
            a = z.coords.get(nu)
            if a:
                img = img + a * target([rows[i][j] for i in range(len(gens))])
        if not rel.contains(img):
            raise InternalError("canonical map does not send K into the TS relations")
    return rows


def presented_map_verdicts(M: PresentedModule, n: int, guardrail: int | None = None) -> tuple[bool, bool]:
    """(injective, surjective) of the canonical map computed on the two presentations."""
    D = canonical_data(M, n, guardrail)
    rows = canonical_map_matrix(M, n, guardrail)
    r = len(rows)
    target = FreeModule(M.ring, r)
    cols = [target([rows[i][j] for i in range(r)]) for j in range(len(rows[0]))]
    rel = D.ts_relations
    k_rel = Submodule(D.orbit_space, [z.vector(D.orbit_space) for z in D.K_orbits])
    injective = bool(preimage(cols, rel).is_subset(k_rel))
    surjective = bool(target.full().is_subset(Submodule(target, cols + list(rel.gens))))
    return injective, surjective

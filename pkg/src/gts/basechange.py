"""The base-change map TSⁿ_A(M) ⊗_A A′ → TSⁿ_{A′}(M ⊗_A A′).

TSⁿ_A(M) is presented as L/N on generators g_1..g_r; tensoring that
presentation with A′ presents the source, and the map sends g_i to the class
of its image ḡ_i in Tⁿ(F′).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gammats import (
    CanonicalMapData,
    CheckReport,
    InternalError,
    PresentedModule,
    canonical_data,
    check_injective,
    check_surjective,
    tensor_text,
)
from .modgb import FreeModule, ModElement, QuotientRing, Submodule, as_quotient, preimage
from .polyring import Polynomial


class IllFormedRingMap(ValueError):
    """The variable images do not define a ring map A → A′."""


@dataclass(frozen=True)
class BaseExtension:
    """A ring map R/I → R′/I′ given by the images of the variables of R."""

    source: QuotientRing
    target: QuotientRing
    images: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "source", as_quotient(self.source))
        object.__setattr__(self, "target", as_quotient(self.target))
        S, T = self.source, self.target
        if S.field != T.field:
            raise IllFormedRingMap("source and target have different coefficient fields")
        if len(self.images) != S.nvars:
            raise IllFormedRingMap(f"need {S.nvars} variable images, got {len(self.images)}")
        imgs = tuple(T.base(f) for f in self.images)
        object.__setattr__(self, "images", imgs)
        for g in S.ideal_gb:
            if not T.is_zero(self.map_poly(g)):
                raise IllFormedRingMap(f"ideal generator {g} does not map into the target ideal")

    @classmethod
    def identity(cls, A) -> BaseExtension:
        A = as_quotient(A)
        return cls(A, A, A.base.gens())

    @classmethod
    def by_name(cls, source, target) -> BaseExtension:
        """Send each source variable to the target variable of the same name."""
        S, T = as_quotient(source), as_quotient(target)
        missing = [v for v in S.vars if v not in T.vars]
        if missing:
            raise IllFormedRingMap(f"target ring lacks variables {missing}")
        return cls(S, T, tuple(T.base.gen(v) for v in S.vars))

    def map_poly(self, f: Polynomial) -> Polynomial:
        return f.substitute(self.images, self.target.base)

    def map_vec(self, v: ModElement, ambient: FreeModule) -> ModElement:
        return ModElement(ambient, tuple(self.map_poly(c) for c in v.coords))


def extend_module(M: PresentedModule, e: BaseExtension) -> PresentedModule:
    if M.ring != e.source:
        raise IllFormedRingMap("module is not defined over the source ring")
    F2 = FreeModule(e.target, M.rank)
    return PresentedModule(e.target, M.rank, tuple(e.map_vec(r, F2) for r in M.relations), M.name + "'")


def _setup(M: PresentedModule, n: int, e: BaseExtension, guardrail: int | None):
    M2 = extend_module(M, e)
    return canonical_data(M, n, guardrail), canonical_data(M2, n, guardrail), M2


@dataclass
class BaseChangeMaps:
    """TSⁿ_A(M) ⊗ A′ = C/rel on the images ḡ_i of the TS generators, and U = ⟨ḡ_i⟩ + N′."""

    source: CanonicalMapData
    target: CanonicalMapData
    images: list[ModElement]
    C: FreeModule
    rel: Submodule
    U: Submodule

    def combine(self, c: ModElement) -> ModElement:
        out = self.target.space.zero()
        for ci, g in zip(c.coords, self.images):
            if ci:
                out = out + ci * g
        return out


def base_change_maps(M: PresentedModule, n: int, e: BaseExtension, guardrail: int | None = None) -> BaseChangeMaps:
    D, D2, _ = _setup(M, n, e, guardrail)
    images = [e.map_vec(g, D2.space) for g in D.ts_generators]
    C = FreeModule(e.target, len(images))
    rel = Submodule(C, [e.map_vec(v, C) for v in D.ts_relations.gens])
    U = Submodule(D2.space, images + list(D2.N.gens))
    return BaseChangeMaps(D, D2, images, C, rel, U)


def base_change_surjective(M: PresentedModule, n: int, e: BaseExtension,
                           guardrail: int | None = None, verify: bool = True) -> CheckReport:
    """Surjective iff ⟨ḡ_i⟩ + N′ = L′ in Tⁿ(F′)."""
    if n <= 1:
        return CheckReport("basechange-surjective", n, True, note=f"degree {n}: the map is an isomorphism")
    B = base_change_maps(M, n, e, guardrail)
    D2, U = B.target, B.U
    cmp = D2.L.is_subset(U)
    if cmp.holds:
        return CheckReport("basechange-surjective", n, True)
    w = cmp.witness
    if verify and (not D2.in_L(w) or U.contains(w)):
        raise InternalError("base-change surjectivity witness failed re-verification")
    return CheckReport("basechange-surjective", n, False, w, cmp.certificate,
                       tensor_text(w, M.rank, n, M.labels()),
                       note="symmetric tensor over the extension not coming from TS over the base")


def base_change_injective(M: PresentedModule, n: int, e: BaseExtension,
                          guardrail: int | None = None, verify: bool = True) -> CheckReport:
    """Injective iff the preimage of N′ under c ↦ Σ c_i ḡ_i equals Rel ⊗ A′."""
    if n <= 1:
        return CheckReport("basechange-injective", n, True, note=f"degree {n}: the map is an isomorphism")
    B = base_change_maps(M, n, e, guardrail)
    D2, rel = B.target, B.rel
    kern = preimage(B.images, D2.N)
    cmp = kern.is_subset(rel)
    if cmp.holds:
        return CheckReport("basechange-injective", n, True)
    c = cmp.witness
    image = B.combine(c)
    if verify and (not D2.N.contains(image) or rel.contains(c)):
        raise InternalError("base-change injectivity witness failed re-verification")
    return CheckReport("basechange-injective", n, False, c, cmp.certificate,
                       tensor_text(image, M.rank, n, M.labels()),
                       note="nonzero element of TS ⊗ A′ mapping to zero",
                       extra={"coefficients_text": [x.to_text() for x in c.coords]})


@dataclass
class DiagramRecord:
    """Implications for the base-change map read off from the two canonical maps."""

    source_injective: bool
    source_surjective: bool
    target_injective: bool
    target_surjective: bool
    implied_injective: bool | None
    implied_surjective: bool | None
    reasons: list[str] = field(default_factory=list)
    direct_injective: bool | None = None
    direct_surjective: bool | None = None

    @property
    def conclusive(self) -> bool:
        return self.implied_injective is not None or self.implied_surjective is not None

    @property
    def agrees(self) -> bool:
        ok = True
        if self.implied_injective is not None and self.direct_injective is not None:
            ok &= self.implied_injective == self.direct_injective
        if self.implied_surjective is not None and self.direct_surjective is not None:
            ok &= self.implied_surjective == self.direct_surjective
        return ok

    def to_dict(self) -> dict:
        return {
            "canonical_over_source": {"injective": self.source_injective, "surjective": self.source_surjective},
            "canonical_over_target": {"injective": self.target_injective, "surjective": self.target_surjective},
            "implied": {"injective": self.implied_injective, "surjective": self.implied_surjective},
            "reasons": self.reasons,
            "agrees": self.agrees,
        }


def diagram_implications(si: bool, ss: bool, ti: bool, ts: bool) -> tuple[bool | None, bool | None, list[str]]:
    """Use Γ commuting with base change and the commutative square of canonical maps."""
    inj = sur = None
    reasons = []
    if ts:
        sur = True
        reasons.append("canonical map over the extension is surjective, so base change is surjective")
    elif ss:
        sur = False
        reasons.append("canonical map surjective over the base but not over the extension, "
                       "so base change is not surjective")
    if si and ss and not ti:
        inj = False
        reasons.append("canonical map an isomorphism over the base but not injective over the extension, "
                       "so base change is not injective")
    elif ss and ti:
        inj = True
        reasons.append("canonical map surjective over the base and injective over the extension, "
                       "so base change is injective")
    return inj, sur, reasons


def diagram_cross_check(M: PresentedModule, n: int, e: BaseExtension, guardrail: int | None = None,
                        direct: tuple[CheckReport, CheckReport] | None = None) -> DiagramRecord:
    M2 = extend_module(M, e)
    si = check_injective(M, n, guardrail).holds
    ss = check_surjective(M, n, guardrail).holds
    ti = check_injective(M2, n, guardrail).holds
    ts = check_surjective(M2, n, guardrail).holds
    inj, sur, reasons = diagram_implications(si, ss, ti, ts)
    if direct is None:
        direct = (base_change_injective(M, n, e, guardrail), base_change_surjective(M, n, e, guardrail))
    rec = DiagramRecord(si, ss, ti, ts, inj, sur, reasons, direct[0].holds, direct[1].holds)
    if not rec.agrees:
        raise InternalError("diagram implications contradict the direct base-change verdicts")
    return rec


def gamma_functoriality(M: PresentedModule, n: int, e: BaseExtension, guardrail: int | None = None) -> bool:
    """The images of the generators of K over A generate K over A′."""
    D, D2, _ = _setup(M, n, e, guardrail)
    mapped = Submodule(D2.space, [e.map_vec(g, D2.space) for g in D.K.gens])
    return bool(mapped.equals(D2.K))

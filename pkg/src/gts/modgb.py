"""Submodules of free modules over R = k[x] and over quotients A = R/I.

Every submodule of A^r is represented by its full preimage in R^r: the given
generators together with ``g * e_i`` for every Groebner basis element ``g`` of
``I`` and every basis vector ``e_i``.  Membership, equality, intersections and
preimages over A are then plain computations over R.
"""

from __future__ import annotations

import contextvars
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ._gbcore import Basis, Layout, basis_from_reduced, groebner
from .polyring import Polynomial, PolyRing, RingMismatch


class AmbientMismatch(ValueError):
    """Raised when submodules or vectors live in different free modules."""


@dataclass(frozen=True)
class ModuleOrder:
    """``top`` (term over position) or ``pot`` (position over term).

    Monomials are compared by degree reverse lexicographic order; among
    positions the lowest index is the largest.
    """

    kind: str = "top"

    def __post_init__(self):
        if self.kind not in ("top", "pot"):
            raise ValueError(f"unknown module order {self.kind!r}")

    def blocks(self, rank: int) -> tuple[int, ...] | None:
        if self.kind == "pot":
            return tuple(rank - 1 - i for i in range(rank))
        return None


TOP = ModuleOrder("top")
POT = ModuleOrder("pot")

_default_order: contextvars.ContextVar[ModuleOrder] = contextvars.ContextVar("module_order", default=TOP)


class using_order:
    """Context manager setting the module order used by submodules created inside it."""

    def __init__(self, order: ModuleOrder | str):
        self.order = order if isinstance(order, ModuleOrder) else ModuleOrder(order)

    def __enter__(self) -> ModuleOrder:
        self._token = _default_order.set(self.order)
        return self.order

    def __exit__(self, *exc):
        _default_order.reset(self._token)
        return False


# --- rings ---------------------------------------------------------------------


class QuotientRing:
    """A = R/I for a polynomial ring R and an ideal I given by generators."""

    def __init__(self, base: PolyRing, ideal: Iterable[Polynomial | str] = ()):
        self.base = base
        gens = []
        for g in ideal:
            g = base(g)
            if g:
                gens.append(g)
        self.ideal = tuple(gens)

    @property
    def field(self):
        return self.base.field

    @property
    def vars(self) -> tuple[str, ...]:
        return self.base.vars

    @property
    def nvars(self) -> int:
        return self.base.nvars

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if isinstance(other, PolyRing):
            other = as_quotient(other)
        if not isinstance(other, QuotientRing):
            return NotImplemented
        return self.base == other.base and self.ideal_gb == other.ideal_gb

    def __hash__(self) -> int:
        return hash((self.base, self.ideal_gb))

    @cached_property
    def _layout(self) -> Layout:
        return Layout(self.base.nvars, 1)

    @cached_property
    def _gb(self) -> list[dict]:
        lay = self._layout
        vecs = [_encode_poly(g, lay, 0) for g in self.ideal]
        return groebner(vecs, lay, self.base.field.p)

    @cached_property
    def ideal_gb(self) -> tuple[Polynomial, ...]:
        """Reduced Groebner basis of I (degrevlex)."""
        return tuple(_decode_vec(v, self._layout, self.base, 1)[0] for v in self._gb)

    @cached_property
    def _basis(self) -> Basis:
        return basis_from_reduced(self._gb, self._layout, self.base.field.p)

    def reduce(self, f: Polynomial) -> Polynomial:
        """Canonical representative of ``f`` modulo I."""
        f = self.base(f)
        if not self.ideal:
            return f
        r = self._basis.reduce(_encode_poly(f, self._layout, 0))
        return _decode_vec(r, self._layout, self.base, 1)[0]

    def is_zero(self, f: Polynomial) -> bool:
        return not self.reduce(f)

    def is_zero_ring(self) -> bool:
        return self.is_zero(self.base.one())

    def __call__(self, value) -> Polynomial:
        return self.base(value)

    def __str__(self) -> str:
        if not self.ideal:
            return str(self.base)
        return f"{self.base}/({', '.join(map(str, self.ideal))})"

    def __repr__(self) -> str:
        return f"QuotientRing({self})"


def as_quotient(ring: PolyRing | QuotientRing) -> QuotientRing:
    if isinstance(ring, QuotientRing):
        return ring
    return QuotientRing(ring, ())


# --- free modules and vectors ------------------------------------------------


class FreeModule:
    """A^rank with standard basis e_0..e_{rank-1}."""

    def __init__(self, ring: PolyRing | QuotientRing, rank: int, shifts: Sequence[int] | None = None):
        if rank < 1:
            raise ValueError("free module rank must be >= 1")
        self.ring = as_quotient(ring)
        self.rank = rank
        self.shifts = tuple(shifts) if shifts is not None else None

    @property
    def base(self) -> PolyRing:
        return self.ring.base

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, FreeModule) and self.rank == other.rank and self.ring == other.ring

    def __hash__(self) -> int:
        return hash((self.ring, self.rank))

    def __call__(self, coords: Sequence) -> ModElement:
        return ModElement(self, tuple(self.base(c) for c in coords))

    def zero(self) -> ModElement:
        z = self.base.zero()
        return ModElement(self, (z,) * self.rank)

    def basis(self, i: int) -> ModElement:
        z, o = self.base.zero(), self.base.one()
        return ModElement(self, tuple(o if k == i else z for k in range(self.rank)))

    def basis_vectors(self) -> list[ModElement]:
        return [self.basis(i) for i in range(self.rank)]

    def full(self) -> Submodule:
        return Submodule(self, self.basis_vectors())

    def zero_submodule(self) -> Submodule:
        return Submodule(self, [])

    def __repr__(self) -> str:
        return f"FreeModule({self.ring}, {self.rank})"


class ModElement:
    """A vector of polynomials in a :class:`FreeModule`."""

    __slots__ = ("ambient", "coords")

    def __init__(self, ambient: FreeModule, coords: tuple[Polynomial, ...]):
        if len(coords) != ambient.rank:
            raise AmbientMismatch(f"expected {ambient.rank} coordinates, got {len(coords)}")
        self.ambient = ambient
        self.coords = coords

    def _same(self, other: ModElement):
        if not isinstance(other, ModElement) or other.ambient != self.ambient:
            raise AmbientMismatch("vectors belong to different free modules")

    def __add__(self, other: ModElement) -> ModElement:
        self._same(other)
        return ModElement(self.ambient, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: ModElement) -> ModElement:
        self._same(other)
        return ModElement(self.ambient, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> ModElement:
        return ModElement(self.ambient, tuple(-a for a in self.coords))

    def __rmul__(self, c) -> ModElement:
        c = self.ambient.base(c)
        return ModElement(self.ambient, tuple(c * a for a in self.coords))

    def __mul__(self, c) -> ModElement:
        return self.__rmul__(c)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModElement) and self.ambient == other.ambient and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __getitem__(self, i: int) -> Polynomial:
        return self.coords[i]

    def __len__(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def reduced(self) -> ModElement:
        """Coordinates reduced modulo the ideal of the ambient ring."""
        A = self.ambient.ring
        return ModElement(self.ambient, tuple(A.reduce(c) for c in self.coords))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for c in self.coords for e in c.terms}) <= 1

    def degree(self) -> int:
        return max((c.total_degree() for c in self.coords), default=-1)

    def support(self) -> list[int]:
        return [i for i, c in enumerate(self.coords) if c]

    def __repr__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coords) + "]"


def _encode_poly(f: Polynomial, lay: Layout, pos: int, extra: Sequence[int] = ()) -> dict:
    out = {}
    for e, c in f.terms.items():
        out[lay.term(e + tuple(extra) if extra else e, pos)] = c
    return out


def _encode_vec(coords: Sequence[Polynomial], lay: Layout, offset: int = 0, extra: Sequence[int] = ()) -> dict:
    out = {}
    for i, f in enumerate(coords):
        if f:
            for e, c in f.terms.items():
                out[lay.term(tuple(e) + tuple(extra) if extra else e, i + offset)] = c
    return out


def _decode_vec(vec: dict, lay: Layout, ring: PolyRing, rank: int, offset: int = 0,
                drop_vars: int = 0) -> list[Polynomial]:
    terms: list[dict] = [{} for _ in range(rank)]
    for J, c in vec.items():
        pos, exps = lay.decode(J)
        if drop_vars:
            exps = exps[: len(exps) - drop_vars]
        terms[pos - offset][exps] = c
    return [Polynomial(ring, t) for t in terms]


# --- submodules ------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Outcome of a containment or equality test.

    ``witness`` is the first generator of the larger module whose normal form
    with respect to the smaller one is nonzero; ``certificate`` is that normal
    form.
    """

    holds: bool
    witness: ModElement | None = None
    certificate: ModElement | None = None

    def __bool__(self) -> bool:
        return self.holds


class Submodule:
    """Submodule of a free module given by generators; the GB is computed lazily and cached."""

    def __init__(self, ambient: FreeModule, gens: Iterable[ModElement], order: ModuleOrder | None = None):
        self.ambient = ambient
        gl = []
        for g in gens:
            if not isinstance(g, ModElement):
                g = ambient(g)
            elif g.ambient != ambient:
                raise AmbientMismatch("generator outside the ambient module")
            gl.append(g)
        self.gens = tuple(gl)
        self.order = order if order is not None else _default_order.get()

    @property
    def ring(self) -> QuotientRing:
        return self.ambient.ring

    @cached_property
    def ideal_lifts(self) -> tuple[ModElement, ...]:
        E = self.ambient
        out = []
        for g in self.ring.ideal_gb:
            for i in range(E.rank):
                out.append(g * E.basis(i))
        return tuple(out)

    @property
    def lifted_gens(self) -> tuple[ModElement, ...]:
        return self.gens + self.ideal_lifts

    @cached_property
    def layout(self) -> Layout:
        return Layout(self.ambient.base.nvars, self.ambient.rank, blocks=self.order.blocks(self.ambient.rank))

    @cached_property
    def _gb(self) -> list[dict]:
        lay = self.layout
        vecs = [_encode_vec(g.coords, lay) for g in self.lifted_gens]
        return groebner(vecs, lay, self.ambient.base.field.p)

    @cached_property
    def _basis(self) -> Basis:
        return basis_from_reduced(self._gb, self.layout, self.ambient.base.field.p)

    @cached_property
    def gb(self) -> tuple[ModElement, ...]:
        """Reduced Groebner basis of the lifted submodule over R."""
        E = self.ambient
        return tuple(ModElement(E, tuple(_decode_vec(v, self.layout, E.base, E.rank))) for v in self._gb)

    @cached_property
    def _lift_data(self) -> _LiftData:
        return _LiftData(self)

    def with_order(self, order: ModuleOrder) -> Submodule:
        return Submodule(self.ambient, self.gens, order)

    def normal_form(self, v: ModElement) -> ModElement:
        if v.ambient != self.ambient:
            raise AmbientMismatch("vector outside the ambient module")
        lay = self.layout
        r = self._basis.reduce(_encode_vec(v.coords, lay))
        E = self.ambient
        return ModElement(E, tuple(_decode_vec(r, lay, E.base, E.rank)))

    def contains(self, v: ModElement) -> bool:
        return self.normal_form(v).is_zero()

    __contains__ = contains

    def is_subset(self, other: Submodule) -> Comparison:
        """Test ``self`` is contained in ``other``; witness drawn from ``self``."""
        if other.ambient != self.ambient:
            raise AmbientMismatch("submodules of different free modules")
        for g in sorted_by_degree(self.gens):
            nf = other.normal_form(g)
            if not nf.is_zero():
                return Comparison(False, g, nf)
        return Comparison(True)

    def equals(self, other: Submodule) -> Comparison:
        c = other.is_subset(self)
        if not c:
            return c
        return self.is_subset(other)

    def __add__(self, other: Submodule) -> Submodule:
        if other.ambient != self.ambient:
            raise AmbientMismatch("submodules of different free modules")
        return Submodule(self.ambient, self.gens + other.gens, self.order)

    def is_zero(self) -> bool:
        zero = self.ambient.zero_submodule()
        return all(zero.contains(g) for g in self.gens)

    def minimal_gens(self) -> tuple[ModElement, ...]:
        """Generators with the ideal lifts and zero vectors (mod I) dropped."""
        zero = self.ambient.zero_submodule()
        return tuple(g for g in self.gens if not zero.contains(g))

    def __repr__(self) -> str:
        return f"Submodule(rank={self.ambient.rank}, ngens={len(self.gens)})"


def sorted_by_degree(vs: Iterable[ModElement]) -> list[ModElement]:
    """Stable sort by total degree so witnesses are of minimal degree."""
    return sorted(vs, key=lambda v: v.degree())


def buchberger(gens: Sequence[ModElement], order: ModuleOrder | None = None) -> Submodule:
    """Submodule generated by ``gens`` with its reduced GB computed eagerly."""
    if not gens:
        raise ValueError("need at least one generator to infer the ambient module")
    U = Submodule(gens[0].ambient, gens, order)
    U.gb  # noqa: B018 - force computation
    return U


def normal_form(v: ModElement, U: Submodule) -> ModElement:
    return U.normal_form(v)


def is_member(v: ModElement, U: Submodule) -> bool:
    return U.contains(v)


def submodule_equal(U: Submodule, V: Submodule) -> Comparison:
    if U.ambient != V.ambient:
        raise AmbientMismatch("submodules of different free modules")
    return U.equals(V)


def lift_to_cover(ambient: FreeModule, gens: Iterable[ModElement]) -> Submodule:
    """Submodule over the polynomial cover R containing the given generators and I*E."""
    A = ambient.ring
    cover = FreeModule(A.base, ambient.rank)
    U = Submodule(ambient, gens)
    return Submodule(cover, [ModElement(cover, g.coords) for g in U.lifted_gens])


# --- intersections, preimages, lifts ------------------------------------------------


def _elim_gb(vecs: list[dict], lay: Layout, p) -> list[dict]:
    return groebner(vecs, lay, p)


def intersect(U: Submodule, V: Submodule, method: str = "tag") -> Submodule:
    """Generators of U ∩ V.

    ``tag`` eliminates an auxiliary variable t from ⟨t·u, (1−t)·v⟩;
    ``syzygy`` eliminates the first block of ⟨(u, u), (v, 0)⟩ ⊆ E ⊕ E.
    """
    if U.ambient != V.ambient:
        raise AmbientMismatch("submodules of different free modules")
    E = U.ambient
    R = E.base
    p = R.field.p
    n = R.nvars
    if method == "tag":
        lay = Layout(n + 1, E.rank, weights=[(0,) * n + (1,)])
        vecs = []
        for u in U.lifted_gens:
            vecs.append(_encode_vec(u.coords, lay, extra=(1,)))
        for v in V.lifted_gens:
            a = _encode_vec(v.coords, lay, extra=(0,))
            b = _encode_vec(v.coords, lay, extra=(1,))
            for J, c in b.items():
                a[J] = (-c) % p if p else -c
            vecs.append(a)
        gens = []
        tshift = lay.shifts[n]
        for g in _elim_gb(vecs, lay, p):
            if (lay.low_of(max(g)) >> tshift) & 0xFFFF:
                continue
            gens.append(ModElement(E, tuple(_decode_vec(g, lay, R, E.rank, drop_vars=1))))
        return Submodule(E, gens)
    if method == "syzygy":
        r = E.rank
        lay = Layout(n, 2 * r, blocks=(1,) * r + (0,) * r)
        vecs = []
        for u in U.lifted_gens:
            a = _encode_vec(u.coords, lay)
            a.update(_encode_vec(u.coords, lay, offset=r))
            vecs.append(a)
        for v in V.lifted_gens:
            vecs.append(_encode_vec(v.coords, lay))
        gens = []
        for g in _elim_gb(vecs, lay, p):
            if lay.pos_of(max(g)) < r:
                continue
            gens.append(ModElement(E, tuple(_decode_vec(g, lay, R, r, offset=r))))
        return Submodule(E, gens)
    raise ValueError(f"unknown intersection method {method!r}")


def _check_columns(phi: Sequence[ModElement], W: Submodule):
    for c in phi:
        if c.ambient != W.ambient:
            raise AmbientMismatch("map columns must lie in the ambient module of W")


def preimage(phi: Sequence[ModElement], W: Submodule) -> Submodule:
    """{c ∈ A^r : Σ c_i φ_i ∈ W} for the map A^r → E with columns ``phi``."""
    _check_columns(phi, W)
    E = W.ambient
    R = E.base
    p = R.field.p
    r = len(phi)
    if r == 0:
        raise ValueError("map needs at least one column")
    rE = E.rank
    lay = Layout(R.nvars, rE + r, blocks=(1,) * rE + (0,) * r)
    c1 = R.field(1)
    vecs = []
    for i, col in enumerate(phi):
        a = _encode_vec(col.coords, lay)
        a[lay.term((0,) * R.nvars, rE + i)] = c1
        vecs.append(a)
    for w in W.lifted_gens:
        vecs.append(_encode_vec(w.coords, lay))
    D = FreeModule(E.ring, r)
    gens = []
    for g in _elim_gb(vecs, lay, p):
        if lay.pos_of(max(g)) < rE:
            continue
        gens.append(ModElement(D, tuple(_decode_vec(g, lay, R, r, offset=rE))))
    return Submodule(D, gens)


def kernel(phi: Sequence[ModElement]) -> Submodule:
    """Kernel of the map A^r → E with the given columns."""
    if not phi:
        raise ValueError("map needs at least one column")
    return preimage(phi, phi[0].ambient.zero_submodule())


class _LiftData:
    def __init__(self, U: Submodule):
        E = U.ambient
        R = E.base
        self.U = U
        self.ngens = len(U.gens)
        k = len(U.lifted_gens)
        self.k = k
        lay = Layout(R.nvars, E.rank + k, blocks=(1,) * E.rank + (0,) * k)
        self.lay = lay
        c1 = R.field(1)
        vecs = []
        for i, g in enumerate(U.lifted_gens):
            a = _encode_vec(g.coords, lay)
            a[lay.term((0,) * R.nvars, E.rank + i)] = c1
            vecs.append(a)
        self.basis = basis_from_reduced(groebner(vecs, lay, R.field.p), lay, R.field.p)


def lift(v: ModElement, U: Submodule) -> tuple[Polynomial, ...] | None:
    """Coefficients c with v = Σ c_i g_i (mod I·E) over ``U.gens``, or None if v ∉ U."""
    if v.ambient != U.ambient:
        raise AmbientMismatch("vector outside the ambient module")
    data = U._lift_data
    E = U.ambient
    R = E.base
    lay = data.lay
    r = data.basis.reduce(_encode_vec(v.coords, lay))
    if any(lay.pos_of(J) < E.rank for J in r):
        return None
    coeffs = _decode_vec(r, lay, R, data.k, offset=E.rank)
    return tuple(-c for c in coeffs[: data.ngens])


@dataclass(frozen=True)
class Presentation:
    """U/W as coker(relations → A^r) with generator images ``generators`` in U."""

    generators: tuple[ModElement, ...]
    relations: Submodule

    @property
    def ngens(self) -> int:
        return len(self.generators)


class NotASubmodule(ValueError):
    """Raised when a presentation is requested for W ⊄ U."""


def presentation(U: Submodule, W: Submodule, check: bool = True) -> Presentation:
    """Present U/W using the generators of U."""
    if check:
        c = W.is_subset(U)
        if not c:
            raise NotASubmodule(f"W is not contained in U (witness {c.witness})")
    gens = U.gens
    if not gens:
        D = FreeModule(U.ring, 1)
        return Presentation((), D.full())
    rel = preimage(list(gens), W)
    return Presentation(tuple(gens), rel)


def matrix_columns(ambient: FreeModule, matrix: Sequence[Sequence[Polynomial]]) -> list[ModElement]:
    """Columns of a row-major matrix as vectors of ``ambient``."""
    rows = len(matrix)
    if rows != ambient.rank:
        raise AmbientMismatch("row count must equal the ambient rank")
    ncols = len(matrix[0]) if rows else 0
    return [ambient([matrix[i][j] for i in range(rows)]) for j in range(ncols)]


def change_ring(v: ModElement, target: FreeModule) -> ModElement:
    """Reinterpret coordinates in a free module over the same polynomial ring."""
    if v.ambient.base != target.base:
        raise RingMismatch("coordinates live in a different polynomial ring")
    return ModElement(target, v.coords)


def current_order() -> ModuleOrder:
    return _default_order.get()

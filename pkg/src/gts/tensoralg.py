"""Tensor powers of a free module, the symmetric group action, and the
orbit-sum basis of the symmetric tensors.

Tensor basis vectors e_{i_1} ⊗ ... ⊗ e_{i_n} (0-based indices) are laid out
row-major: ``(i_1, ..., i_n) -> sum_k i_k * m**(n-1-k)``.

A permutation is a tuple ``sigma`` of images, ``sigma[k]`` being the image of
slot ``k``.  It acts by moving the factor in slot ``k`` to slot ``sigma[k]``,
i.e. ``sigma(x_0 ⊗ ... ⊗ x_{n-1}) = x_{sigma^-1(0)} ⊗ ... ⊗ x_{sigma^-1(n-1)}``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from .modgb import FreeModule, ModElement, Submodule
from .polyring import Polynomial, PolyRing, binomial_in_field

GUARDRAIL = 100_000

Perm = tuple[int, ...]
MultiIndex = tuple[int, ...]


class GuardrailExceeded(ValueError):
    """Raised when a tensor power would have more than the allowed number of basis vectors."""


def check_guardrail(m: int, n: int, limit: int | None = None):
    limit = GUARDRAIL if limit is None else limit
    if m**n > limit:
        raise GuardrailExceeded(f"tensor power rank {m}^{n} = {m**n} exceeds guardrail {limit}")


# --- permutations ------------------------------------------------------------------


def compose(a: Perm, b: Perm) -> Perm:
    """a ∘ b."""
    return tuple(a[b[i]] for i in range(len(b)))


def inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def symmetric_generators(n: int) -> list[Perm]:
    """Adjacent transpositions (k, k+1), k = 0..n-2."""
    out = []
    for k in range(n - 1):
        p = list(range(n))
        p[k], p[k + 1] = p[k + 1], p[k]
        out.append(tuple(p))
    return out


def permute_index(perm: Perm, idx: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(idx)
    for k, i in enumerate(idx):
        out[perm[k]] = i
    return tuple(out)


def shuffles(k: int, l: int) -> Iterable[Perm]:
    """The (k, l)-shuffles: increasing on the first k and on the last l slots."""
    n = k + l
    for first in itertools.combinations(range(n), k):
        rest = [i for i in range(n) if i not in first]
        yield tuple(first) + tuple(rest)


# --- index bookkeeping -----------------------------------------------------------------


@lru_cache(maxsize=None)
def tensor_tuples(m: int, n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product(range(m), repeat=n))


def tensor_index(idx: Sequence[int], m: int) -> int:
    k = 0
    for i in idx:
        k = k * m + i
    return k


@lru_cache(maxsize=None)
def multi_indices(m: int, n: int) -> tuple[MultiIndex, ...]:
    """All ν with |ν| = n, in the order of sorted index tuples."""
    out = []
    for combo in itertools.combinations_with_replacement(range(m), n):
        c = Counter(combo)
        out.append(tuple(c.get(i, 0) for i in range(m)))
    return tuple(out)


def representative(nu: MultiIndex) -> tuple[int, ...]:
    """Sorted index tuple with exponent pattern ν."""
    return tuple(i for i, a in enumerate(nu) for _ in range(a))


def pattern(idx: Sequence[int], m: int) -> MultiIndex:
    c = Counter(idx)
    return tuple(c.get(i, 0) for i in range(m))


@lru_cache(maxsize=None)
def _perm_table(perm: Perm, m: int) -> tuple[int, ...]:
    n = len(perm)
    return tuple(tensor_index(permute_index(perm, t), m) for t in tensor_tuples(m, n))


def sigma_action(perm: Perm, v: ModElement, m: int) -> ModElement:
    """Apply a permutation to an element of T^n(F), F of rank m."""
    n = len(perm)
    if v.ambient.rank != m**n:
        raise ValueError(f"element of rank {v.ambient.rank} is not in T^{n} of a rank-{m} module")
    table = _perm_table(tuple(perm), m)
    out = [None] * len(table)
    for src, dst in enumerate(table):
        out[dst] = v.coords[src]
    return ModElement(v.ambient, tuple(out))


# --- orbit tensors -----------------------------------------------------------------------


class OrbitTensor:
    """An element Σ c_ν e_ν of TS^n(F) in the orbit-sum basis."""

    __slots__ = ("ring", "m", "n", "coords")

    def __init__(self, ring: PolyRing, m: int, n: int, coords: Mapping[MultiIndex, Polynomial]):
        self.ring = ring
        self.m = m
        self.n = n
        clean = {}
        for nu, c in coords.items():
            if len(nu) != m or sum(nu) != n:
                raise ValueError(f"multi-index {nu} does not have |ν| = {n} with {m} entries")
            if c:
                clean[tuple(nu)] = c
        self.coords = clean

    @classmethod
    def basis(cls, ring: PolyRing, nu: MultiIndex) -> OrbitTensor:
        return cls(ring, len(nu), sum(nu), {tuple(nu): ring.one()})

    @classmethod
    def unit(cls, ring: PolyRing, m: int) -> OrbitTensor:
        return cls(ring, m, 0, {(0,) * m: ring.one()})

    def __add__(self, other: OrbitTensor) -> OrbitTensor:
        self._same(other)
        out = dict(self.coords)
        for nu, c in other.coords.items():
            out[nu] = out[nu] + c if nu in out else c
        return OrbitTensor(self.ring, self.m, self.n, out)

    def __neg__(self) -> OrbitTensor:
        return OrbitTensor(self.ring, self.m, self.n, {nu: -c for nu, c in self.coords.items()})

    def __sub__(self, other: OrbitTensor) -> OrbitTensor:
        return self + (-other)

    def scale(self, a) -> OrbitTensor:
        a = self.ring(a)
        return OrbitTensor(self.ring, self.m, self.n, {nu: a * c for nu, c in self.coords.items()})

    def _same(self, other: OrbitTensor):
        if (self.ring, self.m, self.n) != (other.ring, other.m, other.n):
            raise ValueError("orbit tensors of different shape")

    def __eq__(self, other) -> bool:
        return (isinstance(other, OrbitTensor) and (self.ring, self.m, self.n) == (other.ring, other.m, other.n)
                and self.coords == other.coords)

    def __hash__(self) -> int:
        return hash((self.m, self.n, frozenset(self.coords.items())))

    def __mul__(self, other: OrbitTensor) -> OrbitTensor:
        return shuffle(self, other)

    def vector(self, ambient: FreeModule) -> ModElement:
        """Coordinates in a free module with basis indexed by ``multi_indices(m, n)``."""
        z = self.ring.zero()
        return ambient([self.coords.get(nu, z) for nu in multi_indices(self.m, self.n)])

    def __repr__(self) -> str:
        return " + ".join(f"({c})*e{list(nu)}" for nu, c in self.coords.items()) or "0"


def orbit_basis(n: int, m: int, ring: PolyRing, guardrail: int | None = None) -> list[OrbitTensor]:
    check_guardrail(m, n, guardrail)
    return [OrbitTensor.basis(ring, nu) for nu in multi_indices(m, n)]


def shuffle(z: OrbitTensor, w: OrbitTensor) -> OrbitTensor:
    """Shuffle product via e_ν × e_μ = Π_i C(ν_i+μ_i, ν_i) e_{ν+μ}."""
    if z.m != w.m or z.ring != w.ring:
        raise ValueError("shuffle of orbit tensors over different free modules")
    field = z.ring.field
    out: dict[MultiIndex, Polynomial] = {}
    for nu, a in z.coords.items():
        for mu, b in w.coords.items():
            coef = 1
            for x, y in zip(nu, mu):
                coef = coef * binomial_in_field(x + y, x, field)
                if not coef:
                    break
            if not coef:
                continue
            key = tuple(x + y for x, y in zip(nu, mu))
            term = (a * b).scale(coef)
            out[key] = out[key] + term if key in out else term
    return OrbitTensor(z.ring, z.m, z.n + w.n, out)


def gamma_expand(x: ModElement, s: int) -> OrbitTensor:
    """γ^s(Σ a_i e_i) = Σ_{|ν|=s} (Π a_i^{ν_i}) e_ν."""
    if s < 0:
        raise ValueError("divided power degree must be >= 0")
    R = x.ambient.base
    m = x.ambient.rank
    out = {}
    for nu in multi_indices(m, s):
        c = R.one()
        for a, k in zip(x.coords, nu):
            if k:
                c = c * a**k
                if not c:
                    break
        if c:
            out[nu] = c
    return OrbitTensor(R, m, s, out)


# --- tensor powers ---------------------------------------------------------------------------


class TensorPower:
    """T^n(F) for F = A^m as a free module of rank m^n."""

    def __init__(self, F: FreeModule, n: int, guardrail: int | None = None):
        check_guardrail(F.rank, n, guardrail)
        self.F = F
        self.m = F.rank
        self.n = n
        self.space = FreeModule(F.ring, self.m**n)

    @property
    def ring(self) -> PolyRing:
        return self.F.base

    @property
    def tuples(self) -> tuple[tuple[int, ...], ...]:
        return tensor_tuples(self.m, self.n)

    def index(self, idx: Sequence[int]) -> int:
        return tensor_index(idx, self.m)

    def basis(self, idx: Sequence[int]) -> ModElement:
        return self.space.basis(self.index(idx))

    def tensor(self, factors: Sequence[ModElement]) -> ModElement:
        """x_0 ⊗ ... ⊗ x_{n-1} for vectors x_k of F."""
        if len(factors) != self.n:
            raise ValueError(f"need {self.n} factors")
        R = self.ring
        coords = [R.zero()] * self.space.rank
        supports = [[(i, f.coords[i]) for i in f.support()] for f in factors]
        for combo in itertools.product(*supports):
            c = R.one()
            for _, a in combo:
                c = c * a
            k = self.index([i for i, _ in combo])
            coords[k] = coords[k] + c
        return ModElement(self.space, tuple(coords))

    def power(self, x: ModElement) -> ModElement:
        return self.tensor([x] * self.n)

    def insert(self, x: ModElement, slot: int, others: Sequence[int]) -> ModElement:
        """e_{o_0} ⊗ ... ⊗ x ⊗ ... with ``x`` in ``slot`` and basis vectors elsewhere."""
        F = self.F
        factors = list(F.basis(i) for i in others)
        factors.insert(slot, x)
        return self.tensor(factors)

    def sigma(self, perm: Perm, v: ModElement) -> ModElement:
        return sigma_action(perm, v, self.m)

    def one_minus_sigma_columns(self, perm: Perm) -> list[ModElement]:
        """Columns of the map 1 − σ on T^n(F)."""
        cols = []
        for t in range(self.space.rank):
            e = self.space.basis(t)
            cols.append(e - self.sigma(perm, e))
        return cols

    @cached_property
    def orbit_vectors(self) -> list[ModElement]:
        """Embedded orbit sums e_ν, in ``multi_indices`` order."""
        R = self.ring
        by_nu: dict[MultiIndex, list[int]] = {}
        for t in self.tuples:
            by_nu.setdefault(pattern(t, self.m), []).append(self.index(t))
        out = []
        for nu in multi_indices(self.m, self.n):
            coords = [R.zero()] * self.space.rank
            for k in by_nu[nu]:
                coords[k] = R.one()
            out.append(ModElement(self.space, tuple(coords)))
        return out

    def span_submodule(self) -> Submodule:
        return Submodule(self.space, self.orbit_vectors)

    def embed(self, z: OrbitTensor) -> ModElement:
        if z.m != self.m or z.n != self.n:
            raise ValueError("orbit tensor of the wrong shape")
        out = self.space.zero()
        for nu, c in z.coords.items():
            out = out + c * self.orbit_vectors[multi_indices(self.m, self.n).index(nu)]
        return out

    def to_orbit(self, v: ModElement) -> OrbitTensor:
        """Read the coordinates at sorted representatives; exact on symmetric tensors."""
        coords = {}
        for nu in multi_indices(self.m, self.n):
            coords[nu] = v.coords[self.index(representative(nu))]
        return OrbitTensor(self.ring, self.m, self.n, coords)

    def is_symmetric(self, v: ModElement, modulo: Submodule | None = None) -> bool:
        for g in symmetric_generators(self.n):
            d = v - self.sigma(g, v)
            if modulo is None:
                if not d.is_zero():
                    return False
            elif not modulo.contains(d):
                return False
        return True

    def concat(self, a: ModElement, b: ModElement, other: TensorPower) -> ModElement:
        """a ⊗ b ∈ T^{n+k} for a ∈ T^n (self) and b ∈ T^k (other)."""
        target = TensorPower(self.F, self.n + other.n)
        R = self.ring
        coords = [R.zero()] * target.space.rank
        for ia in a.support():
            for ib in b.support():
                k = ia * other.space.rank + ib
                coords[k] = coords[k] + a.coords[ia] * b.coords[ib]
        return ModElement(target.space, tuple(coords))


def shuffle_bruteforce(z: OrbitTensor, w: OrbitTensor, F: FreeModule) -> ModElement:
    """z × w = Σ_{σ ∈ S_{k,l}} σ(z ⊗ w), computed literally in T^{k+l}(F)."""
    Tk = TensorPower(F, z.n)
    Tl = TensorPower(F, w.n)
    T = TensorPower(F, z.n + w.n)
    zw = Tk.concat(Tk.embed(z) if z.n else _scalar_tensor(Tk, z), Tl.embed(w) if w.n else _scalar_tensor(Tl, w), Tl)
    out = T.space.zero()
    for s in shuffles(z.n, w.n):
        out = out + T.sigma(s, zw)
    return out


def _scalar_tensor(T: TensorPower, z: OrbitTensor) -> ModElement:
    c = z.coords.get((0,) * z.m, T.ring.zero())
    return T.space([c])


def multinomial_count(nu: MultiIndex) -> int:
    """Number of distinct index tuples with pattern ν."""
    return math.factorial(sum(nu)) // math.prod(math.factorial(a) for a in nu)

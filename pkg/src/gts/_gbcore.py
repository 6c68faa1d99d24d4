"""Packed-integer Buchberger engine for submodules of free modules.

A term ``x^e * e_pos`` is packed into one Python int ``J`` whose integer order
is the module order, and for which multiplication by a monomial is integer
addition.  Layout, from most to least significant::

    J = block(pos) << (KB + SB) | K(e) << SB | (S - 1 - pos)

    K(e) = sum_r (w_r . e) * W_r  +  deg(e) * C  -  low(e)
    low(e) = sum_i e_i << (16 * i)

``K`` is linear in ``e`` and orders monomials by the weight rows, then by
degree reverse lexicographic order.  ``low`` is recovered as ``(-K) mod C`` and
supports a borrow-free divisibility test using one guard bit per 16-bit field.

Vectors are dicts ``{J: coeff}``.  Coefficients are ints mod ``p`` or
``Fraction`` when ``p`` is None.
"""

from __future__ import annotations

import contextvars
import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

_FB = 16
_FMASK = (1 << _FB) - 1
_MAX_EXP = 1 << (_FB - 1)
_DEGBITS = 24


@dataclass
class GBStats:
    bases: int = 0
    pairs: int = 0
    zero_reductions: int = 0
    chain_pruned: int = 0
    product_pruned: int = 0
    max_basis: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


_stats: contextvars.ContextVar[GBStats | None] = contextvars.ContextVar("gb_stats", default=None)


def current_stats() -> GBStats | None:
    return _stats.get()


class collect_stats:
    """Context manager collecting Buchberger counters for the enclosed calls."""

    def __enter__(self) -> GBStats:
        self.stats = GBStats()
        self._token = _stats.set(self.stats)
        return self.stats

    def __exit__(self, *exc):
        _stats.reset(self._token)
        return False


class Layout:
    """Packing scheme for one (nvars, rank, weights, block structure)."""

    def __init__(self, nvars: int, rank: int, weights: Sequence[Sequence[int]] = (),
                 blocks: Sequence[int] | None = None):
        self.nvars = nvars
        self.rank = rank
        self.weights = tuple(tuple(w) for w in weights)
        for w in self.weights:
            if len(w) != nvars or any(x < 0 for x in w):
                raise ValueError("weight rows must be non-negative and match nvars")
        self.shifts = tuple(_FB * i for i in range(nvars))
        self.C = 1 << (_FB * nvars)
        self.lowmask = self.C - 1
        self.guard = sum(1 << (s + _FB - 1) for s in self.shifts)
        unit = self.C << _DEGBITS
        bases = []
        for _ in self.weights:
            bases.append(unit)
            unit <<= _DEGBITS
        # highest priority weight row gets the largest base
        self.wbases = tuple(reversed(bases))
        self.KB = unit.bit_length()
        self.kmask = (1 << self.KB) - 1
        self.SB = max(1, rank.bit_length())
        self.S = 1 << self.SB
        self.smask = self.S - 1
        self.blocks = tuple(blocks) if blocks is not None else (0,) * rank
        if len(self.blocks) != rank:
            raise ValueError("need one block weight per position")
        self._pos_bits = tuple(
            (b << (self.KB + self.SB)) | (self.S - 1 - pos) for pos, b in enumerate(self.blocks)
        )

    # monomials -------------------------------------------------------------

    def K(self, exps: Sequence[int]) -> int:
        low = 0
        deg = 0
        for e, s in zip(exps, self.shifts):
            if e:
                if e >= _MAX_EXP:
                    raise OverflowError("exponent too large for packed monomials")
                low |= e << s
                deg += e
        if deg >= 1 << _DEGBITS:
            raise OverflowError("degree too large for packed monomials")
        k = deg * self.C - low
        for w, base in zip(self.weights, self.wbases):
            k += sum(a * b for a, b in zip(w, exps)) * base
        return k

    def K_from_low(self, low: int) -> int:
        return self.K(self.exps_from_low(low))

    def exps_from_low(self, low: int) -> tuple[int, ...]:
        return tuple((low >> s) & _FMASK for s in self.shifts)

    def term(self, exps: Sequence[int], pos: int) -> int:
        return (self.K(exps) << self.SB) | self._pos_bits[pos]

    def decode(self, J: int) -> tuple[int, tuple[int, ...]]:
        pos = self.S - 1 - (J & self.smask)
        low = (-(J >> self.SB)) & self.lowmask
        return pos, self.exps_from_low(low)

    def pos_of(self, J: int) -> int:
        return self.S - 1 - (J & self.smask)

    def low_of(self, J: int) -> int:
        return (-(J >> self.SB)) & self.lowmask

    def lcm_low(self, a: int, b: int) -> int:
        out = 0
        for s in self.shifts:
            x = (a >> s) & _FMASK
            y = (b >> s) & _FMASK
            out |= (x if x > y else y) << s
        return out

    def lcm_term(self, Ja: int, Jb: int) -> int:
        """lcm of two terms in the same position."""
        low = self.lcm_low(self.low_of(Ja), self.low_of(Jb))
        return (self.K_from_low(low) << self.SB) | (Ja & ~((self.kmask) << self.SB))

    def divides(self, Ja: int, Jb: int) -> bool:
        if (Ja & self.smask) != (Jb & self.smask):
            return False
        return not ((self.low_of(Jb) - self.low_of(Ja)) & self.guard)


class _Elem:
    __slots__ = ("lt", "posoff", "low", "single", "tail", "active")

    def __init__(self, lt, posoff, low, single, tail):
        self.lt = lt
        self.posoff = posoff
        self.low = low
        self.single = single
        self.tail = tail
        self.active = True

    def vec(self, one) -> dict:
        d = {self.lt: one}
        d.update(self.tail)
        return d


class Basis:
    """A list of monic elements indexed by leading position for reduction."""

    def __init__(self, layout: Layout, p: int | None):
        self.layout = layout
        self.p = p
        self.one = 1 if p else Fraction(1)
        self.elems: list[_Elem] = []
        self.by_pos: dict[int, list[_Elem]] = {}

    def add(self, vec: dict) -> _Elem:
        lay = self.layout
        lt = max(vec)
        c = vec[lt]
        p = self.p
        if p:
            inv = pow(c, -1, p)
            tail = tuple((J, v * inv % p) for J, v in sorted(vec.items(), reverse=True) if J != lt)
        else:
            tail = tuple((J, v / c) for J, v in sorted(vec.items(), reverse=True) if J != lt)
        posoff = lt & lay.smask
        single = all((J & lay.smask) == posoff for J, _ in tail)
        e = _Elem(lt, posoff, lay.low_of(lt), single, tail)
        self.elems.append(e)
        self.by_pos.setdefault(posoff, []).append(e)
        return e

    def deactivate(self, e: _Elem):
        e.active = False
        self.by_pos[e.posoff].remove(e)

    def reduce(self, vec: dict) -> dict:
        """Full normal form of ``vec`` with respect to the active elements."""
        lay = self.layout
        smask, SB, lowmask, guard = lay.smask, lay.SB, lay.lowmask, lay.guard
        by_pos = self.by_pos
        p = self.p
        f = dict(vec)
        heap = [-J for J in f]
        heapq.heapify(heap)
        rem = {}
        pop, push = heapq.heappop, heapq.heappush
        while heap:
            J = -pop(heap)
            c = f.pop(J, None)
            if c is None:
                continue
            low = (-(J >> SB)) & lowmask
            for g in by_pos.get(J & smask, ()):
                if not ((low - g.low) & guard):
                    break
            else:
                rem[J] = c
                continue
            shift = J - g.lt
            if p:
                for J2, c2 in g.tail:
                    J3 = J2 + shift
                    v = f.get(J3)
                    if v is None:
                        f[J3] = (-c * c2) % p
                        push(heap, -J3)
                    else:
                        v = (v - c * c2) % p
                        if v:
                            f[J3] = v
                        else:
                            del f[J3]
            else:
                for J2, c2 in g.tail:
                    J3 = J2 + shift
                    v = f.get(J3)
                    if v is None:
                        f[J3] = -c * c2
                        push(heap, -J3)
                    else:
                        v = v - c * c2
                        if v:
                            f[J3] = v
                        else:
                            del f[J3]
        return rem

    def active(self) -> list[_Elem]:
        return [e for e in self.elems if e.active]


def groebner(vecs: Sequence[dict], layout: Layout, p: int | None) -> list[dict]:
    """Reduced Groebner basis (monic, sorted by increasing leading term)."""
    stats = _stats.get()
    B = Basis(layout, p)
    lay = layout
    pairs: list[tuple[int, int, int]] = []

    def spoly(a: _Elem, b: _Elem, lcm: int) -> dict:
        sa = lcm - a.lt
        sb = lcm - b.lt
        f = {}
        for J, c in a.tail:
            f[J + sa] = c
        for J, c in b.tail:
            J3 = J + sb
            v = f.get(J3, 0) - c
            if p:
                v %= p
            if v:
                f[J3] = v
            else:
                f.pop(J3, None)
        return f

    def prodcrit(a: _Elem, b: _Elem) -> bool:
        # valid only when both vectors live in a single position (ideal case)
        return a.single and b.single and not (lay.lcm_low(a.low, b.low) != a.low + b.low)

    def lcm_of(a: _Elem, b: _Elem) -> int:
        return lay.lcm_term(a.lt, b.lt)

    def update(h: _Elem, t: int):
        nonlocal pairs
        elems = B.elems
        cand = [i for i in range(t) if elems[i].active and elems[i].posoff == h.posoff]
        lcms = {i: lcm_of(elems[i], h) for i in cand}
        D: list[int] = []
        rest = list(cand)
        while rest:
            i = rest.pop(0)
            li = lcms[i]
            if prodcrit(elems[i], h):
                D.append(i)
                continue
            dominated = False
            for k in rest:
                if lay.divides(lcms[k], li):
                    dominated = True
                    break
            if not dominated:
                for k in D:
                    if lay.divides(lcms[k], li):
                        dominated = True
                        break
            if dominated:
                if stats:
                    stats.chain_pruned += 1
            else:
                D.append(i)
        new = []
        for i in D:
            if prodcrit(elems[i], h):
                if stats:
                    stats.product_pruned += 1
            else:
                new.append((lcms[i], i, t))
        kept = []
        for pr in pairs:
            L, i, j = pr
            if (L & lay.smask) == h.posoff and lay.divides(h.lt, L) \
                    and lcm_of(elems[i], h) != L and lcm_of(elems[j], h) != L:
                if stats:
                    stats.chain_pruned += 1
                continue
            kept.append(pr)
        pairs = kept + new
        heapq.heapify(pairs)
        for i in range(t):
            e = elems[i]
            if e.active and e.posoff == h.posoff and lay.divides(h.lt, e.lt):
                B.deactivate(e)

    def insert(vec: dict):
        e = B.add(vec)
        update(e, len(B.elems) - 1)
        if stats:
            stats.max_basis = max(stats.max_basis, len(B.elems))

    for v in sorted((v for v in vecs if v), key=lambda v: max(v)):
        r = B.reduce(v)
        if r:
            insert(r)
    while pairs:
        L, i, j = heapq.heappop(pairs)
        if stats:
            stats.pairs += 1
        s = spoly(B.elems[i], B.elems[j], L)
        r = B.reduce(s) if s else s
        if r:
            insert(r)
        elif stats:
            stats.zero_reductions += 1

    final = B.active()
    out = []
    for e in final:
        tail = B.reduce(dict(e.tail)) if e.tail else {}
        tail[e.lt] = B.one
        out.append(tail)
    out.sort(key=lambda v: max(v))
    if stats:
        stats.bases += 1
    return out


def basis_from_reduced(gb: Sequence[dict], layout: Layout, p: int | None) -> Basis:
    """Wrap an already computed Groebner basis for normal form computations."""
    B = Basis(layout, p)
    for v in gb:
        B.add(v)
    return B

"""Degree-by-degree verification of the canonical-map verdicts by exact linear
algebra over the coefficient field.

Nothing here uses Gröbner bases.  For homogeneous input, every object is a
graded vector space whose pieces are finite-dimensional:

* Tⁿ(F)_d over R is spanned by cells ``(monomial, index tuple)``;
* N, K, Span(e_ν) and I·Tⁿ(F) are spanned by monomial multiples of their
  (homogeneous) generators;
* TSⁿ(M)_d is the fixed space of the symmetric group on the quotient
  Tⁿ(F)_d / N_d.

Pieces are split further along the finest grading compatible with the input
(variable weights plus generator shifts), which keeps the matrices small.
K is built from the literal shuffle sum over (s, n−s)-shuffles.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .polyring import CoefField, Grading, Polynomial

Cell = tuple[tuple[int, ...], tuple[int, ...]]


class InhomogeneousInput(ValueError):
    """The module or ideal is not homogeneous for the requested grading."""


# --- exact linear algebra ---------------------------------------------------------


class Echelon:
    """Incremental row echelon form over a prime field or ℚ.

    Rows are sparse dicts ``{column: coeff}`` normalized to pivot 1 at their
    smallest column.  ``reduce`` eliminates every pivot column, so the
    remainder is expressed in the non-pivot columns only.
    """

    def __init__(self, field: CoefField):
        self.p = field.p
        self.rows: dict[int, dict[int, object]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        p = self.p
        v = dict(vec)
        heap = list(v)
        heapq.heapify(heap)
        seen = set()
        out = {}
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            a = v.get(c)
            if not a:
                continue
            row = self.rows.get(c)
            if row is None:
                out[c] = a
                continue
            for c2, b in row.items():
                if c2 == c:
                    continue
                x = v.get(c2, 0) - a * b
                if p:
                    x %= p
                v[c2] = x
                if c2 not in seen:
                    heapq.heappush(heap, c2)
        return {c: a for c, a in out.items() if a}

    def add(self, vec: dict) -> bool:
        r = self.reduce(vec)
        if not r:
            return False
        piv = min(r)
        a = r[piv]
        if self.p:
            inv = pow(a, -1, self.p)
            row = {c: b * inv % self.p for c, b in r.items()}
        else:
            row = {c: Fraction(b) / a for c, b in r.items()}
        self.rows[piv] = row
        return True

    def extend(self, vecs: Iterable[dict]) -> Echelon:
        for v in vecs:
            self.add(v)
        return self

    def pivots(self) -> set[int]:
        return set(self.rows)

    def rref_rows(self) -> dict[int, dict]:
        """Fully reduced rows: every row is zero in the other pivot columns."""
        out = {}
        for piv in sorted(self.rows, reverse=True):
            row = self.rows[piv]
            tail = {c: b for c, b in row.items() if c != piv}
            tail = self.reduce(tail) if tail else {}
            r = dict(tail)
            r[piv] = 1 if self.p else Fraction(1)
            out[piv] = r
        return out


def nullspace(rows: Sequence[dict], ncols: int, field: CoefField) -> list[dict]:
    """Basis of {x : row·x = 0 for all rows} as sparse vectors."""
    E = Echelon(field).extend(rows)
    rref = E.rref_rows()
    p = field.p
    out = []
    for f in range(ncols):
        if f in rref:
            continue
        x = {f: 1 if p else Fraction(1)}
        for piv, row in rref.items():
            b = row.get(f)
            if b:
                x[piv] = (-b) % p if p else -b
        out.append(x)
    return out


def brute_fixed_subspace(matrices: Sequence[Sequence[Sequence]], field: CoefField) -> list[list]:
    """Common fixed vectors of square matrices (a representation given on generators)."""
    if not matrices:
        raise ValueError("need at least one matrix or use the identity representation")
    q = len(matrices[0])
    p = field.p
    rows = []
    for Mx in matrices:
        if len(Mx) != q or any(len(r) != q for r in Mx):
            raise ValueError("representation matrices must be square of one size")
        for i in range(q):
            row = {}
            for j in range(q):
                a = field(Mx[i][j]) - (1 if i == j else 0)
                if p:
                    a %= p
                if a:
                    row[j] = a
            rows.append(row)
    basis = nullspace(rows, q, field)
    zero = 0 if p else Fraction(0)
    return [[v.get(j, zero) for j in range(q)] for v in basis]


def _fixed_dimension(columns: list[list[dict]], q: int, field: CoefField) -> int:
    """dim of common fixed space; ``columns[j][c]`` is the image of basis vector c under σ_j."""
    if q == 0:
        return 0
    p = field.p
    rows = defaultdict(dict)
    for j, cols in enumerate(columns):
        for c, img in enumerate(cols):
            col = dict(img)
            col[c] = col.get(c, 0) - 1
            for r, a in col.items():
                if p:
                    a %= p
                if a:
                    rows[(j, r)][c] = a
    E = Echelon(field).extend(rows.values())
    return q - E.rank


# --- gradings --------------------------------------------------------------------------


def _as_int_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    w = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in w:
        g = math.gcd(g, x)
    if g > 1:
        w = [x // g for x in w]
    return tuple(w)


def _relation_terms(relations) -> list[list[tuple[tuple[int, ...], int]]]:
    out = []
    for rel in relations:
        terms = [(e, i) for i, c in enumerate(rel) for e in c.terms]
        out.append(terms)
    return out


def finest_grading(nvars: int, rank: int, relations: Sequence[Sequence[Polynomial]],
                   ideal: Sequence[Polynomial]) -> list[tuple[int, ...]]:
    """Integer basis of all (variable weights, generator shifts) making the input homogeneous."""
    Q = CoefField(None)
    rows = []
    for terms in _relation_terms(relations):
        for (e0, i0), (e1, i1) in zip(terms, terms[1:]):
            row = {v: Fraction(a - b) for v, (a, b) in enumerate(zip(e0, e1)) if a != b}
            if i0 != i1:
                row[nvars + i0] = row.get(nvars + i0, 0) + 1
                row[nvars + i1] = row.get(nvars + i1, 0) - 1
            row = {k: v for k, v in row.items() if v}
            if row:
                rows.append(row)
    for f in ideal:
        monos = list(f.terms)
        for e0, e1 in zip(monos, monos[1:]):
            row = {v: Fraction(a - b) for v, (a, b) in enumerate(zip(e0, e1)) if a != b}
            if row:
                rows.append(row)
    ncols = nvars + rank
    basis = nullspace(rows, ncols, Q)
    return [_as_int_vector([b.get(k, 0) for k in range(ncols)]) for b in basis]


def infer_shifts(weight: Callable[[tuple[int, ...]], tuple[int, ...]], rank: int,
                 relations: Sequence[Sequence[Polynomial]], ideal: Sequence[Polynomial],
                 dim: int) -> tuple[tuple[int, ...], ...]:
    """Generator shifts making every relation homogeneous for ``weight``; raises if impossible."""
    for f in ideal:
        degs = {weight(e) for e in f.terms}
        if len(degs) > 1:
            raise InhomogeneousInput(f"ideal generator {f} is not homogeneous")
    shifts: list[tuple[int, ...] | None] = [None] * rank
    constraints = defaultdict(list)
    for terms in _relation_terms(relations):
        for (e0, i0), (e1, i1) in zip(terms, terms[1:]):
            # w(e0) + σ_i0 = w(e1) + σ_i1; store (j, δ) meaning σ_j = σ_i + δ
            d = tuple(a - b for a, b in zip(weight(e1), weight(e0)))
            constraints[i1].append((i0, d))
            constraints[i0].append((i1, tuple(-x for x in d)))
            if i0 == i1 and any(d):
                raise InhomogeneousInput("a relation coordinate is not homogeneous")
    for start in range(rank):
        if shifts[start] is not None:
            continue
        shifts[start] = (0,) * dim
        stack = [start]
        while stack:
            i = stack.pop()
            for j, d in constraints[i]:
                want = tuple(a + b for a, b in zip(shifts[i], d))
                if shifts[j] is None:
                    shifts[j] = want
                    stack.append(j)
                elif shifts[j] != want:
                    raise InhomogeneousInput("relations are not homogeneous for any generator shifts")
    return tuple(shifts)


# --- tensors as dicts -----------------------------------------------------------------------


def _tensor_power(vec: Sequence[Polynomial], s: int) -> dict:
    """x^{⊗s} as {(exps, index tuple): coeff}."""
    supp = [(i, c) for i, c in enumerate(vec) if c]
    out: dict = {}
    for combo in itertools.product(supp, repeat=s):
        t = tuple(i for i, _ in combo)
        prod = None
        for _, c in combo:
            prod = c if prod is None else prod * c
        if prod is None:
            continue
        for e, a in prod.terms.items():
            key = (e, t)
            out[key] = out.get(key, 0) + a
    return out


def _orbit_sum(nu: tuple[int, ...], nvars: int) -> dict:
    base = tuple(i for i, a in enumerate(nu) for _ in range(a))
    zero = (0,) * nvars
    return {(zero, t): 1 for t in set(itertools.permutations(base))}


def _shuffle_sum(a: dict, b: dict, k: int, l: int, p: int | None) -> dict:
    """Σ over (k, l)-shuffles σ of σ(a ⊗ b), with a of degree k and b of degree l."""
    n = k + l
    out: dict = {}
    for first in itertools.combinations(range(n), k):
        rest = [i for i in range(n) if i not in first]
        perm = list(first) + rest
        for (ea, ta), ca in a.items():
            for (eb, tb), cb in b.items():
                src = ta + tb
                t = [0] * n
                for pos, idx in enumerate(src):
                    t[perm[pos]] = idx
                key = (tuple(x + y for x, y in zip(ea, eb)), tuple(t))
                out[key] = out.get(key, 0) + ca * cb
    return {k2: (v % p if p else v) for k2, v in out.items() if (v % p if p else v)}


def _multi_indices(m: int, n: int) -> list[tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(m), n):
        out.append(tuple(combo.count(i) for i in range(m)))
    return out


@lru_cache(maxsize=None)
def _monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    if d < 0:
        return ()
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return tuple(out)


# --- graded verdict -------------------------------------------------------------------------


@dataclass
class DegreeRow:
    degree: int
    label: tuple | None
    cells: int
    tm_dim: int
    fixed_dim: int
    image_dim: int
    k_dim: int
    invariants_dim: int

    @property
    def surjectivity_defect(self) -> int:
        return self.fixed_dim - self.image_dim

    @property
    def injectivity_defect(self) -> int:
        return self.invariants_dim - self.k_dim

    def to_dict(self) -> dict:
        d = {
            "degree": self.degree,
            "dim_Tn_M": self.tm_dim,
            "dim_TSn_M": self.fixed_dim,
            "dim_image_TSn_F": self.image_dim,
            "dim_K": self.k_dim,
            "dim_N_sym": self.invariants_dim,
            "surjectivity_defect": self.surjectivity_defect,
            "injectivity_defect": self.injectivity_defect,
        }
        if self.label is not None:
            d["multidegree"] = list(self.label)
        return d


@dataclass
class OracleTable:
    n: int
    d_max: int
    rows: list[DegreeRow] = field(default_factory=list)
    grading_rank: int = 0
    shifts: tuple[int, ...] = ()
    grading_shifts: tuple[tuple[int, ...], ...] | None = None

    def _first(self, attr: str) -> int | None:
        ds = [r.degree for r in self.rows if getattr(r, attr) > 0]
        return min(ds) if ds else None

    @property
    def first_surjectivity_defect(self) -> int | None:
        return self._first("surjectivity_defect")

    @property
    def first_injectivity_defect(self) -> int | None:
        return self._first("injectivity_defect")

    @property
    def injective_up_to_dmax(self) -> bool:
        return self.first_injectivity_defect is None

    @property
    def surjective_up_to_dmax(self) -> bool:
        return self.first_surjectivity_defect is None

    def defect_labels(self, kind: str) -> list[tuple]:
        attr = "surjectivity_defect" if kind == "surjective" else "injectivity_defect"
        return [r.label for r in self.rows if getattr(r, attr) > 0]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d_max": self.d_max,
            "finest_grading_rank": self.grading_rank,
            "generator_shifts": list(self.shifts),
            "injective_up_to_dmax": self.injective_up_to_dmax,
            "surjective_up_to_dmax": self.surjective_up_to_dmax,
            "first_injectivity_defect": self.first_injectivity_defect,
            "first_surjectivity_defect": self.first_surjectivity_defect,
            "rows": [r.to_dict() for r in self.rows],
        } | ({"multigrading_shifts": [list(x) for x in self.grading_shifts]} if self.grading_shifts else {})


@dataclass
class GradedInput:
    """Plain data for the oracle: no module or Gröbner objects."""

    field: CoefField
    nvars: int
    rank: int
    relations: list[list[Polynomial]]
    ideal: list[Polynomial]


def graded_input(M) -> GradedInput:
    """Extract plain polynomial data from a presented module."""
    return GradedInput(
        M.ring.field,
        M.ring.nvars,
        M.rank,
        [list(r.coords) for r in M.relations],
        [f for f in M.ring.ideal if f],
    )


def graded_verdict(M, n: int, d_max: int = 6, grading: Grading | None = None) -> OracleTable:
    """Per-degree dimensions for Γⁿ(M) → TSⁿ(M), up to total degree ``d_max``.

    Rows are indexed by total degree (generator shifts included); with a
    declared multigrading they are split further by multidegree.
    """
    data = M if isinstance(M, GradedInput) else graded_input(M)
    if n < 1:
        raise ValueError("the oracle needs n >= 1")
    f = data.field
    p = f.p
    nv, m = data.nvars, data.rank
    rels, ideal = data.relations, data.ideal

    def total(e):
        return (sum(e),)

    tshift = infer_shifts(total, m, rels, ideal, 1)
    lo = min(s[0] for s in tshift)
    tshift = tuple(s[0] - lo for s in tshift)
    if grading is not None:
        if len(grading.weights) != nv:
            raise ValueError("grading must give one weight per variable")
        gdim = grading.rank

        def gw(e):
            return grading.degree_of(e)

        gshift = infer_shifts(gw, m, rels, ideal, gdim)
    fine = finest_grading(nv, m, rels, ideal)

    def cell_total(cell: Cell) -> int:
        e, t = cell
        return sum(e) + sum(tshift[i] for i in t)

    def cell_key(cell: Cell) -> tuple:
        e, t = cell
        key = [cell_total(cell)]
        for w in fine:
            key.append(sum(a * b for a, b in zip(w[:nv], e)) + sum(w[nv + i] for i in t))
        if grading is not None:
            g = list(gw(e))
            for i in t:
                g = [a + b for a, b in zip(g, gshift[i])]
            key.append(tuple(g))
        return tuple(key)

    tuples = list(itertools.product(range(m), repeat=n))
    zero_e = (0,) * nv

    # homogeneous generators as {cell: coeff}
    def poly_cells(c: Polynomial, t) -> dict:
        return {(e, t): a for e, a in c.terms.items()}

    it_gens = []
    for g in ideal:
        for t in tuples:
            it_gens.append(poly_cells(g, t))
    n_gens = []
    for rel in rels:
        for q in range(n):
            for others in itertools.product(range(m), repeat=n - 1):
                vec = {}
                for i, c in enumerate(rel):
                    if c:
                        t = others[:q] + (i,) + others[q:]
                        for e, a in c.terms.items():
                            vec[(e, t)] = vec.get((e, t), 0) + a
                vec = {k: v for k, v in vec.items() if v}
                if vec:
                    n_gens.append(vec)
    span_gens = [_orbit_sum(nu, nv) for nu in _multi_indices(m, n)]
    k_gens = []
    for rel in rels:
        for s in range(1, n + 1):
            power = _tensor_power(rel, s)
            if p:
                power = {k: v % p for k, v in power.items() if v % p}
            if not power:
                continue
            for nu in _multi_indices(m, n - s):
                y = _orbit_sum(nu, nv) if n - s else {(zero_e, ()): 1}
                z = _shuffle_sum(power, y, s, n - s, p)
                if z:
                    k_gens.append(z)

    def gen_total(g: dict) -> int:
        return cell_total(next(iter(g)))

    # bucket monomial multiples by component
    comps: dict[tuple, dict[str, list]] = defaultdict(lambda: defaultdict(list))

    def spread(gens: list[dict], kind: str):
        for g in gens:
            dg = gen_total(g)
            for d in range(dg, d_max + 1):
                for mu in _monomials(nv, d - dg):
                    vec = {(tuple(a + b for a, b in zip(mu, e)), t): c for (e, t), c in g.items()}
                    comps[cell_key(next(iter(vec)))][kind].append(vec)

    spread(it_gens, "it")
    spread(n_gens, "n")
    spread(span_gens, "span")
    spread(k_gens, "k")
    cells_by_comp: dict[tuple, list[Cell]] = defaultdict(list)
    for t in tuples:
        st = sum(tshift[i] for i in t)
        for d in range(st, d_max + 1):
            for e in _monomials(nv, d - st):
                cell = (e, t)
                cells_by_comp[cell_key(cell)].append(cell)

    sym_gens = []
    for j in range(n - 1):
        perm = list(range(n))
        perm[j], perm[j + 1] = perm[j + 1], perm[j]
        sym_gens.append(perm)

    agg: dict[tuple, list[int]] = {}
    for key in sorted(cells_by_comp):
        cells = cells_by_comp[key]
        index = {c: i for i, c in enumerate(cells)}
        kinds = comps.get(key, {})

        def idx(vs):
            out = []
            for v in vs:
                w = {}
                for c, a in v.items():
                    a = a % p if p else a
                    if a:
                        w[index[c]] = (w.get(index[c], 0) + a)
                if p:
                    w = {k: v2 % p for k, v2 in w.items() if v2 % p}
                out.append(w)
            return out

        it_v = idx(kinds.get("it", []))
        n_v = idx(kinds.get("n", []))
        span_v = idx(kinds.get("span", []))
        k_v = idx(kinds.get("k", []))

        E_it = Echelon(f).extend(it_v)
        E_n = Echelon(f).extend(it_v).extend(n_v)
        free = [i for i in range(len(cells)) if i not in E_n.rows]
        fpos = {c: i for i, c in enumerate(free)}
        columns = []
        for perm in sym_gens:
            cols = []
            for c in free:
                e, t = cells[c]
                t2 = [0] * n
                for pos, i in enumerate(t):
                    t2[perm[pos]] = i
                r = E_n.reduce({index[(e, tuple(t2))]: 1})
                cols.append({fpos[x]: a for x, a in r.items()})
            columns.append(cols)
        q = len(free)
        fixed = _fixed_dimension(columns, q, f) if sym_gens else q
        img = Echelon(f).extend(E_n.reduce(v) for v in span_v).rank
        s_it = Echelon(f).extend(it_v).extend(span_v).rank
        k_it = Echelon(f).extend(it_v).extend(k_v).rank
        r_it = E_it.rank
        ns = s_it - img - r_it
        kd = k_it - r_it
        label = key[-1] if grading is not None else None
        akey = (key[0], label)
        row = agg.setdefault(akey, [0, 0, 0, 0, 0, 0])
        for i, v in enumerate((len(cells), q, fixed, img, kd, ns)):
            row[i] += v

    table = OracleTable(n, d_max, grading_rank=len(fine), shifts=tshift,
                        grading_shifts=gshift if grading is not None else None)
    for (d, label), vals in sorted(agg.items(), key=lambda kv: (kv[0][0], kv[0][1] or ())):
        table.rows.append(DegreeRow(d, label, *vals))
    return table


def element_degree(coords: Sequence[Polynomial], m: int, n: int, shifts: Sequence[int] | None = None) -> int:
    """Total degree of an element of Tⁿ(F) given by its m**n coordinates."""
    shifts = shifts or (0,) * m
    best = -1
    for c, t in zip(coords, itertools.product(range(m), repeat=n)):
        if c:
            best = max(best, c.total_degree() + sum(shifts[i] for i in t))
    return best

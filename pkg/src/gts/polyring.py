"""Sparse multivariate polynomials over prime fields and the rationals.

Polynomials are immutable.  Terms are stored as ``{exponent tuple: coefficient}``
with zero coefficients never stored.  Coefficients in GF(p) are plain ints in
``[0, p)``; coefficients in QQ are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class RingMismatch(ValueError):
    """Raised when an operation mixes elements of different rings."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    r = math.isqrt(n)
    f = 3
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class CoefField:
    """GF(p) when ``p`` is set, QQ when ``p`` is None."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or not _is_prime(self.p):
                raise ValueError(f"modulus {self.p} is not prime")
            if self.p >= 2**31:
                raise ValueError("prime modulus must be < 2^31")

    @classmethod
    def gf(cls, p: int) -> CoefField:
        return cls(p)

    @classmethod
    def rationals(cls) -> CoefField:
        return cls(None)

    @property
    def characteristic(self) -> int:
        return self.p or 0

    def __call__(self, value) -> int | Fraction:
        """Coerce an int or Fraction into the field."""
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator {value.denominator} vanishes mod {self.p}")
            return value.numerator * pow(den, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, a):
        if self.p is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def __str__(self) -> str:
        return "QQ" if self.p is None else f"GF({self.p})"


def binomial_in_field(n: int, k: int, f: CoefField):
    """C(n, k) reduced into ``f``."""
    if not 0 <= k <= n:
        raise ValueError(f"binomial index out of range: C({n}, {k})")
    return f(math.comb(n, k))


@dataclass(frozen=True)
class MonomialOrder:
    """A global monomial order given by name: ``degrevlex``, ``deglex`` or ``lex``."""

    name: str = "degrevlex"

    def __post_init__(self):
        if self.name not in ("degrevlex", "deglex", "lex"):
            raise ValueError(f"unknown monomial order {self.name!r}")

    def key(self, exps: tuple[int, ...]):
        if self.name == "degrevlex":
            return (sum(exps), tuple(-e for e in reversed(exps)))
        if self.name == "deglex":
            return (sum(exps), exps)
        return exps


DEGREVLEX = MonomialOrder("degrevlex")


@dataclass(frozen=True)
class Grading:
    """Per-variable weight vectors in Z^g."""

    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.weights:
            raise ValueError("grading needs at least one variable")
        g = len(self.weights[0])
        if g < 1 or any(len(w) != g for w in self.weights):
            raise ValueError("all weight vectors must have the same length g >= 1")

    @property
    def rank(self) -> int:
        return len(self.weights[0])

    @classmethod
    def standard(cls, nvars: int) -> Grading:
        return cls(tuple((1,) for _ in range(nvars)))

    def degree_of(self, exps: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.rank
        for e, w in zip(exps, self.weights):
            if e:
                for k, wk in enumerate(w):
                    out[k] += e * wk
        return tuple(out)


@dataclass(frozen=True)
class PolyRing:
    """k[x_1, ..., x_d] with named variables."""

    field: CoefField
    vars: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.const(1)

    def const(self, c) -> Polynomial:
        c = self.field(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name_or_index) -> Polynomial:
        i = self.vars.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.field(1)})

    def gens(self) -> tuple[Polynomial, ...]:
        return tuple(self.gen(i) for i in range(self.nvars))

    def monomial(self, exps: Sequence[int], coeff=1) -> Polynomial:
        c = self.field(coeff)
        return Polynomial(self, {tuple(exps): c} if c else {})

    def from_terms(self, terms: Mapping[tuple[int, ...], object]) -> Polynomial:
        out = {}
        for e, c in terms.items():
            c = self.field(c)
            if c:
                out[tuple(e)] = c
        return Polynomial(self, out)

    def __call__(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise RingMismatch(f"{value.ring} is not {self}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def extend(self, new_vars: Iterable[str]) -> PolyRing:
        return PolyRing(self.field, self.vars + tuple(new_vars))

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)

    def __str__(self) -> str:
        return f"{self.field}[{','.join(self.vars)}]"


class Polynomial:
    """Immutable sparse polynomial in a :class:`PolyRing`."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        # trusted constructor: terms already normalized, never mutated afterwards
        self.ring = ring
        self.terms = terms
        self._hash = None

    def _check(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __add__(self, other) -> Polynomial:
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.field.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        p = self.ring.field.p
        if p:
            return Polynomial(self.ring, {e: (-c) % p for e, c in self.terms.items()})
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def __mul__(self, other) -> Polynomial:
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.field.p
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        if p:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: c for e, c in out.items() if c}
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> Polynomial:
        c = self.ring.field(c)
        if not c:
            return self.ring.zero()
        p = self.ring.field.p
        if p:
            return Polynomial(self.ring, {e: v * c % p for e, v in self.terms.items()})
        return Polynomial(self.ring, {e: v * c for e, v in self.terms.items()})

    def mul_monomial(self, exps: Sequence[int], c=1) -> Polynomial:
        return self * self.ring.monomial(exps, c)

    # --- structure -----------------------------------------------------------

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coefficient(self):
        return self.terms.get((0,) * self.ring.nvars, 0)

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = DEGREVLEX) -> tuple[tuple[int, ...], object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def substitute(self, images: Sequence[Polynomial], target: PolyRing | None = None) -> Polynomial:
        """Evaluate at ``images`` (one polynomial per variable, all in ``target``)."""
        target = target or self.ring
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        out = target.zero()
        cache: dict = {}
        for e, c in self.terms.items():
            t = target.const(c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    t = t * cache[key]
            out = out + t
        return out

    def to_text(self, order: MonomialOrder = DEGREVLEX) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms(order):
            mono = "*".join(
                v if a == 1 else f"{v}^{a}" for v, a in zip(self.ring.vars, e) if a
            )
            cs = _coeff_text(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r}, {self.ring})"


def _coeff_text(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def multidegree(p: Polynomial, g: Grading):
    """Common multidegree of all terms of ``p``.

    Returns ``"any"`` for the zero polynomial and ``"inhomogeneous"`` when the
    terms disagree.
    """
    if not p.terms:
        return "any"
    degs = {g.degree_of(e) for e in p.terms}
    if len(degs) > 1:
        return "inhomogeneous"
    return degs.pop()


# --- text parsing -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*'*)|(\*\*|[-+*/^()]))")


class PolyParseError(ValueError):
    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolyParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _PolyParser:
    def __init__(self, text: str, ring: PolyRing, names: Mapping[str, Polynomial] | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring
        self.names = dict(zip(ring.vars, ring.gens()))
        if names:
            self.names.update(names)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise PolyParseError(f"expected {op!r}", t[2])

    def parse(self) -> Polynomial:
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolyParseError(f"unexpected token {t[1]!r}", t[2])
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            if op == "*":
                p = p * self.unary()
            else:
                t = self.take()
                if t[0] != "num":
                    raise PolyParseError("can only divide by an integer constant", t[2])
                if t[1] == 0:
                    raise PolyParseError("division by zero", t[2])
                p = p.scale(self.ring.field(Fraction(1, t[1])))
        return p

    def unary(self) -> Polynomial:
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num":
                raise PolyParseError("exponent must be a non-negative integer", t[2])
            base = base ** t[1]
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        if t[0] == "num":
            return self.ring.const(t[1])
        if t[0] == "name":
            if t[1] not in self.names:
                raise PolyParseError(f"unknown name {t[1]!r}", t[2])
            return self.names[t[1]]
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise PolyParseError("expected a number, a variable or '('", t[2])


def parse_polynomial(text: str, ring: PolyRing, names: Mapping[str, Polynomial] | None = None) -> Polynomial:
    """Parse ``x1*z2 + y2*z1``-style text into a polynomial of ``ring``."""
    return _PolyParser(text, ring, names).parse()

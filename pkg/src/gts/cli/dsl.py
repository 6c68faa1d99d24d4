"""Parser and printer for ``.gts`` session scripts.

Grammar (statements end with ``;``, ``#`` starts a comment)::

    field k = GF(2);                      field k = QQ;
    ring A = GF(2)[s,t];                  ring B = k[x,y] / (x^2, x*y);
    extend A' = A[z] / (z*(s+t));         extend A2 = A / (s);
    module M = coker A^2 / [s, t; t, s];  module F = coker A^3;
    module M' = M tensor A';
    grade G on A = (1,1), (1,2);
    check canonical n=2 M;                check injective n=2 M witness injective [z*s @ 1 1, z*s @ 2 2];
    check surjective n=3 M;               check basechange n=2 M to A';
    check sympower n=3 k=1,2 M;           check wedge M;
    check obstruction M;                  check oracle n=2 M dmax=6 grading G;
    present n=2 M;

Polynomials are kept as normalized source text and resolved against their
ring when the script is checked.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..polyring import CoefField, PolyParseError, PolyRing, parse_polynomial

QUERY_KINDS = ("canonical", "injective", "surjective", "basechange", "sympower", "wedge", "obstruction", "oracle")
WITNESS_KINDS = ("injective", "surjective")


class ScriptError(ValueError):
    """Input error with a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# --- AST --------------------------------------------------------------------------------


@dataclass
class FieldDecl:
    name: str
    p: int | None
    pos: int = field(default=0, compare=False, repr=False)


@dataclass
class RingDecl:
    name: str
    field: str | int | None  # a field name, a prime, or None for QQ
    vars: list[str]
    ideal: list[str]
    pos: int = field(default=0, compare=False, repr=False)
    ideal_pos: list[int] = field(default_factory=list, compare=False, repr=False)


@dataclass
class ExtendDecl:
    name: str
    base: str
    new_vars: list[str]
    ideal: list[str]
    pos: int = field(default=0, compare=False, repr=False)
    ideal_pos: list[int] = field(default_factory=list, compare=False, repr=False)


@dataclass
class ModuleDecl:
    name: str
    ring: str
    rank: int
    rows: list[list[str]]
    pos: int = field(default=0, compare=False, repr=False)
    rows_pos: list[list[int]] = field(default_factory=list, compare=False, repr=False)


@dataclass
class TensorDecl:
    name: str
    module: str
    ring: str
    pos: int = field(default=0, compare=False, repr=False)


@dataclass
class GradeDecl:
    name: str
    ring: str
    weights: list[tuple[int, ...]]
    pos: int = field(default=0, compare=False, repr=False)


@dataclass
class WitnessEntry:
    coeff: str
    index: tuple[int, ...]
    pos: int = field(default=0, compare=False, repr=False)


@dataclass
class Query:
    kind: str
    target: str
    params: dict[str, list[int]] = field(default_factory=dict)
    to: str | None = None
    grading: str | None = None
    witnesses: dict[str, list[WitnessEntry]] = field(default_factory=dict)
    present: bool = False
    pos: int = field(default=0, compare=False, repr=False)


Statement = FieldDecl | RingDecl | ExtendDecl | ModuleDecl | TensorDecl | GradeDecl | Query


@dataclass
class Script:
    statements: list[Statement]
    source: str = field(default="", compare=False, repr=False)

    @property
    def queries(self) -> list[Query]:
        return [s for s in self.statements if isinstance(s, Query)]


# --- lexer ------------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+|\#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)"
    r"|(?P<int>\d+)"
    r"|(?P<op>\*\*|[=;\[\](),/^*+\-@])"
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    end: int


def line_col(source: str, pos: int) -> tuple[int, int]:
    line = source.count("\n", 0, pos) + 1
    start = source.rfind("\n", 0, pos) + 1
    return line, pos - start + 1


def tokenize(source: str) -> list[Token]:
    out = []
    i = 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        if not m:
            raise ScriptError(f"unexpected character {source[i]!r}", *line_col(source, i))
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), i, m.end()))
        i = m.end()
    out.append(Token("eof", "", len(source), len(source)))
    return out


# --- parser ----------------------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.toks = tokenize(source)
        self.i = 0

    def error(self, msg: str, pos: int | None = None) -> ScriptError:
        if pos is None:
            pos = self.peek().pos
        return ScriptError(msg, *line_col(self.src, pos))

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "ident") and t.text == text

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind not in ("op", "ident"):
            found = t.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.take()

    def ident(self, what: str = "a name") -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        return self.take()

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "int":
            raise self.error(f"expected an integer, found {t.text or 'end of input'!r}")
        self.take()
        return int(t.text)

    def signed_integer(self) -> int:
        neg = False
        if self.at("-"):
            self.take()
            neg = True
        v = self.integer()
        return -v if neg else v

    def poly_text(self, stops: tuple[str, ...]) -> tuple[str, int]:
        """Raw polynomial text up to a stop symbol at bracket depth 0."""
        depth = 0
        start = self.peek()
        last = None
        while True:
            t = self.peek()
            if t.kind == "eof":
                raise self.error("unterminated polynomial")
            if depth == 0 and t.kind == "op" and t.text in stops:
                break
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
            last = self.take()
        if last is None:
            raise self.error("expected a polynomial")
        text = " ".join(self.src[start.pos:last.end].split())
        return text, start.pos

    def script(self) -> Script:
        stmts = []
        while self.peek().kind != "eof":
            stmts.append(self.statement())
        return Script(stmts, self.src)

    def statement(self) -> Statement:
        t = self.ident("a statement keyword")
        kw = t.text
        if kw == "field":
            s = self.field_decl(t.pos)
        elif kw == "ring":
            s = self.ring_decl(t.pos)
        elif kw == "extend":
            s = self.extend_decl(t.pos)
        elif kw == "module":
            s = self.module_decl(t.pos)
        elif kw == "grade":
            s = self.grade_decl(t.pos)
        elif kw == "check":
            s = self.query(t.pos, present=False)
        elif kw == "present":
            s = self.query(t.pos, present=True)
        else:
            raise self.error(f"unknown statement {kw!r}", t.pos)
        self.expect(";")
        return s

    def field_spec(self) -> int | None | str:
        t = self.ident("a field")
        if t.text == "GF":
            self.expect("(")
            p_pos = self.peek().pos
            p = self.integer()
            self.expect(")")
            try:
                CoefField(p)
            except ValueError as exc:
                raise self.error(str(exc), p_pos) from None
            return p
        if t.text == "QQ":
            return None
        return t.text

    def field_decl(self, pos: int) -> FieldDecl:
        name = self.ident().text
        self.expect("=")
        spec_pos = self.peek().pos
        spec = self.field_spec()
        if isinstance(spec, str):
            raise self.error("a field is GF(p) or QQ", spec_pos)
        return FieldDecl(name, spec, pos)

    def var_list(self) -> list[str]:
        self.expect("[")
        out = []
        if not self.at("]"):
            out.append(self.ident("a variable").text)
            while self.at(","):
                self.take()
                out.append(self.ident("a variable").text)
        self.expect("]")
        return out

    def ideal(self) -> tuple[list[str], list[int]]:
        if not self.at("/"):
            return [], []
        self.take()
        self.expect("(")
        texts, poss = [], []
        while True:
            txt, p = self.poly_text((",", ")"))
            texts.append(txt)
            poss.append(p)
            if self.at(","):
                self.take()
                continue
            break
        self.expect(")")
        return texts, poss

    def ring_decl(self, pos: int) -> RingDecl:
        name = self.ident().text
        self.expect("=")
        spec = self.field_spec()
        vars_ = self.var_list()
        ideal, ipos = self.ideal()
        return RingDecl(name, spec, vars_, ideal, pos, ipos)

    def extend_decl(self, pos: int) -> ExtendDecl:
        name = self.ident().text
        self.expect("=")
        base = self.ident("a ring").text
        new = self.var_list() if self.at("[") else []
        ideal, ipos = self.ideal()
        return ExtendDecl(name, base, new, ideal, pos, ipos)

    def module_decl(self, pos: int) -> ModuleDecl | TensorDecl:
        name = self.ident().text
        self.expect("=")
        if self.at("coker"):
            self.take()
            ring = self.ident("a ring").text
            self.expect("^")
            rank = self.integer()
            rows, rpos = [], []
            if self.at("/"):
                self.take()
                self.expect("[")
                row, rowpos = [], []
                while True:
                    txt, p = self.poly_text((",", ";", "]"))
                    row.append(txt)
                    rowpos.append(p)
                    sep = self.take()
                    if sep.text == ",":
                        continue
                    rows.append(row)
                    rpos.append(rowpos)
                    row, rowpos = [], []
                    if sep.text == "]":
                        break
            return ModuleDecl(name, ring, rank, rows, pos, rpos)
        module = self.ident("a module").text
        self.expect("tensor")
        ring = self.ident("a ring").text
        return TensorDecl(name, module, ring, pos)

    def int_tuple(self) -> tuple[int, ...]:
        self.expect("(")
        vals = [self.signed_integer()]
        while self.at(","):
            self.take()
            vals.append(self.signed_integer())
        self.expect(")")
        return tuple(vals)

    def grade_decl(self, pos: int) -> GradeDecl:
        name = self.ident().text
        self.expect("on")
        ring = self.ident("a ring").text
        self.expect("=")
        weights = [self.int_tuple()]
        while self.at(","):
            self.take()
            weights.append(self.int_tuple())
        return GradeDecl(name, ring, weights, pos)

    def witness_entries(self) -> list[WitnessEntry]:
        self.expect("[")
        out = []
        while True:
            txt, p = self.poly_text(("@",))
            self.expect("@")
            idx = [self.integer()]
            while self.peek().kind == "int":
                idx.append(self.integer())
            out.append(WitnessEntry(txt, tuple(idx), p))
            if self.at(","):
                self.take()
                continue
            break
        self.expect("]")
        return out

    def query(self, pos: int, present: bool) -> Query:
        if present:
            kind = "present"
        else:
            kt = self.ident("a query kind")
            if kt.text not in QUERY_KINDS:
                raise self.error(f"unknown query {kt.text!r}", kt.pos)
            kind = kt.text
        q = Query(kind, "", present=present, pos=pos)
        while not self.at(";"):
            t = self.peek()
            if t.kind != "ident":
                raise self.error(f"unexpected {t.text or 'end of input'!r}")
            if self.peek(1).text == "=":
                self.take()
                self.take()
                vals = [self.integer()]
                while self.at(",") and self.peek(1).kind == "int":
                    self.take()
                    vals.append(self.integer())
                q.params[t.text] = vals
            elif t.text == "to":
                self.take()
                q.to = self.ident("a ring").text
            elif t.text == "grading":
                self.take()
                q.grading = self.ident("a grading").text
            elif t.text == "witness":
                self.take()
                wk = self.ident("injective or surjective")
                if wk.text not in WITNESS_KINDS:
                    raise self.error("witness kind must be injective or surjective", wk.pos)
                q.witnesses[wk.text] = self.witness_entries()
            else:
                if q.target:
                    raise self.error(f"unexpected name {t.text!r}")
                q.target = self.take().text
        if not q.target:
            raise self.error("query needs a module")
        return q


def parse_syntax(source: str) -> Script:
    return _Parser(source).script()


# --- name resolution --------------------------------------------------------------------------


def _check_poly(source: str, text: str, pos: int, ring: PolyRing):
    try:
        parse_polynomial(text, ring)
    except PolyParseError as exc:
        raise ScriptError(exc.args[0] if exc.args else str(exc), *line_col(source, pos + exc.offset)) from None


def resolve(script: Script):
    """Check names and polynomials; raises :class:`ScriptError` on the first problem."""
    src = script.source
    fields: dict[str, CoefField] = {}
    rings: dict[str, PolyRing] = {}
    modules: dict[str, str] = {}
    gradings: dict[str, str] = {}

    def err(msg, pos):
        return ScriptError(msg, *line_col(src, pos))

    def declared(name, pos):
        if name in fields or name in rings or name in modules or name in gradings:
            raise err(f"name {name!r} already declared", pos)

    for s in script.statements:
        if isinstance(s, FieldDecl):
            declared(s.name, s.pos)
            fields[s.name] = CoefField(s.p)
        elif isinstance(s, RingDecl):
            declared(s.name, s.pos)
            if isinstance(s.field, str):
                if s.field not in fields:
                    raise err(f"unknown field {s.field!r}", s.pos)
                f = fields[s.field]
            else:
                f = CoefField(s.field)
            if len(set(s.vars)) != len(s.vars) or not s.vars:
                raise err("ring variables must be distinct and non-empty", s.pos)
            R = PolyRing(f, tuple(s.vars))
            for txt, p in zip(s.ideal, s.ideal_pos):
                _check_poly(src, txt, p, R)
            rings[s.name] = R
        elif isinstance(s, ExtendDecl):
            declared(s.name, s.pos)
            if s.base not in rings:
                raise err(f"unknown ring {s.base!r}", s.pos)
            base = rings[s.base]
            if set(s.new_vars) & set(base.vars) or len(set(s.new_vars)) != len(s.new_vars):
                raise err("new variables must be distinct from the base variables", s.pos)
            R = base.extend(s.new_vars)
            for txt, p in zip(s.ideal, s.ideal_pos):
                _check_poly(src, txt, p, R)
            rings[s.name] = R
        elif isinstance(s, ModuleDecl):
            declared(s.name, s.pos)
            if s.ring not in rings:
                raise err(f"unknown ring {s.ring!r}", s.pos)
            if s.rank < 1:
                raise err("module rank must be >= 1", s.pos)
            for row, rpos in zip(s.rows, s.rows_pos):
                if len(row) != s.rank:
                    raise err(f"relation has {len(row)} entries, expected {s.rank}", rpos[0])
                for txt, p in zip(row, rpos):
                    _check_poly(src, txt, p, rings[s.ring])
            modules[s.name] = s.ring
        elif isinstance(s, TensorDecl):
            declared(s.name, s.pos)
            if s.module not in modules:
                raise err(f"unknown module {s.module!r}", s.pos)
            if s.ring not in rings:
                raise err(f"unknown ring {s.ring!r}", s.pos)
            modules[s.name] = s.ring
        elif isinstance(s, GradeDecl):
            declared(s.name, s.pos)
            if s.ring not in rings:
                raise err(f"unknown ring {s.ring!r}", s.pos)
            if len(s.weights) != rings[s.ring].nvars:
                raise err(f"grading needs {rings[s.ring].nvars} weight vectors", s.pos)
            if len({len(w) for w in s.weights}) != 1:
                raise err("weight vectors must have equal length", s.pos)
            gradings[s.name] = s.ring
        elif isinstance(s, Query):
            if s.target not in modules:
                raise err(f"unknown module {s.target!r}", s.pos)
            if s.to is not None and s.to not in rings:
                raise err(f"unknown ring {s.to!r}", s.pos)
            if s.grading is not None and s.grading not in gradings:
                raise err(f"unknown grading {s.grading!r}", s.pos)
            need_n = s.kind not in ("wedge", "obstruction")
            if need_n and "n" not in s.params:
                raise err("query needs n=", s.pos)
            if s.kind == "basechange" and s.to is None:
                raise err("basechange needs 'to RING'", s.pos)
            if s.kind == "sympower" and "k" not in s.params:
                raise err("sympower needs k=", s.pos)
            R = rings[modules[s.target]]
            for entries in s.witnesses.values():
                for e in entries:
                    _check_poly(src, e.coeff, e.pos, rings[s.to] if s.to else R)
    return fields, rings, modules, gradings


def parse(source: str) -> Script:
    """Parse and resolve a script."""
    script = parse_syntax(source)
    resolve(script)
    return script


# --- printer ---------------------------------------------------------------------------------


def _field_text(f) -> str:
    if f is None:
        return "QQ"
    if isinstance(f, int):
        return f"GF({f})"
    return f


def print_script(script: Script) -> str:
    lines = []
    for s in script.statements:
        lines.append(print_statement(s))
    return "\n".join(lines) + ("\n" if lines else "")


def print_statement(s: Statement) -> str:
    if isinstance(s, FieldDecl):
        return f"field {s.name} = {_field_text(s.p)};"
    if isinstance(s, RingDecl):
        out = f"ring {s.name} = {_field_text(s.field)}[{', '.join(s.vars)}]"
        if s.ideal:
            out += f" / ({', '.join(s.ideal)})"
        return out + ";"
    if isinstance(s, ExtendDecl):
        out = f"extend {s.name} = {s.base}"
        if s.new_vars:
            out += f"[{', '.join(s.new_vars)}]"
        if s.ideal:
            out += f" / ({', '.join(s.ideal)})"
        return out + ";"
    if isinstance(s, ModuleDecl):
        out = f"module {s.name} = coker {s.ring}^{s.rank}"
        if s.rows:
            out += " / [" + "; ".join(", ".join(r) for r in s.rows) + "]"
        return out + ";"
    if isinstance(s, TensorDecl):
        return f"module {s.name} = {s.module} tensor {s.ring};"
    if isinstance(s, GradeDecl):
        return f"grade {s.name} on {s.ring} = " + ", ".join(
            "(" + ", ".join(map(str, w)) + ")" for w in s.weights) + ";"
    if isinstance(s, Query):
        parts = ["present"] if s.present else ["check", s.kind]
        for k, v in s.params.items():
            if k != "dmax":
                parts.append(f"{k}={','.join(map(str, v))}")
        parts.append(s.target)
        if "dmax" in s.params:
            parts.append(f"dmax={','.join(map(str, s.params['dmax']))}")
        if s.to:
            parts.append(f"to {s.to}")
        if s.grading:
            parts.append(f"grading {s.grading}")
        for kind, entries in s.witnesses.items():
            body = ", ".join(f"{e.coeff} @ {' '.join(map(str, e.index))}" for e in entries)
            parts.append(f"witness {kind} [{body}]")
        return " ".join(parts) + ";"
    raise TypeError(f"not a statement: {s!r}")

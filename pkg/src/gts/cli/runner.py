"""Execute parsed scripts and render reports."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .._gbcore import collect_stats
from ..basechange import (
    BaseExtension,
    IllFormedRingMap,
    base_change_injective,
    base_change_maps,
    base_change_surjective,
    diagram_cross_check,
    extend_module,
)
from ..extalg import algebra_degreewise_check, ts_module_structure_obstruction, wedge_kernel_check
from ..gammats import (
    CheckReport,
    PresentedModule,
    canonical_data,
    check_injective,
    check_surjective,
    clear_cache,
    gamma_presentation,
    tensor_text,
    ts_presentation,
)
from ..modgb import ModElement, QuotientRing, using_order
from ..oracle import InhomogeneousInput, element_degree, graded_verdict
from ..polyring import CoefField, Grading, PolyRing, parse_polynomial
from ..tensoralg import GuardrailExceeded, TensorPower, check_guardrail, multi_indices
from .dsl import (
    ExtendDecl,
    FieldDecl,
    GradeDecl,
    ModuleDecl,
    Query,
    RingDecl,
    Script,
    ScriptError,
    TensorDecl,
    line_col,
    parse,
    print_statement,
)

SCHEMA = 1


@dataclass
class Flags:
    order: str = "top"
    dmax: int = 6
    guardrail: int | None = None
    oracle: bool = False
    witness_verify: bool = True
    timing: bool = False
    parallel: bool = False


@dataclass
class Env:
    rings: dict[str, QuotientRing] = field(default_factory=dict)
    modules: dict[str, PresentedModule] = field(default_factory=dict)
    gradings: dict[str, Grading] = field(default_factory=dict)


def _field(spec, fields: dict[str, CoefField]) -> CoefField:
    return fields[spec] if isinstance(spec, str) else CoefField(spec)


def build_env(script: Script) -> Env:
    """Materialize the declarations of a resolved script."""
    fields: dict[str, CoefField] = {}
    env = Env()
    for s in script.statements:
        if isinstance(s, FieldDecl):
            fields[s.name] = CoefField(s.p)
        elif isinstance(s, RingDecl):
            R = PolyRing(_field(s.field, fields), tuple(s.vars))
            env.rings[s.name] = QuotientRing(R, [parse_polynomial(f, R) for f in s.ideal])
        elif isinstance(s, ExtendDecl):
            base = env.rings[s.base]
            R = base.base.extend(s.new_vars)
            images = R.gens()[: base.nvars]
            old = [f.substitute(images, R) for f in base.ideal]
            env.rings[s.name] = QuotientRing(R, old + [parse_polynomial(f, R) for f in s.ideal])
        elif isinstance(s, ModuleDecl):
            A = env.rings[s.ring]
            env.modules[s.name] = PresentedModule.from_rows(
                A, s.rank, [[parse_polynomial(c, A.base) for c in row] for row in s.rows], s.name)
        elif isinstance(s, TensorDecl):
            M = env.modules[s.module]
            M2 = extend_module(M, BaseExtension.by_name(M.ring, env.rings[s.ring]))
            env.modules[s.name] = PresentedModule(M2.ring, M2.rank, M2.relations, s.name)
        elif isinstance(s, GradeDecl):
            env.gradings[s.name] = Grading(tuple(tuple(w) for w in s.weights))
    return env


# --- witness clauses ------------------------------------------------------------------------


def _claimed_element(q: Query, kind: str, T: TensorPower, source: str) -> ModElement:
    R = T.ring
    out = T.space.zero()
    for e in q.witnesses[kind]:
        if len(e.index) != T.n or not all(1 <= i <= T.m for i in e.index):
            raise ScriptError(f"witness index must be {T.n} numbers in 1..{T.m}", *line_col(source, e.pos))
        out = out + parse_polynomial(e.coeff, R) * T.basis([i - 1 for i in e.index])
    return out


def _claim_result(x: ModElement, M: PresentedModule, n: int, valid: dict[str, bool],
                  same_class: bool | None) -> dict:
    return {
        "element": tensor_text(x, M.rank, n, M.labels()),
        **valid,
        "valid": all(valid.values()),
        "same_class_as_reported": same_class,
    }


def check_canonical_claim(q: Query, kind: str, M: PresentedModule, n: int, rep: CheckReport,
                          guardrail, source: str) -> dict:
    """A claimed witness for the canonical map, checked independently of the search."""
    D = canonical_data(M, n, guardrail)
    x = _claimed_element(q, kind, D.T, source)
    if kind == "injective":
        valid = {
            "in_symmetric_part_of_N": D.N.contains(x) and D.T.is_symmetric(x, D.space.zero_submodule()),
            "outside_K": not D.K.contains(x),
        }
        modulo = D.K
    else:
        valid = {"in_L": D.in_L(x), "outside_span_plus_N": not D.span_plus_N.contains(x)}
        modulo = D.span_plus_N
    same = modulo.contains(x - rep.witness) if rep.witness is not None else None
    return _claim_result(x, M, n, valid, same)


def check_basechange_claim(q: Query, kind: str, M: PresentedModule, n: int, e: BaseExtension,
                           rep: CheckReport, guardrail, source: str) -> dict:
    B = base_change_maps(M, n, e, guardrail)
    D2 = B.target
    x = _claimed_element(q, kind, D2.T, source)
    M2 = extend_module(M, e)
    if kind == "injective":
        symmetric = D2.T.is_symmetric(x, D2.space.zero_submodule())
        z = D2.T.to_orbit(x)
        coords = [z.coords.get(nu, e.target.base.zero()) for nu in multi_indices(D2.T.m, n)]
        coords += [e.target.base.zero()] * (B.C.rank - len(coords))
        c = B.C(coords)
        valid = {
            "symmetric": symmetric,
            "maps_to_zero": symmetric and D2.N.contains(B.combine(c)),
            "nonzero_in_source": not B.rel.contains(c),
        }
        same = B.rel.contains(c - rep.witness) if rep.witness is not None else None
    else:
        valid = {"in_L": D2.in_L(x), "outside_image": not B.U.contains(x)}
        same = B.U.contains(x - rep.witness) if rep.witness is not None else None
    return _claim_result(x, M2, n, valid, same)


# --- queries ------------------------------------------------------------------------------------


def _n(q: Query) -> int:
    return q.params["n"][0]


def _oracle_agreement(M: PresentedModule, n: int, dmax: int, grading: Grading | None,
                      guardrail, verify: bool) -> dict:
    check_guardrail(M.rank, n, guardrail)
    table = graded_verdict(M, n, dmax, grading)
    out = {"table": table.to_dict()}
    agree = True
    for kind, rep, first in (
        ("injective", check_injective(M, n, guardrail, verify), table.first_injectivity_defect),
        ("surjective", check_surjective(M, n, guardrail, verify), table.first_surjectivity_defect),
    ):
        wdeg = None
        if rep.witness is not None:
            wdeg = element_degree(rep.witness.reduced().coords, M.rank, n, table.shifts)
        if rep.holds:
            ok = first is None
        else:
            ok = wdeg is not None and wdeg <= dmax and first == wdeg
        agree &= ok
        out[kind] = {"gb_verdict": rep.verdict, "witness_degree": wdeg, "first_defect_degree": first,
                     "agrees": ok}
    out["agrees"] = agree
    return out


def run_query(q: Query, env: Env, flags: Flags, source: str) -> dict:
    g = flags.guardrail
    verify = flags.witness_verify
    M = env.modules[q.target]
    res: dict = {"kind": q.kind, "module": q.target}
    mismatch = False
    if q.kind == "present":
        n = _n(q)
        G = gamma_presentation(M, n, g)
        TS = ts_presentation(M, n, g)
        res["n"] = n
        res["gamma"] = {"rank": G.rank, "relations": [[c.to_text() for c in r.reduced().coords] for r in G.relations]}
        res["ts"] = {
            "rank": TS.module.rank,
            "generators": [tensor_text(v, M.rank, n, M.labels()) for v in TS.generators],
            "relations": [[c.to_text() for c in r.reduced().coords] for r in TS.module.relations],
        }
    elif q.kind in ("canonical", "injective", "surjective"):
        n = _n(q)
        res["n"] = n
        kinds = ("injective", "surjective") if q.kind == "canonical" else (q.kind,)
        for kind in kinds:
            fn = check_injective if kind == "injective" else check_surjective
            rep = fn(M, n, g, verify)
            res[kind] = rep.to_dict()
            if kind in q.witnesses:
                claim = check_canonical_claim(q, kind, M, n, rep, g, source)
                res[kind]["claimed_witness"] = claim
                mismatch |= not claim["valid"]
        if flags.oracle:
            try:
                res["oracle"] = _oracle_agreement(M, n, flags.dmax, None, g, verify)
                mismatch |= not res["oracle"]["agrees"]
            except InhomogeneousInput as exc:
                res["oracle"] = {"skipped": str(exc)}
    elif q.kind == "basechange":
        n = _n(q)
        res["n"] = n
        res["to"] = q.to
        e = BaseExtension.by_name(M.ring, env.rings[q.to])
        inj = base_change_injective(M, n, e, g, verify)
        sur = base_change_surjective(M, n, e, g, verify)
        res["injective"] = inj.to_dict()
        res["surjective"] = sur.to_dict()
        for kind, rep in (("injective", inj), ("surjective", sur)):
            if kind in q.witnesses:
                claim = check_basechange_claim(q, kind, M, n, e, rep, g, source)
                res[kind]["claimed_witness"] = claim
                mismatch |= not claim["valid"]
        res["diagram"] = diagram_cross_check(M, n, e, g, direct=(inj, sur)).to_dict()
    elif q.kind == "sympower":
        n = _n(q)
        res["n"] = n
        res["degrees"] = []
        for d in algebra_degreewise_check(M, n, q.params["k"], g):
            row = d.to_dict()
            if not flags.timing:
                row.pop("seconds", None)
            res["degrees"].append(row)
    elif q.kind == "wedge":
        res.update(wedge_kernel_check(M, g).to_dict())
    elif q.kind == "obstruction":
        res.update(ts_module_structure_obstruction(M, g).to_dict())
    elif q.kind == "oracle":
        n = _n(q)
        res["n"] = n
        dmax = q.params.get("dmax", [flags.dmax])[0]
        grading = env.gradings[q.grading] if q.grading else None
        res.update(_oracle_agreement(M, n, dmax, grading, g, verify))
        mismatch |= not res["agrees"]
    res["mismatch"] = mismatch
    return res


def _execute(index: int, script: Script, flags: Flags) -> dict:
    """Run one query from a cold start so reports do not depend on earlier queries."""
    q = script.queries[index]
    head = {"index": index, "query": print_statement(q)}
    clear_cache()
    env = build_env(script)
    source = script.source
    t0 = time.perf_counter()
    try:
        with using_order(flags.order), collect_stats() as stats:
            res = run_query(q, env, flags, source)
        out = {**head, "status": "ok", **res, "gb_stats": stats.as_dict()}
    except GuardrailExceeded as exc:
        out = {**head, "status": "error", "error": f"guardrail: {exc}"}
    except (InhomogeneousInput, IllFormedRingMap, ScriptError, ValueError) as exc:
        out = {**head, "status": "error", "error": str(exc)}
    if flags.timing:
        out["seconds"] = round(time.perf_counter() - t0, 3)
    return out


def _worker(args) -> dict:
    source, index, flags = args
    return _execute(index, parse(source), flags)


@dataclass
class RunReport:
    results: list[dict]
    source_name: str = ""

    @property
    def errors(self) -> int:
        return sum(r["status"] == "error" for r in self.results)

    @property
    def mismatches(self) -> int:
        return sum(bool(r.get("mismatch")) for r in self.results)

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 2
        return 1 if self.mismatches else 0

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "source": self.source_name, "queries": self.results}


def run_script(script: Script, flags: Flags | None = None, source_name: str = "") -> RunReport:
    flags = flags or Flags()
    build_env(script)
    n = len(script.queries)
    if flags.parallel and n > 1:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_worker, [(script.source, i, flags) for i in range(n)]))
    else:
        results = [_execute(i, script, flags) for i in range(n)]
    return RunReport(results, source_name)


def run_source(source: str, flags: Flags | None = None, source_name: str = "") -> RunReport:
    return run_script(parse(source), flags, source_name)


# --- rendering ------------------------------------------------------------------------------------


def _check_lines(label: str, d: dict) -> list[str]:
    lines = [f"  {label}: {d['verdict']}"]
    w = d.get("witness")
    if w:
        lines.append(f"    witness: {w['class']}")
    if "witness_orbit" in d:
        lines.append(f"    orbit form: {d['witness_orbit']}")
    if "coefficients_text" in d:
        lines.append(f"    coefficients: [{', '.join(d['coefficients_text'])}]")
    c = d.get("claimed_witness")
    if c:
        state = "valid" if c["valid"] else "INVALID"
        same = c["same_class_as_reported"]
        tail = "" if same is None else f", same class as reported: {'yes' if same else 'no'}"
        lines.append(f"    claimed witness {c['element']}: {state}{tail}")
    return lines


def _oracle_lines(o: dict) -> list[str]:
    t = o["table"]
    lines = [f"  oracle (d_max={t['d_max']}): agrees with GB: {'yes' if o['agrees'] else 'NO'}"]
    for kind in ("injective", "surjective"):
        k = o[kind]
        lines.append(f"    {kind}: GB {k['gb_verdict']}, witness degree {k['witness_degree']}, "
                     f"first defect {k['first_defect_degree']}")
    for r in t["rows"]:
        label = f"{r['degree']}" + (f" {tuple(r['multidegree'])}" if "multidegree" in r else "")
        if r["surjectivity_defect"] or r["injectivity_defect"]:
            lines.append(f"    degree {label}: surj defect {r['surjectivity_defect']}, "
                         f"inj defect {r['injectivity_defect']}")
    return lines


def render_text(report: RunReport) -> str:
    out = []
    for r in report.results:
        out.append(f"[{r['index'] + 1}] {r['query']}")
        if r["status"] == "error":
            out.append(f"  error: {r['error']}")
            continue
        kind = r["kind"]
        if kind == "present":
            out.append(f"  Gamma^{r['n']}: rank {r['gamma']['rank']}, relations {r['gamma']['relations']}")
            out.append(f"  TS^{r['n']}: rank {r['ts']['rank']}, relations {r['ts']['relations']}")
            out.append(f"    generators: {'; '.join(r['ts']['generators'])}")
        elif kind in ("canonical", "injective", "surjective", "basechange"):
            for k in ("injective", "surjective"):
                if k in r:
                    out.extend(_check_lines(k, r[k]))
            if "diagram" in r:
                dg = r["diagram"]
                out.append(f"  diagram: implied {dg['implied']}, agrees: {'yes' if dg['agrees'] else 'NO'}")
            if "oracle" in r:
                o = r["oracle"]
                out.extend([f"  oracle skipped: {o['skipped']}"] if "skipped" in o else _oracle_lines(o))
        elif kind == "sympower":
            for d in r["degrees"]:
                out.append(f"  k={d['k']}: injective {d['injective']['verdict']}, "
                           f"surjective {d['surjective']['verdict']}")
        elif kind == "wedge":
            out.append(f"  {r['verdict']} (kernel proper in TS^2: {r['kernel_proper_in_TS2']})")
        elif kind == "obstruction":
            out.append(f"  {r['obstruction']}" + (f": eta = {r['eta']}" if "eta" in r else ""))
        elif kind == "oracle":
            out.extend(_oracle_lines(r))
        if "seconds" in r:
            out.append(f"  time: {r['seconds']} s")
    return "\n".join(out) + ("\n" if out else "")


def render_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False, sort_keys=False) + "\n"

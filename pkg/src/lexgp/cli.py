"""Command-line front end: problem files in, reports out.

A problem file is JSON with three top-level keys::

    {
      "variables": ["x1", "x2"],
      "objectives": [
        {"name": "cost", "terms": [{"coeff": 1.0, "exponents": [-1, 0]}]}
      ],
      "constraints": [
        {"terms": [{"coeff": 2.0, "exponents": [1, 1]}], "bound": 10.0}
      ]
    }

Objective order is priority order.  Subcommands: ``solve`` (full
lexicographic run), ``stage`` (one stage), ``dual`` (emit the dual
program of a stage), ``check`` (validation and shape report).  The
report goes to stdout, diagnostics to stderr, and the exit status is 0
on success, 1 when a solve fails, 2 when the input is at fault.  JSON
reports are byte-deterministic for identical inputs and flags; floats
are printed with 9 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from .duality import DualProgram, build_dual, weight_labels
from .errors import (EmptyObjectives, ExponentLengthMismatch, InputError,
                     LexGPError, MalformedDocument, NonpositiveBound,
                     NonpositiveCoefficient)
from .lexicographic import (LexMode, SolveOptions, StageSolution,
                            build_stage, solve_lexicographic, solve_stage,
                            stage_program)
from .oracle import solve_primal_log_space
from .posynomial import (Constraint, LexGPProblem, Posynomial, Term,
                         degree_of_difficulty, evaluate, exponent_matrix,
                         rank)


# ---------------------------------------------------------------------------
# parsing

def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedDocument(f"{path}: expected a number, got {value!r}")
    return float(value)


def _term(doc, path: str, n: int) -> Term:
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{path}: expected an object")
    unknown = set(doc) - {"coeff", "exponents"}
    if unknown:
        raise MalformedDocument(f"{path}: unknown key {sorted(unknown)[0]!r}")
    if "coeff" not in doc:
        raise MalformedDocument(f"{path}.coeff: missing")
    coeff = _number(doc["coeff"], f"{path}.coeff")
    if coeff <= 0.0:
        raise NonpositiveCoefficient(
            f"{path}.coeff: must be positive, got {coeff:g}")
    if "exponents" not in doc:
        raise MalformedDocument(f"{path}.exponents: missing")
    exps = doc["exponents"]
    if not isinstance(exps, list):
        raise MalformedDocument(f"{path}.exponents: expected an array")
    if len(exps) != n:
        raise ExponentLengthMismatch(
            f"{path}.exponents: has {len(exps)} entries, expected {n}")
    row = [_number(v, f"{path}.exponents[{j}]") for j, v in enumerate(exps)]
    return Term(coeff, np.array(row))


def _posynomial(doc, path: str, n: int) -> Posynomial:
    if not isinstance(doc, list) or not doc:
        raise MalformedDocument(f"{path}: expected a nonempty array of terms")
    return Posynomial(tuple(_term(t, f"{path}[{i}]", n)
                            for i, t in enumerate(doc)))


def parse_problem_document(text: str):
    """Parse and validate a problem file; returns the problem plus the
    objective names, which live in the file but not the model."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top level: expected an object")
    unknown = set(doc) - {"variables", "objectives", "constraints"}
    if unknown:
        raise MalformedDocument(f"top level: unknown key {sorted(unknown)[0]!r}")
    if "variables" not in doc:
        raise MalformedDocument("variables: missing")
    variables = doc["variables"]
    if (not isinstance(variables, list) or not variables
            or not all(isinstance(v, str) for v in variables)):
        raise MalformedDocument("variables: expected a nonempty array of names")
    if len(set(variables)) != len(variables):
        raise MalformedDocument("variables: names must be distinct")
    n = len(variables)
    if "objectives" not in doc:
        raise MalformedDocument("objectives: missing")
    objs_doc = doc["objectives"]
    if not isinstance(objs_doc, list):
        raise MalformedDocument("objectives: expected an array")
    if not objs_doc:
        raise EmptyObjectives("objectives: at least one objective is required")
    names = []
    objectives = []
    for k, od in enumerate(objs_doc):
        path = f"objectives[{k}]"
        if not isinstance(od, dict):
            raise MalformedDocument(f"{path}: expected an object")
        unknown = set(od) - {"name", "terms"}
        if unknown:
            raise MalformedDocument(f"{path}: unknown key {sorted(unknown)[0]!r}")
        name = od.get("name")
        if not isinstance(name, str) or not name:
            raise MalformedDocument(f"{path}.name: expected a nonempty string")
        names.append(name)
        objectives.append(_posynomial(od.get("terms"), f"{path}.terms", n))
    constraints = []
    for i, cd in enumerate(doc.get("constraints", [])):
        path = f"constraints[{i}]"
        if not isinstance(cd, dict):
            raise MalformedDocument(f"{path}: expected an object")
        unknown = set(cd) - {"terms", "bound"}
        if unknown:
            raise MalformedDocument(f"{path}: unknown key {sorted(unknown)[0]!r}")
        lhs = _posynomial(cd.get("terms"), f"{path}.terms", n)
        if "bound" not in cd:
            raise MalformedDocument(f"{path}.bound: missing")
        bound = _number(cd["bound"], f"{path}.bound")
        if bound <= 0.0:
            raise NonpositiveBound(
                f"{path}.bound: must be positive, got {bound:g}")
        constraints.append(Constraint(lhs=lhs, bound=bound))
    problem = LexGPProblem(variable_names=tuple(variables),
                           objectives=tuple(objectives),
                           constraints=tuple(constraints))
    return problem, tuple(names)


def parse_problem(text: str) -> LexGPProblem:
    """Validated problem from problem-file text."""
    return parse_problem_document(text)[0]


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise MalformedDocument(f"cannot read {path}: {exc}") from exc
    return parse_problem_document(text)


# ---------------------------------------------------------------------------
# report assembly

def _r9(v) -> float:
    """Round to the 9 significant digits the reports promise."""
    return float(f"{float(v):.9g}")


def _f9(v) -> str:
    return f"{float(v):.9g}"


def _point_map(names, x) -> dict:
    return {name: _r9(v) for name, v in zip(names, x)}


def _problem_header(problem: LexGPProblem, names) -> dict:
    return {
        "variables": list(problem.variable_names),
        "objectives": list(names),
        "constraints": len(problem.constraints),
    }


def _oracle_record(stage, opts: SolveOptions):
    res = solve_primal_log_space(stage, tol=opts.oracle_tol,
                                 max_iter=opts.oracle_max_iter)
    return {"value": _r9(res.value), "status": res.status.value}


def _stage_record(st: StageSolution, name: str, problem: LexGPProblem,
                  oracle: dict | None) -> dict:
    labels = weight_labels(build_dual(st.stage))
    return {
        "index": st.stage_index,
        "objective": name,
        "degree_of_difficulty": st.degree_of_difficulty,
        "dual_method": st.dual.method.value,
        "dual_optimum": _r9(st.dual.value),
        "dual_weights": {lab: _r9(w) for lab, w in zip(labels, st.dual.w)},
        "constraint_activity": [_r9(u) for u in st.dual.activity],
        "primal_point": _point_map(problem.variable_names, st.primal.x),
        "objective_value": _r9(st.objective_value),
        "unique_minimizer": st.primal.unique,
        "optimal_set_dimension": st.primal.optimal_set_dimension,
        "carried_bound": None if st.carried_bound is None
                         else _r9(st.carried_bound),
        "residuals": {
            "equality": _r9(st.dual.residual),
            "recovery_consistency": _r9(st.primal.consistency_residual),
            "duality_gap": _r9(st.primal.duality_gap),
            "feasibility_margin": _r9(st.primal.feasibility_margin),
        },
        "oracle": oracle,
    }


def _solve_document(problem, names, args, opts) -> dict:
    mode = LexMode(args.mode)
    sol = solve_lexicographic(problem, mode=mode, carry_eps=args.carry_eps,
                              options=opts)
    records = []
    for st, name in zip(sol.stages, names):
        oracle = _oracle_record(st.stage, opts) if args.oracle else None
        records.append(_stage_record(st, name, problem, oracle))
    return {
        "problem": _problem_header(problem, names),
        "mode": mode.value,
        "carry_eps": _r9(args.carry_eps),
        "stages": records,
        "final_point": _point_map(problem.variable_names, sol.final_x),
        "objective_vector": [_r9(v) for v in sol.objective_vector],
    }


def _stage_document(problem, names, args, opts) -> dict:
    _check_index(args.index, len(problem.objectives))
    mode = LexMode(args.mode)
    s = stage_program(problem, args.index, mode=mode,
                      carry_eps=args.carry_eps, options=opts)
    dual, primal = solve_stage(s, opts)
    st = StageSolution(stage_index=args.index, stage=s, dual=dual,
                       primal=primal,
                       objective_value=evaluate(s.objective, primal.x),
                       carried_bound=None,
                       degree_of_difficulty=degree_of_difficulty(s))
    oracle = _oracle_record(s, opts) if args.oracle else None
    return {
        "problem": _problem_header(problem, names),
        "mode": mode.value,
        "stage": _stage_record(st, names[args.index], problem, oracle),
    }


def _dual_document(problem, names, args, opts) -> dict:
    _check_index(args.index, len(problem.objectives))
    mode = LexMode(args.mode)
    s = stage_program(problem, args.index, mode=mode,
                      carry_eps=args.carry_eps, options=opts)
    d = build_dual(s)
    return {
        "problem": _problem_header(problem, names),
        "mode": mode.value,
        "index": args.index,
        "objective": names[args.index],
        "degree_of_difficulty": degree_of_difficulty(s),
        "weight_labels": list(weight_labels(d)),
        "coefficients": [_r9(c) for c in d.coeffs],
        "equality_matrix": [[_r9(v) for v in row] for row in d.equality_matrix],
        "equality_rhs": [_r9(v) for v in d.equality_rhs],
    }


def _check_document(problem, names, args, opts) -> dict:
    per_stage = []
    total_terms = 0
    for k, name in enumerate(names):
        s = build_stage(problem, k, ())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dod = degree_of_difficulty(s)
        per_stage.append({
            "index": k,
            "objective": name,
            "terms": s.num_terms,
            "degree_of_difficulty": dod,
            "exponent_rank": rank(exponent_matrix(s)),
        })
        total_terms += problem.objectives[k].num_terms
    total_terms += sum(c.lhs.num_terms for c in problem.constraints)
    return {
        "valid": True,
        "problem": _problem_header(problem, names),
        "per_stage": per_stage,
        "aggregate_degree_of_difficulty": total_terms - problem.n - 1,
    }


def _check_index(index: int, count: int):
    if not 0 <= index < count:
        raise InputError(
            f"--index {index} out of range: the file has {count} objectives")


# ---------------------------------------------------------------------------
# emission

def emit_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def parse_report(text: str) -> dict:
    """Inverse of :func:`emit_json` for report documents."""
    return json.loads(text)


def _table_lines(doc: dict, lines: list[str], indent: str = ""):
    for key, value in doc.items():
        label = key.replace("_", " ")
        if isinstance(value, dict):
            lines.append(f"{indent}{label}")
            _table_lines(value, lines, indent + "  ")
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for item in value:
                lines.append(f"{indent}{label}[{item.get('index', '')}]")
                _table_lines(item, lines, indent + "  ")
        else:
            lines.append(f"{indent}{label:<24}{_scalar(value)}")


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, float):
        return _f9(value)
    if isinstance(value, list):
        return "[" + ", ".join(_scalar(v) for v in value) + "]"
    return str(value)


def emit_table(doc: dict) -> str:
    lines: list[str] = []
    _table_lines(doc, lines)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dispatch

_COMMANDS = {
    "solve": _solve_document,
    "stage": _stage_document,
    "dual": _dual_document,
    "check": _check_document,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem file (JSON)")
    common.add_argument("--mode", choices=("strict", "independent"),
                        default="strict",
                        help="carry each solved objective as a constraint "
                             "(strict, default) or drop it (independent)")
    common.add_argument("--carry-eps", type=float, default=1e-6,
                        metavar="REAL",
                        help="relative slack on carried bounds (default 1e-6)")
    common.add_argument("--tol", type=float, default=None, metavar="REAL",
                        help="override the dual and oracle tolerances")
    common.add_argument("--format", choices=("json", "table"),
                        default="table", dest="fmt",
                        help="report format (default table)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for commands that sample; accepted "
                             "everywhere for uniformity")
    common.add_argument("--oracle", action="store_true",
                        help="include the independent descent cross-check")
    common.add_argument("--quiet", action="store_true",
                        help="suppress warnings on the error stream")
    parser = argparse.ArgumentParser(
        prog="lexgp",
        description="lexicographic posynomial geometric programming solver")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common],
                   help="solve all objectives in priority order")
    for name, blurb in (("stage", "solve a single stage"),
                        ("dual", "emit a stage's dual program")):
        p = sub.add_parser(name, parents=[common], help=blurb)
        p.add_argument("--index", type=int, required=True,
                       help="objective index, 0-based")
    sub.add_parser("check", parents=[common],
                   help="validate a file and report shapes")
    return parser


def run(argv=None) -> int:
    """Entry point returning the exit status instead of raising."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    with warnings.catch_warnings():
        if args.quiet:
            warnings.simplefilter("ignore")
        try:
            problem, names = _load(args.file)
            tol = args.tol
            opts = SolveOptions() if tol is None else SolveOptions(
                dual_tol=tol, oracle_tol=tol)
            doc = _COMMANDS[args.command](problem, names, args, opts)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except LexGPError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    text = emit_json(doc) if args.fmt == "json" else emit_table(doc)
    sys.stdout.write(text)
    return 0


def main():
    raise SystemExit(run())

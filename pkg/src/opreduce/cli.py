"""Command-line front end: ``reduce``, ``solve`` and ``verify``.

Exit codes: 0 success, 1 verification failure (deviation above ``--tol`` or a
failing property suite), 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .canonical_forms import Orientation, RankOneSpec, ZeroSpecError, DegenerateError
from .cauchy import CauchyProblem, ProblemError, max_deviation, solve_coupled, solve_decoupled
from .exact_linalg import DimensionError, Mat, Poly
from .oracle import PolyExpFunction
from .reduction import (
    CouplingEquation,
    ForcingExpr,
    ReducedEquation,
    partial_reduce_jordan,
    partial_reduce_rational,
    total_reduce_adjugate,
    total_reduce_rank_one,
)
from .verify import run_suites

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------------------
# input

def _locate(text: str, key: str) -> int | None:
    needle = '"%s"' % key
    for lineno, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return lineno
    return None


def _rational(value, where: str, text: str, key: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError("%s: write rationals as strings like \"p/q\", got %r" % (where, value),
                         _locate(text, key))
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError("%s: not a rational number: %r" % (where, value), _locate(text, key))


def _field(doc: dict, key: str, text: str):
    if key not in doc:
        raise InputError("missing field %r" % key, 1)
    return doc[key]


def parse_matrix(doc: dict, text: str):
    """Return a :class:`RankOneSpec` for hat/check kinds, a :class:`Mat` for dense."""
    m = _field(doc, "matrix", text)
    if not isinstance(m, dict):
        raise InputError("'matrix' must be an object", _locate(text, "matrix"))
    kind = m.get("kind")
    try:
        if kind in ("hat", "check"):
            b = m.get("b")
            if not isinstance(b, list):
                raise InputError("matrix.b must be a list", _locate(text, "b"))
            vals = [_rational(v, "matrix.b[%d]" % i, text, "b") for i, v in enumerate(b)]
            result = RankOneSpec(vals, Orientation(kind))
        elif kind == "dense":
            rows = m.get("entries")
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise InputError("matrix.entries must be a list of rows", _locate(text, "entries"))
            result = Mat.from_rows([[_rational(v, "matrix.entries[%d][%d]" % (i, j), text, "entries")
                                     for j, v in enumerate(r)] for i, r in enumerate(rows)])
            if not result.is_square:
                raise InputError("matrix.entries must be square", _locate(text, "entries"))
        else:
            raise InputError("matrix.kind must be 'hat', 'check' or 'dense', got %r" % (kind,),
                             _locate(text, "kind"))
    except (ZeroSpecError, DimensionError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError("matrix: %s" % exc, _locate(text, "matrix"))
    n = doc.get("n")
    size = result.n if isinstance(result, RankOneSpec) else result.rows
    if n is not None and n != size:
        raise InputError("n=%r does not match the matrix size %d" % (n, size), _locate(text, "n"))
    return result


def parse_forcing(doc: dict, text: str, n: int) -> list[PolyExpFunction]:
    raw = _field(doc, "forcing", text)
    if not isinstance(raw, list) or len(raw) != n:
        raise InputError("'forcing' must list %d functions" % n, _locate(text, "forcing"))
    out = []
    for i, fn in enumerate(raw):
        if not isinstance(fn, list):
            raise InputError("forcing[%d] must be a list of terms" % i, _locate(text, "forcing"))
        terms = []
        for j, term in enumerate(fn):
            where = "forcing[%d][%d]" % (i, j)
            if not isinstance(term, dict) or not isinstance(term.get("poly"), list):
                raise InputError("%s needs a 'poly' coefficient list" % where, _locate(text, "poly"))
            coeffs = [_rational(c, where + ".poly", text, "poly") for c in term["poly"]]
            rate = _rational(term.get("rate", "0"), where + ".rate", text, "rate")
            terms.append((Poly(coeffs), rate))
        out.append(PolyExpFunction(terms))
    return out


def load_document(path: str) -> tuple[dict, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("invalid JSON: %s (column %d)" % (exc.msg, exc.colno), exc.lineno)
    if not isinstance(doc, dict):
        raise InputError("top level must be a JSON object", 1)
    return doc, text


def load_problem(path: str) -> CauchyProblem:
    doc, text = load_document(path)
    matrix = parse_matrix(doc, text)
    n = matrix.n if isinstance(matrix, RankOneSpec) else matrix.rows
    forcing = parse_forcing(doc, text, n)
    c = _field(doc, "c", text)
    if not isinstance(c, list) or len(c) != n:
        raise InputError("'c' must list %d initial values" % n, _locate(text, "c"))
    cs = [_rational(v, "c[%d]" % i, text, "c") for i, v in enumerate(c)]
    scalars = {k: _rational(_field(doc, k, text), k, text, k) for k in ("t0", "horizon", "step")}
    try:
        return CauchyProblem.create(matrix, forcing, scalars["t0"], cs,
                                    scalars["horizon"], scalars["step"])
    except ProblemError as exc:
        key = "horizon" if "horizon" in str(exc) else "step" if "step" in str(exc) else "c"
        raise InputError(str(exc), _locate(text, key))


# ---------------------------------------------------------------------------
# machine-readable reduced systems (1-based indices on the wire)

def _forcing_to_json(expr: ForcingExpr) -> list[dict]:
    return [{"coef": str(c), "order": o, "forcing": i + 1} for c, o, i in expr.terms]


def _forcing_from_json(items) -> ForcingExpr:
    return ForcingExpr((Fraction(t["coef"]), int(t["order"]), int(t["forcing"]) - 1)
                       for t in items)


def equation_to_json(eq) -> dict:
    if isinstance(eq, CouplingEquation):
        return {"type": "coupling", "var": eq.var, "target": eq.target + 1,
                "source": eq.source + 1, "operator": [str(c) for c in eq.operator.coeffs],
                "forcing": _forcing_to_json(eq.forcing)}
    return {"type": "reduced", "var": eq.var, "target": eq.target + 1,
            "lhs": [str(c) for c in eq.lhs_poly.coeffs], "rhs": _forcing_to_json(eq.rhs)}


def equation_from_json(d: dict):
    if d["type"] == "coupling":
        return CouplingEquation(int(d["target"]) - 1, int(d["source"]) - 1,
                                Poly(Fraction(c) for c in d["operator"]),
                                _forcing_from_json(d["forcing"]), d["var"])
    return ReducedEquation(Poly(Fraction(c) for c in d["lhs"]), int(d["target"]) - 1,
                           _forcing_from_json(d["rhs"]), d["var"])


def reduced_system_to_json(equations, kind: str, transition: Mat | None = None) -> dict:
    out = {"kind": kind, "equations": [equation_to_json(e) for e in equations]}
    if transition is not None:
        out["transition_inverse"] = [[str(v) for v in transition.row(i)]
                                     for i in range(transition.rows)]
    return out


def reduced_system_from_json(doc: dict) -> list:
    return [equation_from_json(d) for d in doc["equations"]]


# ---------------------------------------------------------------------------
# commands

def cmd_reduce(args) -> int:
    doc, text = load_document(args.input)
    matrix = parse_matrix(doc, text)
    transition = None
    if args.partial == "none":
        if isinstance(matrix, RankOneSpec):
            eqs = total_reduce_rank_one(matrix)
        else:
            eqs = total_reduce_adjugate(matrix)
        kind = "total"
    else:
        if not isinstance(matrix, RankOneSpec):
            raise InputError("partial reduction needs a hat or check matrix", _locate(text, "kind"))
        try:
            ps = partial_reduce_jordan(matrix) if args.partial == "jordan" \
                else partial_reduce_rational(matrix)
        except DegenerateError as exc:
            raise InputError(str(exc), _locate(text, "b"))
        eqs, kind = ps.equations, "partial-" + args.partial
        transition = ps.decomposition.transition_inverse
    if args.format == "json":
        json.dump(reduced_system_to_json(eqs, kind, transition), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for eq in eqs:
            print(eq)
        if transition is not None:
            var = eqs[0].var
            print("# %s = M x with M = %s" % (var, [[str(v) for v in transition.row(i)]
                                                 for i in range(transition.rows)]))
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = load_problem(args.input)
    coupled = solve_coupled(problem)
    decoupled = solve_decoupled(problem)
    dev = max_deviation(coupled, decoupled)
    ok = dev <= args.tol
    if args.format == "json":
        json.dump({"t": coupled.t.tolist(), "coupled": coupled.x.tolist(),
                   "decoupled": decoupled.x.tolist(), "max_abs_deviation": dev,
                   "tol": args.tol, "ok": ok}, sys.stdout)
        sys.stdout.write("\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["t"]
        for i in range(problem.n):
            header += ["x%d_coupled" % (i + 1), "x%d_decoupled" % (i + 1)]
        w.writerow(header)
        for k, t in enumerate(coupled.t):
            row = [repr(float(t))]
            for i in range(problem.n):
                row += [repr(float(coupled.x[k, i])), repr(float(decoupled.x[k, i]))]
            w.writerow(row)
        buf.write("# max_abs_deviation=%r\n" % dev)
        sys.stdout.write(buf.getvalue())
    if not ok:
        print("max deviation %.3e exceeds tolerance %.3e" % (dev, args.tol), file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    reports = run_suites(args.trials, args.seed)
    if args.format == "json":
        json.dump([{"suite": r.name, "passed": r.passed, "failed": r.failed,
                    "failures": r.failures} for r in reports], sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for r in reports:
            print(r.line())
            for f in r.failures:
                print("    " + f)
        total = sum(r.passed + r.failed for r in reports)
        passed = sum(r.passed for r in reports)
        print("passed %d/%d trials" % (passed, total))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opreduce",
        description="Decouple linear systems of operator equations A(x) = Bx + phi.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="print the reduced system")
    p.add_argument("--input", required=True)
    p.add_argument("--partial", choices=["none", "jordan", "rational"], default="none")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="integrate coupled and decoupled Cauchy problems")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the randomized oracle property suites")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except InputError as exc:
        where = getattr(args, "input", "<input>")
        if exc.line is not None:
            where = "%s:%d" % (where, exc.line)
        print("%s: error: %s" % (where, exc), file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run_cli())

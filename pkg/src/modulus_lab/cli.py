"""Command-line interface: ``modulus-lab <verb> ...``.

Exit codes: 0 success, 1 bad input (parse, schema, stale report, failed
verification), 2 infeasible system (value ``inf``), 3 iteration limit reached.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

from . import formats
from .certificate import CERT_TOL, build_certificate, verify_certificate
from .errors import ModulusError, SchemaError
from .geometry import RasterizationWarning, rasterize_family, transboundary_family
from .oracles import run_example_suite
from .solver import EMPTY, INFEASIBLE, MAX_ITERS, OPTIMAL, SolveOptions, solve

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_MAX_ITERS = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _emit(args, text: str | bytes):
    out = getattr(args, "out", None)
    if out and out != "-":
        Path(out).write_bytes(text if isinstance(text, bytes) else text.encode())
    elif isinstance(text, bytes):
        sys.stdout.buffer.write(text)
        sys.stdout.flush()
    else:
        sys.stdout.write(text)


def _opts(args) -> SolveOptions:
    try:
        return SolveOptions(max_iters=args.max_iters, gap_tol=args.tol_gap,
                            feas_tol=args.tol_feas, seed=args.seed)
    except ModulusError as exc:
        raise _Fail(str(exc)) from None


def _load_problem(path):
    return formats.parse_problem(formats.read_json(path))


def cmd_solve(args) -> int:
    prob = _load_problem(args.problem)
    if not args.p > 0:
        raise _Fail("--p must be positive")
    rep = solve(prob["system"], prob["space"], args.p, _opts(args))
    digest = formats.problem_hash(prob["space"], prob["system"])
    doc = formats.report_to_dict(rep, digest, prob.get("grid"), prob.get("domain"))
    if args.format == "text":
        _emit(args, _report_text(rep))
    else:
        _emit(args, formats.dumps(doc))
    if rep.status == INFEASIBLE:
        return EXIT_INFEASIBLE
    if rep.status == MAX_ITERS:
        print(f"warning: iteration limit reached, gap {rep.gap:.3e}", file=sys.stderr)
        return EXIT_MAX_ITERS
    return EXIT_OK


def _report_text(rep) -> str:
    lines = [f"p          {rep.p:.17g}",
             f"status     {rep.status}",
             f"value      {rep.value:.17g}",
             f"gap        {rep.gap:.3e}",
             f"iterations {rep.iterations}",
             f"active     {len(rep.active_set)} of {rep.dual.size} rows"]
    return "\n".join(lines) + "\n"


def cmd_certify(args) -> int:
    prob = _load_problem(args.problem)
    raw = formats.read_json(args.report)
    rep_d = formats.parse_report(raw)
    digest = formats.problem_hash(prob["space"], prob["system"])
    if rep_d["problem_sha256"] != digest:
        raise _Fail("report does not belong to this problem (hash mismatch); re-run solve")
    if rep_d["status"] not in (OPTIMAL, EMPTY):
        raise _Fail(f"report status is {rep_d['status']!r}; only optimal reports can be certified")
    if rep_d["dual"].size != len(prob["system"]) or len(rep_d["metric"]) != prob["space"].n_cells:
        raise _Fail("report dimensions do not match the problem")
    rep = formats.report_from_parsed(rep_d)
    try:
        cert = build_certificate(prob["system"], prob["space"], rep)
    except ModulusError as exc:
        raise _Fail(str(exc)) from None
    _emit(args, formats.dumps(formats.certificate_to_dict(cert, digest)))
    return EXIT_OK


def cmd_verify(args) -> int:
    prob = _load_problem(args.problem)
    metric = formats.parse_metric(formats.read_json(args.metric))
    cert_raw = formats.read_json(args.certificate)
    cert = formats.parse_certificate(cert_raw)
    digest = cert_raw.get("problem_sha256")
    if digest and digest != formats.problem_hash(prob["space"], prob["system"]):
        raise _Fail("certificate does not belong to this problem (hash mismatch)")
    if len(metric) != prob["space"].n_cells:
        raise _Fail("metric length does not match the problem")
    ver = verify_certificate(cert, prob["system"], prob["space"], metric, args.tol,
                             opts=_opts(args), check_a=not args.skip_a,
                             compare_solve=args.compare_solve)
    if args.format == "json":
        doc = {"verdict": ver.verdict,
               "condition_a": {"status": ver.condition_a.status, "residual": ver.condition_a.residual},
               "condition_b": ver.condition_b, "condition_c": ver.condition_c,
               "failed": list(ver.failed), "notes": list(ver.notes), "energy": ver.energy}
        if ver.witness is not None:
            doc["witness"] = ver.witness
        _emit(args, formats.dumps(doc))
    else:
        _emit(args, ver.summary() + "\n")
    return EXIT_OK if ver.verdict else EXIT_INPUT


def cmd_examples(args) -> int:
    suite = run_example_suite(args.nx, args.ny, gap_tol=args.tol_gap, feas_tol=args.tol_feas,
                              tol=args.tol, max_iters=args.max_iters, seed=args.seed)
    if args.format == "json":
        _emit(args, formats.dumps(suite.to_dict()))
    else:
        _emit(args, suite.table() + "\n")
    return EXIT_OK if suite.passed else EXIT_INPUT


def cmd_rasterize(args) -> int:
    doc = formats.parse_curve_file(formats.read_json(args.curves))
    grid, domain = doc["grid"], doc.get("domain")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RasterizationWarning)
        if domain is not None:
            system = transboundary_family(domain, doc["curves"], doc["tags"])
            space = domain.space
        else:
            system = rasterize_family(grid, doc["curves"], doc["tags"])
            space = grid.space
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit(args, formats.dumps(formats.problem_to_dict(space, system, grid, domain, doc["name"])))
    return EXIT_OK


def cmd_export(args) -> int:
    rep = formats.parse_report(formats.read_json(args.report))
    grid, domain = rep.get("grid"), rep.get("domain")
    if args.format == "pgm":
        if grid is None:
            raise _Fail("PGM export needs a report with grid provenance; use --format csv")
        _emit(args, formats.metric_pgm(rep["metric"], grid, domain))
    else:
        _emit(args, formats.metric_csv(rep["metric"], grid, domain))
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--tol-gap", type=float, default=1e-8, help="relative duality gap (default 1e-8)")
    p.add_argument("--tol-feas", type=float, default=1e-9, help="feasibility tolerance (default 1e-9)")
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modulus-lab",
                                 description="p-modulus of discrete measure systems and extremality certificates")
    sub = ap.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("solve", help="compute the modulus and an extremal metric")
    s.add_argument("problem")
    s.add_argument("--p", type=float, required=True)
    _solver_flags(s)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("certify", help="build a certificate from an optimal report")
    c.add_argument("problem")
    c.add_argument("report")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", help="check a certificate for a metric")
    v.add_argument("problem")
    v.add_argument("metric", help="metric file or solve report")
    v.add_argument("certificate")
    v.add_argument("--tol", type=float, default=CERT_TOL)
    v.add_argument("--skip-a", action="store_true", help="do not re-solve for condition (a)")
    v.add_argument("--compare-solve", action="store_true",
                   help="also compare the metric energy with an independent solve")
    _solver_flags(v)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("examples", help="run the reference example suite")
    e.add_argument("--nx", type=int, default=8)
    e.add_argument("--ny", type=int, default=16)
    e.add_argument("--tol", type=float, default=1e-6, help="relative tolerance against the oracle")
    _solver_flags(e)
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.add_argument("--out")
    e.set_defaults(func=cmd_examples)

    r = sub.add_parser("rasterize", help="turn a curve file into a problem file")
    r.add_argument("curves")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rasterize)

    x = sub.add_parser("export", help="write a report's metric as CSV or PGM")
    x.add_argument("report")
    x.add_argument("--format", choices=("csv", "pgm"), default="csv")
    x.add_argument("--out")
    x.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        field = f" [field {exc.field}]" if getattr(exc, "field", None) else ""
        print(f"error: {exc}{field}", file=sys.stderr)
        return EXIT_INPUT
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ModulusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

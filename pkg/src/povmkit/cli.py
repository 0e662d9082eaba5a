"""Command-line front end.

Exit codes: 0 success, 1 failed check, 2 usage error, 3 invalid input or
validation error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from . import constructions as C
from . import measures as M
from .config import profile
from .errors import PovmError
from .io import csv_table, document_to_povm, dumps, load_povm, povm_to_document, save_povm
from .optimizer import CONJECTURES, OptimizationConfig, conjecture_report, minimize
from .povm import classify
from .verify import SUITES, run_suite

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3

KINDS = (
    "projective",
    "trine",
    "tetrahedron-sic",
    "hesse-sic",
    "sic-from-fiducial",
    "reflected-sic",
    "mub",
    "block",
    "random",
)


class UsageError(Exception):
    pass


def parse_range(text: str):
    """``"2..4"`` -> [2, 3, 4]; a bare integer is a one-element range."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range like 2..4, got {text!r}")
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated complex entries, e.g. ``0,1,-1`` or ``1,0.5+0.5j``."""
    try:
        return np.array([complex(t.strip().replace("i", "j")) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"could not parse complex vector {text!r}")


def _emit(text: str, path=None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _report_dict(p):
    out = M.measure_report(p).as_dict()
    out["classification"] = classify(p).as_dict()
    return out


def _report_text(report, fmt):
    if fmt == "csv":
        return csv_table(list(M.MeasureReport.CSV_FIELDS), [[report[k] for k in M.MeasureReport.CSV_FIELDS]])
    return dumps(report)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _build(args, tol):
    kind = args.kind
    meta = {"name": kind}
    if kind == "projective":
        d = args.dim or 2
        basis = {"computational": np.eye(d), "fourier": C.fourier_basis(d).T}[args.basis]
        p = C.projective_from_basis(basis, tol=tol)
        meta.update(dim=d, basis=args.basis)
    elif kind == "trine":
        p = C.trine(tol)
    elif kind == "tetrahedron-sic":
        p = C.tetrahedron_sic(tol)
    elif kind == "hesse-sic":
        p = C.hesse_sic(tol)
    elif kind == "sic-from-fiducial":
        if args.fiducial is None:
            raise UsageError("--fiducial is required for sic-from-fiducial")
        p = C.sic_from_fiducial(C.Fiducial.normalized(args.fiducial), tol)
    elif kind == "reflected-sic":
        if args.fiducial is not None:
            sic = C.sic_from_fiducial(C.Fiducial.normalized(args.fiducial), tol)
        else:
            sic = C.sic_from_fiducial(C.builtin_fiducial(args.dim or 3), tol)
        p = C.reflected_sic(sic)
    elif kind == "mub":
        p = C.mub_complete(args.dim or 2, tol)
    elif kind == "block":
        if args.dim is None or args.n is None:
            raise UsageError("block needs --dim and --n")
        p = C.block_projective(args.dim, args.n, tol)
    elif kind == "random":
        if args.dim is None or args.n is None:
            raise UsageError("random needs --dim and --n")
        k = args.rank or args.dim
        p = C.random_povm(args.dim, args.n, k, seed=args.seed, tol=tol)
        meta.update(seed=args.seed, rank=k)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {kind}")
    return p, meta


def cmd_construct(args, tol):
    p, meta = _build(args, tol)
    doc = povm_to_document(p, meta)
    report = _report_text(_report_dict(p), args.format)
    if args.output:
        _emit(dumps(doc), args.output)
        sys.stdout.write(report if report.endswith("\n") else report + "\n")
    else:
        _emit(dumps(doc))
        sys.stderr.write(report if report.endswith("\n") else report + "\n")
    return EXIT_OK


def cmd_measure(args, tol):
    p = load_povm(args.input, tol) if args.input != "-" else document_to_povm(_read_stdin_json(), tol)
    _emit(_report_text(_report_dict(p), args.format), args.output)
    return EXIT_OK


def _read_stdin_json():
    import json

    from .errors import ParseError

    try:
        return json.loads(sys.stdin.read())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def cmd_verify(args, tol):
    t0 = time.perf_counter()
    checks = run_suite(args.suite, samples=args.samples, seed=args.seed)
    ok = all(c.passed for c in checks)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "samples": args.samples,
        "passed": ok,
        "checks": [c.as_dict() for c in checks],
    }
    if args.format == "csv":
        rows = [[c.name, str(c.passed).lower(), c.worst, c.threshold, c.margin, c.samples] for c in checks]
        text = csv_table(["name", "passed", "worst", "threshold", "margin", "samples"], rows)
    else:
        text = dumps(report)
    _emit(text, args.output)
    sys.stderr.write(f"verify {args.suite}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:.1f}s)\n")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_scan(args, tol):
    rows = [M.family_row(args.family, args.dim, n) for n in args.n]
    if args.family == "ea":
        D = [r["D"] for r in rows]
        if any(b > a + 1e-12 for a, b in zip(D, D[1:])):
            raise AssertionError("EA disturbance is not non-increasing in n")
    header = ["d", "n", "R", "O", "D"]
    if args.format == "json":
        text = dumps({"family": args.family, "rows": rows})
    else:
        text = csv_table(header, [[r[h] for h in header] for r in rows])
    _emit(text, args.output)
    return EXIT_OK


def cmd_optimize(args, tol):
    config = OptimizationConfig(
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        objective_tol=args.objective_tol,
        step_tol=args.step_tol,
        seed=args.seed,
        objective=args.objective,
    )
    if args.conjecture:
        if args.dim is None or args.n is None:
            raise UsageError("--conjecture needs --dim and --n")
        rep = conjecture_report(args.conjecture, args.dim, args.n, config, k=args.rank)
        result = rep.pop("result")
        out = dict(rep)
        out["optimization"] = result.as_dict(include_restarts=False)
        summary = f"{rep['target']}: best {rep['best_value']:.12g} vs reference {rep['reference_value']:.12g} ({rep['evidence']})"
    else:
        if args.dim is None or args.n is None:
            raise UsageError("optimize needs --dim and --n")
        k = args.rank or 1
        result = minimize(args.dim, args.n, k, config)
        out = result.as_dict()
        summary = f"gap to {result.bound_kind} bound {result.bound_value:.12g}: {result.gap:.3e}"
    meta = {"name": f"optimized-{config.objective}", "seed": config.seed, "value": repr(result.best_value)}
    out["best_povm"] = povm_to_document(result.best_povm, meta)
    if args.save_povm:
        save_povm(result.best_povm, args.save_povm, meta)
    _emit(dumps(out), args.output)
    sys.stderr.write(summary + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol-profile", choices=("strict", "default"), default="default")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="json (default; csv for scan)")
    common.add_argument("-o", "--output", default=None, help="write the primary output here instead of stdout")

    parser = argparse.ArgumentParser(prog="povmkit", description="POVM disturbance, strength and orthogonality toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a named or random POVM")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--basis", choices=("computational", "fourier"), default="computational")
    p.add_argument("--fiducial", type=parse_vector, help="comma-separated fiducial vector entries")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("measure", parents=[common], help="report R, O, D of a POVM document")
    p.add_argument("input", help="POVM JSON document ('-' for stdin)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="closed-form table over a range of n")
    p.add_argument("--family", choices=("ea", "two_design_O", "block"), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=parse_range, required=True, help="range such as 2..4")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", parents=[common], help="minimize orthogonality or disturbance")
    p.add_argument("--objective", choices=("orthogonality", "disturbance"), default="orthogonality")
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--max-iterations", type=int, default=200_000)
    p.add_argument("--objective-tol", type=float, default=1e-10)
    p.add_argument("--step-tol", type=float, default=1e-8)
    p.add_argument("--conjecture", choices=CONJECTURES)
    p.add_argument("--save-povm", help="also write the best POVM document here")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = "csv" if args.command == "scan" else "json"
    tol = profile(args.tol_profile)
    try:
        return args.func(args, tol)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except PovmError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    except (ValueError, AssertionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CHECK if isinstance(exc, AssertionError) else EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success, 1 a checked criterion does not hold, 2 invalid input,
3 numerical failure, 4 I/O failure. Failures also print a one-line JSON error
document to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import NumericalError, ValidationError
from .problem import (
    CRITERIA,
    SOLVERS,
    applicable_criteria,
    dumps,
    load_spec,
    run_criterion,
    run_solver,
    solve_to_result,
)
from .sharing import FEASIBILITY_TOL
from .simulate import SimConfig, simulate_rule

EXIT_OK, EXIT_FAILED_CHECK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4


class _IOFailure(Exception):
    pass


def _error_doc(exc: BaseException) -> tuple[int, dict]:
    if isinstance(exc, ValidationError):
        code, kind = EXIT_VALIDATION, "validation"
    elif isinstance(exc, json.JSONDecodeError):
        code, kind = EXIT_VALIDATION, "parse"
    elif isinstance(exc, NumericalError):
        code, kind = EXIT_NUMERICAL, "numerical"
    elif isinstance(exc, (OSError, _IOFailure)):
        code, kind = EXIT_IO, "io"
    else:
        raise exc
    return code, {"error": type(exc).__name__, "kind": kind, "message": str(exc), "exit_code": code}


def format_csv(A) -> str:
    return "".join(",".join(format(float(v), ".17g") for v in row) + "\n" for row in A)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_solve(args, spec_path: Path, out: Path | None) -> int:
    spec = load_spec(spec_path)
    doc = solve_to_result(spec, args.solver, args.tolerance)
    _emit(dumps(doc.to_json()), out)
    return EXIT_OK


def _cmd_check(args, spec_path: Path, out: Path | None) -> int:
    spec = load_spec(spec_path)
    if args.criteria == "all":
        names = applicable_criteria(spec)
    else:
        names = [c.strip() for c in args.criteria.split(",") if c.strip()]
    verdicts = [run_criterion(spec, name, args.solver).to_json() for name in names]
    _emit(dumps({"verdicts": verdicts, "holds": all(v["holds"] for v in verdicts)}), out)
    return EXIT_OK if all(v["holds"] for v in verdicts) else EXIT_FAILED_CHECK


def _cmd_heatmap(args, spec_path: Path, out: Path | None) -> int:
    spec = load_spec(spec_path)
    _emit(format_csv(run_solver(spec, args.solver).A), out)
    return EXIT_OK


def _cmd_simulate(args, spec_path: Path, out: Path | None) -> int:
    spec = load_spec(spec_path)
    config = SimConfig(samples=args.samples, seed=args.seed)
    report = simulate_rule(run_solver(spec, args.solver).A, spec.model, config)
    doc = {"solver": args.solver, **report.to_json()}
    _emit(dumps(doc), out)
    return EXIT_OK


COMMANDS = {
    "solve": (_cmd_solve, ".json"),
    "oracle": (_cmd_solve, ".json"),
    "check": (_cmd_check, ".json"),
    "heatmap": (_cmd_heatmap, ".csv"),
    "simulate": (_cmd_simulate, ".json"),
}


def _run_one(args, spec_path: Path, out: Path | None) -> int:
    handler, _ = COMMANDS[args.command]
    try:
        if not spec_path.is_file():
            raise _IOFailure(f"problem file not found: {spec_path}")
        return handler(args, spec_path, out)
    except Exception as exc:
        code, doc = _error_doc(exc)
        doc["spec"] = str(spec_path)
        sys.stderr.write(json.dumps(doc) + "\n")
        return code


def _run_batch(args, spec_dir: Path, out_dir: Path | None) -> int:
    if out_dir is None:
        raise _IOFailure("--out must name a directory when --spec is a directory")
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = sorted(spec_dir.glob("*.json"))
    ext = COMMANDS[args.command][1]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        codes = list(pool.map(lambda p: _run_one(args, p, out_dir / (p.stem + ext)), specs))
    return max(codes, default=EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, type=Path, help="problem JSON file, or a directory of them")
    common.add_argument("--out", type=Path, default=None, help="output file (directory in batch mode); default stdout")
    common.add_argument("--solver", choices=SOLVERS, default="friends")
    common.add_argument(
        "--tolerance", type=float, default=FEASIBILITY_TOL,
        help="threshold for the 'feasible' flag in result residuals (does not affect solving)",
    )
    common.add_argument("--jobs", type=int, default=1, help="parallel workers in batch mode")

    parser = argparse.ArgumentParser(prog="p2prisk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve for the optimal sharing matrix")
    sub.add_parser("oracle", parents=[common], help="solve through the dense KKT oracle")
    check = sub.add_parser("check", parents=[common], help="evaluate nonnegativity criteria")
    check.add_argument(
        "--criteria", default="all",
        help=f"'all' (every applicable criterion) or a comma list of: {', '.join(CRITERIA)}",
    )
    sub.add_parser("heatmap", parents=[common], help="write the solved matrix as CSV")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of the solved rule")
    sim.add_argument("--samples", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "oracle":
        args.solver = "oracle"
    try:
        if args.spec.is_dir():
            return _run_batch(args, args.spec, args.out)
    except Exception as exc:
        code, doc = _error_doc(exc)
        sys.stderr.write(json.dumps(doc) + "\n")
        return code
    return _run_one(args, args.spec, args.out)


if __name__ == "__main__":
    sys.exit(main())

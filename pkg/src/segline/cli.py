"""Command-line interface.

Subcommands: detect (CSV in, JSON result out), simulate (scenario to CSV),
bench (Monte Carlo replication report), select-pn (boundary-count search).
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

import numpy as np

from .detect import ALGORITHM_NAMES, DetectorConfig, detect, select_pn
from .io import DataError, load_csv, save_csv
from .model import Dataset, SegmentationError, make_segmentation
from .report import resolve_workers, run_replications
from .simulate import SCENARIO_NAMES, build_scenario, simulate_dataset
from .solver import SolverError

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _json_dump(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _add_csv_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="input CSV file")
    p.add_argument("--has-header", action="store_true", help="skip a header row")
    p.add_argument(
        "--response-column",
        type=int,
        default=0,
        help="0-based response column (default: first)",
    )
    p.add_argument(
        "--intercept",
        action="store_true",
        help="prepend a constant-1 predictor column",
    )


def _parse_pn(value: str) -> int | str:
    if value == "auto":
        return "auto"
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--pn must be an integer or 'auto', got {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("--pn must be >= 1")
    return n


def _parse_range(value: str) -> tuple[int, int]:
    try:
        lo_s, hi_s = value.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like LO..HI, got {value!r}")
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"need 1 <= LO <= HI in {value!r}")
    return lo, hi


def _build_parser() -> _Parser:
    parser = _Parser(prog="segline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect change points in a CSV sequence")
    _add_csv_args(d)
    d.add_argument("--algorithm", choices=ALGORITHM_NAMES, default="al")
    d.add_argument("--pn", type=_parse_pn, default="auto", help="boundary count or 'auto'")
    d.add_argument(
        "--pn-range",
        type=_parse_range,
        default=None,
        metavar="LO..HI",
        help="search this boundary-count range by refit RSS before detecting",
    )
    d.add_argument("--alpha", type=float, default=0.05)
    d.add_argument("--output", default=None, help="result JSON path (default stdout)")

    s = sub.add_parser("simulate", help="write a simulated scenario to CSV")
    s.add_argument(
        "--scenario",
        default="cpl1",
        help=f"one of {SCENARIO_NAMES} or a scenario JSON file",
    )
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output CSV path")

    b = sub.add_parser("bench", help="replicated detection benchmark on a scenario")
    b.add_argument("--scenario", default="cpl1")
    b.add_argument("--reps", type=int, default=100)
    b.add_argument(
        "--algorithms",
        default="al",
        help="comma-separated subset of " + ",".join(ALGORITHM_NAMES),
    )
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--report", default=None, help="report JSON path (default stdout)")

    sp = sub.add_parser("select-pn", help="choose the boundary count by refit RSS")
    _add_csv_args(sp)
    sp.add_argument(
        "--candidates",
        required=True,
        help="comma-separated boundary counts or LO..HI",
    )
    sp.add_argument("--algorithm", choices=ALGORITHM_NAMES, default="al")
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--output", default=None)
    return parser


def _load(args: argparse.Namespace) -> Dataset:
    return load_csv(
        args.input,
        has_header=args.has_header,
        response_column=args.response_column,
        intercept=args.intercept,
    )


def _result_dict(data: Dataset, result, config: DetectorConfig) -> dict:
    seg = make_segmentation(data.n, config.resolve_pn(data.n), data.q)
    cfg = asdict(config)
    return {
        "algorithm": result.algorithm,
        "n": data.n,
        "q": data.q,
        "p_n": seg.p_n,
        "m": seg.m,
        "K_hat": result.k_hat,
        "locations": list(result.locations),
        "boundary_hits": list(result.boundary_hits),
        "rss": result.rss,
        "runtime_s": result.runtime,
        "config": cfg,
    }


def _cmd_detect(args: argparse.Namespace) -> int:
    data = _load(args)
    config = DetectorConfig(alpha=args.alpha, p_n=args.pn)
    if args.pn_range is not None:
        lo, hi = args.pn_range
        best, _ = select_pn(data, list(range(lo, hi + 1)), config, args.algorithm)
        config = DetectorConfig(alpha=args.alpha, p_n=best)
    result = detect(data, config, args.algorithm)
    _json_dump(_result_dict(data, result, config), args.output)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = build_scenario(args.scenario)
    data, _ = simulate_dataset(scenario, args.seed)
    save_csv(data, args.out)
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    names = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    unknown = [a for a in names if a not in ALGORITHM_NAMES]
    if unknown or not names:
        print(f"segline bench: unknown algorithms {unknown}", file=sys.stderr)
        return EXIT_USAGE
    scenario = build_scenario(args.scenario)
    report = run_replications(
        scenario,
        names,
        args.reps,
        args.seed,
        config=DetectorConfig(alpha=args.alpha),
        workers=resolve_workers(args.workers),
    )
    _json_dump(report.to_dict(), args.report)
    return EXIT_OK


def _cmd_select_pn(args: argparse.Namespace) -> int:
    data = _load(args)
    raw = args.candidates
    if ".." in raw:
        lo, hi = _parse_range(raw)
        candidates = list(range(lo, hi + 1))
    else:
        candidates = [int(v) for v in raw.split(",") if v.strip()]
    config = DetectorConfig(alpha=args.alpha)
    best, curve = select_pn(data, candidates, config, args.algorithm)
    _json_dump(
        {
            "algorithm": args.algorithm,
            "p_n": best,
            "curve": [{"p_n": p, "rss": r} for p, r in curve],
        },
        args.output,
    )
    return EXIT_OK


_COMMANDS = {
    "detect": _cmd_detect,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
    "select-pn": _cmd_select_pn,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (SolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"segline: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, SegmentationError, ValueError) as exc:
        print(f"segline: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())

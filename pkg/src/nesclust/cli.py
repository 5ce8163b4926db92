"""Command-line interface: ``nesclust {exact,stream,experiment,report}``.

JSON is the canonical output; CSV is available with ``--format csv`` and
experiments additionally write long-format figure tables. Oracle results are
cached under ``$NESCLUST_CACHE_DIR`` when it is set.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import harness
from .errors import IngestError, UndefinedEstimateError, UnreachableTargetError
from .estimators import estimate_report
from .ingest import file_order_stream, parse_edge_list, shuffle_stream
from .stream import NesConfig, run_seeds, run_stream


U64_MAX = 2**64 - 1


def _prob(text):
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if math.isnan(p) or not 0.0 < p <= 1.0:
        raise argparse.ArgumentTypeError(f"p must be in (0, 1], got {text}")
    return p


def _seed(text):
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= s <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def _runs(text):
    k = int(text)
    if k < harness.MIN_RUNS:
        raise argparse.ArgumentTypeError(f"runs must be >= {harness.MIN_RUNS}, got {k}")
    return k


def _target(text):
    t = float(text)
    if not 0.0 < t < 1.0:
        raise argparse.ArgumentTypeError(f"target RSE must be in (0, 1), got {text}")
    return t


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nesclust",
                                 description="Streaming clustering-coefficient estimation (NES)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def out_flags(sp):
        sp.add_argument("--out", type=Path, help="write here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("exact", help="exact structural statistics of an edge list")
    sp.add_argument("input", type=Path)
    sp.add_argument("--allow-huge-oracle", action="store_true",
                    help="allow exact stats on graphs above the size gate (slow)")
    out_flags(sp)

    sp = sub.add_parser("stream", help="one NES pass and its estimates")
    sp.add_argument("input", type=Path)
    sp.add_argument("--p", type=_prob, required=True)
    sp.add_argument("--seed", type=_seed, default=0)
    sp.add_argument("--file-order", action="store_true", help="stream in file order")
    sp.add_argument("--no-aux", action="store_true", help="skip auxiliary pair counters")
    out_flags(sp)

    sp = sub.add_parser("experiment", help="Monte-Carlo experiment from a JSON/TOML config")
    sp.add_argument("config", type=Path)
    sp.add_argument("--runs", type=_runs)
    sp.add_argument("--target-rse", type=_target, action="append")
    sp.add_argument("--seed", type=_seed, help="override base_seed")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--file-order", action="store_true")
    sp.add_argument("--no-aux", action="store_true")
    sp.add_argument("--out", type=Path, required=True,
                    help="output prefix: writes PREFIX.json and PREFIX.fig{2,3,4}.csv")

    sp = sub.add_parser("report", help="figure table from a saved experiment report")
    sp.add_argument("report", type=Path)
    sp.add_argument("--fig", choices=("fig2", "fig3", "fig4"), required=True)
    sp.add_argument("--out", type=Path)
    return ap


def _fail(msg: str) -> None:
    sys.stderr.write(f"nesclust: error: {msg}\n")


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text if text.endswith("\n") else text + "\n")


def cmd_exact(args) -> int:
    g, rep = parse_edge_list(args.input)
    stats = harness.cached_stats(g, allow_huge=args.allow_huge_oracle)
    if args.format == "csv":
        _emit(stats.to_csv(), args.out)
    else:
        _emit(json.dumps({"input": str(args.input), "ingest": rep.to_dict(),
                          "stats": stats.to_dict()}, indent=1), args.out)
    return 0


def cmd_stream(args) -> int:
    g, rep = parse_edge_list(args.input)
    stream_seed, sample_seed = run_seeds(args.seed, 0)
    stream = file_order_stream(g) if args.file_order else shuffle_stream(g, stream_seed)
    state = run_stream(stream, NesConfig(args.p, sample_seed, track_aux=not args.no_aux))
    try:
        report = estimate_report(state)
    except UndefinedEstimateError as exc:
        _fail(f"sample too small: {exc}")
        return 3
    if args.format == "csv":
        _emit(report.to_csv(), args.out)
    else:
        meta = {"input": str(args.input), "seed": args.seed,
                "stream_seed": None if args.file_order else stream_seed,
                "sample_seed": sample_seed,
                "order": "file" if args.file_order else "shuffled", "M": g.m, "N": g.n}
        _emit(json.dumps({"meta": meta, "estimate": report.to_dict()}, indent=1), args.out)
    return 0


def cmd_experiment(args) -> int:
    spec = harness.ExperimentSpec.from_file(args.config)
    spec_dict = {k: getattr(spec, k) for k in spec.__dataclass_fields__}
    if args.runs is not None:
        spec_dict["runs"] = args.runs
    if args.target_rse:
        spec_dict["target_rse"] = args.target_rse
        spec_dict["p_grid"] = []
    if args.seed is not None:
        spec_dict["base_seed"] = args.seed
    if args.workers is not None:
        spec_dict["workers"] = args.workers
    if args.file_order:
        spec_dict["order_mode"] = "file"
    if args.no_aux:
        spec_dict["track_aux"] = False
    spec = harness.ExperimentSpec.from_dict(spec_dict)

    report = harness.run_experiment(spec)
    prefix = args.out
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.json").write_text(report.to_json() + "\n")
    for fig in ("fig2", "fig3", "fig4"):
        Path(f"{prefix}.{fig}.csv").write_text(harness.emit_fig_data(report, fig))
    print(harness.report_table(report))
    failed = [pt.p for pt in report.points if pt.error]
    if failed:
        _fail(f"grid points failed: {failed}")
        return 4
    return 0


def cmd_report(args) -> int:
    with open(args.report) as fh:
        report = harness.ExperimentReport.from_dict(json.load(fh))
    _emit(harness.emit_fig_data(report, args.fig), args.out)
    return 0


COMMANDS = {"exact": cmd_exact, "stream": cmd_stream, "experiment": cmd_experiment,
            "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (IngestError, UnreachableTargetError, ValueError, OSError) as exc:
        _fail(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())

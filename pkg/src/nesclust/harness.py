"""Monte-Carlo experiments: k independent NES runs per sampling probability.

Every run ``i`` draws its stream order and its sampling decisions from two
64-bit seeds derived from ``(base_seed, i)`` (see :func:`run_seeds`), so a
report is a pure function of its :class:`ExperimentSpec` regardless of how
runs are scheduled across workers.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import estimators as est
from .errors import UndefinedEstimateError, UnreachableTargetError
from .graph import Graph
from .ingest import SHUFFLE_RNG, load_source, source_name
from .oracle import ExactStats, exact_stats
from .stream import FastNes, run_seeds
from .theory import rb_theory, rse_theory_with_flag

log = logging.getLogger(__name__)

CACHE_ENV = "NESCLUST_CACHE_DIR"
MIN_RUNS = 30


@dataclass
class ExperimentSpec:
    graph: object
    p_grid: List[float] = field(default_factory=list)
    target_rse: List[float] = field(default_factory=list)
    runs: int = 1000
    base_seed: int = 0
    order_mode: str = "shuffled"
    track_aux: bool = True
    workers: int = 1
    name: Optional[str] = None

    def __post_init__(self):
        if self.runs < MIN_RUNS:
            raise ValueError(f"runs must be >= {MIN_RUNS}, got {self.runs}")
        if self.order_mode not in ("shuffled", "file"):
            raise ValueError(f"order_mode must be 'shuffled' or 'file', got {self.order_mode!r}")
        if not self.p_grid and not self.target_rse:
            raise ValueError("give p_grid or target_rse")
        for p in self.p_grid:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"p must be in (0, 1], got {p}")
        for t in self.target_rse:
            if not 0.0 < t < 1.0:
                raise ValueError(f"target RSE must be in (0, 1), got {t}")
        if self.name is None:
            self.name = source_name(self.graph)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown experiment keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        path = Path(path)
        if path.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                d = tomllib.load(fh)
        else:
            with open(path) as fh:
                d = json.load(fh)
        g = d.get("graph")
        if isinstance(g, str) and not os.path.isabs(g):
            d["graph"] = str(path.parent / g)
        elif isinstance(g, dict) and "path" in g and not os.path.isabs(g["path"]):
            d["graph"] = {**g, "path": str(path.parent / g["path"])}
        return cls.from_dict(d)


@dataclass
class GridPoint:
    p: float
    target_rse: Optional[float]
    k: int
    n_used: int
    n_undefined: int
    c_true: float
    mean_c_hat: Optional[float]
    observed_rse: Optional[float]
    observed_rb: Optional[float]
    observed_rb_se: Optional[float]
    mean_c_hat_plus: Optional[float]
    observed_rb_plus: Optional[float]
    observed_rb_plus_se: Optional[float]
    n_rb_defined: int
    mean_rse_full: Optional[float]
    mean_rse_simple: Optional[float]
    mean_rb_hat: Optional[float]
    rb_hat_se: Optional[float]
    fallback_count: int
    overflow_count: int
    rse_theory: Optional[float]
    rb_theory: Optional[float]
    mean_delta_g: float
    mean_lambda_g: float
    mean_sample_size: float
    error: Optional[str] = None


@dataclass
class ExperimentReport:
    name: str
    graph_hash: str
    stats: dict
    runs: int
    base_seed: int
    order_mode: str
    track_aux: bool
    seeds: dict
    points: List[GridPoint]

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        d = dict(d)
        d["points"] = [GridPoint(**pt) for pt in d["points"]]
        return cls(**d)


def graph_hash(g: Graph) -> str:
    h = hashlib.sha256()
    h.update(np.int64(g.n).tobytes())
    h.update(np.ascontiguousarray(g.edges, dtype=np.int64).tobytes())
    return h.hexdigest()


def cached_stats(g: Graph, cache_dir=None, allow_huge: bool = False) -> ExactStats:
    """Exact stats, cached as JSON under ``cache_dir`` (or ``$NESCLUST_CACHE_DIR``)."""
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    path = None
    if cache_dir:
        path = Path(cache_dir) / f"stats-{graph_hash(g)}.json"
        if path.exists():
            with open(path) as fh:
                return ExactStats.from_dict(json.load(fh))
    stats = exact_stats(g, allow_huge=allow_huge)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(stats.to_json())
        tmp.replace(path)
    return stats


def solve_p_for_target_rse(stats: ExactStats, target_rse: float, rel_tol: float = 1e-6) -> float:
    """Smallest ``p`` with theoretical RSE at most ``target_rse``, by bisection."""
    if not 0.0 < target_rse < 1.0:
        raise ValueError(f"target RSE must be in (0, 1), got {target_rse}")

    def ok(p):
        return rse_theory_with_flag(stats, p)[0] <= target_rse

    if not ok(1.0):
        raise UnreachableTargetError(
            f"RSE {target_rse} is not reachable: even p=1 gives "
            f"{rse_theory_with_flag(stats, 1.0)[0]:.4g}")
    lo, hi = 0.0, 1.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _run_block(args):
    g, tasks, track_aux, order_mode = args
    fast = FastNes(g)
    fixed = np.arange(g.m) if order_mode == "file" else None
    out = []
    for p, base_seed, i in tasks:
        s_stream, s_sample = run_seeds(base_seed, i)
        if fixed is None:
            out.append(fast.run_seeded(s_stream, s_sample, p, track_aux))
        else:
            out.append(fast.run(fixed, s_sample, p, track_aux))
    return out


def simulate(g: Graph, p: float, runs: int, base_seed: int, track_aux: bool = True,
             order_mode: str = "shuffled", workers: int = 1) -> np.ndarray:
    """``runs x 6`` counters; identical for any ``workers``."""
    tasks = [(p, base_seed, i) for i in range(runs)]
    if workers <= 1:
        rows = _run_block((g, tasks, track_aux, order_mode))
    else:
        n_chunks = workers * 4
        chunks = [tasks[j::n_chunks] for j in range(n_chunks)]
        rows = [None] * runs
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = ex.map(_run_block, [(g, c, track_aux, order_mode) for c in chunks])
            for j, res in enumerate(results):
                for (_, _, i), row in zip(chunks[j], res):
                    rows[i] = row
    return np.asarray(rows, dtype=np.int64).reshape(runs, 6)


def _mean_or_none(x):
    return float(x.mean()) if x.size else None


def _se_or_none(x):
    return float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else None


def summarize(counts: np.ndarray, p: float, c_true: float, track_aux: bool = True) -> dict:
    """Aggregate per-run counters into observed and estimated statistics.

    Runs with no identified wedge have no ``C_hat`` and are excluded.
    ``C_hat_plus`` falls back to ``C_hat`` in runs where the RB estimate is
    undefined (no closed wedge) or ``1 + RB_hat <= 0``.
    """
    dg, lg, phig, psig, omg, size = (counts[:, j] for j in range(6))
    k = counts.shape[0]
    ok = lg > 0
    n_used = int(ok.sum())
    if n_used < 2:
        raise UndefinedEstimateError(f"only {n_used} of {k} runs identified any wedge")
    c_hat = est.c_hat_from_counts(dg[ok], lg[ok], p)
    sd = float(c_hat.std(ddof=1))
    out = {
        "k": k, "n_used": n_used, "n_undefined": k - n_used,
        "mean_c_hat": float(c_hat.mean()),
        "observed_rse": sd / c_true,
        "observed_rb": (float(c_hat.mean()) - c_true) / c_true,
        "observed_rb_se": sd / c_true / math.sqrt(n_used),
        "mean_delta_g": float(dg.mean()), "mean_lambda_g": float(lg.mean()),
        "mean_sample_size": float(size.mean()),
    }
    has_d = ok & (dg > 0)
    out["mean_rse_simple"] = _mean_or_none(dg[has_d].astype(np.float64) ** -0.5)
    out["fallback_count"] = 0
    out["overflow_count"] = 0
    for key in ("mean_rse_full", "mean_rb_hat", "rb_hat_se", "mean_c_hat_plus",
                "observed_rb_plus", "observed_rb_plus_se"):
        out[key] = None
    out["n_rb_defined"] = int(has_d.sum())
    if not track_aux:
        return out

    bracket = est.rse_bracket_from_counts(dg[has_d], lg[has_d], phig[has_d], psig[has_d],
                                          omg[has_d])
    neg = bracket < 0
    rse_full = np.where(neg, dg[has_d].astype(np.float64) ** -0.5, np.sqrt(np.abs(bracket)))
    out["fallback_count"] = int(neg.sum())
    out["mean_rse_full"] = _mean_or_none(rse_full)

    rb = est.rb_hat_from_counts(dg[has_d], lg[has_d], psig[has_d], omg[has_d])
    out["mean_rb_hat"] = _mean_or_none(rb)
    out["rb_hat_se"] = _se_or_none(rb)

    c_plus = c_hat.copy()
    idx = np.flatnonzero(dg[ok] > 0)
    valid = 1.0 + rb > 0
    c_plus[idx[valid]] = c_hat[idx[valid]] / (1.0 + rb[valid])
    out["overflow_count"] = int((~valid).sum())
    out["mean_c_hat_plus"] = float(c_plus.mean())
    out["observed_rb_plus"] = (float(c_plus.mean()) - c_true) / c_true
    out["observed_rb_plus_se"] = float(c_plus.std(ddof=1)) / c_true / math.sqrt(n_used)
    return out


def run_experiment(spec: ExperimentSpec, graph: Optional[Graph] = None,
                   stats: Optional[ExactStats] = None, cache_dir=None) -> ExperimentReport:
    g = graph if graph is not None else load_source(spec.graph)
    stats = stats or cached_stats(g, cache_dir)
    if not stats.Lambda or not stats.Delta:
        raise ValueError("experiments need a graph with at least one triangle")
    c_true = stats.Delta / stats.Lambda

    grid = [(p, None) for p in spec.p_grid]
    for t in spec.target_rse:
        grid.append((solve_p_for_target_rse(stats, t), t))

    points = []
    for p, target in grid:
        counts = simulate(g, p, spec.runs, spec.base_seed, spec.track_aux,
                          spec.order_mode, spec.workers)
        rse_t = rse_theory_with_flag(stats, p)[0]
        rb_t = rb_theory(stats, p)
        try:
            agg = summarize(counts, p, c_true, spec.track_aux)
            points.append(GridPoint(p=p, target_rse=target, c_true=c_true,
                                    rse_theory=rse_t, rb_theory=rb_t, **agg))
        except UndefinedEstimateError as exc:
            log.error("p=%g: %s", p, exc)
            points.append(GridPoint(
                p=p, target_rse=target, k=spec.runs, n_used=int((counts[:, 1] > 0).sum()),
                n_undefined=int((counts[:, 1] == 0).sum()), c_true=c_true,
                mean_c_hat=None, observed_rse=None, observed_rb=None, observed_rb_se=None, mean_c_hat_plus=None, observed_rb_plus=None,
                observed_rb_plus_se=None, n_rb_defined=0, mean_rse_full=None,
                mean_rse_simple=None, mean_rb_hat=None, rb_hat_se=None, fallback_count=0,
                overflow_count=0, rse_theory=rse_t, rb_theory=rb_t,
                mean_delta_g=float(counts[:, 0].mean()),
                mean_lambda_g=float(counts[:, 1].mean()),
                mean_sample_size=float(counts[:, 5].mean()), error=str(exc)))

    return ExperimentReport(
        name=spec.name, graph_hash=graph_hash(g), stats=stats.to_dict(), runs=spec.runs,
        base_seed=spec.base_seed, order_mode=spec.order_mode, track_aux=spec.track_aux,
        seeds={
            "base_seed": spec.base_seed,
            "derivation": "SeedSequence(entropy=base_seed, spawn_key=(run,)).generate_state(2, uint64)"
                          " -> (stream_seed, sample_seed)",
            "stream_rng": SHUFFLE_RNG,
            "sample_rng": "numpy.random.PCG64 via default_rng(sample_seed); one uniform per arrival",
        },
        points=points,
    )


_FIG_SERIES = {
    "fig2": (("observed", "rse", "observed_rse"),
             ("estimated", "rse_simple", "mean_rse_simple"),
             ("estimated", "rse_full", "mean_rse_full")),
    "fig3": (("observed", "rb", "observed_rb"),
             ("estimated", "rb_hat", "mean_rb_hat")),
    "fig4": (("observed", "rb", "observed_rb"),
             ("observed", "rb_plus", "observed_rb_plus")),
}


def emit_fig_data(report: ExperimentReport, which: str) -> str:
    """Long-format CSV ``graph,p,series,metric,value`` for one figure type."""
    if which not in _FIG_SERIES:
        raise ValueError(f"which must be one of {sorted(_FIG_SERIES)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph", "p", "series", "metric", "value"])
    for pt in report.points:
        for series, metric, attr in _FIG_SERIES[which]:
            val = getattr(pt, attr)
            w.writerow([report.name, repr(pt.p), series, metric, "" if val is None else repr(val)])
    return buf.getvalue()


def report_table(report: ExperimentReport) -> str:
    lines = [f"{report.name}: C={report.stats['C']:.4f}  k={report.runs}",
             f"{'p':>10} {'obs_rse':>8} {'est_rse':>8} {'rse_full':>8} "
             f"{'obs_rb':>9} {'rb_hat':>9} {'rb_plus':>9} {'fallback':>8}"]

    def f(x, spec):
        return format(x, spec) if x is not None and not (isinstance(x, float) and math.isnan(x)) \
            else "-".rjust(int(spec.split(".")[0].lstrip(">+") or 0))

    for pt in report.points:
        lines.append(f"{pt.p:>10.5g} {f(pt.observed_rse, '8.4f')} {f(pt.mean_rse_simple, '8.4f')} "
                     f"{f(pt.mean_rse_full, '8.4f')} {f(pt.observed_rb, '+9.4f')} "
                     f"{f(pt.mean_rb_hat, '+9.4f')} {f(pt.observed_rb_plus, '+9.4f')} "
                     f"{pt.fallback_count:>8d}")
    return "\n".join(lines)

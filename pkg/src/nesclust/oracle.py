"""Exact structural statistics of a graph.

Per-edge counters drive everything:

* ``t_e``: triangles containing edge ``e`` (edge-iterator, sorted merge);
* ``w_e = deg(u) + deg(v) - 2``: wedges containing ``e = (u, v)``.

From these, ``Phi = sum C(t_e, 2)``, ``Psi = sum C(w_e, 2)`` and
``Omega = sum w_e * c_e`` with ``c_e = 2 t_e`` closed wedges containing ``e``.
Each triangle contributes 12 (wedge, closed wedge, shared edge) incidences
from its own three wedges, so the number of {wedge, triangle} pairs sharing
exactly one edge is ``OmegaPrime = (Omega - 4 Delta) / 2``, equal to
``sum t_e (w_e - 2)``. Both routes are computed and must agree.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ConsistencyError, UndefinedEstimateError
from .graph import Graph

log = logging.getLogger(__name__)

CSV_COLUMNS = ("N", "M", "C", "Delta", "Lambda", "Phi", "Psi", "OmegaPrime")

# above this many edges exact_stats refuses unless allow_huge=True
HUGE_M = 5_000_000


@dataclass(frozen=True)
class ExactStats:
    N: int
    M: int
    Delta: int
    Lambda: int
    C: Optional[float]
    Phi: int
    Psi: int
    Omega: int
    OmegaPrime: int

    @property
    def triangles(self) -> int:
        return self.Delta // 3

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExactStats":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    def csv_row(self) -> list:
        return [getattr(self, k) for k in CSV_COLUMNS]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(CSV_COLUMNS)
        w.writerow(self.csv_row())
        return buf.getvalue()


def edge_triangle_counts(g: Graph) -> np.ndarray:
    """Triangles through each edge, indexed by edge id."""
    if g.m == 0:
        return np.zeros(0, dtype=np.int64)
    return _kernels.edge_triangle_counts(g.indptr, g.indices, g.edges)


def edge_wedge_counts(g: Graph) -> np.ndarray:
    """Wedges through each edge, ``deg(u) + deg(v) - 2``."""
    d = g.degrees
    return d[g.edges[:, 0]] + d[g.edges[:, 1]] - 2


def count_wedges(g: Graph) -> int:
    d = g.degrees
    return int(np.sum(d * (d - 1) // 2))


def count_closed_wedges(g: Graph, t: Optional[np.ndarray] = None) -> int:
    if t is None:
        t = edge_triangle_counts(g)
    total = int(t.sum())
    if total % 3:
        raise ConsistencyError("per-edge triangle counts do not sum to a multiple of 3")
    # each triangle is seen from its 3 edges and has 3 closed wedges
    return total


def clustering_coefficient(stats: ExactStats) -> float:
    if stats.Lambda == 0:
        raise UndefinedEstimateError("C is undefined for a graph with no wedges")
    return stats.Delta / stats.Lambda


def count_phi(g: Graph, t: Optional[np.ndarray] = None) -> int:
    if t is None:
        t = edge_triangle_counts(g)
    return int(np.sum(t * (t - 1) // 2))


def count_psi(g: Graph) -> int:
    w = edge_wedge_counts(g)
    return int(np.sum(w * (w - 1) // 2))


def count_omega_prime(g: Graph, t: Optional[np.ndarray] = None) -> tuple:
    """Return ``(Omega, OmegaPrime)``; raises on any inconsistency."""
    if t is None:
        t = edge_triangle_counts(g)
    w = edge_wedge_counts(g)
    omega = int(np.sum(w * (2 * t)))
    delta = int(t.sum())
    twice = omega - 4 * delta
    if twice < 0 or twice % 2:
        raise ConsistencyError(f"(Omega - 4 Delta) = {twice} is negative or odd")
    omega_prime = twice // 2
    direct = int(np.sum(t * (w - 2)))
    if direct != omega_prime:
        raise ConsistencyError(f"OmegaPrime routes disagree: {omega_prime} vs {direct}")
    return omega, omega_prime


def exact_stats(g: Graph, allow_huge: bool = False) -> ExactStats:
    if g.m > HUGE_M and not allow_huge:
        raise ValueError(f"graph has {g.m:,} edges; exact stats at this scale can take hours "
                         "(pass allow_huge=True / --allow-huge-oracle)")
    t = edge_triangle_counts(g)
    delta = count_closed_wedges(g, t)
    lam = count_wedges(g)
    omega, omega_prime = count_omega_prime(g, t)
    stats = ExactStats(
        N=g.n, M=g.m, Delta=delta, Lambda=lam,
        C=(delta / lam) if lam else None,
        Phi=count_phi(g, t), Psi=count_psi(g),
        Omega=omega, OmegaPrime=omega_prime,
    )
    log.debug("exact stats: %s", stats)
    return stats

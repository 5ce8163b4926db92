"""Single-pass naive edge sampling (NES) over an edge stream.

Each arriving edge is first counted against the current sample ``g`` and
only then offered to ``g`` with probability ``p``, so an edge never pairs
with itself. Besides the closed-wedge and wedge counters the state tracks
three auxiliary pair counters used by the variance and bias estimators:

``phi_g``
    pairs of identified triangles sharing an edge, ``sum C(t_e, 2)``.
``psi_g``
    pairs of identified wedges sharing their resident edge, ``sum C(c_f, 2)``.
``omega_prime_g``
    (wedge, triangle) pairs whose shared edge is a resident edge of the
    triangle and the resident edge of the wedge, excluding the triangle's
    own wedges.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import _kernels
from .errors import StreamError
from .graph import Edge, Graph, canonical
from .ingest import EdgeStream, shuffle_stream


@dataclass(frozen=True)
class NesConfig:
    p: float
    seed: int = 0
    track_aux: bool = True

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0) or math.isnan(self.p):
            raise ValueError(f"sampling probability must be in (0, 1], got {self.p}")


@dataclass
class NesState:
    p: float
    seed: int
    track_aux: bool = True
    delta_g: int = 0
    lambda_g: int = 0
    phi_g: int = 0
    psi_g: int = 0
    omega_prime_g: int = 0
    edges_seen: int = 0
    last_label: int = 0
    # sampled subgraph: node -> {neighbor: arrival label of the edge}
    adj: Dict[int, Dict[int, int]] = field(default_factory=lambda: defaultdict(dict))
    labels: Dict[Edge, int] = field(default_factory=dict)
    wedge_partners: Dict[Edge, int] = field(default_factory=lambda: defaultdict(int))
    triangle_membership: Dict[Edge, int] = field(default_factory=lambda: defaultdict(int))
    triangle_residency: Dict[Edge, int] = field(default_factory=lambda: defaultdict(int))

    @property
    def sample_size(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def summary(self) -> dict:
        return {
            "p": self.p,
            "seed": self.seed,
            "track_aux": self.track_aux,
            "edges_seen": self.edges_seen,
            "sample_size": self.sample_size,
            "delta_g": self.delta_g,
            "lambda_g": self.lambda_g,
            "phi_g": self.phi_g,
            "psi_g": self.psi_g,
            "omega_prime_g": self.omega_prime_g,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


class NesStream:
    """Reference NES state machine; feed edges with :meth:`process_edge`.

    ``rng`` overrides the sampling generator; anything with a ``random()``
    method returning floats in [0, 1) will do.
    """

    def __init__(self, cfg: NesConfig, rng=None):
        self.cfg = cfg
        self.state = NesState(p=cfg.p, seed=cfg.seed, track_aux=cfg.track_aux)
        self._rng = np.random.default_rng(cfg.seed) if rng is None else rng
        self._seen = set()

    def process_edge(self, u: int, v: int, label: int) -> None:
        if u == v:
            raise StreamError(f"self-loop ({u}, {v}) in stream")
        e = canonical(u, v)
        if e in self._seen:
            raise StreamError(f"edge {e} arrived twice")
        st = self.state
        if label <= st.last_label:
            raise StreamError(f"arrival label {label} is not after {st.last_label}")
        self._seen.add(e)
        st.last_label = label
        st.edges_seen += 1
        adj = st.adj
        aux = st.track_aux
        c, t, r, lab = st.wedge_partners, st.triangle_membership, st.triangle_residency, st.labels

        nu = adj.get(u, {})
        nv = adj.get(v, {})
        small, large = (nu, nv) if len(nu) <= len(nv) else (nv, nu)
        triangles = [(canonical(u, x), canonical(x, v)) for x in small if x in large]

        # (1) closed wedges
        st.delta_g += len(triangles)

        if aux:
            for a1, a2 in triangles:
                # (2) exclude the triangle's own wedge {a1, a2}
                st.omega_prime_g += c[a1] - (lab[a2] > lab[a1])
                st.omega_prime_g += c[a2] - (lab[a1] > lab[a2])
                # (3)
                for f in (e, a1, a2):
                    st.phi_g += t[f]
                    t[f] += 1

        # (4) wedges through resident edges adjacent to e
        st.lambda_g += len(nu) + len(nv)
        if aux:
            for x, nb in ((u, nu), (v, nv)):
                for y in nb:
                    f = canonical(x, y)
                    st.psi_g += c[f]
                    st.omega_prime_g += r[f]
                    c[f] += 1
            # (5)
            for a1, a2 in triangles:
                r[a1] += 1
                r[a2] += 1

        # (6) sampling
        if self._rng.random() < st.p:
            adj[u][v] = label
            adj[v][u] = label
            lab[e] = label


def run_stream(stream: EdgeStream, cfg: NesConfig) -> NesState:
    nes = NesStream(cfg)
    for label, (u, v) in stream:
        nes.process_edge(u, v, label)
    return nes.state


class FastNes:
    """Compiled NES runs over one fixed graph.

    Produces the same counters as :func:`run_stream` for the same stream
    order and sampling seed.
    """

    def __init__(self, g: Graph):
        from .oracle import edge_triangle_counts

        self.graph = g
        t = edge_triangle_counts(g)
        self.tri_ptr, self.tri_u, self.tri_v = _kernels.edge_triangle_lists(
            g.indptr, g.indices, g.adj_eid, g.edges, t)

    def run(self, order: np.ndarray, sample_seed: int, p: float, track_aux: bool = True) -> tuple:
        """Counters ``(delta_g, lambda_g, phi_g, psi_g, omega_prime_g, |g|)``."""
        g = self.graph
        draws = np.random.default_rng(sample_seed).random(g.m)
        return _kernels.nes_simulate(g.n, g.edges, g.indptr, self.tri_ptr, self.tri_u,
                                     self.tri_v, np.asarray(order, dtype=np.int64), draws,
                                     float(p), bool(track_aux))

    def run_seeded(self, stream_seed: int, sample_seed: int, p: float,
                   track_aux: bool = True) -> tuple:
        order = np.random.default_rng(stream_seed).permutation(self.graph.m)
        return self.run(order, sample_seed, p, track_aux)


def run_seeds(base_seed: int, run_index: int) -> tuple:
    """(stream_seed, sample_seed) of run ``run_index``, two 64-bit integers."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(run_index),))
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


COUNTERS = ("delta_g", "lambda_g", "phi_g", "psi_g", "omega_prime_g")


def expected_counters(stats, p: float) -> dict:
    """Leading-order expectations of the five counters under random order."""
    return {
        "delta_g": stats.Delta * p**2 / 3,
        "lambda_g": stats.Lambda * p,
        "phi_g": 8 / 15 * stats.Phi * p**3,
        "psi_g": stats.Psi * p / 3,
        "omega_prime_g": 5 / 12 * stats.OmegaPrime * p**2,
    }


def simulate_counters(g: Graph, p: float, runs: int, base_seed: int = 0,
                      track_aux: bool = True, fast: Optional[FastNes] = None) -> np.ndarray:
    """``runs x 6`` int64 array of counters over independently shuffled streams."""
    fast = fast or FastNes(g)
    out = np.empty((runs, 6), dtype=np.int64)
    for i in range(runs):
        s1, s2 = run_seeds(base_seed, i)
        out[i] = fast.run_seeded(s1, s2, p, track_aux)
    return out


def aux_expectations_check(graph: Graph, cfg: NesConfig, runs: int, stats=None) -> dict:
    """Observed counter means versus their expectations, with z-scores.

    ``cfg.seed`` is the base seed of the runs. Returns one entry per counter
    with ``mean``, ``se``, ``expected`` and ``z``; ``z`` is ``None`` when the
    standard error is zero.
    """
    if runs < 30:
        raise ValueError(f"need at least 30 runs for a mean test, got {runs}")
    if stats is None:
        from .oracle import exact_stats

        stats = exact_stats(graph)
    counts = simulate_counters(graph, cfg.p, runs, cfg.seed, cfg.track_aux)
    expected = expected_counters(stats, cfg.p)
    report = {"p": cfg.p, "runs": runs, "base_seed": cfg.seed, "counters": {}}
    for j, name in enumerate(COUNTERS):
        x = counts[:, j].astype(np.float64)
        mean = float(x.mean())
        se = float(x.std(ddof=1) / math.sqrt(runs))
        exp = expected[name]
        if se > 0:
            z = (mean - exp) / se
        else:
            z = None if mean != exp else 0.0
        report["counters"][name] = {"mean": mean, "se": se, "expected": exp, "z": z}
    return report


__all__ = [
    "NesConfig", "NesState", "NesStream", "run_stream", "FastNes", "run_seeds",
    "expected_counters", "simulate_counters", "aux_expectations_check", "shuffle_stream",
]

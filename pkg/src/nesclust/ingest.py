"""Edge-list parsing and edge-stream construction.

Edge lists are plain text, one edge per line. Lines whose first non-blank
character is ``#`` or ``%`` are comments (SNAP and KONECT headers). Tokens
are split on ASCII whitespace and the first two are parsed as unsigned 64-bit
integers; further columns (KONECT weights, timestamps) are ignored.

Streams are index-permutation views over ``Graph.edges``. Shuffling uses
numpy's PCG64 generator seeded with ``numpy.random.default_rng(seed)`` and
``Generator.permutation`` (a Fisher-Yates shuffle).
"""
from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from .errors import IngestError, StreamError
from .graph import Edge, Graph

SHUFFLE_RNG = "numpy.random.PCG64 via default_rng(seed); Generator.permutation (Fisher-Yates)"

_WS = re.compile(rb"[ \t\n\r\x0b\x0c]+")
_UINT = re.compile(rb"[0-9]+\Z")
_U64_MAX = 2**64 - 1


@dataclass
class IngestReport:
    lines_read: int = 0
    comment_lines: int = 0
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0
    N: int = 0
    M: int = 0
    path: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _parse_token(tok: bytes, path, line_no: int) -> int:
    if not _UINT.match(tok):
        raise IngestError(f"expected unsigned integer, got {tok.decode(errors='replace')!r}",
                          path, line_no)
    val = int(tok)
    if val > _U64_MAX:
        raise IngestError(f"node id {val} exceeds 64-bit range", path, line_no)
    return val


def parse_edge_list(path: Union[str, Path]) -> Tuple[Graph, IngestReport]:
    """Read an edge list into a simple undirected :class:`Graph`.

    Self-loops and repeated edges (in either direction) are dropped and
    counted. Original ids are remapped to ``0..N-1`` in increasing id order
    and kept in ``Graph.labels``. Raises :class:`IngestError` on a malformed
    line or if no edge survives.
    """
    path = Path(path)
    report = IngestReport(path=str(path))
    src, dst = [], []
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, start=1):
            report.lines_read += 1
            stripped = raw.strip(b" \t\n\r\x0b\x0c")
            if not stripped or stripped[:1] in (b"#", b"%"):
                report.comment_lines += 1
                continue
            toks = _WS.split(stripped)
            if len(toks) < 2:
                raise IngestError("expected two node ids", path, line_no)
            u = _parse_token(toks[0], path, line_no)
            v = _parse_token(toks[1], path, line_no)
            src.append(u)
            dst.append(v)

    if not src:
        raise IngestError("empty graph: no edges", path)

    raw_ids = np.array(src + dst, dtype=np.uint64)
    labels, inverse = np.unique(raw_ids, return_inverse=True)
    k = len(src)
    u = inverse[:k].astype(np.int64)
    v = inverse[k:].astype(np.int64)
    loops = u == v
    report.self_loops_dropped = int(loops.sum())
    u, v = u[~loops], v[~loops]
    n = int(labels.size)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    _, first = np.unique(lo * n + hi, return_index=True)
    first.sort()
    report.duplicates_dropped = int(u.size - first.size)
    if first.size == 0:
        raise IngestError("empty graph: every line was a self-loop", path)
    g = Graph(n, np.stack([lo[first], hi[first]], axis=1), labels)
    report.N, report.M = g.n, g.m
    return g, report


@dataclass(frozen=True)
class EdgeStream:
    """Edges of ``graph`` in arrival order; position ``i`` has label ``i + 1``.

    ``order[i]`` is the edge id arriving ``i``-th. ``seed`` is ``None`` for
    file order.
    """

    graph: Graph
    order: np.ndarray = field(repr=False)
    seed: Optional[int] = None

    def __len__(self) -> int:
        return int(self.order.size)

    def __iter__(self) -> Iterator[Tuple[int, Edge]]:
        edges = self.graph.edges
        for i, eid in enumerate(self.order.tolist(), start=1):
            u, v = edges[eid]
            yield i, (int(u), int(v))

    def edge_list(self) -> list:
        return [e for _, e in self]


def shuffle_stream(g: Graph, seed: int) -> EdgeStream:
    if g.m < 1:
        raise StreamError("cannot stream a graph with no edges")
    order = np.random.default_rng(seed).permutation(g.m)
    order.flags.writeable = False
    return EdgeStream(g, order, int(seed))


def file_order_stream(g: Graph) -> EdgeStream:
    if g.m < 1:
        raise StreamError("cannot stream a graph with no edges")
    order = np.arange(g.m, dtype=np.int64)
    order.flags.writeable = False
    return EdgeStream(g, order, None)


def generate_graph(kind: str, **params) -> Graph:
    """Seeded synthetic graph via networkx generators.

    ``kind`` is one of ``gnp`` (n, p), ``powerlaw_cluster`` (n, m, p),
    ``geometric`` (n, radius) or ``caveman`` (l, k, p); every kind takes
    ``seed``.
    """
    import networkx as nx

    seed = params.get("seed", 0)
    if kind == "gnp":
        G = nx.gnp_random_graph(int(params["n"]), float(params["p"]), seed=seed)
    elif kind == "powerlaw_cluster":
        G = nx.powerlaw_cluster_graph(int(params["n"]), int(params["m"]),
                                      float(params["p"]), seed=seed)
    elif kind == "geometric":
        G = nx.random_geometric_graph(int(params["n"]), float(params["radius"]), seed=seed)
    elif kind == "caveman":
        G = nx.relaxed_caveman_graph(int(params["l"]), int(params["k"]),
                                     float(params["p"]), seed=seed)
    else:
        raise ValueError(f"unknown generator {kind!r}")
    nodes = sorted(G.nodes())
    index = {x: i for i, x in enumerate(nodes)}
    pairs = [(index[a], index[b]) for a, b in G.edges()]
    g = Graph.from_edges(pairs, n=len(nodes))
    if g.m == 0:
        raise IngestError(f"generated {kind} graph has no edges")
    return g


def load_source(source) -> Graph:
    """Graph from a path or from a generator description dict.

    ``{"path": ...}`` or a plain path string reads an edge list;
    ``{"generator": "gnp", "n": 200, "p": 0.1, "seed": 1}`` generates.
    """
    if isinstance(source, (str, Path)):
        return parse_edge_list(source)[0]
    source = dict(source)
    if "path" in source:
        return parse_edge_list(source["path"])[0]
    kind = source.pop("generator")
    source.pop("name", None)
    return generate_graph(kind, **source)


def source_name(source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).stem
    if "name" in source:
        return str(source["name"])
    if "path" in source:
        return Path(source["path"]).stem
    params = ",".join(f"{k}={source[k]}" for k in sorted(source) if k != "generator")
    return f"{source['generator']}({params})"

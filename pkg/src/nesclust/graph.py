"""Simple undirected graph in CSR form.

Nodes are dense ids ``0..N-1``; ``labels[i]`` keeps the original id of node
``i``. Edges are canonical ``(u, v)`` with ``u < v`` and carry an edge id
``0..M-1`` in first-occurrence order, which is also the file-order stream.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import GraphError

Edge = Tuple[int, int]


def canonical(u: int, v: int) -> Edge:
    if u == v:
        raise GraphError(f"self-loop ({u}, {v}) is not an edge")
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph.

    Adjacency is stored as sorted neighbor arrays (``indptr``/``indices``)
    with a parallel ``adj_eid`` array giving the edge id of each incidence.
    """

    __slots__ = ("n", "m", "edges", "labels", "indptr", "indices", "adj_eid", "_degrees")

    def __init__(self, n: int, edges: np.ndarray, labels: Optional[np.ndarray] = None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise GraphError("edge endpoint outside 0..N-1")
        if np.any(edges[:, 0] >= edges[:, 1]):
            raise GraphError("edges must be canonical (u < v) with no self-loops")
        keys = edges[:, 0] * max(n, 1) + edges[:, 1]
        if np.unique(keys).size != keys.size:
            raise GraphError("duplicate edges")

        self.n = int(n)
        self.m = int(edges.shape[0])
        self.edges = edges
        self.edges.flags.writeable = False
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        self.labels = np.asarray(labels)

        # both directions, sorted by (node, neighbor)
        eid = np.arange(self.m, dtype=np.int64)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        ids = np.concatenate([eid, eid])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        self.adj_eid = ids[order]
        counts = np.bincount(src, minlength=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self._degrees = counts.astype(np.int64)
        for arr in (self.indices, self.adj_eid, self.indptr, self._degrees):
            arr.flags.writeable = False

    @classmethod
    def from_edges(cls, pairs: Iterable[Sequence[int]], n: Optional[int] = None) -> "Graph":
        """Build from dense integer pairs, dropping self-loops and duplicates.

        First occurrence fixes each edge's id. ``n`` defaults to ``max id + 1``.
        """
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                         dtype=np.int64).reshape(-1, 2)
        if n is None:
            n = int(arr.max()) + 1 if arr.size else 0
        arr = arr[arr[:, 0] != arr[:, 1]]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        _, first = np.unique(lo * max(n, 1) + hi, return_index=True)
        first.sort()
        return cls(n, np.stack([lo[first], hi[first]], axis=1))

    def __repr__(self) -> str:
        return f"Graph(N={self.n}, M={self.m})"

    def _check(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise GraphError(f"node id {u} out of range 0..{self.n - 1}")

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def degree(self, u: int) -> int:
        self._check(u)
        return int(self._degrees[u])

    def neighbors(self, u: int) -> np.ndarray:
        self._check(u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def common_neighbors(self, u: int, v: int) -> set:
        if u == v:
            raise GraphError("common_neighbors needs two distinct nodes")
        a, b = self.neighbors(u), self.neighbors(v)
        return set(_merge_intersect(a, b))

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            raise GraphError("has_edge(u, u): self-loops are never edges")
        return self.edge_id(u, v) is not None

    def edge_id(self, u: int, v: int) -> Optional[int]:
        nb = self.neighbors(u)
        self._check(v)
        i = int(np.searchsorted(nb, v))
        if i < nb.size and nb[i] == v:
            return int(self.adj_eid[self.indptr[u] + i])
        return None

    def edge(self, eid: int) -> Edge:
        u, v = self.edges[eid]
        return int(u), int(v)

    def relabel(self, perm: np.ndarray) -> "Graph":
        """Copy with node ``i`` renamed to ``perm[i]``; edge ids are kept."""
        perm = np.asarray(perm, dtype=np.int64)
        e = perm[self.edges]
        e.sort(axis=1)
        labels = np.empty_like(self.labels)
        labels[perm] = self.labels
        return Graph(self.n, e, labels)


def _merge_intersect(a: np.ndarray, b: np.ndarray) -> list:
    # linear merge of two sorted arrays
    out = []
    i = j = 0
    la, lb = a.size, b.size
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x == y:
            out.append(int(x))
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return out

"""Independent brute-force structural counts, straight from the definitions.

Nothing here uses per-edge counters; wedges and triangles are materialized
as edge sets and every pair is compared.
"""
from itertools import combinations

import numpy as np


def _edge_index(edges):
    return {frozenset(e): i for i, e in enumerate(edges)}


def enumerate_structures(n, edges):
    """Wedges as sorted edge-id pairs, triangles as sorted edge-id triples."""
    idx = _edge_index(edges)
    nbrs = [set() for _ in range(n)]
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    wedges = []
    for c in range(n):
        for a, b in combinations(sorted(nbrs[c]), 2):
            wedges.append(tuple(sorted((idx[frozenset((a, c))], idx[frozenset((c, b))]))))
    triangles = []
    for a, b, c in combinations(range(n), 3):
        if b in nbrs[a] and c in nbrs[a] and c in nbrs[b]:
            triangles.append(tuple(sorted((idx[frozenset((a, b))], idx[frozenset((a, c))],
                                           idx[frozenset((b, c))]))))
    return wedges, triangles


def brute_counts(n, edges):
    """Pure-Python pair enumeration; fine up to a few hundred wedges."""
    wedges, triangles = enumerate_structures(n, edges)
    ws = [set(w) for w in wedges]
    ts = [set(t) for t in triangles]
    phi = sum(1 for x, y in combinations(ts, 2) if len(x & y) == 1)
    psi = sum(1 for x, y in combinations(ws, 2) if len(x & y) >= 1)
    omega_prime = sum(1 for w in ws for t in ts if len(w & t) == 1)
    return {"Delta": 3 * len(triangles), "Lambda": len(wedges), "Phi": phi, "Psi": psi,
            "OmegaPrime": omega_prime}


def brute_counts_np(n, edges):
    """Same definitions with all-pairs comparison done by numpy broadcasting."""
    wedges, triangles = enumerate_structures(n, edges)
    W = np.array(wedges, dtype=np.int32).reshape(-1, 2)
    T = np.array(triangles, dtype=np.int32).reshape(-1, 3)

    def shared(A, B):
        s = np.zeros((A.shape[0], B.shape[0]), dtype=np.int8)
        for i in range(A.shape[1]):
            for j in range(B.shape[1]):
                s += (A[:, i, None] == B[None, :, j])
        return s

    sw = shared(W, W)
    st = shared(T, T)
    swt = shared(W, T)
    psi = int((np.triu(sw, 1) >= 1).sum())
    phi = int((np.triu(st, 1) == 1).sum())
    return {"Delta": 3 * len(triangles), "Lambda": len(wedges), "Phi": phi, "Psi": psi,
            "OmegaPrime": int((swt == 1).sum())}

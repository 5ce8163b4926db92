"""Compiled inner loops: edge-iterator triangle listing and the NES simulator.

The simulator is a faster twin of :class:`nesclust.stream.NesStream` for
graphs that are fully known in advance (the Monte-Carlo harness). Common
neighbours of an arriving edge inside the sample are found from the
precomputed triangle list of that edge in G, which is equivalent because the
sample is a subgraph of G. Counter updates follow the same step order as the
reference and both consume one uniform draw per arrival, so for the same
(order, draws) they produce identical counters.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _count_common(indptr, indices, u, v):
    i, iend = indptr[u], indptr[u + 1]
    j, jend = indptr[v], indptr[v + 1]
    c = 0
    while i < iend and j < jend:
        x = indices[i]
        y = indices[j]
        if x == y:
            c += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return c


@njit(cache=True)
def edge_triangle_counts(indptr, indices, edges):
    m = edges.shape[0]
    t = np.zeros(m, dtype=np.int64)
    for e in range(m):
        t[e] = _count_common(indptr, indices, edges[e, 0], edges[e, 1])
    return t


@njit(cache=True)
def edge_triangle_lists(indptr, indices, adj_eid, edges, t):
    """For each edge e=(u,v), the edge ids of (u,w) and (v,w) per common w."""
    m = edges.shape[0]
    ptr = np.zeros(m + 1, dtype=np.int64)
    for e in range(m):
        ptr[e + 1] = ptr[e] + t[e]
    side_u = np.empty(ptr[m], dtype=np.int32)
    side_v = np.empty(ptr[m], dtype=np.int32)
    for e in range(m):
        u = edges[e, 0]
        v = edges[e, 1]
        i, iend = indptr[u], indptr[u + 1]
        j, jend = indptr[v], indptr[v + 1]
        k = ptr[e]
        while i < iend and j < jend:
            x = indices[i]
            y = indices[j]
            if x == y:
                side_u[k] = adj_eid[i]
                side_v[k] = adj_eid[j]
                k += 1
                i += 1
                j += 1
            elif x < y:
                i += 1
            else:
                j += 1
    return ptr, side_u, side_v


@njit(cache=True)
def nes_simulate(n, edges, indptr, tri_ptr, tri_u, tri_v, order, draws, p, track_aux):
    """One NES pass. Returns (delta_g, lambda_g, phi_g, psi_g, omega_prime_g, |g|)."""
    m = edges.shape[0]
    in_g = np.zeros(m, dtype=np.bool_)
    label = np.zeros(m, dtype=np.int64)
    gcount = np.zeros(n, dtype=np.int64)
    gslots = np.empty(2 * m, dtype=np.int64)
    c = np.zeros(m, dtype=np.int64)
    r = np.zeros(m, dtype=np.int64)
    t = np.zeros(m, dtype=np.int64)
    maxt = 0
    for e in range(m):
        if tri_ptr[e + 1] - tri_ptr[e] > maxt:
            maxt = tri_ptr[e + 1] - tri_ptr[e]
    found_a = np.empty(maxt + 1, dtype=np.int64)
    found_b = np.empty(maxt + 1, dtype=np.int64)

    delta_g = 0
    lambda_g = 0
    phi_g = 0
    psi_g = 0
    omega_g = 0
    size_g = 0
    for pos in range(m):
        e = order[pos]
        lab = pos + 1
        label[e] = lab
        u = edges[e, 0]
        v = edges[e, 1]

        # (1) closed wedges
        nf = 0
        for k in range(tri_ptr[e], tri_ptr[e + 1]):
            a = tri_u[k]
            b = tri_v[k]
            if in_g[a] and in_g[b]:
                found_a[nf] = a
                found_b[nf] = b
                nf += 1
        delta_g += nf

        if track_aux:
            for k in range(nf):
                a = found_a[k]
                b = found_b[k]
                # (2) wedge-triangle pairs through a resident edge
                omega_g += c[a] - (1 if label[b] > label[a] else 0)
                omega_g += c[b] - (1 if label[a] > label[b] else 0)
                # (3) triangle pairs sharing an edge
                phi_g += t[e]
                t[e] += 1
                phi_g += t[a]
                t[a] += 1
                phi_g += t[b]
                t[b] += 1

        # (4) wedges through resident edges adjacent to e
        lambda_g += gcount[u] + gcount[v]
        if track_aux:
            for x in (u, v):
                base = indptr[x]
                for s in range(gcount[x]):
                    f = gslots[base + s]
                    psi_g += c[f]
                    omega_g += r[f]
                    c[f] += 1
            # (5) residency of the two sampled triangle edges
            for k in range(nf):
                r[found_a[k]] += 1
                r[found_b[k]] += 1

        # (6) sampling
        if draws[pos] < p:
            in_g[e] = True
            gslots[indptr[u] + gcount[u]] = e
            gcount[u] += 1
            gslots[indptr[v] + gcount[v]] = e
            gcount[v] += 1
            size_g += 1
    return delta_g, lambda_g, phi_g, psi_g, omega_g, size_g

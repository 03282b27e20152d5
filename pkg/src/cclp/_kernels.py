"""Compiled inner loops over CSR adjacency (sorted neighbour arrays).

Every kernel is serial and releases the GIL; callers parallelise by
splitting work across threads.
"""
import numpy as np
from numba import njit

# scoring modes understood by the pair kernels
MODE_WEIGHTED = 0  # sum of per-node weights over common neighbours
MODE_JACCARD = 1
MODE_CAR = 2
MODE_PA = 3

_NB = dict(cache=True, nogil=True)


@njit(**_NB)
def intersect_count(indices, a0, a1, b0, b1):
    i = a0
    j = b0
    c = 0
    while i < a1 and j < b1:
        u = indices[i]
        v = indices[j]
        if u == v:
            c += 1
            i += 1
            j += 1
        elif u < v:
            i += 1
        else:
            j += 1
    return c


@njit(**_NB)
def intersect_into(indices, a0, a1, b0, b1, out):
    i = a0
    j = b0
    c = 0
    while i < a1 and j < b1:
        u = indices[i]
        v = indices[j]
        if u == v:
            out[c] = u
            c += 1
            i += 1
            j += 1
        elif u < v:
            i += 1
        else:
            j += 1
    return c


@njit(**_NB)
def _edges_within(indptr, indices, members, m):
    # members[:m] is sorted; count edges with both endpoints in it
    twice = 0
    for a in range(m):
        u = members[a]
        i = indptr[u]
        i1 = indptr[u + 1]
        j = 0
        while i < i1 and j < m:
            p = indices[i]
            q = members[j]
            if p == q:
                twice += 1
                i += 1
                j += 1
            elif p < q:
                i += 1
            else:
                j += 1
    return twice // 2


@njit(**_NB)
def triangle_counts(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int64)
    for z in range(n):
        z0 = indptr[z]
        z1 = indptr[z + 1]
        twice = 0
        for a in range(z0, z1):
            u = indices[a]
            twice += intersect_count(indices, z0, z1, indptr[u], indptr[u + 1])
        out[z] = twice // 2
    return out


@njit(**_NB)
def lcl_pair(indptr, indices, x, y, scratch):
    m = intersect_into(indices, indptr[x], indptr[x + 1], indptr[y], indptr[y + 1], scratch)
    return m, _edges_within(indptr, indices, scratch, m)


@njit(**_NB)
def _score_one(indptr, indices, weights, mode, x, y, scratch):
    x0 = indptr[x]
    x1 = indptr[x + 1]
    y0 = indptr[y]
    y1 = indptr[y + 1]
    if mode == MODE_PA:
        return float((x1 - x0) * (y1 - y0))
    if mode == MODE_WEIGHTED:
        i = x0
        j = y0
        s = 0.0
        while i < x1 and j < y1:
            u = indices[i]
            v = indices[j]
            if u == v:
                s += weights[u]
                i += 1
                j += 1
            elif u < v:
                i += 1
            else:
                j += 1
        return s
    if mode == MODE_JACCARD:
        c = intersect_count(indices, x0, x1, y0, y1)
        union = (x1 - x0) + (y1 - y0) - c
        if union == 0:
            return 0.0
        return c / union
    # MODE_CAR
    m = intersect_into(indices, x0, x1, y0, y1, scratch)
    if m < 2:
        return 0.0
    return float(m * _edges_within(indptr, indices, scratch, m))


@njit(**_NB)
def score_pairs(indptr, indices, weights, mode, xs, ys, out):
    maxdeg = 0
    n = indptr.shape[0] - 1
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > maxdeg:
            maxdeg = d
    scratch = np.empty(maxdeg + 1, dtype=indices.dtype)
    for k in range(xs.shape[0]):
        out[k] = _score_one(indptr, indices, weights, mode, xs[k], ys[k], scratch)


@njit(**_NB)
def score_rows(indptr, indices, weights, mode, row_start, row_stop, out):
    """Score every pair (x, y), x < y, for x in [row_start, row_stop).

    ``out`` is the full condensed vector (scipy ``pdist`` order).
    """
    n = indptr.shape[0] - 1
    maxdeg = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > maxdeg:
            maxdeg = d
    scratch = np.empty(maxdeg + 1, dtype=indices.dtype)
    for x in range(row_start, row_stop):
        base = n * x - (x * (x + 1)) // 2 - x - 1
        for y in range(x + 1, n):
            out[base + y] = _score_one(indptr, indices, weights, mode, x, y, scratch)


@njit(**_NB)
def bfs_distance_sums(indptr, indices, sources):
    """Per-source (sum of hop distances, number of reachable other nodes)."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    sums = np.zeros(sources.shape[0], dtype=np.int64)
    counts = np.zeros(sources.shape[0], dtype=np.int64)
    for k in range(sources.shape[0]):
        s = sources[k]
        dist[:] = -1
        dist[s] = 0
        head = 0
        tail = 1
        queue[0] = s
        total = 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            total += du
            for a in range(indptr[u], indptr[u + 1]):
                v = indices[a]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
        sums[k] = total
        counts[k] = tail - 1
    return sums, counts

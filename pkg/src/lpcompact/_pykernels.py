"""Numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and semantics.  Ties are always resolved towards the smallest index.
"""
import numpy as np

_CHUNK = 1 << 20


def vector_norms(x, q):
    """l_q norms of the rows of a 2-d array."""
    x = np.asarray(x, dtype=np.float64)
    a = np.abs(x)
    if q == 1.0:
        return a.sum(axis=-1)
    if q == 2.0:
        return np.sqrt(np.einsum("...i,...i->...", x, x))
    if np.isinf(q):
        return a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
    return (a ** q).sum(axis=-1) ** (1.0 / q)


def lp_rows(a, w, p):
    """Weighted p-norms of the rows of a nonnegative (k, A) table.

    Rows are scaled by their maximum before powering so that large values
    do not overflow.
    """
    a = np.asarray(a, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    m = a.max(axis=1) if a.shape[1] else np.zeros(a.shape[0])
    out = np.zeros(a.shape[0])
    nz = m > 0
    if not nz.any():
        return out
    s = a[nz] / m[nz, None]
    if p != 1.0:
        s = s ** p
    tot = s @ w
    out[nz] = m[nz] * tot ** (1.0 / p)
    return out


def pairwise_lp(values, w, p, q):
    """Symmetric (L, L) table of weighted L^p distances between members.

    ``values`` has shape (L, A, d); the pointwise distance is the l_q norm.
    """
    values = np.asarray(values, dtype=np.float64)
    L = values.shape[0]
    out = np.zeros((L, L))
    for i in range(L - 1):
        diff = values[i + 1:] - values[i]
        pw = vector_norms(diff, q)
        out[i, i + 1:] = lp_rows(pw, w, p)
    return out + out.T


def first_min_assign(points, centers, q):
    """Index and distance of the first nearest center for every point."""
    points = np.asarray(points, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    n, m = points.shape[0], centers.shape[0]
    assign = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    step = max(1, _CHUNK // max(1, m))
    for lo in range(0, n, step):
        blk = points[lo:lo + step]
        d = vector_norms(blk[:, None, :] - centers[None, :, :], q)
        k = np.argmin(d, axis=1)
        assign[lo:lo + step] = k
        dist[lo:lo + step] = d[np.arange(d.shape[0]), k]
    return assign, dist


def farthest_first(D):
    """Full farthest-first traversal of a distance matrix seeded at index 0.

    Returns the visiting order and the insertion radius of each visited
    point (its distance to the earlier centers; ``inf`` for the seed).
    """
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    order = np.empty(n, dtype=np.int64)
    radii = np.empty(n)
    mind = np.full(n, np.inf)
    nxt = 0
    for k in range(n):
        order[k] = nxt
        radii[k] = mind[nxt]
        np.minimum(mind, D[nxt], out=mind)
        mind[nxt] = -1.0
        if k + 1 < n:
            nxt = int(np.argmax(mind))
    return order, radii


def farthest_first_points(points, q, eps):
    """Greedy eps-net of a point cloud; indices of the chosen centers."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    mind = vector_norms(points - points[0], q)
    chosen = [0]
    while True:
        j = int(np.argmax(mind))
        if not mind[j] > eps:
            break
        chosen.append(j)
        np.minimum(mind, vector_norms(points - points[j], q), out=mind)
    return np.asarray(chosen, dtype=np.int64)

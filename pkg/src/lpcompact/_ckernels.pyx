# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, pow, INFINITY, isinf

cnp.import_array()


cdef inline double _dist(const double[:, :] a, Py_ssize_t i,
                         const double[:, :] b, Py_ssize_t j,
                         Py_ssize_t d, int kind, double q) noexcept nogil:
    # kind: 1 -> l1, 2 -> l2, 0 -> linf, 3 -> general lq
    cdef Py_ssize_t k
    cdef double s = 0.0, t
    if kind == 2:
        for k in range(d):
            t = a[i, k] - b[j, k]
            s += t * t
        return sqrt(s)
    if kind == 1:
        for k in range(d):
            s += fabs(a[i, k] - b[j, k])
        return s
    if kind == 0:
        for k in range(d):
            t = fabs(a[i, k] - b[j, k])
            if t > s:
                s = t
        return s
    for k in range(d):
        s += pow(fabs(a[i, k] - b[j, k]), q)
    return pow(s, 1.0 / q)


cdef int _kind(double q):
    if isinf(q):
        return 0
    if q == 1.0:
        return 1
    if q == 2.0:
        return 2
    return 3


def vector_norms(x, double q):
    cdef const double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], d = xv.shape[1], i
    cdef double[:, :] zero = np.zeros((1, d))
    out = np.empty(n)
    cdef double[:] ov = out
    cdef int kind = _kind(q)
    with nogil:
        for i in range(n):
            ov[i] = _dist(xv, i, zero, 0, d, kind, q)
    return out


cdef double _lp_row(const double[:] a, const double[:] w, Py_ssize_t A,
                   double p) noexcept nogil:
    cdef Py_ssize_t k
    cdef double m = 0.0, s = 0.0, c = 0.0, y, t, v
    for k in range(A):
        if a[k] > m:
            m = a[k]
    if m == 0.0:
        return 0.0
    # Neumaier compensated summation
    for k in range(A):
        v = a[k] / m
        if p == 2.0:
            v = v * v
        elif p != 1.0:
            v = pow(v, p)
        y = w[k] * v
        t = s + y
        if fabs(s) >= fabs(y):
            c += (s - t) + y
        else:
            c += (y - t) + s
        s = t
    if p == 1.0:
        return m * (s + c)
    if p == 2.0:
        return m * sqrt(s + c)
    return m * pow(s + c, 1.0 / p)


def lp_rows(a, w, double p):
    cdef const double[:, :] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t k = av.shape[0], A = av.shape[1], i
    out = np.empty(k)
    cdef double[:] ov = out
    with nogil:
        for i in range(k):
            ov[i] = _lp_row(av[i], wv, A, p)
    return out


def pairwise_lp(values, w, double p, double q):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t L = arr.shape[0], A = arr.shape[1], d = arr.shape[2]
    cdef const double[:, :] flat = arr.reshape(L * A, d)
    cdef const double[:] wv = np.ascontiguousarray(w, dtype=np.float64)
    out = np.zeros((L, L))
    cdef double[:, :] ov = out
    cdef double[:] buf = np.empty(A)
    cdef Py_ssize_t i, j, a
    cdef int kind = _kind(q)
    cdef double v
    with nogil:
        for i in range(L):
            for j in range(i + 1, L):
                for a in range(A):
                    buf[a] = _dist(flat, i * A + a, flat, j * A + a, d, kind, q)
                v = _lp_row(buf, wv, A, p)
                ov[i, j] = v
                ov[j, i] = v
    return out


def first_min_assign(points, centers, double q):
    cdef const double[:, :] pv = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, :] cv = np.ascontiguousarray(centers, dtype=np.float64)
    cdef Py_ssize_t n = pv.shape[0], m = cv.shape[0], d = pv.shape[1], i, j, best
    assign = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    cdef cnp.int64_t[:] av = assign
    cdef double[:] dv = dist
    cdef int kind = _kind(q)
    cdef double bd, t
    with nogil:
        for i in range(n):
            best = 0
            bd = _dist(pv, i, cv, 0, d, kind, q)
            for j in range(1, m):
                t = _dist(pv, i, cv, j, d, kind, q)
                if t < bd:
                    bd = t
                    best = j
            av[i] = best
            dv[i] = bd
    return assign, dist


def farthest_first(D):
    cdef const double[:, :] Dv = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = Dv.shape[0], k, j, nxt = 0
    order = np.empty(n, dtype=np.int64)
    radii = np.empty(n)
    mind_arr = np.full(n, INFINITY)
    cdef cnp.int64_t[:] ov = order
    cdef double[:] rv = radii
    cdef double[:] mind = mind_arr
    cdef double best
    with nogil:
        for k in range(n):
            ov[k] = nxt
            rv[k] = mind[nxt]
            for j in range(n):
                if Dv[nxt, j] < mind[j]:
                    mind[j] = Dv[nxt, j]
            mind[nxt] = -1.0
            best = -2.0
            for j in range(n):
                if mind[j] > best:
                    best = mind[j]
                    nxt = j
    return order, radii


def farthest_first_points(points, double q, double eps):
    cdef const double[:, :] pv = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pv.shape[0], d = pv.shape[1], j, nxt
    mind_arr = np.empty(n)
    cdef double[:] mind = mind_arr
    cdef int kind = _kind(q)
    cdef double best, t
    chosen = [0]
    with nogil:
        for j in range(n):
            mind[j] = _dist(pv, j, pv, 0, d, kind, q)
    while True:
        best = -1.0
        nxt = 0
        for j in range(n):
            if mind[j] > best:
                best = mind[j]
                nxt = j
        if not best > eps:
            break
        chosen.append(nxt)
        with nogil:
            for j in range(n):
                t = _dist(pv, j, pv, nxt, d, kind, q)
                if t < mind[j]:
                    mind[j] = t
    return np.asarray(chosen, dtype=np.int64)

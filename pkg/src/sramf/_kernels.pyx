# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: origins-first route search and the dual covering update.

Mirrors ``_pykernels`` operation for operation; see there for the contracts.
"""

from libc.math cimport INFINITY

BACKEND = "cython"

cdef enum:
    MAXK = 16


cdef struct RouteCtx:
    int k
    int n
    const double* T
    const double* wait
    const double* ride
    double best
    double pick[MAXK]
    int picked[MAXK]
    int dropped[MAXK]
    int seq[2 * MAXK]
    int best_seq[2 * MAXK]
    int depth


cdef void _drops(RouteCtx* c, int cur, double t, int depth) noexcept nogil:
    cdef int j, q, nxt
    cdef double t2
    if depth == c.k:
        if t < c.best:
            c.best = t
            for q in range(2 * c.k):
                c.best_seq[q] = c.seq[q]
        return
    for j in range(c.k):
        if c.dropped[j]:
            continue
        nxt = c.k + 1 + j
        t2 = t + c.T[cur * c.n + nxt]
        if t2 - c.pick[j] >= c.ride[j] or t2 >= c.best:
            continue
        c.dropped[j] = 1
        c.seq[c.k + depth] = j
        _drops(c, nxt, t2, depth + 1)
        c.dropped[j] = 0


cdef void _pickups(RouteCtx* c, int cur, double t, int depth) noexcept nogil:
    cdef int j
    cdef double t2
    if depth == c.k:
        _drops(c, cur, t, 0)
        return
    for j in range(c.k):
        if c.picked[j]:
            continue
        t2 = t + c.T[cur * c.n + 1 + j]
        if t2 >= c.wait[j] or t2 >= c.best:
            continue
        c.picked[j] = 1
        c.pick[j] = t2
        c.seq[depth] = j
        _pickups(c, 1 + j, t2, depth + 1)
        c.picked[j] = 0


def route_search(const double[:, ::1] T, const double[::1] wait, const double[::1] ride, int k):
    cdef RouteCtx c
    cdef int q
    if k > MAXK:
        raise ValueError(f"route_search supports at most {MAXK} requests")
    c.k = k
    c.n = 2 * k + 1
    c.T = &T[0, 0]
    c.wait = &wait[0]
    c.ride = &ride[0]
    c.best = INFINITY
    for q in range(k):
        c.picked[q] = 0
        c.dropped[q] = 0
        c.pick[q] = 0.0
    with nogil:
        _pickups(&c, 0, 0.0, 0)
    if c.best == INFINITY:
        return INFINITY, None
    return c.best, [c.best_seq[q] for q in range(2 * k)]


def mmo_insert(double[::1] u, const long[::1] ptr, const long[::1] nodes,
               const double[::1] rhs, const long[::1] edges, double delta):
    cdef Py_ssize_t a, q, e, s, t, g
    cdef long size
    cdef double r, gamma, factor, shift, old, new, inc = 0.0
    with nogil:
        for a in range(edges.shape[0]):
            e = edges[a]
            s = ptr[e]
            t = ptr[e + 1]
            size = t - s
            r = rhs[e]
            gamma = 0.0
            for q in range(s, t):
                gamma = gamma + u[nodes[q]]
            if gamma < r:
                factor = (1.0 + size * delta) / (gamma / r + size * delta)
                shift = r * delta
                for q in range(s, t):
                    g = nodes[q]
                    old = u[g]
                    new = (old + shift) * factor - shift
                    if new < old:
                        new = old
                    u[g] = new
                    inc = inc + (new - old)
    return inc

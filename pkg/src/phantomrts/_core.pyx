# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the solver and the bots' path planning.

Every function here has a behaviourally identical twin in ``_core_py``.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

DEF KIND_LE = 0
DEF KIND_GE = 1
DEF KIND_EQ = 2


def linear_errors(const cnp.int64_t[:, ::1] cand,
                  const double[:, ::1] coef,
                  const double[::1] rhs,
                  const cnp.int32_t[::1] kind):
    """Total error of each candidate row under a set of linear error functions."""
    cdef Py_ssize_t m, f, i
    cdef Py_ssize_t M = cand.shape[0], n = cand.shape[1], F = coef.shape[0]
    cdef double s, total
    out = np.empty(M, dtype=np.float64)
    cdef double[::1] res = out
    for m in range(M):
        total = 0.0
        for f in range(F):
            s = -rhs[f]
            for i in range(n):
                s += coef[f, i] * cand[m, i]
            if kind[f] == KIND_LE:
                if s > 0.0:
                    total += s
            elif kind[f] == KIND_GE:
                if s < 0.0:
                    total -= s
            else:
                total += fabs(s)
        res[m] = total
    return out


cdef inline double _reg(double x) nogil:
    if x < 0.0:
        return -(x * x + 1.0)
    return x


def upp_rdu(const cnp.int64_t[:, ::1] assign,
            const double[::1] counters,
            const double[:, ::1] samples,
            const double[::1] weights):
    """RDU score of each 3x3 assignment row (flattened a*3+b) over enemy samples.

    ``weights`` are the decision weights applied to the ascending-sorted
    per-sample utilities.
    """
    cdef Py_ssize_t M = assign.shape[0], k = samples.shape[0]
    cdef Py_ssize_t m, i, j, a, b
    cdef double pot0, pot1, pot2, u, key, acc
    out = np.empty(M, dtype=np.float64)
    cdef double[::1] res = out
    buf_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    for m in range(M):
        pot0 = 0.0
        pot1 = 0.0
        pot2 = 0.0
        for a in range(3):
            pot0 += assign[m, a * 3 + 0] * counters[a * 3 + 0]
            pot1 += assign[m, a * 3 + 1] * counters[a * 3 + 1]
            pot2 += assign[m, a * 3 + 2] * counters[a * 3 + 2]
        for i in range(k):
            u = _reg(min(1.0, pot0 - samples[i, 0]))
            u += _reg(min(1.0, pot1 - samples[i, 1]))
            u += _reg(min(1.0, pot2 - samples[i, 2]))
            # insertion sort keeps buf[0..i] ascending
            j = i - 1
            while j >= 0 and buf[j] > u:
                buf[j + 1] = buf[j]
                j -= 1
            buf[j + 1] = u
        acc = 0.0
        for i in range(k):
            acc += weights[i] * buf[i]
        res[m] = acc
    return out


def distance_field(const cnp.uint8_t[:, ::1] passable,
                   const cnp.int64_t[:, ::1] sources):
    """4-neighbour BFS distances from ``sources`` (rows of x, y) over passable cells.

    Sources get distance 0 even when impassable; unreachable cells are -1.
    """
    cdef Py_ssize_t H = passable.shape[0], W = passable.shape[1]
    cdef Py_ssize_t S = sources.shape[0]
    dist_arr = np.full((H, W), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] dist = dist_arr
    queue_arr = np.empty(H * W, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, s, x, y, nx, ny, d
    cdef int dx[4]
    cdef int dy[4]
    dx[0] = 1; dx[1] = -1; dx[2] = 0; dx[3] = 0
    dy[0] = 0; dy[1] = 0; dy[2] = 1; dy[3] = -1
    for s in range(S):
        x = sources[s, 0]
        y = sources[s, 1]
        if 0 <= x < W and 0 <= y < H and dist[y, x] < 0:
            dist[y, x] = 0
            queue[tail] = y * W + x
            tail += 1
    while head < tail:
        y = queue[head] // W
        x = queue[head] % W
        head += 1
        for d in range(4):
            nx = x + dx[d]
            ny = y + dy[d]
            if 0 <= nx < W and 0 <= ny < H and dist[ny, nx] < 0 and passable[ny, nx]:
                dist[ny, nx] = dist[y, x] + 1
                queue[tail] = ny * W + nx
                tail += 1
    return dist_arr

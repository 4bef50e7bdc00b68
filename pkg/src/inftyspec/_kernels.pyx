# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled grid kernels: exact squared EDT, stencil Dijkstra, fast marching.

All kernels work in cell units on a C-contiguous uint8 occupancy array.
``_pykernels`` mirrors this module line for line in pure Python.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair

cnp.import_array()

# (-time, -index): max-heap pops the earliest time, ties to the lowest index
ctypedef pair[double, Py_ssize_t] entry

cdef double BIG = 1e20


cdef void _envelope_1d(double* f, Py_ssize_t n, double* out,
                       Py_ssize_t* v, double* z) noexcept nogil:
    """Lower envelope of parabolas (q - p)^2 + f[p], written to ``out``."""
    cdef Py_ssize_t k = 0, q, p
    cdef double s
    v[0] = 0
    z[0] = -INFINITY
    z[1] = INFINITY
    for q in range(1, n):
        while True:
            p = v[k]
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = INFINITY
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        out[q] = (q - p) * (q - p) + f[p]


def edt_sq(cnp.uint8_t[:, ::1] occ):
    """Squared distance (cells) from every cell to the nearest unoccupied cell.

    Each row and column must contain at least one unoccupied cell.
    """
    cdef Py_ssize_t ny = occ.shape[0], nx = occ.shape[1], i, j
    cdef Py_ssize_t m = max(nx, ny)
    g_arr = np.empty((ny, nx), dtype=np.float64)
    out_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef double[:, ::1] out = out_arr
    cdef double[::1] col = np.empty(m, dtype=np.float64)
    cdef double[::1] buf = np.empty(m, dtype=np.float64)
    cdef double[::1] z = np.empty(m + 1, dtype=np.float64)
    cdef Py_ssize_t[::1] v = np.empty(m, dtype=np.intp)
    with nogil:
        for j in range(nx):
            for i in range(ny):
                col[i] = BIG if occ[i, j] else 0.0
            _envelope_1d(&col[0], ny, &buf[0], &v[0], &z[0])
            for i in range(ny):
                g[i, j] = buf[i]
        for i in range(ny):
            _envelope_1d(&g[i, 0], nx, &out[i, 0], &v[0], &z[0])
    return out_arr


def dijkstra(cnp.uint8_t[:, ::1] occ, Py_ssize_t source,
             cnp.intp_t[:, ::1] offsets, double[::1] weights,
             cnp.intp_t[:, :, ::1] required):
    """Single-source shortest paths over occupied cells.

    ``offsets[m] = (di, dj)`` with edge length ``weights[m]``; the move is
    allowed only when both cells ``required[m, 0]`` and ``required[m, 1]``
    (offsets relative to the tail) are occupied.
    """
    cdef Py_ssize_t ny = occ.shape[0], nx = occ.shape[1]
    cdef Py_ssize_t nm = offsets.shape[0], m, i, j, ni, nj, ri, rj, u, w, t
    cdef double du, nd
    dist_arr = np.full(ny * nx, np.inf)
    cdef double[::1] dist = dist_arr
    cdef cnp.uint8_t[::1] done = np.zeros(ny * nx, dtype=np.uint8)
    cdef priority_queue[entry] heap
    cdef bint ok
    with nogil:
        dist[source] = 0.0
        heap.push(entry(-0.0, -source))
        while not heap.empty():
            du = -heap.top().first
            u = -heap.top().second
            heap.pop()
            if done[u]:
                continue
            done[u] = 1
            i = u // nx
            j = u - i * nx
            for m in range(nm):
                ni = i + offsets[m, 0]
                nj = j + offsets[m, 1]
                if ni < 0 or ni >= ny or nj < 0 or nj >= nx or not occ[ni, nj]:
                    continue
                ok = True
                for t in range(2):
                    ri = i + required[m, t, 0]
                    rj = j + required[m, t, 1]
                    if ri < 0 or ri >= ny or rj < 0 or rj >= nx or not occ[ri, rj]:
                        ok = False
                if not ok:
                    continue
                w = ni * nx + nj
                nd = du + weights[m]
                if nd < dist[w]:
                    dist[w] = nd
                    heap.push(entry(-nd, -w))
    return dist_arr.reshape(ny, nx)


cdef inline double _known(double* t, cnp.uint8_t* state, Py_ssize_t idx) noexcept nogil:
    return t[idx] if state[idx] == 2 else INFINITY


def fast_marching(cnp.uint8_t[:, ::1] occ, Py_ssize_t source):
    """First-order upwind arrival times (unit speed, unit spacing)."""
    cdef Py_ssize_t ny = occ.shape[0], nx = occ.shape[1], n = ny * nx
    cdef Py_ssize_t u, w, i, j, ni, nj, m
    cdef double a, b, diff, cand
    cdef Py_ssize_t di[4]
    cdef Py_ssize_t dj[4]
    di[:] = [-1, 1, 0, 0]
    dj[:] = [0, 0, -1, 1]
    t_arr = np.full(n, np.inf)
    cdef double[::1] t = t_arr
    cdef cnp.uint8_t[::1] state = np.zeros(n, dtype=np.uint8)
    cdef priority_queue[entry] heap
    with nogil:
        t[source] = 0.0
        heap.push(entry(-0.0, -source))
        while not heap.empty():
            u = -heap.top().second
            heap.pop()
            if state[u] == 2:
                continue
            state[u] = 2
            i = u // nx
            j = u - i * nx
            for m in range(4):
                ni = i + di[m]
                nj = j + dj[m]
                if ni < 0 or ni >= ny or nj < 0 or nj >= nx or not occ[ni, nj]:
                    continue
                w = ni * nx + nj
                if state[w] == 2:
                    continue
                a = INFINITY
                if nj > 0:
                    a = _known(&t[0], &state[0], w - 1)
                if nj < nx - 1:
                    a = min(a, _known(&t[0], &state[0], w + 1))
                b = INFINITY
                if ni > 0:
                    b = _known(&t[0], &state[0], w - nx)
                if ni < ny - 1:
                    b = min(b, _known(&t[0], &state[0], w + nx))
                diff = a - b
                if diff < 1.0 and diff > -1.0:
                    cand = 0.5 * (a + b + sqrt(2.0 - diff * diff))
                else:
                    cand = min(a, b) + 1.0
                if cand < t[w]:
                    t[w] = cand
                    state[w] = 1
                    heap.push(entry(-cand, -w))
    return t_arr.reshape(ny, nx)

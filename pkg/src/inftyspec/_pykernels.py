"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Same signatures and bit-identical results; used when the extension is not
built or when ``INFTY_SPEC_BACKEND=python`` is set.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

BIG = 1e20


def _envelope_1d(f: list[float]) -> list[float]:
    n = len(f)
    v = [0] * n
    z = [0.0] * (n + 1)
    k = 0
    z[0] = -math.inf
    z[1] = math.inf
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
        z[k + 1] = math.inf
    out = [0.0] * n
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        out[q] = (q - p) * (q - p) + f[p]
    return out


def edt_sq(occ: np.ndarray) -> np.ndarray:
    ny, nx = occ.shape
    g = np.empty((ny, nx))
    for j in range(nx):
        col = [BIG if c else 0.0 for c in occ[:, j].tolist()]
        g[:, j] = _envelope_1d(col)
    out = np.empty((ny, nx))
    for i in range(ny):
        out[i, :] = _envelope_1d(g[i, :].tolist())
    return out


def dijkstra(occ, source, offsets, weights, required) -> np.ndarray:
    ny, nx = occ.shape
    flat = occ.ravel().tolist()
    moves = [
        (int(di), int(dj), float(wt), [(int(a), int(b)) for a, b in req])
        for (di, dj), wt, req in zip(np.asarray(offsets), np.asarray(weights), np.asarray(required))
    ]
    dist = [math.inf] * (ny * nx)
    done = [False] * (ny * nx)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        i, j = divmod(u, nx)
        for di, dj, wt, req in moves:
            ni, nj = i + di, j + dj
            if not (0 <= ni < ny and 0 <= nj < nx) or not flat[ni * nx + nj]:
                continue
            ok = True
            for ri, rj in req:
                ri += i
                rj += j
                if not (0 <= ri < ny and 0 <= rj < nx) or not flat[ri * nx + rj]:
                    ok = False
            if not ok:
                continue
            w = ni * nx + nj
            nd = du + wt
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return np.asarray(dist).reshape(ny, nx)


def fast_marching(occ, source) -> np.ndarray:
    ny, nx = occ.shape
    n = ny * nx
    flat = occ.ravel().tolist()
    t = [math.inf] * n
    state = [0] * n
    t[source] = 0.0
    heap = [(0.0, source)]

    def known(idx: int) -> float:
        return t[idx] if state[idx] == 2 else math.inf

    while heap:
        _, u = heapq.heappop(heap)
        if state[u] == 2:
            continue
        state[u] = 2
        i, j = divmod(u, nx)
        for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ni, nj = i + di, j + dj
            if not (0 <= ni < ny and 0 <= nj < nx) or not flat[ni * nx + nj]:
                continue
            w = ni * nx + nj
            if state[w] == 2:
                continue
            a = math.inf
            if nj > 0:
                a = known(w - 1)
            if nj < nx - 1:
                a = min(a, known(w + 1))
            b = math.inf
            if ni > 0:
                b = known(w - nx)
            if ni < ny - 1:
                b = min(b, known(w + nx))
            diff = a - b
            if -1.0 < diff < 1.0:
                cand = 0.5 * (a + b + math.sqrt(2.0 - diff * diff))
            else:
                cand = min(a, b) + 1.0
            if cand < t[w]:
                t[w] = cand
                state[w] = 1
                heapq.heappush(heap, (cand, w))
    return np.asarray(t).reshape(ny, nx)

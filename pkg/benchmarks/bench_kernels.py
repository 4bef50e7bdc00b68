"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --h 0.015625 0.0078125 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from inftyspec import domains as dm
from inftyspec._backend import BACKEND, kernels, pykernels
from inftyspec.geodesic import Solver, stencil
from inftyspec.raster import rasterize


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(occ: np.ndarray, src: int):
    padded = np.ascontiguousarray(np.pad(occ, 1), dtype=np.uint8)
    flat = np.ascontiguousarray(occ, dtype=np.uint8)
    offsets, lengths, required = stencil(Solver.DIJKSTRA16)
    return {
        "edt": lambda mod: mod.edt_sq(padded),
        "dijkstra16": lambda mod: mod.dijkstra(flat, src, offsets, lengths, required),
        "fmm": lambda mod: mod.fast_marching(flat, src),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, nargs="+", default=[2.0**-5, 2.0**-6, 2.0**-7])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if BACKEND != "cython":
        print("compiled kernels are not built; only the Python timings are meaningful")
    print(f"{'h':>10} {'cells':>8} {'kernel':>11} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for h in args.h:
        raster = rasterize(dm.stadium(0.5, 1.5), h)
        occ = raster.occupancy
        src = int(np.flatnonzero(occ.ravel())[0])
        for name, run in cases(occ, src).items():
            fast = best_of(lambda: run(kernels), args.repeat)
            slow = best_of(lambda: run(pykernels), max(1, args.repeat // 3))
            a, b = run(kernels), run(pykernels)
            same = np.array_equal(a, b)
            print(f"{h:10.6f} {occ.size:8d} {name:>11} {fast:10.4f} {slow:10.4f} {slow / fast:7.1f}x"
                  + ("" if same else "  MISMATCH"))


if __name__ == "__main__":
    main()

import os
import subprocess
import sys

import numpy as np
import pytest

from inftyspec._backend import BACKEND, kernels, pykernels
from inftyspec.geodesic import Solver, stencil


def test_fallback_selected_by_env():
    env = dict(os.environ, INFTY_SPEC_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "from inftyspec import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernels not built")
@pytest.mark.parametrize("seed", range(5))
def test_path_kernels_identical(seed):
    rng = np.random.default_rng(seed)
    occ = np.ascontiguousarray(rng.random((30, 41)) < 0.85, dtype=np.uint8)
    src = int(np.flatnonzero(occ)[0])
    for solver in (Solver.DIJKSTRA8, Solver.DIJKSTRA16):
        offsets, lengths, required = stencil(solver)
        a = kernels.dijkstra(occ, src, offsets, lengths, required)
        b = pykernels.dijkstra(occ, src, offsets, lengths, required)
        assert np.array_equal(a, b)
    assert np.array_equal(kernels.fast_marching(occ, src), pykernels.fast_marching(occ, src))

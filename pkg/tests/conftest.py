import time

import numpy as np
import pytest

from inftyspec.raster import RasterDomain


def raster_from(occ, h=1.0, origin=(0.0, 0.0)):
    occ = np.asarray(occ, dtype=bool)
    return RasterDomain(origin, h, occ.shape[1], occ.shape[0], occ)


def brute_edt_sq(occ):
    """Squared distance (cell units) to the nearest unoccupied cell, border counted as exterior."""
    padded = np.pad(np.asarray(occ, bool), 1)
    ei, ej = np.nonzero(~padded)
    out = np.zeros(padded.shape)
    for i, j in zip(*np.nonzero(padded)):
        out[i, j] = ((ei - i) ** 2 + (ej - j) ** 2).min()
    return out[1:-1, 1:-1]


@pytest.fixture(params=["cython", "python"])
def backend(request, monkeypatch):
    """Run a test with each kernel backend swapped into the modules that use it."""
    from inftyspec import _backend, geodesic, raster

    if request.param == "cython" and _backend.BACKEND != "cython":
        pytest.skip("compiled kernels not built")
    mod = _backend.pykernels if request.param == "python" else _backend.kernels
    monkeypatch.setattr(raster, "kernels", mod)
    monkeypatch.setattr(geodesic, "kernels", mod)
    return request.param


# acceptance summary: one line per criterion, printed after the run
_SESSION_START = time.perf_counter()
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}
RUNTIME_LIMIT = 300.0


@pytest.fixture
def record():
    def _record(cid: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE.setdefault(cid, []).append((bool(ok), detail))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _SESSION_START
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[cid]
        if cid == 10:
            parts = parts + [(elapsed < RUNTIME_LIMIT, f"session runtime {elapsed:.1f} s < {RUNTIME_LIMIT:.0f} s")]
        ok = all(p for p, _ in parts)
        if len(parts) > 4:
            failing = [d for p, d in parts if not p]
            text = f"{sum(p for p, _ in parts)}/{len(parts)} checks passed"
            text += ("; failing: " + "; ".join(failing)) if failing else ""
        else:
            text = "; ".join(d for _, d in parts)
        tr.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {text}")

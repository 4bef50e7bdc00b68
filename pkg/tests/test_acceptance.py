"""Acceptance criteria 1-10.

Each test records a PASS/FAIL line through the ``record`` fixture; the lines
are printed in the "acceptance criteria" section at the end of the run.
Tolerances below are fixed and must not be loosened.
"""

import math
import time

import numpy as np
import pytest

from conftest import brute_edt_sq, raster_from
from inftyspec import domains as dm
from inftyspec import eigenfunc as ef
from inftyspec import spectra as sp
from inftyspec._backend import kernels, pykernels
from inftyspec.domains import Kind
from inftyspec.geodesic import GeodesicConfig, Solver, geodesic_field
from inftyspec.raster import edt, inradius_error, rasterize

H8 = 2.0**-8
H9 = 2.0**-9
R = 1.0
POLY_K = list(range(3, 65))


def reference_polygon_deltas(k: int, r: float) -> tuple[float, float]:
    d1 = 1 / (r * math.sqrt(math.pi / (k * math.tan(math.pi / k)))) - 1 / r
    d2 = 1 / r - 1 / (r * math.sqrt(2 * math.pi / (k * math.sin(2 * math.pi / k))))
    return d1, d2


@pytest.fixture(scope="module")
def polygon_pass():
    """One numeric pass over the polygon family at h=2^-8 (shared by criteria 4 and 7)."""
    out = {}
    for k in POLY_K:
        spec = sp.family_member("polygon", k, R)
        geo = sp.measure(spec, H8)
        rep = sp.stability_report(spec, R, geometry=geo, fraenkel=False)
        out[k] = (spec, geo, rep, sp.deltas(geo.eigenpair(), R))
    return out


# 1 ----------------------------------------------------------------------------

def test_c1_ball_baseline(record):
    t0 = time.perf_counter()
    pair = sp.eigenpair_numeric(dm.ball(1.0), H8)
    dt = time.perf_counter() - t0
    ok_d = 0.99 <= pair.lambda_D <= 1.01
    ok_n = 0.98 <= pair.lambda_N <= 1.02
    ok_t = dt < 5.0
    record(1, ok_d and ok_n and ok_t, f"lambda_D={pair.lambda_D:.5f} in [0.99,1.01], "
           f"lambda_N={pair.lambda_N:.5f} in [0.98,1.02], {dt:.2f} s < 5 s")
    assert ok_d and ok_n and ok_t


# 2 ----------------------------------------------------------------------------

def test_c2_stadium(record):
    eps = 0.2
    spec = dm.normalize_to_ball_volume(Kind.STADIUM, {"eps": eps}, 1.0)
    reference = 4 * eps / (math.pi + eps**2 * (4 - math.pi))
    cf = sp.eigenpair_closed_form(spec).lambda_N
    num = sp.eigenpair_numeric(spec, H8).lambda_N
    rel = abs(num - cf) / cf
    below = {e: sp.eigenpair_closed_form(dm.normalize_to_ball_volume(Kind.STADIUM, {"eps": e}, 1.0)).lambda_N
             for e in (0.05, 0.1, 0.2, 0.24)}
    ok = (
        abs(cf - reference) <= 1e-12
        and abs(cf - 0.25190) <= 1e-5  # reference value is rounded
        and cf < 1 / 3
        and rel <= 0.02
        and all(v < 1 / 3 for v in below.values())
    )
    record(2, ok, f"closed form {cf:.6f}, numeric {num:.6f} (rel {rel:.2%} <= 2%), "
           f"max over eps list {max(below.values()):.4f} < 1/3")
    assert ok


# 3 ----------------------------------------------------------------------------

@pytest.mark.parametrize("eps", [0.75, 0.9])
def test_c3_annulus(record, eps):
    spec = dm.normalize_to_ball_volume(Kind.ANNULUS, {"inner": eps}, 1.0)
    expect = 2 / (math.sqrt(1 + eps**2) - eps)
    raster = rasterize(spec, H9)
    lam = 1 / edt(raster).max
    rel = abs(lam - expect) / expect
    ok = rel <= 0.02 and expect > 1.5
    if eps == 0.75:
        ok = ok and abs(expect - 4.0) < 1e-12
    record(3, ok, f"eps={eps}: lambda_D {lam:.4f} vs {expect:.4f} (rel {rel:.2%} <= 2%)")
    assert ok


# 4 ----------------------------------------------------------------------------

def test_c4_closed_form_path(record):
    res = sp.sweep("polygon", R, POLY_K)
    worst = 0.0
    for k, rep in zip(res.indices, res.reports):
        d1, d2 = reference_polygon_deltas(k, R)
        worst = max(worst, abs(rep.delta1 - d1), abs(rep.delta2 - d2))
    d1s, d2s = res.column("delta1"), res.column("delta2")
    dec = all(b < a for a, b in zip(d1s, d1s[1:])) and all(b < a for a, b in zip(d2s, d2s[1:]))
    ok = worst <= 1e-12 and dec
    record(4, ok, f"closed-form deltas match reference formulas to {worst:.1e} <= 1e-12, strictly decreasing={dec}")
    assert ok


def test_c4_hausdorff(record, polygon_pass):
    bad = []
    for k, (spec, geo, rep, _) in polygon_pass.items():
        a = spec.params["apothem"]
        limit = max(R - a, a / math.cos(math.pi / k) - R) + 2 * H8
        if not rep.hausdorff <= limit:
            bad.append(k)
    last = polygon_pass[POLY_K[-1]][2].hausdorff
    cf_last = sp.closed_form_hausdorff(polygon_pass[POLY_K[-1]][0], R)
    ok = not bad and cf_last < 0.002 and last <= cf_last + 2 * H8
    record(4, ok, f"d_H <= max(1-a, R-1)+2h for all k (violations {bad}), d_H(64)={last:.5f}")
    assert ok


def _numeric_mismatches(polygon_pass):
    out = {}
    for k, (_, _, _, (n1, n2)) in polygon_pass.items():
        p1, p2 = reference_polygon_deltas(k, R)
        err = max(abs(n1 - p1), abs(n2 - p2))
        if err > 0.03 / R:
            out[k] = err
    return out


@pytest.mark.xfail(
    strict=True,
    reason="odd-k polygons: the closed-form delta2 uses 2*circumradius, which exceeds the true diameter",
)
def test_c4_numeric_path(record, polygon_pass):
    bad = _numeric_mismatches(polygon_pass)
    detail = ", ".join(f"k={k}: {e:.4f}" for k, e in bad.items())
    record(4, not bad, f"numeric path |delta - reference| <= 0.03 at h=2^-8: off for {detail or 'none'}")
    assert not bad


def test_c4_numeric_path_explained(polygon_pass):
    # the red k are exactly the small odd ones, and there the numeric delta2
    # agrees with the delta2 of the true Euclidean diameter
    bad = _numeric_mismatches(polygon_pass)
    assert set(bad) <= {3, 5}
    for k, (spec, _, _, (_, n2)) in polygon_pass.items():
        true_d2 = 1 / R - 2 / dm.euclidean_diameter_convex(spec)
        assert abs(n2 - true_d2) <= 0.03 / R


# 5 ----------------------------------------------------------------------------

def test_c5_ellipses(record):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(20):
        r = rng.uniform(0.3, 3.0)
        spec = dm.normalize_to_ball_volume(Kind.ELLIPSE, {"ratios": tuple(rng.uniform(0.2, 5.0, 2))}, r)
        ax = spec.params["axes"]
        d1, d2 = sp.deltas(sp.eigenpair_closed_form(spec), r)
        worst = max(worst, abs(d1 - (1 / min(ax) - 1 / r)) * r, abs(d2 - (1 / r - 1 / max(ax))) * r)
    res = sp.sweep("ellipse", R, [1, 4, 16, 64, 256, 1024])
    conv = res.summary["delta1_decreasing"] and res.summary["delta2_decreasing"]
    tail = max(res.reports[-1].delta1, res.reports[-1].delta2)
    ok = worst <= 1e-12 and conv and tail < 1e-3
    record(5, ok, f"20 random pairs: max |delta - formula|*r = {worst:.1e} <= 1e-12; "
           f"sweep decreasing={conv}, delta at k=1024 {tail:.1e}")
    assert ok


# 6 ----------------------------------------------------------------------------

SANDWICH_MEMBERS = (
    [(f"polygon k={k}", sp.family_member("polygon", k, R), H8) for k in range(3, 13)]
    + [(f"ellipse ratio {q}", dm.normalize_to_ball_volume(Kind.ELLIPSE, {"ratios": (q, 1.0)}, R), H8)
       for q in (1.1, 1.5, 2.0, 3.0)]
    + [(f"stadium eps={e}", dm.normalize_to_ball_volume(Kind.STADIUM, {"eps": e}, R), H8)
       for e in (0.2, 0.5, 0.9)]
    + [(f"annulus eps={e}", dm.normalize_to_ball_volume(Kind.ANNULUS, {"inner": e}, R), H9)
       for e in (0.75, 0.9)]
)


@pytest.mark.parametrize("name, spec, h", SANDWICH_MEMBERS, ids=[m[0] for m in SANDWICH_MEMBERS])
def test_c6_sandwich(record, name, spec, h):
    d1, d2 = sp.deltas(sp.eigenpair_closed_form(spec), R)
    if d2 * R >= 1:
        record(6, True, f"{name}: bound vacuous, skipped")
        return
    chk = sp.verify_sandwich(spec, R, h)
    assert chk.slack == pytest.approx(inradius_error(h))
    record(6, chk.passed, f"{name}: inner={chk.inner_ok} outer={chk.outer_ok} (slack 2h*sqrt2)")
    assert chk.passed


# 7 ----------------------------------------------------------------------------

def test_c7_symdiff_bound(record, polygon_pass):
    bad, logged = [], []
    for k, (_, _, rep, _) in polygon_pass.items():
        bound = sp.symdiff_bound(2, R, rep.delta1, rep.delta2)
        if not rep.symdiff_inner <= bound + 5 * H8:
            bad.append(k)
        if rep.flags.get("symdiff_outer_bound") is False or rep.flags.get("outer_gap_linear_bound") is False:
            logged.append(k)
    record(7, not bad, f"|Omega symdiff B_inner| <= c r^2 + 5h for k=3..64 (violations {bad}); "
           f"linear (n-1)delta2 term violated (logged only) for {len(logged)} of {len(POLY_K)}")
    assert not bad


# 8 ----------------------------------------------------------------------------

def test_c8_eigenfunction_convergence(record):
    devs = []
    for k in (10, 20, 40, 80):
        u = ef.distance_eigenfunction(rasterize(sp.family_member("stadium4", k, 1.0), H8))
        devs.append(ef.sup_deviation(u, ef.aligned_cone(u, 1.0), 1.0).value)
    ub = ef.distance_eigenfunction(rasterize(dm.ball(1.0), H8))
    ball = ef.sup_deviation(ub, ef.aligned_cone(ub, 1.0), 1.0).value
    mono = all(b <= a for a, b in zip(devs, devs[1:]))
    half = devs[-1] < devs[0] / 2
    ok = mono and half and ball <= 4 * H8
    record(8, ok, "sup_deviation k=10,20,40,80: " + ", ".join(f"{d:.5f}" for d in devs)
           + f" (non-increasing={mono}, k80 < k10/2={half}); ball {ball:.5f} <= 4h={4 * H8:.5f}")
    assert ok


# 9 ----------------------------------------------------------------------------

def test_c9_edt_exact(record):
    rng = np.random.default_rng(9)
    sizes = [(1, 1), (1, 64), (64, 1), (64, 64), (2, 3)] + [tuple(rng.integers(1, 65, 2)) for _ in range(25)]
    worst_ulp = 0
    for ny, nx in sizes:
        occ = rng.random((ny, nx)) < rng.uniform(0.2, 1.0)
        want = np.where(occ, np.sqrt(brute_edt_sq(occ)), 0.0)
        for mod in (kernels, pykernels):
            got = np.where(occ, np.sqrt(mod.edt_sq(np.pad(occ, 1).astype(np.uint8))[1:-1, 1:-1]), 0.0)
            ulp = np.abs(got.view(np.int64) - want.view(np.int64)).max() if occ.size else 0
            worst_ulp = max(worst_ulp, int(ulp))
        assert np.array_equal(edt(raster_from(occ)).values, want)
    record(9, worst_ulp <= 1, f"EDT vs brute force on {len(sizes)} grids <= 64x64, both backends: max {worst_ulp} ulp")
    assert worst_ulp <= 1


@pytest.mark.parametrize("solver", [Solver.DIJKSTRA8, Solver.DIJKSTRA16])
def test_c9_dijkstra_metric(record, solver):
    rng = np.random.default_rng(99)
    occ = np.ones((14, 14), bool)
    occ[rng.random(occ.shape) < 0.15] = False
    occ[4:10, 6] = False  # a wall to force detours
    from scipy import ndimage

    lab, _ = ndimage.label(occ)
    occ = lab == np.bincount(lab.ravel())[1:].argmax() + 1
    raster = raster_from(occ)
    cells = list(zip(*np.nonzero(occ)))
    D = np.array([[geodesic_field(raster, c, GeodesicConfig(solver)).values[i, j] for i, j in cells] for c in cells])
    # reversed paths add the same edges in another order: allow one ulp of the
    # largest distance per edge, and a path has at most max(D) edges (length >= 1)
    tol = float(D.max() * np.spacing(D.max()))
    asym = float(np.abs(D - D.T).max())
    tri = float((D[:, None, :] - D[:, :, None] - D[None, :, :]).max())
    n = len(cells)
    ok = asym <= tol and tri <= 2 * tol
    record(9, ok, f"{solver.value}: {n} cells, max |d(x,y)-d(y,x)| = {asym:.1e} <= {tol:.1e}, "
           f"worst triangle excess {max(tri, 0.0):.1e} <= {2 * tol:.1e} over all {n**3} triples")
    assert ok


# 10 ---------------------------------------------------------------------------

def _random_member(rng, r):
    kind = rng.integers(5)
    if kind == 0:
        return dm.normalize_to_ball_volume(Kind.STADIUM, {"ell": rng.uniform(0, 20) * r}, r)
    if kind == 1:
        return dm.normalize_to_ball_volume(Kind.ANNULUS, {"inner": rng.uniform(0.01, 3) * r}, r)
    if kind == 2:
        return dm.normalize_to_ball_volume(Kind.REGULAR_POLYGON, {"k": int(rng.integers(3, 200))}, r)
    if kind == 3:
        return dm.normalize_to_ball_volume(Kind.ELLIPSE, {"ratios": tuple(rng.uniform(0.1, 10, 2))}, r)
    return dm.ball(r)


def test_c10_invariants(record):
    rng = np.random.default_rng(10)
    draws, bad = 250, []
    for n in range(draws):
        r = float(rng.uniform(0.1, 10))
        spec = _random_member(rng, r)
        pair = sp.eigenpair_closed_form(spec)
        tol = 1e-12 / r
        ok = pair.lambda_D >= 1 / r - tol and pair.lambda_N <= 1 / r + tol
        if dm.is_convex(spec):
            ok = ok and pair.lambda_N <= pair.lambda_D + tol
            if spec.kind is not Kind.BALL:
                ok = ok and pair.lambda_N < pair.lambda_D
        if not ok:
            bad.append((n, spec))
    record(10, not bad, f"{draws} random draws: ball optimality and convex ordering, violations {len(bad)}")
    assert not bad

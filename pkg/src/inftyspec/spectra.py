"""Infinity-eigenvalues from geometry and the ball-stability quantities.

Dirichlet: ``1 / inradius``. Neumann: ``2 / intrinsic diameter``. A ball of
radius r has both equal to ``1/r``; the deviations from it drive the inner and
outer ball radii, the symmetric-difference bound and the Hausdorff checks.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import domains as dm
from .domains import BallSpec, DomainSpec, Kind
from .errors import BoundVacuousError, ParameterError
from .geodesic import DiameterEstimate, GeodesicConfig, intrinsic_diameter, worker_count
from .raster import (
    DistanceField,
    RasterDomain,
    chebyshev_center,
    distance_to_cells,
    edt,
    inradius_error,
    numeric_volume,
    rasterize,
)

__all__ = [
    "Method",
    "EigenPair",
    "NumericGeometry",
    "SandwichRadii",
    "SandwichCheck",
    "StabilityReport",
    "FraenkelSearch",
    "FraenkelResult",
    "SweepResult",
    "FAMILIES",
    "eigenpair_closed_form",
    "eigenpair_numeric",
    "measure",
    "deltas",
    "matched_radius",
    "sandwich_radii",
    "verify_sandwich",
    "symdiff_bound",
    "bound_constant",
    "outer_gap_exact",
    "outer_gap_linear_bound",
    "ball_mask",
    "symmetric_difference",
    "fraenkel_asymmetry",
    "hausdorff_distance",
    "closed_form_hausdorff",
    "stability_report",
    "family_member",
    "sweep",
]


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    NUMERIC = "Numeric"


@dataclass(frozen=True)
class EigenPair:
    lambda_D: float
    lambda_N: float
    method: Method
    h: float | None = None
    error_bars: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not (self.lambda_D > 0 and self.lambda_N > 0):
            raise ParameterError("eigenvalues must be positive")

    def to_json(self) -> dict[str, Any]:
        return {
            "lambda_D": self.lambda_D,
            "lambda_N": self.lambda_N,
            "method": self.method.value,
            "h": self.h,
            "error_bars": list(self.error_bars),
        }


def eigenpair_closed_form(spec: DomainSpec) -> EigenPair:
    return EigenPair(
        1.0 / dm.closed_form_inradius(spec),
        2.0 / dm.closed_form_diameter(spec),
        Method.CLOSED_FORM,
    )


@dataclass(frozen=True, eq=False)
class NumericGeometry:
    """Raster, Euclidean distance field, Chebyshev centre and (optionally) diameter."""

    spec: DomainSpec
    raster: RasterDomain
    field: DistanceField
    center: np.ndarray
    center_index: tuple[int, int]
    diameter: DiameterEstimate | None

    @property
    def h(self) -> float:
        return self.raster.h

    @property
    def inradius(self) -> float:
        return self.field.max

    def eigenpair(self) -> EigenPair:
        if self.diameter is None:
            raise ParameterError("diameter was not computed for this geometry")
        r_in, d = self.inradius, self.diameter.value
        e_r = inradius_error(self.h)
        return EigenPair(
            1.0 / r_in,
            2.0 / d,
            Method.NUMERIC,
            self.h,
            (e_r / (r_in * (r_in - e_r)) if r_in > e_r else math.inf, 2.0 * self.diameter.error / d**2),
        )


def measure(
    spec: DomainSpec, h: float, cfg: GeodesicConfig | None = None, *, with_diameter: bool = True
) -> NumericGeometry:
    raster = rasterize(spec, h)
    fld = edt(raster)
    center, idx = chebyshev_center(fld)
    diam = intrinsic_diameter(raster, cfg or GeodesicConfig()) if with_diameter else None
    return NumericGeometry(spec, raster, fld, center, idx, diam)


def eigenpair_numeric(spec: DomainSpec, h: float, cfg: GeodesicConfig | None = None) -> EigenPair:
    """Grid eigenpair: ``1/max EDT`` and ``2/geodesic diameter`` with propagated bars."""
    return measure(spec, h, cfg).eigenpair()


def matched_radius(spec: DomainSpec) -> float:
    """Radius of the ball with the same volume as ``spec``."""
    n = spec.dimension
    return (dm.volume(spec) / dm.unit_ball_volume(n)) ** (1.0 / n)


def deltas(pair: EigenPair, r: float) -> tuple[float, float]:
    if not r > 0:
        raise ParameterError(f"r must be > 0, got {r!r}")
    return abs(pair.lambda_D - 1.0 / r), abs(pair.lambda_N - 1.0 / r)


@dataclass(frozen=True)
class SandwichRadii:
    inner: float
    outer_thm: float
    outer_lemma: float


def sandwich_radii(r: float, delta1: float, delta2: float) -> SandwichRadii:
    if delta2 * r >= 1.0:
        raise BoundVacuousError(f"delta2 * r = {delta2 * r} >= 1: no finite outer ball")
    return SandwichRadii(
        r / (delta1 * r + 1.0),
        (r + delta2 * r) / (1.0 - delta2 * r),
        r / (1.0 - delta2 * r),
    )


# symmetric-difference bounds -------------------------------------------------

def bound_constant(n: int, r: float, delta1: float, delta2: float) -> float:
    """``omega_n * max{(delta1 r + 1)^n - 1, (n - 1) delta2}``."""
    if n < 2 or delta1 < 0 or delta2 < 0:
        raise ParameterError("need n >= 2 and non-negative deltas")
    return dm.unit_ball_volume(n) * max((delta1 * r + 1.0) ** n - 1.0, (n - 1) * delta2)


def symdiff_bound(n: int, r: float, delta1: float, delta2: float) -> float:
    return bound_constant(n, r, delta1, delta2) * r**n


def outer_gap_exact(n: int, r: float, delta2: float) -> float:
    """Volume gap between the outer ball ``r/(1 - delta2 r)`` and B_r."""
    rad = sandwich_radii(r, 0.0, delta2).outer_lemma
    return dm.unit_ball_volume(n) * (rad**n - r**n)


def outer_gap_linear_bound(n: int, r: float, delta2: float) -> float:
    return (n - 1) * dm.unit_ball_volume(n) * delta2 * r**n


# measured set quantities -----------------------------------------------------

def ball_mask(frame: RasterDomain, center: Sequence[float], radius: float) -> np.ndarray:
    """Cells of ``frame`` whose centres lie in the open ball."""
    dx = frame.xs() - center[0]
    dy = frame.ys() - center[1]
    return dy[:, None] ** 2 + dx[None, :] ** 2 < radius * radius


def _ball_of(ball: BallSpec | DomainSpec) -> BallSpec:
    if isinstance(ball, DomainSpec):
        if ball.kind is not Kind.BALL:
            raise ParameterError("expected a ball")
        return BallSpec(ball.params["center"], ball.params["radius"])
    return ball


def _cover(raster: RasterDomain, ball: BallSpec) -> RasterDomain:
    c = np.asarray(ball.center)
    return raster.covering(c - ball.radius, c + ball.radius)


def symmetric_difference(raster: RasterDomain, ball: BallSpec | DomainSpec) -> float:
    """``h^2`` times the number of cells in exactly one of the two sets.

    The ball is rasterized on the same lattice; the frame grows if needed.
    """
    ball = _ball_of(ball)
    raster = _cover(raster, ball)
    mask = ball_mask(raster, ball.center, ball.radius)
    return int(np.count_nonzero(raster.occupancy ^ mask)) * raster.cell_area


def hausdorff_distance(raster: RasterDomain, ball: BallSpec | DomainSpec) -> float:
    """Hausdorff distance between occupied cell centres and rasterized ball centres."""
    ball = _ball_of(ball)
    raster = _cover(raster, ball)
    mask = ball_mask(raster, ball.center, ball.radius)
    if not mask.any():
        raise ParameterError("ball contains no cell centre at this resolution")
    to_ball = distance_to_cells(raster, mask)[raster.occupancy].max()
    to_domain = distance_to_cells(raster, raster.occupancy)[mask].max()
    return float(max(to_ball, to_domain))


def closed_form_hausdorff(spec: DomainSpec, r: float) -> float | None:
    """Hausdorff distance to the concentric ball B_r, or None when no closed form applies.

    Valid when B_r lies between the family's inscribed and circumscribed
    concentric balls, which volume matching guarantees.
    """
    p = spec.params
    kind = spec.kind
    if kind is Kind.BALL:
        return float(np.linalg.norm(p["center"])) + abs(p["radius"] - r)
    if kind is Kind.ANNULUS:
        if not p["inner"] <= r <= p["outer"]:
            return None
        return max(p["outer"] - r, p["inner"])
    if kind is Kind.STADIUM:
        lo, hi = p["eps"], p["ell"] / 2 + p["eps"]
    elif kind is Kind.REGULAR_POLYGON:
        lo = p["apothem"]
        hi = p["apothem"] / math.cos(math.pi / p["k"])
    else:
        lo, hi = min(p["axes"]), max(p["axes"])
    if not lo <= r <= hi:
        return None
    return max(hi - r, r - lo)


@dataclass(frozen=True)
class FraenkelSearch:
    coarse: int = 7  # coarse grid is coarse x coarse centres
    span: float = 0.25  # half-width of the coarse grid, in units of r
    min_step: float | None = None  # defaults to h / 4


@dataclass(frozen=True)
class FraenkelResult:
    value: float
    center: tuple[float, float]
    evaluations: int

    def __float__(self) -> float:
        return self.value


def fraenkel_asymmetry(
    raster: RasterDomain,
    r: float,
    search: FraenkelSearch = FraenkelSearch(),
    seeds: Iterable[Sequence[float]] = (),
) -> FraenkelResult:
    """Smallest ``|Omega symdiff B_r(x0)| / |Omega|`` found by a centre search.

    Coarse grid around the centroid, then a compass search with halving steps
    from the best of the grid, the centroid and ``seeds``. The result is an
    upper bound on the infimum over all centres.
    """
    area = numeric_volume(raster)
    pts = raster.occupied_points()
    centroid = pts.mean(axis=0)
    seeds = [np.asarray(s, float) for s in seeds]
    # every candidate centre stays within this box during the search
    reach = r * (1.0 + 2.0 * search.span) + 2 * raster.h
    lo = np.min([centroid - reach, *(s - r - 2 * raster.h for s in seeds)], axis=0)
    hi = np.max([centroid + reach, *(s + r + 2 * raster.h for s in seeds)], axis=0)
    raster = raster.covering(lo, hi)
    occ = raster.occupancy
    wx, wy = raster.xs(), raster.ys()
    cache: dict[tuple[float, float], float] = {}

    def cost(c: np.ndarray) -> float:
        key = (round(float(c[0]), 12), round(float(c[1]), 12))
        if key not in cache:
            inside = (wy[:, None] - c[1]) ** 2 + (wx[None, :] - c[0]) ** 2 < r * r
            cache[key] = int(np.count_nonzero(occ ^ inside)) * raster.cell_area / area
        return cache[key]

    offsets = np.linspace(-search.span * r, search.span * r, search.coarse)
    cands = [centroid + np.array([ox, oy]) for oy in offsets for ox in offsets]
    cands += seeds
    best = min(cands, key=lambda c: (cost(c), c[0], c[1]))
    step = offsets[1] - offsets[0] if search.coarse > 1 else search.span * r
    min_step = search.min_step or raster.h / 4
    moves = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]], float)
    while step >= min_step:
        trial = min((best + step * m for m in moves), key=lambda c: (cost(c), c[0], c[1]))
        if cost(trial) < cost(best):
            best = trial
        else:
            step /= 2
    return FraenkelResult(cost(best), (float(best[0]), float(best[1])), len(cache))


# sandwich verification -------------------------------------------------------

@dataclass(frozen=True)
class SandwichCheck:
    radii: SandwichRadii
    slack: float
    inner_ok: bool
    outer_ok: bool
    inner_center: tuple[float, float]
    outer_center: str | None  # name of the first centre that passed
    outer_reach: dict[str, float]  # farthest occupied cell from each tested centre

    @property
    def passed(self) -> bool:
        return self.inner_ok and self.outer_ok


def _check_sandwich(
    geo: NumericGeometry, radii: SandwichRadii, extra_centers: dict[str, np.ndarray] | None = None
) -> SandwichCheck:
    raster = geo.raster
    slack = inradius_error(raster.h)
    rho = radii.inner - slack
    inner_ok = True
    if rho > 0:
        inner_ok = bool(raster.occupancy[ball_mask(raster, geo.center, rho)].all())
    centers = {"chebyshev": geo.center, "centroid": raster.occupied_points().mean(axis=0)}
    if geo.diameter is not None:
        centers["diameter_midpoint"] = geo.diameter.midpoint(raster)
    centers.update(extra_centers or {})
    pts = raster.occupied_points()
    reach = {name: float(np.sqrt(((pts - c) ** 2).sum(axis=1).max())) for name, c in centers.items()}
    passing = [name for name, far in reach.items() if far <= radii.outer_lemma + slack]
    return SandwichCheck(
        radii,
        slack,
        inner_ok,
        bool(passing),
        (float(geo.center[0]), float(geo.center[1])),
        passing[0] if passing else None,
        reach,
    )


def verify_sandwich(
    spec: DomainSpec,
    r: float,
    h: float,
    *,
    pair: EigenPair | None = None,
    cfg: GeodesicConfig | None = None,
    geometry: NumericGeometry | None = None,
) -> SandwichCheck:
    """Check both balls on the raster of ``spec``.

    Deltas come from ``pair`` (closed form by default). The inner ball, shrunk by
    the slack ``2h sqrt(2)``, is centred at the Chebyshev centre; the outer ball,
    grown by the slack, may sit at the Chebyshev centre, the occupancy centroid
    or the diameter midpoint.
    """
    pair = pair or eigenpair_closed_form(spec)
    d1, d2 = deltas(pair, r)
    radii = sandwich_radii(r, d1, d2)
    geo = geometry or measure(spec, h, cfg, with_diameter=False)
    return _check_sandwich(geo, radii)


# reports ---------------------------------------------------------------------

REPORT_FIELDS = (
    "r",
    "delta1",
    "delta2",
    "inner_radius",
    "outer_radius_thm",
    "outer_radius_lemma",
    "symdiff_inner",
    "symdiff_outer",
    "fraenkel",
    "hausdorff",
    "bound_C",
    "flags",
)


@dataclass
class StabilityReport:
    r: float
    delta1: float
    delta2: float
    inner_radius: float
    outer_radius_thm: float
    outer_radius_lemma: float
    symdiff_inner: float | None
    symdiff_outer: float | None
    fraenkel: float | None
    hausdorff: float | None
    bound_C: float
    flags: dict[str, bool | None] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    eigenfunction_deviation: dict[str, Any] | None = None

    def to_json(self) -> dict[str, Any]:
        out = {name: getattr(self, name) for name in REPORT_FIELDS}
        out["flags"] = dict(self.flags)
        out["diagnostics"] = dict(self.diagnostics)
        if self.eigenfunction_deviation is not None:
            out["eigenfunction_deviation"] = dict(self.eigenfunction_deviation)
        return out


def stability_report(
    spec: DomainSpec,
    r: float | None = None,
    h: float | None = None,
    *,
    cfg: GeodesicConfig | None = None,
    numeric_deltas: bool = False,
    fraenkel: bool = True,
    geometry: NumericGeometry | None = None,
) -> StabilityReport:
    """Deltas, ball radii, bounds and (with ``h``) measured set quantities.

    Deltas use the closed-form eigenpair unless ``numeric_deltas`` is set.
    """
    r = matched_radius(spec) if r is None else float(r)
    n = spec.dimension
    closed = eigenpair_closed_form(spec)
    geo = geometry
    if geo is None and h is not None:
        geo = measure(spec, h, cfg, with_diameter=numeric_deltas)
    pair = geo.eigenpair() if numeric_deltas else closed
    d1, d2 = deltas(pair, r)
    c_bound = bound_constant(n, r, d1, d2)
    flags: dict[str, bool | None] = {}
    diag: dict[str, Any] = {"eigenpair": pair.to_json(), "closed_form_eigenpair": closed.to_json()}
    if numeric_deltas:
        diag["closed_form_deltas"] = list(deltas(closed, r))

    try:
        radii = sandwich_radii(r, d1, d2)
    except BoundVacuousError:
        radii = SandwichRadii(r / (d1 * r + 1.0), math.inf, math.inf)
        flags["bound_vacuous"] = True

    # exact identities behind the sandwich radii
    flags["inradius_ge_inner"] = dm.closed_form_inradius(spec) >= radii.inner * (1 - 1e-12)
    flags["half_diameter_le_outer_lemma"] = dm.closed_form_diameter(spec) / 2 <= radii.outer_lemma * (
        1 + 1e-12
    )

    sym_in = sym_out = frk = haus = None
    if geo is None:
        haus = closed_form_hausdorff(spec, r)
        diag["hausdorff_source"] = "closed_form"
    else:
        raster = geo.raster
        check = _check_sandwich(geo, radii) if math.isfinite(radii.outer_lemma) else None
        if check is not None:
            flags["inner_ball"] = check.inner_ok
            flags["outer_ball"] = check.outer_ok
            flags["sandwich"] = check.passed
            diag["outer_center"] = check.outer_center
            diag["outer_reach"] = check.outer_reach
        slack = 5.0 * raster.h
        sym_in = symmetric_difference(raster, BallSpec(geo.center, radii.inner))
        bound = symdiff_bound(n, r, d1, d2)
        flags["symdiff_inner_bound"] = sym_in <= bound + slack
        if math.isfinite(radii.outer_thm):
            sym_out = symmetric_difference(raster, BallSpec(geo.center, radii.outer_thm))
            # logged, not asserted: this outer-ball term is not a valid bound
            flags["symdiff_outer_bound"] = sym_out <= bound + slack
        if math.isfinite(radii.outer_lemma):
            linear = outer_gap_linear_bound(n, r, d2)
            exact = outer_gap_exact(n, r, d2)
            diag["outer_gap_exact"] = exact
            diag["outer_gap_linear_bound"] = linear
            flags["outer_gap_linear_bound"] = exact <= linear * (1 + 1e-12)
        # the ball's centre is free: keep the better of the two canonical centres
        cands = {"chebyshev": geo.center, "centroid": raster.occupied_points().mean(axis=0)}
        found = {name: hausdorff_distance(raster, BallSpec(c, r)) for name, c in cands.items()}
        best = min(found, key=found.get)
        haus = found[best]
        diag["hausdorff_center"] = [float(c) for c in cands[best]]
        if fraenkel:
            res = fraenkel_asymmetry(raster, r, seeds=[geo.center])
            frk = res.value
            diag["fraenkel_center"] = list(res.center)
        diag["numeric_volume"] = numeric_volume(raster)
        diag["h"] = raster.h

    haus_cf = closed_form_hausdorff(spec, r)
    if haus_cf is not None:
        limit = max(r - radii.inner, radii.outer_lemma - r)
        slack = 0.0 if geo is None else 2.0 * geo.raster.h
        flags["hausdorff_within_radii"] = (haus if haus is not None else haus_cf) <= limit + slack + 1e-12

    return StabilityReport(
        r, d1, d2, radii.inner, radii.outer_thm, radii.outer_lemma,
        sym_in, sym_out, frk, haus, c_bound, flags, diag,
    )


# sweeps ----------------------------------------------------------------------

def _polygon(k: int, r: float) -> DomainSpec:
    return dm.normalize_to_ball_volume(Kind.REGULAR_POLYGON, {"k": k}, r)


def _ellipse(k: int, r: float) -> DomainSpec:
    return dm.normalize_to_ball_volume(Kind.ELLIPSE, {"ratios": (1.0 + 1.0 / k, 1.0)}, r)


def _stadium4(k: int, r: float) -> DomainSpec:
    return dm.normalize_to_ball_volume(Kind.STADIUM, {"ell": 1.0 / k}, r)


FAMILIES: dict[str, Callable[[int, float], DomainSpec]] = {
    "polygon": _polygon,
    "ellipse": _ellipse,
    "stadium4": _stadium4,
}


def family_member(family: str, k: int, r: float) -> DomainSpec:
    try:
        return FAMILIES[family](k, r)
    except KeyError:
        raise ParameterError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None


@dataclass
class SweepResult:
    family: str
    r: float
    indices: list[int]
    reports: list[StabilityReport]
    summary: dict[str, Any]

    def column(self, name: str) -> list[Any]:
        return [getattr(rep, name) for rep in self.reports]


def _strictly_decreasing(vals: Sequence[float | None]) -> bool | None:
    if any(v is None for v in vals) or len(vals) < 2:
        return None
    return all(b < a for a, b in zip(vals, vals[1:]))


def _non_increasing(vals: Sequence[float | None], slack: float = 0.0) -> bool | None:
    if any(v is None for v in vals) or len(vals) < 2:
        return None
    return all(b <= a + slack for a, b in zip(vals, vals[1:]))


def sweep(
    family: str,
    r: float,
    indices: Sequence[int],
    h: float | None = None,
    *,
    cfg: GeodesicConfig | None = None,
    numeric_deltas: bool = False,
    fraenkel: bool = True,
    extra: Callable[[DomainSpec, StabilityReport, NumericGeometry | None], None] | None = None,
) -> SweepResult:
    """One stability report per family index, plus monotone-trend flags.

    ``extra`` may attach further per-member data (e.g. eigenfunction deviation).
    """
    indices = [int(k) for k in indices]

    def one(k: int) -> StabilityReport:
        spec = family_member(family, k, r)
        geo = None if h is None else measure(spec, h, cfg, with_diameter=numeric_deltas)
        rep = stability_report(spec, r, h, cfg=cfg, numeric_deltas=numeric_deltas, fraenkel=fraenkel, geometry=geo)
        if extra is not None:
            extra(spec, rep, geo)
        return rep

    workers = min(worker_count(), len(indices))
    if workers > 1 and h is not None:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(one, indices))
    else:
        reports = [one(k) for k in indices]

    d1 = [rep.delta1 for rep in reports]
    d2 = [rep.delta2 for rep in reports]
    dh = [rep.hausdorff for rep in reports]
    summary: dict[str, Any] = {
        "delta1_decreasing": _strictly_decreasing(d1),
        "delta2_decreasing": _strictly_decreasing(d2),
        "hausdorff_non_increasing": _non_increasing(dh, 0.0 if h is None else 2 * h),
        "final_delta1": d1[-1] if d1 else None,
        "final_delta2": d2[-1] if d2 else None,
        "final_hausdorff": dh[-1] if dh else None,
    }
    devs = [
        (rep.eigenfunction_deviation or {}).get("sup_deviation") for rep in reports
    ]
    if any(v is not None for v in devs):
        summary["sup_deviation_non_increasing"] = _non_increasing(devs)
    return SweepResult(family, r, indices, reports, summary)

"""Distance-cone ground states and their distance to the ball's cone."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domains import Kind
from .errors import NotCertifiedError, ParameterError
from .raster import DistanceField, RasterDomain, chebyshev_center, edt, inradius_error

__all__ = [
    "ConeFunction",
    "DistanceEigenfunction",
    "Deviation",
    "CERTIFIED_KINDS",
    "cone",
    "distance_eigenfunction",
    "aligned_cone",
    "sup_deviation",
    "discrete_gradient_norm",
]

# families whose first Dirichlet ground state is lambda * dist(x, boundary)
CERTIFIED_KINDS = frozenset({Kind.BALL, Kind.STADIUM})


@dataclass(frozen=True)
class ConeFunction:
    """``v(x) = 1 - |x - center| / radius``."""

    center: tuple[float, float]
    radius: float

    def __call__(self, x) -> np.ndarray | float:
        pts = np.asarray(x, dtype=float)
        vals = 1.0 - np.linalg.norm(pts - np.asarray(self.center), axis=-1) / self.radius
        return float(vals) if np.ndim(vals) == 0 else vals

    @property
    def lipschitz(self) -> float:
        return 1.0 / self.radius

    def on_grid(self, raster: RasterDomain) -> np.ndarray:
        return self(raster.centers())


def cone(center: Sequence[float], r: float) -> ConeFunction:
    if not r > 0:
        raise ParameterError(f"cone radius must be > 0, got {r!r}")
    return ConeFunction((float(center[0]), float(center[1])), float(r))


@dataclass(frozen=True, eq=False)
class DistanceEigenfunction:
    field: DistanceField
    lambda_D: float

    @property
    def raster(self) -> RasterDomain:
        return self.field.raster

    @property
    def values(self) -> np.ndarray:
        return self.lambda_D * self.field.values

    @property
    def max(self) -> float:
        return float(self.values[self.raster.occupancy].max())


def distance_eigenfunction(raster: RasterDomain, field: DistanceField | None = None) -> DistanceEigenfunction:
    """``u = dist(x, boundary) / inradius`` on the grid, so ``max u = 1``.

    Only families with a known distance-cone ground state are accepted; in
    general the first eigenfunction need not be a multiple of the distance.
    """
    kind = raster.source.kind if raster.source is not None else None
    if kind not in CERTIFIED_KINDS:
        name = kind.value if kind is not None else "an unlabelled raster"
        raise NotCertifiedError(f"no distance-cone eigenfunction is certified for {name}")
    field = edt(raster) if field is None else field
    return DistanceEigenfunction(field, 1.0 / field.max)


def aligned_cone(u: DistanceEigenfunction, r: float) -> ConeFunction:
    """Ball cone of radius ``r`` centred at the Chebyshev centre of ``u``'s domain."""
    center, _ = chebyshev_center(u.field)
    return cone(center, r)


@dataclass(frozen=True)
class Deviation:
    value: float
    argmax: tuple[int, int]
    point: tuple[float, float]
    cells: int

    def to_json(self) -> dict:
        return {
            "sup_deviation": self.value,
            "argmax_cell": list(self.argmax),
            "argmax_point": list(self.point),
            "cells": self.cells,
        }


def sup_deviation(u: DistanceEigenfunction, v: ConeFunction, r: float | None = None) -> Deviation:
    """``max |u - v|`` over occupied cell centres inside the open ball B_r(center of v)."""
    raster = u.raster
    r = v.radius if r is None else float(r)
    centers = raster.centers()
    d = np.linalg.norm(centers - np.asarray(v.center), axis=-1)
    region = raster.occupancy & (d < r)
    if not region.any():
        raise ParameterError("domain and ball share no cell centre")
    diff = np.where(region, np.abs(u.values - (1.0 - d / v.radius)), -np.inf)
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    pt = raster.center_of((i, j))
    return Deviation(float(diff[i, j]), (int(i), int(j)), (float(pt[0]), float(pt[1])), int(region.sum()))


def deviation_field(u: DistanceEigenfunction, v: ConeFunction) -> np.ndarray:
    """``|u - v|`` on occupied cells, 0 elsewhere."""
    diff = np.abs(u.values - v.on_grid(u.raster))
    return np.where(u.raster.occupancy, diff, 0.0)


def discrete_gradient_norm(u: DistanceEigenfunction) -> np.ndarray:
    """Forward-difference gradient magnitude on cells whose two forward neighbours are occupied."""
    vals, occ, h = u.values, u.raster.occupancy, u.raster.h
    gx = np.full(vals.shape, np.nan)
    gy = np.full(vals.shape, np.nan)
    ok_x = occ[:, :-1] & occ[:, 1:]
    ok_y = occ[:-1, :] & occ[1:, :]
    gx[:, :-1] = np.where(ok_x, (vals[:, 1:] - vals[:, :-1]) / h, np.nan)
    gy[:-1, :] = np.where(ok_y, (vals[1:, :] - vals[:-1, :]) / h, np.nan)
    return np.hypot(gx, gy)


def normalization_error(u: DistanceEigenfunction) -> float:
    """Allowed ``|max u - 1|``: the inradius error bar scaled by lambda."""
    return inradius_error(u.raster.h) * u.lambda_D

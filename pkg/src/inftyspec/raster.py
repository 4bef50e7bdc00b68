"""Grid occupancy of planar domains and the exact Euclidean distance transform."""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from ._backend import kernels
from .domains import DomainSpec, bounding_box, contains
from .errors import ParameterError, ResolutionError

__all__ = [
    "RasterDomain",
    "DistanceField",
    "Provenance",
    "rasterize",
    "rasterize_on",
    "edt",
    "numeric_inradius",
    "inradius_error",
    "distance_to_cells",
    "chebyshev_center",
    "numeric_volume",
    "write_pgm",
    "write_field",
    "read_field",
]

PAD_CELLS = 2


@dataclass(frozen=True, eq=False)
class RasterDomain:
    """Cell-centre occupancy on an axis-aligned grid.

    Cell ``(i, j)`` (row, column) has its centre at
    ``(origin[0] + j*h, origin[1] + i*h)``.
    """

    origin: tuple[float, float]
    h: float
    width: int
    height: int
    occupancy: np.ndarray
    source: DomainSpec | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    def xs(self) -> np.ndarray:
        return self.origin[0] + self.h * np.arange(self.width)

    def ys(self) -> np.ndarray:
        return self.origin[1] + self.h * np.arange(self.height)

    def centers(self) -> np.ndarray:
        """All cell centres, shape (height, width, 2)."""
        xx, yy = np.meshgrid(self.xs(), self.ys())
        return np.stack([xx, yy], axis=-1)

    def center_of(self, index: tuple[int, int]) -> np.ndarray:
        i, j = index
        return np.array([self.origin[0] + j * self.h, self.origin[1] + i * self.h])

    def occupied_points(self) -> np.ndarray:
        i, j = np.nonzero(self.occupancy)
        return np.column_stack([self.origin[0] + j * self.h, self.origin[1] + i * self.h])

    def same_frame(self, other: RasterDomain) -> bool:
        return (
            self.shape == other.shape
            and self.h == other.h
            and np.allclose(self.origin, other.origin, rtol=0, atol=1e-9 * self.h)
        )

    def with_occupancy(self, occupancy: np.ndarray) -> RasterDomain:
        """Same frame, new cells; the analytic source is dropped."""
        return RasterDomain(self.origin, self.h, self.width, self.height, np.asarray(occupancy, bool))

    def padded(self, left: int, right: int, bottom: int, top: int) -> RasterDomain:
        """Same lattice extended by unoccupied cells on each side."""
        occ = np.pad(self.occupancy, ((bottom, top), (left, right)))
        origin = (self.origin[0] - left * self.h, self.origin[1] - bottom * self.h)
        return RasterDomain(origin, self.h, occ.shape[1], occ.shape[0], occ, self.source)

    def covering(self, lo, hi, margin: int = 2) -> RasterDomain:
        """Pad (never crop) so the frame contains the box ``[lo, hi]`` plus ``margin`` cells."""
        x0, y0 = self.origin
        x1 = x0 + (self.width - 1) * self.h
        y1 = y0 + (self.height - 1) * self.h

        def need(gap: float) -> int:
            return max(0, math.ceil(gap / self.h - 1e-9) + margin) if gap > -margin * self.h else 0

        return self.padded(need(x0 - lo[0]), need(hi[0] - x1), need(y0 - lo[1]), need(hi[1] - y1))

    def header(self) -> dict:
        return {
            "origin": [float(self.origin[0]), float(self.origin[1])],
            "h": float(self.h),
            "width": int(self.width),
            "height": int(self.height),
        }


class Provenance(str, enum.Enum):
    EUCLIDEAN = "Euclidean"
    GEODESIC = "Geodesic"


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-cell distances (length units); unoccupied cells hold 0."""

    raster: RasterDomain
    values: np.ndarray
    provenance: Provenance

    @property
    def max(self) -> float:
        return float(self.values[self.raster.occupancy].max())

    def argmax(self) -> tuple[int, int]:
        flat = np.where(self.raster.occupancy, self.values, -np.inf)
        i, j = np.unravel_index(int(np.argmax(flat)), flat.shape)
        return int(i), int(j)


def _lattice(lo: float, hi: float, h: float, pad: int) -> tuple[int, int]:
    return math.floor(lo / h) - pad, math.ceil(hi / h) + pad


def rasterize(spec: DomainSpec, h: float, *, pad: int = PAD_CELLS) -> RasterDomain:
    """Occupancy by cell-centre membership on the lattice ``h * Z^2``.

    The grid covers the bounding box plus ``pad`` (>= 2) cells per side.
    """
    if spec.dimension != 2:
        raise ParameterError("only planar domains can be rasterized")
    h = float(h)
    if not (h > 0 and math.isfinite(h)):
        raise ParameterError(f"grid spacing must be > 0, got {h!r}")
    pad = max(int(pad), PAD_CELLS)
    lo, hi = bounding_box(spec)
    j0, j1 = _lattice(lo[0], hi[0], h, pad)
    i0, i1 = _lattice(lo[1], hi[1], h, pad)
    frame = RasterDomain((j0 * h, i0 * h), h, j1 - j0 + 1, i1 - i0 + 1, np.zeros((0, 0), bool))
    raster = rasterize_on(spec, frame)
    check_connected(raster)
    return raster


def rasterize_on(spec: DomainSpec, frame: RasterDomain) -> RasterDomain:
    """Rasterize ``spec`` onto an existing grid frame (no connectivity check)."""
    occ = np.asarray(contains(spec, frame.centers()), dtype=bool)
    return RasterDomain(frame.origin, frame.h, frame.width, frame.height, occ, spec)


def check_connected(raster: RasterDomain) -> None:
    occ = raster.occupancy
    if not occ.any():
        raise ResolutionError(f"empty occupancy at h={raster.h}")
    _, count = ndimage.label(occ)  # default structure is 4-connectivity
    if count != 1:
        raise ResolutionError(
            f"occupancy splits into {count} 4-connected pieces at h={raster.h}; refine the grid"
        )


def edt(raster: RasterDomain) -> DistanceField:
    """Distance from each occupied cell centre to the nearest unoccupied one.

    Cells beyond the grid count as unoccupied.
    """
    occ = np.pad(raster.occupancy, 1).astype(np.uint8)
    d2 = kernels.edt_sq(np.ascontiguousarray(occ))[1:-1, 1:-1]
    values = np.sqrt(d2) * raster.h
    values[~raster.occupancy] = 0.0
    return DistanceField(raster, values, Provenance.EUCLIDEAN)


def distance_to_cells(frame: RasterDomain, target: np.ndarray) -> np.ndarray:
    """Distance from every cell centre of ``frame`` to the nearest ``target`` cell."""
    target = np.asarray(target, dtype=bool)
    if not target.any():
        raise ParameterError("target cell set is empty")
    d2 = kernels.edt_sq(np.ascontiguousarray(~target, dtype=np.uint8))
    return np.sqrt(d2) * frame.h


def inradius_error(h: float) -> float:
    """Error bar of the grid inradius: cell-centre plus digital boundary offset."""
    return 2.0 * h * math.sqrt(2.0)


def numeric_inradius(raster: RasterDomain, field: DistanceField | None = None) -> float:
    field = edt(raster) if field is None else field
    return field.max


def chebyshev_center(field: DistanceField) -> tuple[np.ndarray, tuple[int, int]]:
    """Deepest cell; ties go to the maximiser closest to the maximisers' mean."""
    occ = field.raster.occupancy
    vals = np.where(occ, field.values, -np.inf)
    top = vals.max()
    ii, jj = np.nonzero(vals >= top)
    if len(ii) > 1:
        ci, cj = ii.mean(), jj.mean()
        k = int(np.argmin((ii - ci) ** 2 + (jj - cj) ** 2))
    else:
        k = 0
    index = (int(ii[k]), int(jj[k]))
    return field.raster.center_of(index), index


def numeric_volume(raster: RasterDomain) -> float:
    """Digital area; error is at most about perimeter * h."""
    return int(raster.occupancy.sum()) * raster.cell_area


# export ---------------------------------------------------------------------

def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def pgm_bytes(values: np.ndarray, mask: np.ndarray | None = None) -> tuple[bytes, float]:
    """16-bit binary PGM, linearly scaled so the max maps to 65535.

    Row 0 of the image is the top (largest y). Returns (data, units per level).
    """
    vals = np.where(mask, values, 0.0) if mask is not None else np.asarray(values, float)
    vals = np.nan_to_num(vals, nan=0.0, posinf=0.0)
    top = float(vals.max()) if vals.size else 0.0
    scale = top / 65535.0 if top > 0 else 1.0
    img = np.clip(np.rint(vals / scale), 0, 65535).astype(">u2")[::-1]
    head = f"P5\n{img.shape[1]} {img.shape[0]}\n65535\n".encode()
    return head + img.tobytes(), scale


def write_pgm(values: np.ndarray, path: str | Path, mask: np.ndarray | None = None) -> float:
    data, scale = pgm_bytes(values, mask)
    _atomic_write(Path(path), data)
    return scale


def write_field(
    values: np.ndarray, raster: RasterDomain, path: str | Path, provenance: str, **extra
) -> tuple[Path, Path]:
    """Flat little-endian float64 (row-major, row 0 = lowest y) plus JSON header."""
    path = Path(path)
    header = raster.header() | {"provenance": getattr(provenance, "value", str(provenance)), "dtype": "<f8"} | extra
    side = path.with_suffix(path.suffix + ".json")
    _atomic_write(path, np.ascontiguousarray(values, dtype="<f8").tobytes())
    _atomic_write(side, (json.dumps(header, indent=2, sort_keys=True) + "\n").encode())
    return path, side


def read_field(path: str | Path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    data = np.frombuffer(path.read_bytes(), dtype=header.get("dtype", "<f8"))
    return data.reshape(header["height"], header["width"]).astype(float), header

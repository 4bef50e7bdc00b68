"""Infinity-eigenvalues of planar domains and numeric checks of their ball stability."""

from ._backend import BACKEND
from .domains import DomainSpec, Kind, annulus, ball, ellipse, normalize_to_ball_volume, regular_polygon, stadium
from .eigenfunc import aligned_cone, distance_eigenfunction, sup_deviation
from .errors import (
    BoundVacuousError,
    ConnectivityError,
    InfeasibleError,
    InftySpecError,
    NotCertifiedError,
    NotConvexError,
    ParameterError,
    ResolutionError,
)
from .geodesic import GeodesicConfig, Solver, intrinsic_diameter
from .raster import RasterDomain, edt, rasterize
from .spectra import (
    EigenPair,
    StabilityReport,
    eigenpair_closed_form,
    eigenpair_numeric,
    fraenkel_asymmetry,
    hausdorff_distance,
    sandwich_radii,
    stability_report,
    sweep,
    symmetric_difference,
)

__version__ = "0.1.0"

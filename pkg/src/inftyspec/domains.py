"""Analytic domain families with closed-form geometry.

Every family is an open set centred at the origin (the ball may be moved).
Membership uses strict inequalities, so boundary points are exterior.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import InfeasibleError, NotConvexError, ParameterError

__all__ = [
    "Kind",
    "DomainSpec",
    "BallSpec",
    "unit_ball_volume",
    "ball",
    "annulus",
    "stadium",
    "regular_polygon",
    "ellipse",
    "volume",
    "normalize_to_ball_volume",
    "contains",
    "bounding_box",
    "closed_form_inradius",
    "closed_form_diameter",
    "euclidean_diameter_convex",
    "polygon_vertices",
    "is_convex",
]


class Kind(str, enum.Enum):
    BALL = "Ball"
    ANNULUS = "Annulus"
    STADIUM = "Stadium"
    REGULAR_POLYGON = "RegularPolygon"
    ELLIPSE = "Ellipse"

    @classmethod
    def parse(cls, name: str | Kind) -> Kind:
        if isinstance(name, Kind):
            return name
        key = name.replace("_", "").replace("-", "").lower()
        aliases = {"polygon": cls.REGULAR_POLYGON, "disk": cls.BALL, "ellipsoid": cls.ELLIPSE}
        if key in aliases:
            return aliases[key]
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ParameterError(f"unknown domain kind {name!r}")


_PLANAR_ONLY = {Kind.ANNULUS, Kind.STADIUM, Kind.REGULAR_POLYGON}
_CONVEX = {Kind.BALL, Kind.STADIUM, Kind.REGULAR_POLYGON, Kind.ELLIPSE}


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class DomainSpec:
    """One member of an analytic domain family.

    ``params`` keys per kind:

    * Ball: ``radius``, ``center``
    * Annulus: ``outer``, ``inner``
    * Stadium: ``eps`` (cap radius), ``ell`` (straight segment length)
    * RegularPolygon: ``k`` (sides), ``apothem``
    * Ellipse: ``axes`` (one semi-axis per dimension)
    """

    kind: Kind
    params: Mapping[str, Any]
    dimension: int = 2

    def __post_init__(self) -> None:
        kind = Kind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        n = int(self.dimension)
        if n < 2:
            raise ParameterError(f"dimension must be >= 2, got {n}")
        if kind in _PLANAR_ONLY and n != 2:
            raise ParameterError(f"{kind.value} is only defined for n = 2")
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "params", _validate(kind, dict(self.params), n))

    def to_json(self) -> dict[str, Any]:
        params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}
        return {"kind": self.kind.value, "params": params, "dimension": self.dimension}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any] | str) -> DomainSpec:
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(Kind.parse(obj["kind"]), obj["params"], int(obj.get("dimension", 2)))
        except KeyError as exc:
            raise ParameterError(f"domain JSON missing field {exc.args[0]!r}") from None


def _validate(kind: Kind, p: dict[str, Any], n: int) -> dict[str, Any]:
    try:
        if kind is Kind.BALL:
            center = tuple(float(c) for c in p.get("center", (0.0,) * n))
            if len(center) != n:
                raise ParameterError("ball center has wrong dimension")
            return {"radius": _positive("radius", p["radius"]), "center": center}
        if kind is Kind.ANNULUS:
            outer = _positive("outer", p["outer"])
            inner = _positive("inner", p["inner"])
            if inner >= outer:
                raise ParameterError(f"annulus needs inner < outer, got {inner} >= {outer}")
            return {"outer": outer, "inner": inner}
        if kind is Kind.STADIUM:
            ell = float(p["ell"])
            if not math.isfinite(ell) or ell < 0.0:
                raise ParameterError(f"ell must be finite and >= 0, got {ell!r}")
            return {"eps": _positive("eps", p["eps"]), "ell": ell}
        if kind is Kind.REGULAR_POLYGON:
            k = p["k"]
            if int(k) != k or int(k) < 3:
                raise ParameterError(f"polygon needs integer k >= 3, got {k!r}")
            return {"k": int(k), "apothem": _positive("apothem", p["apothem"])}
        axes = tuple(_positive("axis", a) for a in p["axes"])
        if len(axes) != n:
            raise ParameterError(f"ellipse needs {n} semi-axes, got {len(axes)}")
        return {"axes": axes}
    except KeyError as exc:
        raise ParameterError(f"{kind.value} missing parameter {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ParameterError(str(exc)) from None


@dataclass(frozen=True)
class BallSpec:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radius", _positive("radius", self.radius))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def as_domain(self) -> DomainSpec:
        return ball(self.radius, self.center)


# constructors ---------------------------------------------------------------

def ball(radius: float, center: Sequence[float] | None = None, n: int | None = None) -> DomainSpec:
    if center is None:
        n = 2 if n is None else n
        center = (0.0,) * n
    return DomainSpec(Kind.BALL, {"radius": radius, "center": tuple(center)}, len(center))


def annulus(outer: float, inner: float) -> DomainSpec:
    return DomainSpec(Kind.ANNULUS, {"outer": outer, "inner": inner})


def stadium(eps: float, ell: float) -> DomainSpec:
    return DomainSpec(Kind.STADIUM, {"eps": eps, "ell": ell})


def regular_polygon(k: int, apothem: float) -> DomainSpec:
    return DomainSpec(Kind.REGULAR_POLYGON, {"k": k, "apothem": apothem})


def ellipse(*axes: float) -> DomainSpec:
    if len(axes) == 1 and not np.isscalar(axes[0]):
        axes = tuple(axes[0])
    return DomainSpec(Kind.ELLIPSE, {"axes": tuple(axes)}, len(axes))


# closed forms ---------------------------------------------------------------

def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def volume(spec: DomainSpec) -> float:
    p = spec.params
    kind = spec.kind
    if kind is Kind.BALL:
        return unit_ball_volume(spec.dimension) * p["radius"] ** spec.dimension
    if kind is Kind.ANNULUS:
        return math.pi * (p["outer"] ** 2 - p["inner"] ** 2)
    if kind is Kind.STADIUM:
        eps = p["eps"]
        return 2.0 * eps * p["ell"] + math.pi * eps * eps
    if kind is Kind.REGULAR_POLYGON:
        k = p["k"]
        return k * p["apothem"] ** 2 * math.tan(math.pi / k)
    return unit_ball_volume(spec.dimension) * math.prod(p["axes"])


def normalize_to_ball_volume(
    kind: Kind | str, shape_params: Mapping[str, Any] | None, r: float, n: int = 2
) -> DomainSpec:
    """Fix the one free scale of a family so the volume equals that of B_r.

    Accepted ``shape_params``:

    * Ball: none (returns the centred ball of radius r)
    * Stadium: ``ell`` (solve for the cap radius) or ``eps`` (solve for ell)
    * Annulus: ``inner`` (solve for the outer radius)
    * RegularPolygon: ``k`` (solve for the apothem)
    * Ellipse: ``ratios`` (axis proportions; solve for the common scale)
    """
    kind = Kind.parse(kind)
    r = _positive("r", r)
    sp = dict(shape_params or {})
    if kind in _PLANAR_ONLY:
        n = 2
    target = unit_ball_volume(n) * r**n

    if kind is Kind.BALL:
        return ball(r, n=n)
    if kind is Kind.STADIUM:
        if "ell" in sp:
            ell = float(sp["ell"])
            if not math.isfinite(ell) or ell < 0:
                raise InfeasibleError(f"ell must be finite and >= 0, got {ell!r}")
            # pi*eps^2 + 2*ell*eps - pi*r^2 = 0, positive root in cancellation-free form
            eps = math.pi * r * r / (ell + math.hypot(ell, math.pi * r))
            if not eps > 0.0:
                raise InfeasibleError(f"no positive cap radius for ell={ell}")
            return stadium(eps, ell)
        eps = _positive("eps", sp["eps"])
        if eps > r:
            raise InfeasibleError(f"cap radius {eps} exceeds r={r}: stadium volume too large")
        return stadium(eps, math.pi * (r * r - eps * eps) / (2.0 * eps))
    if kind is Kind.ANNULUS:
        inner = _positive("inner", sp["inner"])
        return annulus(math.hypot(r, inner), inner)
    if kind is Kind.REGULAR_POLYGON:
        k = int(sp["k"])
        if k < 3:
            raise InfeasibleError(f"polygon needs k >= 3, got {k}")
        return regular_polygon(k, r * math.sqrt(math.pi / (k * math.tan(math.pi / k))))
    ratios = [_positive("ratio", a) for a in sp["ratios"]]
    if len(ratios) != n:
        n = len(ratios)
        target = unit_ball_volume(n) * r**n
    # geometric mean keeps the rescaled product exact to rounding
    log_gm = sum(math.log(a) for a in ratios) / n
    scale = r / math.exp(log_gm)
    axes = [scale * a for a in ratios]
    spec = ellipse(*axes)
    got = volume(spec)
    if abs(got - target) > 1e-12 * target:
        fix = (target / got) ** (1.0 / n)
        spec = ellipse(*[a * fix for a in axes])
    return spec


def polygon_vertices(spec: DomainSpec) -> np.ndarray:
    """Vertices (k, 2), counter-clockwise; the first edge is horizontal at y = -apothem."""
    k, a = spec.params["k"], spec.params["apothem"]
    circum = a / math.cos(math.pi / k)
    angles = -math.pi / 2 + math.pi / k + 2 * math.pi * np.arange(k) / k
    return circum * np.column_stack([np.cos(angles), np.sin(angles)])


def _polygon_normals(k: int) -> np.ndarray:
    angles = -math.pi / 2 + 2 * math.pi * np.arange(k) / k
    return np.column_stack([np.cos(angles), np.sin(angles)])


def contains(spec: DomainSpec, x: Any) -> Any:
    """Open-set membership. ``x`` may be one point or an array of shape (..., n)."""
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 1
    if pts.shape[-1] != spec.dimension:
        raise ParameterError(f"point dimension {pts.shape[-1]} != {spec.dimension}")
    p = spec.params
    kind = spec.kind
    if kind is Kind.BALL:
        d = pts - np.asarray(p["center"])
        inside = np.einsum("...i,...i->...", d, d) < p["radius"] ** 2
    elif kind is Kind.ANNULUS:
        rr = np.einsum("...i,...i->...", pts, pts)
        inside = (rr > p["inner"] ** 2) & (rr < p["outer"] ** 2)
    elif kind is Kind.STADIUM:
        half = p["ell"] / 2.0
        dx = np.maximum(np.abs(pts[..., 0]) - half, 0.0)
        inside = dx * dx + pts[..., 1] ** 2 < p["eps"] ** 2
    elif kind is Kind.REGULAR_POLYGON:
        proj = pts @ _polygon_normals(p["k"]).T
        inside = np.all(proj < p["apothem"], axis=-1)
    else:
        inside = np.sum((pts / np.asarray(p["axes"])) ** 2, axis=-1) < 1.0
    return bool(inside) if scalar else inside


def bounding_box(spec: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
    p = spec.params
    kind = spec.kind
    if kind is Kind.BALL:
        c = np.asarray(p["center"])
        return c - p["radius"], c + p["radius"]
    if kind is Kind.ANNULUS:
        ext = np.full(2, p["outer"])
    elif kind is Kind.STADIUM:
        ext = np.array([p["ell"] / 2 + p["eps"], p["eps"]])
    elif kind is Kind.REGULAR_POLYGON:
        v = polygon_vertices(spec)
        return v.min(axis=0), v.max(axis=0)
    else:
        ext = np.asarray(p["axes"], dtype=float)
    return -ext, ext


def closed_form_inradius(spec: DomainSpec) -> float:
    p = spec.params
    kind = spec.kind
    if kind is Kind.BALL:
        return p["radius"]
    if kind is Kind.ANNULUS:
        return (p["outer"] - p["inner"]) / 2.0
    if kind is Kind.STADIUM:
        return p["eps"]
    if kind is Kind.REGULAR_POLYGON:
        return p["apothem"]
    return min(p["axes"])


def closed_form_diameter(spec: DomainSpec) -> float:
    """Intrinsic diameter in closed form.

    Regular polygons use twice the circumradius for every k, which is the
    Euclidean diameter only for even k; see ``euclidean_diameter_convex``.
    """
    p = spec.params
    kind = spec.kind
    if kind is Kind.BALL:
        return 2.0 * p["radius"]
    if kind is Kind.ANNULUS:
        big, small = p["outer"], p["inner"]
        # two tangent segments to the hole plus the arc between tangency points
        return 2.0 * math.sqrt(big * big - small * small) + small * (
            math.pi - 2.0 * math.acos(small / big)
        )
    if kind is Kind.STADIUM:
        return p["ell"] + 2.0 * p["eps"]
    if kind is Kind.REGULAR_POLYGON:
        return 2.0 * p["apothem"] / math.cos(math.pi / p["k"])
    return 2.0 * max(p["axes"])


def is_convex(spec: DomainSpec) -> bool:
    return spec.kind in _CONVEX


def euclidean_diameter_convex(spec: DomainSpec) -> float:
    """Exact max pairwise distance over the closure of a convex family member."""
    if not is_convex(spec):
        raise NotConvexError(f"{spec.kind.value} is not convex")
    if spec.kind is Kind.REGULAR_POLYGON:
        k = spec.params["k"]
        circum = spec.params["apothem"] / math.cos(math.pi / k)
        if k % 2:
            # longest diagonal of an odd polygon subtends (k-1)/k * pi
            return 2.0 * circum * math.cos(math.pi / (2 * k))
        return 2.0 * circum
    return closed_form_diameter(spec)

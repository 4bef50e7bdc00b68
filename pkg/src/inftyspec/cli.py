"""Command-line front end.

Subcommands: ``compute``, ``verify``, ``sweep``, ``eigenfunction``.

Domain JSON (``--domain-json FILE``) is one object::

    {"kind": "Stadium", "params": {"eps": 0.2, "ell": 7.54}, "dimension": 2}

``kind`` is one of Ball, Annulus, Stadium, RegularPolygon, Ellipse and
``params`` uses the keys of :class:`inftyspec.domains.DomainSpec`.

Exit codes: 0 success, 2 invalid or infeasible domain (or uncertified
eigenfunction family), 3 resolution/connectivity failure, 4 a theorem
check failed during ``verify``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import domains as dm
from . import eigenfunc as ef
from . import spectra as sp
from .domains import DomainSpec, Kind
from .errors import InftySpecError, NotCertifiedError, ResolutionError
from .geodesic import GeodesicConfig
from .raster import edt, pgm_bytes, rasterize
from .render import domain_svg
from .reporting import SCHEMA_VERSION, SWEEP_COLUMNS, csv_text, dumps, write_outputs

DEFAULT_H = 2.0**-8

# flags that are checked; the rest are logged only
ASSERTED_FLAGS = (
    "inradius_ge_inner",
    "half_diameter_le_outer_lemma",
    "inner_ball",
    "outer_ball",
    "symdiff_inner_bound",
    "hausdorff_within_radii",
)


class UsageError(InftySpecError, ValueError):
    pass


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def parse_indices(text: str) -> list[int]:
    """``3:64`` (inclusive), ``3:64:2`` or ``10,20,40``."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(t) for t in text.split(",") if t.strip()]


def build_domain(args: argparse.Namespace) -> tuple[DomainSpec, float]:
    """Domain and reference radius r from the command line."""
    if args.domain_json:
        spec = DomainSpec.from_json(Path(args.domain_json).read_text())
        r = args.match_volume or args.r or sp.matched_radius(spec)
        return spec, r
    if not args.domain:
        raise UsageError("give --domain or --domain-json")
    kind = Kind.parse(args.domain)
    r = args.match_volume or args.r or 1.0
    if kind is Kind.BALL:
        return dm.ball(args.radius or r), r
    if kind is Kind.STADIUM:
        if args.eps is not None and args.ell is not None and not args.match_volume:
            return dm.stadium(args.eps, args.ell), r
        if args.eps is not None:
            return dm.normalize_to_ball_volume(kind, {"eps": args.eps}, r), r
        if args.ell is not None:
            return dm.normalize_to_ball_volume(kind, {"ell": args.ell}, r), r
        raise UsageError("stadium needs --eps and/or --ell")
    if kind is Kind.ANNULUS:
        if args.outer is not None and args.eps is not None:
            return dm.annulus(args.outer, args.eps), r
        if args.eps is None:
            raise UsageError("annulus needs --eps (inner radius)")
        return dm.normalize_to_ball_volume(kind, {"inner": args.eps}, r), r
    if kind is Kind.REGULAR_POLYGON:
        if args.k is None:
            raise UsageError("polygon needs --k")
        k = int(args.k)
        if args.apothem is not None:
            return dm.regular_polygon(k, args.apothem), r
        return dm.normalize_to_ball_volume(kind, {"k": k}, r), r
    if args.axes:
        spec = dm.ellipse(*_floats(args.axes))
        if args.match_volume:
            spec = dm.normalize_to_ball_volume(kind, {"ratios": spec.params["axes"]}, r)
        return spec, r
    if args.ratio is not None:
        return dm.normalize_to_ball_volume(kind, {"ratios": (args.ratio, 1.0)}, r), r
    raise UsageError("ellipse needs --axes or --ratio")


def _geo_cfg(args: argparse.Namespace) -> GeodesicConfig:
    return GeodesicConfig(args.solver, args.stride)


def _formats(args: argparse.Namespace) -> set[str]:
    return {f.strip().lower() for f in args.formats.split(",") if f.strip()}


def _header(command: str, **extra: Any) -> dict[str, Any]:
    return {"schema_version": SCHEMA_VERSION, "command": command} | extra


# commands ----------------------------------------------------------------------

def cmd_compute(args: argparse.Namespace) -> int:
    spec, r = build_domain(args)
    closed = sp.eigenpair_closed_form(spec)
    doc = _header("compute", domain=spec.to_json(), r=r, eigenpair_closed_form=closed.to_json())
    geo = None
    if args.h and spec.dimension == 2:
        geo = sp.measure(spec, args.h, _geo_cfg(args))
        numeric = geo.eigenpair()
        doc["eigenpair_numeric"] = numeric.to_json()
        doc["numeric_inradius"] = geo.inradius
        doc["numeric_diameter"] = geo.diameter.value
    doc["eigenpair"] = doc.get("eigenpair_numeric", doc["eigenpair_closed_form"])
    report = sp.stability_report(spec, r, geometry=geo, fraenkel=args.fraenkel)
    doc["stability_report"] = report.to_json()
    files = {}
    if "json" in _formats(args):
        files[Path(args.out) / "compute.json"] = dumps(doc) + "\n"
    write_outputs(files)
    if not args.quiet:
        pair = doc["eigenpair"]
        print(f"lambda_D = {pair['lambda_D']:.6f}  lambda_N = {pair['lambda_N']:.6f}  ({pair['method']})")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    spec, r = build_domain(args)
    if spec.dimension != 2:
        raise UsageError("verify works on planar domains only")
    h = args.h or DEFAULT_H
    geo = sp.measure(spec, h, _geo_cfg(args), with_diameter=args.numeric_deltas)
    report = sp.stability_report(
        spec, r, geometry=geo, numeric_deltas=args.numeric_deltas, fraenkel=args.fraenkel
    )
    failed = [f for f in ASSERTED_FLAGS if report.flags.get(f) is False]
    doc = _header("verify", domain=spec.to_json(), h=h, failed_flags=failed, stability_report=report.to_json())
    files: dict[Path, str] = {}
    fmts = _formats(args)
    if "json" in fmts:
        files[Path(args.out) / "verify.json"] = dumps(doc) + "\n"
    if "svg" in fmts:
        outer_name = report.diagnostics.get("outer_center")
        centers = {"chebyshev": geo.center, "centroid": geo.raster.occupied_points().mean(axis=0)}
        if geo.diameter is not None:
            centers["diameter_midpoint"] = geo.diameter.midpoint(geo.raster)
        oc = centers.get(outer_name, geo.center)
        outer = (oc, report.outer_radius_lemma) if math.isfinite(report.outer_radius_lemma) else None
        files[Path(args.out) / "verify.svg"] = domain_svg(
            geo.raster,
            inner=(geo.center, report.inner_radius),
            outer=outer,
            reference=(report.diagnostics.get("hausdorff_center", geo.center), r),
        )
    write_outputs(files)
    if not args.quiet:
        for name, val in report.flags.items():
            tag = "asserted" if name in ASSERTED_FLAGS else "logged"
            print(f"{name:32s} {str(val):6s} ({tag})")
    if failed:
        print(f"theorem checks failed: {', '.join(failed)}", file=sys.stderr)
        return 4
    return 0


def _attach_deviation(h: float):
    def attach(spec: DomainSpec, rep: sp.StabilityReport, geo) -> None:
        raster = geo.raster if geo is not None else rasterize(spec, h)
        fld = geo.field if geo is not None else edt(raster)
        u = ef.distance_eigenfunction(raster, fld)
        dev = ef.sup_deviation(u, ef.aligned_cone(u, rep.r), rep.r)
        rep.eigenfunction_deviation = dev.to_json() | {"h": raster.h}

    return attach


def cmd_sweep(args: argparse.Namespace) -> int:
    family = args.family
    if family not in sp.FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {sorted(sp.FAMILIES)}")
    if args.ratio_rule not in (None, "1+1/k"):
        raise UsageError("only --ratio 1+1/k is supported for the ellipse family")
    default_k = {"polygon": "3:64", "ellipse": "1:64", "stadium4": "10,20,40,80"}[family]
    indices = parse_indices(args.k or default_k)
    r = args.r or 1.0
    extra = None
    if family == "stadium4":
        extra = _attach_deviation(args.h or DEFAULT_H)
    res = sp.sweep(
        family, r, indices, args.h, cfg=_geo_cfg(args), numeric_deltas=args.numeric_deltas,
        fraenkel=args.fraenkel, extra=extra,
    )
    rows = []
    for k, rep in zip(res.indices, res.reports):
        row = {name: getattr(rep, name) for name in SWEEP_COLUMNS if name not in ("k", "sup_deviation")}
        row["k"] = k
        row["sup_deviation"] = (rep.eigenfunction_deviation or {}).get("sup_deviation")
        rows.append(row)
    summary = _header("sweep", family=family, r=r, h=args.h, indices=res.indices, summary=res.summary)
    summary["rows"] = rows
    files: dict[Path, str] = {}
    fmts = _formats(args)
    if "csv" in fmts:
        files[Path(args.out) / "sweep.csv"] = csv_text(rows, SWEEP_COLUMNS)
    if "json" in fmts:
        files[Path(args.out) / "sweep.json"] = dumps(summary) + "\n"
    write_outputs(files)
    if not args.quiet:
        for key, val in res.summary.items():
            print(f"{key:32s} {val}")
    return 0


def cmd_eigenfunction(args: argparse.Namespace) -> int:
    if args.family:
        if args.family != "stadium4" or args.k is None:
            raise UsageError("eigenfunction --family supports stadium4 with a single --k")
        r = args.r or 1.0
        spec = sp.family_member("stadium4", int(args.k), r)
    else:
        spec, r = build_domain(args)
    if spec.kind not in ef.CERTIFIED_KINDS:
        raise NotCertifiedError(f"no distance-cone eigenfunction is certified for {spec.kind.value}")
    h = args.h or DEFAULT_H
    raster = rasterize(spec, h)
    u = ef.distance_eigenfunction(raster)
    v = ef.aligned_cone(u, r)
    dev = ef.sup_deviation(u, v, r)
    out = Path(args.out)
    v_vals = np.where(raster.occupancy, v.on_grid(raster), 0.0)
    fields = {"u": u.values, "v": v_vals, "deviation": ef.deviation_field(u, v)}
    files: dict[Path, str | bytes] = {}
    for name, vals in fields.items():
        files[out / f"{name}.f64"] = np.ascontiguousarray(vals, dtype="<f8").tobytes()
        header = raster.header() | {"provenance": "Euclidean", "field": name, "dtype": "<f8"}
        files[out / f"{name}.f64.json"] = json.dumps(header, indent=2, sort_keys=True) + "\n"
        files[out / f"{name}.pgm"], _ = pgm_bytes(vals, raster.occupancy)
    doc = _header(
        "eigenfunction",
        domain=spec.to_json(),
        r=r,
        h=h,
        lambda_D=u.lambda_D,
        cone_center=list(v.center),
        eigenfunction_deviation=dev.to_json(),
    )
    files[out / "eigenfunction.json"] = dumps(doc) + "\n"
    write_outputs(files)
    if not args.quiet:
        print(f"sup |u - v| on domain and B_r: {dev.value:.6g} at {dev.point}")
    return 0


# parser ----------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=float, default=None, help="reference ball radius (default 1)")
    p.add_argument("--h", type=float, default=None, help="grid spacing for the numeric route")
    p.add_argument("--solver", default="fmm", choices=["fmm", "dijkstra8", "dijkstra16"])
    p.add_argument("--stride", type=int, default=None, help="boundary source stride for the diameter search")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--formats", default="json,csv,svg", help="subset of json,csv,svg")
    p.add_argument("--numeric-deltas", action="store_true", help="deltas from the grid eigenpair")
    p.add_argument("--no-fraenkel", dest="fraenkel", action="store_false")
    p.add_argument("-q", "--quiet", action="store_true")


def _add_domain(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", help="ball, annulus, stadium, polygon, ellipse")
    p.add_argument("--domain-json", help="file holding a domain JSON object")
    p.add_argument("--eps", type=float, help="stadium cap radius or annulus inner radius")
    p.add_argument("--ell", type=float, help="stadium straight length")
    p.add_argument("--k", help="polygon side count (sweep: index list such as 3:64 or 10,20)")
    p.add_argument("--axes", help="ellipse semi-axes, comma separated")
    p.add_argument("--ratio", type=float, help="ellipse axis ratio (volume matched)")
    p.add_argument("--apothem", type=float)
    p.add_argument("--outer", type=float, help="annulus outer radius")
    p.add_argument("--radius", type=float, help="ball radius (default r)")
    p.add_argument("--match-volume", type=float, help="scale the domain to the volume of B_R")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inftyspec", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("compute", "eigenpair and stability report"),
        ("verify", "check the two-ball sandwich and bounds on the grid"),
        ("eigenfunction", "distance-cone eigenfunction vs the ball cone"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_domain(p)
        _add_common(p)
        if name == "eigenfunction":
            p.add_argument("--family", help="stadium4 (with --k)")
    p = sub.add_parser("sweep", help="family sweep with trend summary")
    p.add_argument("--family", required=True, choices=sorted(sp.FAMILIES))
    p.add_argument("--k", help="indices: 3:64 or 10,20,40,80")
    p.add_argument("--ratio", dest="ratio_rule", help="ellipse axis rule (only 1+1/k)")
    _add_common(p)
    return parser


COMMANDS = {
    "compute": cmd_compute,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "eigenfunction": cmd_eigenfunction,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InftySpecError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: geodesic sampling, spheres, figures, distances.

Exit codes are a stable scripting contract: 0 on success, 2 for invalid
arguments, 3 for I/O failures, 4 when a solver or detector fails to
produce a result.  Every command is deterministic; identical flags yield
byte-identical output files.

An optional JSON config file can supply any long-option value (keys named
like the option, dashes or underscores); explicit command-line flags win
over the file.  Points are comma-separated triples `x,y,z`, angles are in
radians.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import FRAME_NAMES, HeisPoint, nabla, sectional_curvature
from .distances import (
    ShootingConvergenceError,
    TargetUnreachableError,
    cygan_distance,
    riemannian_distance,
    shoot_candidates,
)
from .geodesics import TWO_PI, GeodesicSpec, velocity_frame_at
from .meshing import (
    DEFAULT_DETECTION_GRID,
    NoSingularityError,
    SphereGrid,
    ball_cutaway_mesh,
    clip_sphere_to_metric,
    geodesic_polyline,
    plane_exp_surface,
    singular_point_closeup,
    sphere_exp_mesh,
)
from .writers import format_float, write_jsonl, write_obj, write_ply

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_SOLVER = 4

_FIGURE_PLANE_RESOLUTION = (128, 96)
_FIGURE_PLANE_SMAX = 6.0
_FIGURE_CLOSEUP_RESOLUTION = (96, 48)


def _parse_point(text: str) -> HeisPoint:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z triple, got {text!r}")
    try:
        return HeisPoint(float(parts[0]), float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_vector(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z triple, got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisgeo",
        description="Geodesics, distances and figure meshes of the Heisenberg group "
        "with its left-invariant metric.",
    )
    parser.add_argument("--version", action="version", version=f"heisgeo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    geo = sub.add_parser("geodesic", help="sample a geodesic polyline")
    geo.add_argument("--gamma", type=float, default=None, help="vertical velocity component")
    geo.add_argument("--phi", type=float, default=0.0, help="initial planar direction (radians)")
    geo.add_argument("--smax", type=float, default=None, help="arc length to sample up to")
    geo.add_argument("--n", type=int, default=100, help="number of segments")
    geo.add_argument("--base", type=_parse_point, default=HeisPoint(0.0, 0.0, 0.0))
    geo.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    geo.add_argument("--out", default="-", help="output path, - for stdout")
    geo.add_argument("--config", help="JSON file with defaults for these options")

    sph = sub.add_parser("sphere", help="emit a geodesic sphere mesh")
    sph.add_argument("--radius", type=float, default=None)
    sph.add_argument("--nphi", type=int, default=DEFAULT_DETECTION_GRID[0])
    sph.add_argument("--ngamma", type=int, default=DEFAULT_DETECTION_GRID[1])
    sph.add_argument("--half", action="store_true", help="clip to one side of a plane")
    sph.add_argument("--cut-normal", type=_parse_vector, default=(0.0, 1.0, 0.0))
    sph.add_argument(
        "--clip-to-metric",
        action="store_true",
        help="drop vertices metrically closer to the origin than the radius (slow)",
    )
    sph.add_argument("--metric-tol", type=float, default=1e-3)
    sph.add_argument("--format", choices=("obj", "ply"), default="obj")
    sph.add_argument("--out", default=None)
    sph.add_argument("--config", help="JSON file with defaults for these options")

    surf = sub.add_parser("surface", help="emit the exp-image of the {X,T} plane")
    surf.add_argument("--theta-min", type=float, default=0.0)
    surf.add_argument("--theta-max", type=float, default=TWO_PI)
    surf.add_argument("--smin", type=float, default=0.0)
    surf.add_argument("--smax", type=float, default=_FIGURE_PLANE_SMAX)
    surf.add_argument("--ntheta", type=int, default=_FIGURE_PLANE_RESOLUTION[0])
    surf.add_argument("--ns", type=int, default=_FIGURE_PLANE_RESOLUTION[1])
    surf.add_argument("--format", choices=("obj", "ply"), default="obj")
    surf.add_argument("--out", default=None)
    surf.add_argument("--config", help="JSON file with defaults for these options")

    fig = sub.add_parser("figures", help="emit the full figure suite with a manifest")
    fig.add_argument("--out-dir", default=None)
    fig.add_argument("--nphi", type=int, default=DEFAULT_DETECTION_GRID[0])
    fig.add_argument("--ngamma", type=int, default=DEFAULT_DETECTION_GRID[1])
    fig.add_argument("--format", choices=("obj", "ply"), default="obj")
    fig.add_argument("--config", help="JSON file with defaults for these options")

    dist = sub.add_parser("distance", help="distance between two points")
    dist.add_argument("p", type=_parse_point, help="first point x,y,z")
    dist.add_argument("q", type=_parse_point, help="second point x,y,z")
    dist.add_argument("--metric", choices=("riemannian", "cygan"), default="riemannian")
    dist.add_argument(
        "--all-candidates",
        action="store_true",
        help="print every connecting geodesic as JSON lines",
    )
    dist.add_argument("--tol", type=float, default=1e-8)
    dist.add_argument("--out", default="-", help="output path, - for stdout")
    dist.add_argument("--config", help="JSON file with defaults for these options")

    curv = sub.add_parser("curvature", help="print sectional curvatures and the connection")
    curv.add_argument("--out", default="-", help="output path, - for stdout")
    curv.add_argument("--config", help="JSON file with defaults for these options")

    return parser


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    """Fill option values from the JSON config unless given on the line."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as handle:
        values = json.load(handle)
    if not isinstance(values, dict):
        raise ValueError("config file must contain a JSON object")
    for key, value in values.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ValueError(f"config key {key!r} does not match any option")
        flag = "--" + dest.replace("_", "-")
        if flag in argv:
            continue
        if dest in ("base",) or dest == "p" or dest == "q":
            value = _parse_point(value)
        elif dest == "cut_normal":
            value = _parse_vector(value)
        setattr(args, dest, value)


def _write_lines(lines: list[str], out: str) -> None:
    text = "\n".join(lines) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as handle:
            handle.write(text)


def _write_mesh(mesh, out: str, fmt: str) -> None:
    if fmt == "obj":
        write_obj(mesh, out)
    else:
        write_ply(mesh, out)


def _cmd_geodesic(args) -> int:
    if args.n < 2:
        raise ValueError("--n must be at least 2")
    if not args.smax > 0.0:
        raise ValueError("--smax must be positive")
    spec = GeodesicSpec.from_direction(args.gamma, args.phi, base=args.base)
    points = geodesic_polyline(spec, args.smax, args.n)
    s_values = np.linspace(0.0, args.smax, args.n + 1)
    rows = []
    for s, point in zip(s_values, points):
        vel = velocity_frame_at(spec, float(s))
        rows.append((float(s), point.x, point.y, point.z, vel.a, vel.b, vel.c))
    header = ("s", "x", "y", "z", "alpha", "beta", "gamma")
    if args.format == "csv":
        lines = [",".join(header)]
        lines += [",".join(format_float(v) for v in row) for row in rows]
        _write_lines(lines, args.out)
    else:
        records = [dict(zip(header, row)) for row in rows]
        if args.out == "-":
            for rec in records:
                sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            write_jsonl(records, args.out)
    return EXIT_OK


def _cmd_sphere(args) -> int:
    if not args.radius > 0.0:
        raise ValueError("--radius must be positive")
    if not args.metric_tol > 0.0:
        raise ValueError("--metric-tol must be positive")
    grid = SphereGrid(n_phi=args.nphi, n_gamma=args.ngamma, radius=args.radius)
    if args.half:
        mesh = ball_cutaway_mesh(
            args.radius, args.cut_normal, n_phi=args.nphi, n_gamma=args.ngamma
        )
    else:
        mesh = sphere_exp_mesh(grid)
    if args.clip_to_metric:
        mesh = clip_sphere_to_metric(mesh, args.radius, tol=args.metric_tol)
    _write_mesh(mesh, args.out, args.format)
    return EXIT_OK


def _cmd_surface(args) -> int:
    if args.ntheta < 3 or args.ns < 3:
        raise ValueError("--ntheta and --ns must be at least 3")
    mesh = plane_exp_surface(
        theta_range=(args.theta_min, args.theta_max),
        s_range=(args.smin, args.smax),
        resolution=(args.ntheta, args.ns),
    )
    _write_mesh(mesh, args.out, args.format)
    return EXIT_OK


def _cmd_figures(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = args.format
    nphi, ngamma = args.nphi, args.ngamma
    manifest: dict = {"format": ext, "figures": {}}

    plane = plane_exp_surface(
        theta_range=(0.0, TWO_PI),
        s_range=(0.0, _FIGURE_PLANE_SMAX),
        resolution=_FIGURE_PLANE_RESOLUTION,
    )
    name = f"fig1_plane_surface.{ext}"
    _write_mesh(plane, out_dir / name, ext)
    manifest["figures"]["fig1"] = {
        "file": name,
        "kind": "plane_exp_surface",
        "theta_range": [0.0, TWO_PI],
        "s_range": [0.0, _FIGURE_PLANE_SMAX],
        "resolution": list(_FIGURE_PLANE_RESOLUTION),
    }

    for radius, key in ((1.0, "fig2_r1"), (3.0, "fig2_r3")):
        mesh = sphere_exp_mesh(SphereGrid(nphi, ngamma, radius))
        name = f"fig2_sphere_r{int(radius)}.{ext}"
        _write_mesh(mesh, out_dir / name, ext)
        manifest["figures"][key] = {
            "file": name,
            "kind": "sphere_exp_mesh",
            "radius": radius,
            "n_phi": nphi,
            "n_gamma": ngamma,
        }

    half = ball_cutaway_mesh(5.0, (0.0, 1.0, 0.0), n_phi=nphi, n_gamma=ngamma)
    name = f"fig3_half_ball_r5.{ext}"
    _write_mesh(half, out_dir / name, ext)
    manifest["figures"]["fig3"] = {
        "file": name,
        "kind": "ball_cutaway_mesh",
        "radius": 5.0,
        "cut_normal": [0.0, 1.0, 0.0],
        "n_phi": nphi,
        "n_gamma": ngamma,
    }

    for radius, window, key in ((5.0, 0.08, "fig4"), (20.0, 0.05, "fig5")):
        closeup = singular_point_closeup(
            radius,
            window=window,
            resolution=_FIGURE_CLOSEUP_RESOLUTION,
            detection_grid=(nphi, ngamma),
        )
        name = f"{key}_singular_closeup_r{int(radius)}.{ext}"
        _write_mesh(closeup, out_dir / name, ext)
        manifest["figures"][key] = {
            "file": name,
            "kind": "singular_point_closeup",
            "radius": radius,
            "window": window,
            "resolution": list(_FIGURE_CLOSEUP_RESOLUTION),
            "detection_grid": [nphi, ngamma],
        }

    with open(out_dir / "manifest.json", "w", newline="\n") as handle:
        json.dump(manifest, handle, sort_keys=True, indent=2)
        handle.write("\n")
    return EXIT_OK


def _cmd_distance(args) -> int:
    if not args.tol > 0.0:
        raise ValueError("--tol must be positive")
    if args.metric == "cygan":
        if args.all_candidates:
            raise ValueError("--all-candidates applies to the riemannian metric only")
        _write_lines([format_float(cygan_distance(args.p, args.q))], args.out)
        return EXIT_OK
    if args.all_candidates:
        from .core import group_inv, group_mul

        if args.p == args.q:
            raise ValueError("candidate listing needs two distinct points")
        delta = group_mul(group_inv(args.p), args.q)
        candidates = shoot_candidates(delta, tol=args.tol)
        lines = []
        for cand in candidates:
            record = {
                "gamma": cand.spec.gamma,
                "phi": cand.spec.phi,
                "s": cand.s,
                "residual": cand.residual,
            }
            if cand.axis_family:
                record["axis_family"] = True
            lines.append(json.dumps(record, sort_keys=True))
        _write_lines(lines, args.out)
        return EXIT_OK
    _write_lines([format_float(riemannian_distance(args.p, args.q, tol=args.tol))], args.out)
    return EXIT_OK


def _frame_combination(vec) -> str:
    parts = []
    for coeff, name in zip((vec.a, vec.b, vec.c), FRAME_NAMES):
        if coeff == 0.0:
            continue
        if coeff == 1.0:
            parts.append(name)
        elif coeff == -1.0:
            parts.append(f"-{name}")
        else:
            parts.append(f"{format_float(coeff)}*{name}")
    return " + ".join(parts) if parts else "0"


def _cmd_curvature(args) -> int:
    lines = ["sectional curvatures of the orthonormal frame planes:"]
    for i, j in ((1, 2), (1, 3), (2, 3)):
        value = sectional_curvature(i, j)
        lines.append(
            f"  K({FRAME_NAMES[i - 1]},{FRAME_NAMES[j - 1]}) = {format_float(value)}"
        )
    lines.append("connection table (row acts on column):")
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            lines.append(
                f"  nabla_{FRAME_NAMES[i - 1]} {FRAME_NAMES[j - 1]} = "
                f"{_frame_combination(nabla(i, j))}"
            )
    _write_lines(lines, args.out)
    return EXIT_OK


_COMMANDS = {
    "geodesic": _cmd_geodesic,
    "sphere": _cmd_sphere,
    "surface": _cmd_surface,
    "figures": _cmd_figures,
    "distance": _cmd_distance,
    "curvature": _cmd_curvature,
}

# Options that must be present after merging command line and config file.
_REQUIRED = {
    "geodesic": ("gamma", "smax"),
    "sphere": ("radius", "out"),
    "surface": ("out",),
    "figures": ("out_dir",),
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"heisgeo: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"heisgeo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for dest in _REQUIRED.get(args.command, ()):
        if getattr(args, dest) is None:
            flag = "--" + dest.replace("_", "-")
            print(
                f"heisgeo: {flag} is required (flag or config file)", file=sys.stderr
            )
            return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"heisgeo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"heisgeo: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ShootingConvergenceError, TargetUnreachableError, NoSingularityError) as exc:
        print(f"heisgeo: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

"""Command-line entry point: ``lfdasc <subcommand> ...``.

Structured results are JSON and tabular ones CSV. Without ``-o`` they go to
stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .characterize import characterize
from .dasc import compute_dasc, factors_csv
from .display_model import CaptureParams, DisplayParams, capture_angular_resolution, optimal_radius
from .dof_render import render_all
from .imageio import read_png
from .lightfield import load_light_field, load_manifest, write_views
from .predictor import fit_sigmoid, load_model, sigmoid_eval, snap_radius
from .study_analysis import STUDY_RADII, analyze_scene, ingest_votes

log = logging.getLogger("lfdasc")

DEFAULT_R_HAT = optimal_radius(DisplayParams().angular_resolution_deg,
                               capture_angular_resolution(CaptureParams()))


class CliError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        log.info("wrote %s", path)


def _radii(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_dasc(args) -> None:
    result = compute_dasc(args.manifest)
    _emit(result.to_json(), args.output)
    if args.factors_csv:
        _emit(factors_csv(result), args.factors_csv)


def cmd_render(args) -> None:
    manifest = load_manifest(args.manifest)
    lf = load_light_field(manifest)
    bit_depth = args.bit_depth
    if bit_depth is None:
        bit_depth = 16 if read_png(manifest.view_path(0, 0)).dtype.itemsize == 2 else 8
    out = render_all(lf, args.radius)
    paths = write_views(out, args.outdir, manifest.pattern, bit_depth)
    log.info("radius %d: wrote %d views to %s", args.radius, len(paths), args.outdir)


def cmd_characterize(args) -> None:
    manifest = load_manifest(args.manifest)
    report = characterize(load_light_field(manifest), manifest.scene)
    _emit(report.to_csv(), args.output)


def cmd_analyze(args) -> None:
    radii = args.radii or list(STUDY_RADII)
    matrices = ingest_votes(args.votes, radii)
    results = [analyze_scene(m, args.r_hat, smoothing=args.smoothing) for m in matrices]
    _emit(json.dumps({"r_hat": args.r_hat, "scenes": results}, indent=2), args.output)


def _read_points(path: str) -> list[tuple[float, float]]:
    points = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and row[0].strip().lower() == "f":
                continue
            if len(row) != 2:
                raise CliError(f"{path}: line {lineno}: expected 'f,radius'")
            try:
                points.append((float(row[0]), float(row[1])))
            except ValueError:
                raise CliError(f"{path}: line {lineno}: non-numeric value") from None
    return points


def cmd_fit(args) -> None:
    model = fit_sigmoid(_read_points(args.points))
    _emit(model.to_json(), args.output)


def cmd_predict(args) -> None:
    model = load_model(args.model)
    if args.f is not None:
        f = args.f
    else:
        f = compute_dasc(args.manifest).score_f
    available = args.radii or list(STUDY_RADII)
    raw = sigmoid_eval(model, f)
    out = {"f": f, "raw_radius": raw, "radius": snap_radius(raw, available), "available": sorted(available)}
    _emit(json.dumps(out, indent=2), args.output)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lfdasc", description="DoF-aware scene complexity toolkit for light field displays.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="increase log verbosity (repeatable)")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("dasc", help="compute the DASC score of a scene")
    s.add_argument("manifest", help="scene manifest JSON")
    s.add_argument("-o", "--output", help="result JSON path (default: stdout)")
    s.add_argument("--factors-csv", help="also write per-object factors as CSV")
    s.set_defaults(func=cmd_dasc)

    s = sub.add_parser("render", help="DoF anti-aliasing by circular angular filtering")
    s.add_argument("--radius", type=int, required=True, help="filter radius in views (>= 0)")
    s.add_argument("--bit-depth", type=int, choices=(8, 16), help="output PNG depth (default: same as input)")
    s.add_argument("manifest", help="scene manifest JSON")
    s.add_argument("outdir", help="directory for filtered views")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("characterize", help="SI/TI/colourfulness/contrast report")
    s.add_argument("manifest", help="scene manifest JSON")
    s.add_argument("-o", "--output", help="report CSV path (default: stdout)")
    s.set_defaults(func=cmd_characterize)

    s = sub.add_parser("analyze", help="Bradley-Terry, LRT and preferred radius per scene")
    s.add_argument("--votes", required=True, help="CSV rows: participant,scene,radius_a,radius_b,choice")
    s.add_argument("--r-hat", type=int, default=DEFAULT_R_HAT,
                   help=f"display-optimal radius (default: {DEFAULT_R_HAT})")
    s.add_argument("--radii", type=_radii, help="allowed radii, comma-separated (default: 0,3,6,9,12,15)")
    s.add_argument("--smoothing", type=float, default=None,
                   help="pseudo-wins added to every pair for stimuli that never win")
    s.add_argument("-o", "--output", help="result JSON path (default: stdout)")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("fit", help="fit the sigmoid radius model")
    s.add_argument("--points", required=True, help="CSV rows: f,radius")
    s.add_argument("-o", "--output", help="model JSON path (default: stdout)")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("predict", help="predict the blur radius for a DASC score")
    s.add_argument("--model", required=True, help="model JSON path, or 'reference' for the built-in coefficients")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--f", type=float, help="DASC score")
    g.add_argument("--manifest", help="compute the score from this scene manifest")
    s.add_argument("--radii", type=_radii, help="radii to snap to (default: 0,3,6,9,12,15)")
    s.add_argument("-o", "--output", help="result JSON path (default: stdout)")
    s.set_defaults(func=cmd_predict)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "radius", 0) is not None and getattr(args, "radius", 0) < 0:
        parser.error("--radius must be non-negative")
    try:
        args.func(args)
    except (CliError, OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"lfdasc: error: {exc}", file=sys.stderr)
        return 1
    return 0


def run(argv: list[str]) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())

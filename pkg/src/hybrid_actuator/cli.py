"""Command-line front end.

File units are kPa, mm, degrees and N. Exit codes: 0 success, 1 usage or
configuration error, 2 model or validation failure, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .calibration import (
    CalibrationError,
    IdentifiabilityError,
    fit_parameters,
    load_dataset,
)
from .geometry import ActuatorGeometry, inflate
from .kinematics import TRAJECTORY_COLUMNS, trajectory
from .oracle import (
    FLAT_WALL_GRID_POINTS,
    FLAT_WALL_RANGE,
    FLAT_WALL_TOLERANCE,
    REPORT_COLUMNS,
    QuadratureError,
    approximation_report,
    fit_flat_wall_height,
    flat_wall_grid,
)
from .statics import CalibratedParams, bending_angle, blocked_force, coefficients_for

SCHEMA_VERSION = 1
CONFIG_DIR_ENV = "HYBRID_ACTUATOR_CONFIG_DIR"
DEFAULT_PARAMS = CalibratedParams(mu=0.07, m_f_max=5.0)
DEFAULT_PRESSURES = "0:130:1"

# sweep names -> geometry fields, in row-ordering priority
SWEEP_FIELDS = {"a": "a", "b": "b", "t": "t", "l": "l", "R": "big_r", "d": "d", "n": "n", "H": "h_flat"}

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ModelFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(spec: str) -> list[float]:
    """``lo:hi:step`` (inclusive) or ``v1,v2,...``."""
    try:
        if ":" in spec:
            lo, hi, step = (float(x) for x in spec.split(":"))
            if step <= 0 or hi < lo:
                raise UsageError(f"bad range {spec!r}")
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [round(lo + i * step, 12) for i in range(count)]
        values = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad range {spec!r}: {exc}") from None
    if not values:
        raise UsageError(f"empty range {spec!r}")
    return values


def _config_path(explicit: str | None, name: str) -> Path | None:
    if explicit:
        return Path(explicit)
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / name).is_file():
        return Path(base) / name
    return None


def load_geometry(args) -> ActuatorGeometry:
    path = _config_path(args.geometry, "geometry.json")
    try:
        geom = ActuatorGeometry.from_json(path) if path else ActuatorGeometry()
        if getattr(args, "segments", None) is not None:
            geom = geom.replace(n=args.segments)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"geometry: {exc}") from None
    return geom


def load_params(args) -> CalibratedParams:
    mu, mf = DEFAULT_PARAMS.mu, DEFAULT_PARAMS.m_f_max
    path = _config_path(args.params, "params.json")
    try:
        if path:
            data = json.loads(Path(path).read_text())
            mu, mf = float(data["mu_mpa"]), float(data["mf_max_nmm"])
        if args.mu is not None:
            mu = args.mu
        if args.mf_max is not None:
            mf = args.mf_max
        return CalibratedParams(mu, mf)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"parameters: {exc}") from None


def assumptions(geom: ActuatorGeometry, params: CalibratedParams | None = None) -> dict:
    out = {"geometry": geom.to_dict()}
    if params is not None:
        out["mu_mpa"] = params.mu
        out["mf_max_nmm"] = params.m_f_max
    return out


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def render(command: str, columns, rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command,
               "assumptions": meta, "columns": list(columns), "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# assumptions: {json.dumps(meta, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _pressures(args) -> list[float]:
    values = parse_range(args.pressures)
    if any(p < 0 for p in values):
        raise UsageError("pressures must be non-negative")
    return values


def bend_rows(geom, params, pressures) -> list[dict]:
    coeffs = coefficients_for(geom, params)
    rows = []
    for p in pressures:
        total, theta_i = bending_angle(p / 1000.0, coeffs, geom.n)
        rows.append({"pressure_kpa": p, "theta_total_deg": math.degrees(total),
                     "theta_i_deg": math.degrees(theta_i)})
    return rows


def force_rows(geom, params, pressures) -> list[dict]:
    coeffs = coefficients_for(geom, params)
    return [{"pressure_kpa": p, "force_n": blocked_force(p / 1000.0, coeffs, geom.l_star)}
            for p in pressures]


def cmd_bend(args) -> int:
    geom, params = load_geometry(args), load_params(args)
    rows = bend_rows(geom, params, _pressures(args))
    emit(render("bend", ("pressure_kpa", "theta_total_deg", "theta_i_deg"), rows,
                assumptions(geom, params), args.format), args.out)
    return EXIT_OK


def cmd_force(args) -> int:
    geom, params = load_geometry(args), load_params(args)
    rows = force_rows(geom, params, _pressures(args))
    emit(render("force", ("pressure_kpa", "force_n"), rows,
                assumptions(geom, params), args.format), args.out)
    return EXIT_OK


def cmd_trajectory(args) -> int:
    geom, params = load_geometry(args), load_params(args)
    pressures = _pressures(args)
    try:
        traj = trajectory(geom, coefficients_for(geom, params), pressures,
                          convention=args.convention)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [dict(zip(TRAJECTORY_COLUMNS, s)) for s in traj.samples]
    meta = assumptions(geom, params)
    meta["convention"] = args.convention
    emit(render("trajectory", TRAJECTORY_COLUMNS, rows, meta, args.format), args.out)
    return EXIT_OK


def cmd_validate_approx(args) -> int:
    geom, params = load_geometry(args), load_params(args)
    mat = params.material
    meta = assumptions(geom, params)
    if args.fit_h:
        h, err = fit_flat_wall_height(geom, None, mat)
        geom = geom.replace(h_flat=h)
        meta["fitted_h_flat"] = h
        meta["fitted_max_rel_err"] = err
    if geom.h_flat <= inflate(geom).t0:
        raise ModelFailure(f"flat wall height {geom.h_flat} does not exceed wall thickness")
    lo, hi = FLAT_WALL_RANGE
    grid = flat_wall_grid((lo, math.radians(args.max_angle)), args.points)
    rows = approximation_report(geom, mat, grid)
    worst = max(r["m_t_flat_rel_err"] for r in rows)
    meta["max_flat_rel_err"] = worst
    meta["tolerance"] = FLAT_WALL_TOLERANCE
    emit(render("validate-approx", REPORT_COLUMNS, rows, meta, args.format), args.out)
    if not worst < FLAT_WALL_TOLERANCE:
        raise ModelFailure(
            f"flat-wall error {worst:.4%} exceeds {FLAT_WALL_TOLERANCE:.0%} at H={geom.h_flat} mm"
        )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    geom = load_geometry(args)
    datasets = []
    for item in args.data:
        path, _, seg = item.partition("@")
        try:
            datasets.append(load_dataset(path, int(seg) if seg else args.data_segments))
        except (OSError, ValueError) as exc:
            raise UsageError(f"data: {exc}") from None
    _, report = fit_parameters(datasets, geom)
    doc = {"schema_version": SCHEMA_VERSION, **report, "assumptions": assumptions(geom)}
    emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _sweep_point(task):
    values, base, params, pressures = task
    geom = base.replace(**{SWEEP_FIELDS[k]: (int(v) if k == "n" else v) for k, v in values.items()})
    coeffs = coefficients_for(geom, params)
    rows = []
    for bend, force in zip(bend_rows(geom, params, pressures), force_rows(geom, params, pressures)):
        rows.append({**values, **bend, "force_n": force["force_n"],
                     "threshold_kpa": coeffs.threshold_pressure * 1000.0})
    return rows


def cmd_sweep(args) -> int:
    base, params = load_geometry(args), load_params(args)
    pressures = _pressures(args)
    ranges = {}
    for item in args.vary or []:
        name, sep, spec = item.partition("=")
        if not sep or name not in SWEEP_FIELDS:
            raise UsageError(f"--vary expects NAME=RANGE with NAME in {list(SWEEP_FIELDS)}")
        if name in ranges:
            raise UsageError(f"{name} varied twice")
        ranges[name] = parse_range(spec)
    names = [k for k in SWEEP_FIELDS if k in ranges]
    if not names:
        raise UsageError("sweep needs at least one --vary")
    tasks = [(dict(zip(names, combo)), base, params, pressures)
             for combo in itertools.product(*(ranges[k] for k in names))]
    try:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            chunks = list(pool.map(_sweep_point, tasks))
    except ValueError as exc:
        raise UsageError(f"sweep point invalid: {exc}") from None
    rows = [r for chunk in chunks for r in chunk]
    for r in rows:
        if "n" in r:
            r["n"] = int(r["n"])
    columns = (*names, "pressure_kpa", "theta_total_deg", "theta_i_deg", "force_n", "threshold_kpa")
    meta = assumptions(base, params)
    meta["vary"] = {k: ranges[k] for k in names}
    emit(render("sweep", columns, rows, meta, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--geometry", help="geometry JSON (mm)")
    common.add_argument("--segments", type=int, help="override segment count n")
    common.add_argument("--mu", type=float, help="shear modulus, MPa")
    common.add_argument("--mf-max", dest="mf_max", type=float, help="friction limit, N*mm")
    common.add_argument("--params", help="calibration JSON with mu_mpa and mf_max_nmm")
    common.add_argument("--pressures", default=DEFAULT_PRESSURES, help="lo:hi:step in kPa")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(prog="hybrid-actuator", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bend", parents=[common], help="pressure -> bending angle")
    p.set_defaults(func=cmd_bend)
    p = sub.add_parser("force", parents=[common], help="pressure -> blocked tip force")
    p.set_defaults(func=cmd_force)
    p = sub.add_parser("trajectory", parents=[common], help="tip path over a pressure sweep")
    p.add_argument("--convention", choices=("printed", "clamped"), default="printed")
    p.set_defaults(func=cmd_trajectory)
    p = sub.add_parser("validate-approx", parents=[common], help="closed forms vs quadrature")
    p.add_argument("--fit-h", action="store_true", help="fit H before validating")
    p.add_argument("--max-angle", type=float, default=30.0, help="deg")
    p.add_argument("--points", type=int, default=FLAT_WALL_GRID_POINTS)
    p.set_defaults(func=cmd_validate_approx)
    p = sub.add_parser("calibrate", parents=[common], help="fit mu and friction limit")
    p.add_argument("data", nargs="+", help="CSV file, optionally PATH@SEGMENTS")
    p.add_argument("--data-segments", type=int, default=8)
    p.set_defaults(func=cmd_calibrate)
    p = sub.add_parser("sweep", parents=[common], help="grid over geometry parameters")
    p.add_argument("--vary", action="append", metavar="NAME=RANGE")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, CalibrationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ModelFailure, IdentifiabilityError) as exc:
        print(f"model failure: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"model failure: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())

"""Quadrature reference for the wall torques and the flat-wall height fit.

The closed forms in :mod:`hybrid_actuator.statics` are checked against direct
numerical integration of the stress resultants here. Quadrature is composite
Gauss-Legendre with global panel doubling; it is deterministic for fixed
settings.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .geometry import (
    ActuatorGeometry,
    InflatedState,
    bottom_stretch,
    inflate,
    top_stretch_exact,
)
from .material import (
    HyperelasticMaterial,
    LinearizedModulus,
    stress_bottom_length,
    stress_top_length,
)
from .statics import (
    bottom_torque_approx,
    top_torque_approx,
    top_wall_terms,
    wall_moduli,
)

REPORT_COLUMNS = (
    "theta_deg",
    "m_t_exact",
    "m_t_approx",
    "m_t_rel_err",
    "m_b_exact",
    "m_b_approx",
    "m_b_rel_err",
    # flat-wall check alone: curved wall and flat wall under the same affine stress
    "m_t_flat_ref",
    "m_t_flat_rel_err",
)

#: joint-angle window (rad) over which the flat wall is expected to hold
FLAT_WALL_RANGE = (0.0, math.radians(30.0))
FLAT_WALL_GRID_POINTS = 61
FLAT_WALL_TOLERANCE = 0.04


class QuadratureError(RuntimeError):
    """Raised when refinement stops before the tolerance is met."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (last estimate {estimate!r})")
        self.estimate = estimate


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-13
    max_refinements: int = 12
    order: int = 8
    initial_panels: int = 2

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_refinements < 1 or self.initial_panels < 1 or self.order < 1:
            raise ValueError("max_refinements, initial_panels and order must be >= 1")


DEFAULT_SETTINGS = QuadratureSettings()


@lru_cache(maxsize=None)
def _gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panel_rule(lo: float, hi: float, panels: int, order: int):
    x, w = _gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _converged(new: float, old: float, settings: QuadratureSettings) -> bool:
    return abs(new - old) <= max(settings.abs_tol, settings.rel_tol * abs(new))


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Integrate a vectorized ``f`` over [lo, hi]."""
    panels = settings.initial_panels
    nodes, weights = _panel_rule(lo, hi, panels, settings.order)
    estimate = float(np.dot(weights, f(nodes)))
    for _ in range(settings.max_refinements):
        panels *= 2
        nodes, weights = _panel_rule(lo, hi, panels, settings.order)
        refined = float(np.dot(weights, f(nodes)))
        if _converged(refined, estimate, settings):
            return refined
        estimate = refined
    raise QuadratureError("1D quadrature did not converge", estimate)


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Tensor-product rule over a rectangle; ``f(x, y)`` receives broadcast grids."""

    def estimate_at(panels: int) -> float:
        x, wx = _panel_rule(*x_range, panels, settings.order)
        y, wy = _panel_rule(*y_range, panels, settings.order)
        values = f(x[:, None], y[None, :])
        return float(wx @ values @ wy)

    panels = settings.initial_panels
    estimate = estimate_at(panels)
    for _ in range(settings.max_refinements):
        panels *= 2
        refined = estimate_at(panels)
        if _converged(refined, estimate, settings):
            return refined
        estimate = refined
    raise QuadratureError("2D quadrature did not converge", estimate)


def _check_angle(theta_i: float) -> None:
    if theta_i < 0:
        raise ValueError(f"joint angle must be non-negative, got {theta_i}")


def bottom_torque_exact(
    theta_i: float,
    geom: ActuatorGeometry,
    mat: HyperelasticMaterial,
    linearized: LinearizedModulus | None = None,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Bottom-wall torque by quadrature over the wall height [d, d + t].

    Uses the full Neo-Hookean stress unless ``linearized`` is given.
    """
    _check_angle(theta_i)
    width = geom.b + 2 * geom.t

    def integrand(beta):
        lam = bottom_stretch(beta, theta_i, geom.l)
        if linearized is None:
            s = stress_bottom_length(mat, lam)
        else:
            s = linearized.stress(lam)
        return s * width * beta

    return integrate_1d(integrand, geom.d, geom.d + geom.t, settings)


def top_torque_exact(
    theta_i: float,
    geom: ActuatorGeometry,
    inflated: InflatedState,
    mat: HyperelasticMaterial,
    linearized: LinearizedModulus | None = None,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Top-wall torque integrated over the semicircular wall.

    Integrates over shell angle phi in [0, pi/2] and depth tau in [0, t0] and
    doubles for the symmetric half. Stress is Neo-Hookean at the inflated
    hoop stretch unless ``linearized`` is given.
    """
    _check_angle(theta_i)
    r0 = inflated.r0
    base = geom.t + geom.d

    def integrand(phi, tau):
        lam = top_stretch_exact(phi, tau, theta_i, geom, inflated)
        if linearized is None:
            s = stress_top_length(mat, lam, inflated.lt2)
        else:
            s = linearized.stress(lam)
        radius = r0 + tau
        return s * (radius * np.sin(phi) + base) * radius

    return 2.0 * integrate_2d(integrand, (0.0, math.pi / 2), (0.0, inflated.t0), settings)


def pressure_torque_exact(
    p_in: float,
    geom: ActuatorGeometry,
    inflated: InflatedState,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Pressure torque from the projected-area integrand over [0, pi/2]."""
    r0 = inflated.r0
    c = geom.t + geom.d

    def integrand(th):
        return p_in * (2 * r0 * np.cos(th)) * (r0 * np.sin(th) + c) * r0 * np.cos(th)

    return integrate_1d(integrand, 0.0, math.pi / 2, settings)


def flat_wall_grid(theta_range=FLAT_WALL_RANGE, points: int = FLAT_WALL_GRID_POINTS) -> np.ndarray:
    """Uniform grid over (lo, hi]; the open end excludes the straight pose."""
    lo, hi = theta_range
    if points == 1 or hi == lo:
        return np.array([hi])
    return np.linspace(lo, hi, points + 1)[1:] if lo == 0 else np.linspace(lo, hi, points)


def _relative_error(approx, exact):
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    out = np.zeros_like(exact)
    nonzero = exact != 0
    out[nonzero] = np.abs(approx[nonzero] - exact[nonzero]) / np.abs(exact[nonzero])
    # exact zero: error is zero only if the approximation is zero too
    out[~nonzero] = np.where(approx[~nonzero] == 0, 0.0, np.inf)
    return out


def flat_wall_errors(
    geom: ActuatorGeometry,
    mat: HyperelasticMaterial,
    thetas: Sequence[float],
    h_flat: float | None = None,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Relative error of the flat top wall against the curved one, per angle.

    Both sides carry the same affine stress, so only the geometric
    substitution is measured.
    """
    inflated = inflate(geom)
    et, _ = wall_moduli(mat, inflated)
    exact = [top_torque_exact(th, geom, inflated, mat, et, settings) for th in thetas]
    approx = [top_torque_approx(th, geom, inflated, et, h_flat) for th in thetas]
    return _relative_error(approx, exact)


def _golden_section(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    inv_phi = (math.sqrt(5) - 1) / 2
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo)):
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def fit_flat_wall_height(
    geom: ActuatorGeometry,
    inflated: InflatedState | None,
    mat: HyperelasticMaterial,
    theta_range: tuple[float, float] = FLAT_WALL_RANGE,
    points: int = FLAT_WALL_GRID_POINTS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    scan_step: float = 0.01,
) -> tuple[float, float]:
    """Flat-wall height H (mm) minimizing the worst relative torque error.

    Returns ``(h, max_rel_err)``. A 0.01 mm scan over [t0, 2R] brackets the
    optimum, then golden-section search refines it inside that bracket.
    """
    lo_th, hi_th = theta_range
    if not (0 <= lo_th <= hi_th <= math.pi / 2) or hi_th <= 0:
        raise ValueError(f"theta_range must lie within (0, pi/2], got {theta_range}")
    if inflated is None:
        inflated = inflate(geom)
    et, _ = wall_moduli(mat, inflated)
    thetas = flat_wall_grid(theta_range, points)
    exact = np.array(
        [top_torque_exact(th, geom, inflated, mat, et, settings) for th in thetas]
    )
    if np.any(exact == 0):
        raise ValueError("exact top-wall torque vanishes; H is not identifiable")

    def worst(h: float) -> float:
        slope, const = top_wall_terms(geom, inflated, et, h)
        return float(np.max(np.abs(slope * thetas + const - exact) / np.abs(exact)))

    h_lo = inflated.t0 + scan_step
    h_hi = 2 * geom.big_r
    scan = np.arange(h_lo, h_hi + scan_step / 2, scan_step)
    values = np.array([worst(h) for h in scan])
    if not np.all(np.isfinite(values)):
        raise RuntimeError("flat-wall objective is not finite on the scan grid")
    k = int(np.argmin(values))
    bracket = (scan[max(k - 1, 0)], scan[min(k + 1, len(scan) - 1)])
    h, err = _golden_section(worst, *bracket)
    if values[k] < err:
        h, err = float(scan[k]), float(values[k])
    return float(h), float(err)


def approximation_report(
    geom: ActuatorGeometry,
    mat: HyperelasticMaterial,
    grid: Sequence[float],
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> list[dict]:
    """Exact vs closed-form wall torques over a grid of joint angles (rad).

    ``m_*_exact`` use the full Neo-Hookean stress; ``m_t_flat_ref`` is the
    curved wall under the affine stress, isolating the flat-wall error.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("angle grid must not be empty")
    if any(th < 0 for th in grid):
        raise ValueError("angles must be non-negative")
    inflated = inflate(geom)
    et, eb = wall_moduli(mat, inflated)
    rows = []
    for th in grid:
        mt_exact = top_torque_exact(th, geom, inflated, mat, None, settings)
        mt_approx = top_torque_approx(th, geom, inflated, et)
        mt_flat_ref = top_torque_exact(th, geom, inflated, mat, et, settings)
        mb_exact = bottom_torque_exact(th, geom, mat, None, settings)
        mb_approx = bottom_torque_approx(th, geom, eb)
        rows.append({
            "theta_deg": math.degrees(th),
            "m_t_exact": mt_exact,
            "m_t_approx": mt_approx,
            "m_t_rel_err": float(_relative_error([mt_approx], [mt_exact])[0]),
            "m_b_exact": mb_exact,
            "m_b_approx": mb_approx,
            "m_b_rel_err": float(_relative_error([mb_approx], [mb_exact])[0]),
            "m_t_flat_ref": mt_flat_ref,
            "m_t_flat_rel_err": float(_relative_error([mt_approx], [mt_flat_ref])[0]),
        })
    return rows


def report_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow([repr(float(row[c])) for c in REPORT_COLUMNS])
    return buf.getvalue()

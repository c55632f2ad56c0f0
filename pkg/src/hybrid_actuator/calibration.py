"""Fit shear modulus and friction limit to bending or blocked-force data."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .geometry import ActuatorGeometry, inflate
from .material import HyperelasticMaterial
from .statics import CalibratedParams, bending_angle, blocked_force, model_coefficients

MU_BOUNDS = (0.001, 10.0)  # MPa
MF_BOUNDS = (0.0, 1000.0)  # N*mm
#: multi-start grid over (mu, m_f_max)
STARTS = ((0.02, 1.0), (0.02, 20.0), (0.2, 1.0), (0.2, 20.0))


class DataKind(str, Enum):
    BEND = "bend"
    FORCE = "force"


_HEADERS = {
    ("pressure_kpa", "angle_deg"): DataKind.BEND,
    ("pressure_kpa", "force_n"): DataKind.FORCE,
}


class IdentifiabilityError(ValueError):
    """The data cannot pin down both parameters."""


class CalibrationError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class ExperimentDataset:
    """Pressure sweep in file units: kPa and either degrees (bend) or N (force)."""

    kind: DataKind
    samples: tuple[tuple[float, float], ...]
    config_label: str = ""
    n_segments: int = 8

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DataKind(self.kind))
        object.__setattr__(
            self, "samples", tuple((float(p), float(v)) for p, v in self.samples)
        )
        if len(self.samples) < 3:
            raise ValueError("a dataset needs at least 3 samples")
        if any(p < 0 for p, _ in self.samples):
            raise ValueError("pressures must be non-negative")
        if self.n_segments < 2:
            raise ValueError("n_segments must be >= 2")

    @property
    def pressures_kpa(self) -> np.ndarray:
        return np.array([p for p, _ in self.samples])

    @property
    def measurements(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])


def load_dataset(path: str | Path, n_segments: int = 8, label: str | None = None) -> ExperimentDataset:
    """Read a two-column CSV; ``#`` lines are skipped and the header picks the kind."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.lstrip().startswith("#"))
                if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: no header")
    header = tuple(c.strip() for c in rows[0])
    if header not in _HEADERS:
        raise ValueError(
            f"{path}: header must be pressure_kpa,angle_deg or pressure_kpa,force_n, got {','.join(header)}"
        )
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ValueError(f"{path}: row {lineno} has {len(row)} fields")
        samples.append((float(row[0]), float(row[1])))
    return ExperimentDataset(_HEADERS[header], tuple(samples), label or path.stem, n_segments)


def predict(params: CalibratedParams, data: ExperimentDataset, geom: ActuatorGeometry) -> np.ndarray:
    """Model output in file units (deg or N) at each sample pressure."""
    coeffs = model_coefficients(geom, inflate(geom), params.material, params.m_f_max)
    p_mpa = data.pressures_kpa / 1000.0
    if data.kind is DataKind.BEND:
        return np.array([math.degrees(bending_angle(p, coeffs, data.n_segments)[0]) for p in p_mpa])
    return np.array([blocked_force(p, coeffs, geom.l_star) for p in p_mpa])


def residual_report(params: CalibratedParams, data: ExperimentDataset, geom: ActuatorGeometry) -> list[dict]:
    predicted = predict(params, data, geom)
    return [
        {"pressure_kpa": p, "measured": m, "predicted": float(f), "residual": float(m - f)}
        for (p, m), f in zip(data.samples, predicted)
    ]


def rmse(report: list[dict]) -> float:
    return math.sqrt(sum(r["residual"] ** 2 for r in report) / len(report))


def _as_list(data) -> list[ExperimentDataset]:
    return [data] if isinstance(data, ExperimentDataset) else list(data)


def _check_identifiable(datasets: list[ExperimentDataset]) -> None:
    # a dataset with no positive measurement carries only the clamp
    active = [ds for ds in datasets
              if np.any(ds.measurements > 0) and np.any(ds.pressures_kpa > 0)]
    if not active:
        raise IdentifiabilityError("no sample above the threshold pressure; parameters are unidentifiable")
    # force slope is k1 / l_star, free of mu: force data only fixes mu * k2_unit + m_f_max
    if not any(ds.kind is DataKind.BEND for ds in active):
        raise IdentifiabilityError(
            "blocked-force data alone fixes only a combination of mu and m_f_max; add a bending dataset"
        )


def fit_parameters(
    data: ExperimentDataset | Sequence[ExperimentDataset],
    geom: ActuatorGeometry,
    starts: Sequence[tuple[float, float]] = STARTS,
) -> tuple[CalibratedParams, dict]:
    """Least-squares fit of ``(mu, m_f_max)`` shared across one or more datasets.

    Nelder-Mead from each start in ``starts``; the lowest RMSE wins, ties
    going to the smaller ``mu``. Returns the parameters and a JSON-ready report.
    """
    datasets = _as_list(data)
    if not datasets:
        raise ValueError("no datasets given")
    _check_identifiable(datasets)
    inflated = inflate(geom)

    # wall moduli are linear in mu, so fit them once at mu = 1 and rescale
    unit = model_coefficients(geom, inflated, HyperelasticMaterial(1.0), 0.0)
    p_mpa = [ds.pressures_kpa / 1000.0 for ds in datasets]
    meas = [ds.measurements for ds in datasets]
    total = sum(len(m) for m in meas)

    def sse(x) -> float:
        mu, mf = x
        k2 = unit.k2 * mu + mf
        k3 = unit.k3 * mu
        out = 0.0
        for ds, p, m in zip(datasets, p_mpa, meas):
            drive = np.maximum(0.0, unit.k1 * p - k2)
            if ds.kind is DataKind.BEND:
                pred = np.degrees((ds.n_segments - 1) * drive / k3)
            else:
                pred = drive / geom.l_star
            out += float(np.sum((m - pred) ** 2))
        return out

    bounds = [MU_BOUNDS, MF_BOUNDS]
    results = []
    for x0 in starts:
        res = minimize(sse, x0, method="Nelder-Mead", bounds=bounds,
                       options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": 4000, "maxfev": 8000})
        results.append(res)
    ok = [r for r in results if r.success and np.all(np.isfinite(r.x))]
    if not ok:
        raise CalibrationError(
            "optimizer did not converge from any start",
            {"starts": [list(x0) for x0 in starts],
             "messages": [r.message for r in results],
             "x": [r.x.tolist() for r in results],
             "sse": [float(r.fun) for r in results]},
        )
    best = min(ok, key=lambda r: (round(math.sqrt(r.fun / total), 12), r.x[0]))
    params = CalibratedParams(float(best.x[0]), float(best.x[1]))

    per_point = []
    for ds in datasets:
        for row in residual_report(params, ds, geom):
            per_point.append({"dataset": ds.config_label, "kind": ds.kind.value,
                              "n_segments": ds.n_segments, **row})
    report = {
        "mu_mpa": params.mu,
        "mf_max_nmm": params.m_f_max,
        "rmse": rmse(per_point),
        "n_samples": total,
        "per_point": per_point,
    }
    return params, report

"""Joint torque balance, bending law and blocked force.

Every torque here is per joint, in N*mm, with pressure in MPa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ActuatorGeometry, InflatedState, inflate
from .material import (
    HyperelasticMaterial,
    LinearizedModulus,
    bottom_wall_modulus,
    top_wall_modulus,
)


@dataclass(frozen=True)
class TorqueBreakdown:
    """Joint torques in N*mm.

    ``m_f`` is signed like the pressure torque: friction resisting the
    bending stroke enters as ``-m_f_max``.
    """

    m_a: float
    m_t: float
    m_b: float
    m_f: float

    @property
    def residual(self) -> float:
        """Equilibrium residual ``m_a - m_t - m_b + m_f``; zero at the solved angle."""
        return self.m_a - self.m_t - self.m_b + self.m_f


@dataclass(frozen=True)
class ModelCoefficients:
    """Linear joint law ``k1 * p = k3 * theta_i + k2`` (mm^3, N*mm, N*mm/rad)."""

    k1: float
    k2: float
    k3: float

    @property
    def threshold_pressure(self) -> float:
        """Pressure (MPa) below which the actuator stays straight."""
        return self.k2 / self.k1


@dataclass(frozen=True)
class CalibratedParams:
    mu: float
    m_f_max: float

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.m_f_max >= 0:
            raise ValueError(f"m_f_max must be non-negative, got {self.m_f_max}")

    @property
    def material(self) -> HyperelasticMaterial:
        return HyperelasticMaterial(self.mu)


def _check_pressure(p_in: float) -> None:
    if p_in < 0:
        raise ValueError(f"relative pressure must be non-negative, got {p_in}")


def _check_angle(theta_i: float) -> None:
    if theta_i < 0:
        raise ValueError(f"joint angle must be non-negative, got {theta_i}")


def pressure_arm_volume(geom: ActuatorGeometry, inflated: InflatedState) -> float:
    """Pressure torque per unit pressure, mm^3."""
    r0 = inflated.r0
    return r0 * r0 * (3 * geom.d * math.pi + 4 * r0 + 3 * math.pi * geom.t) / 6.0


def pressure_torque(p_in: float, inflated: InflatedState, geom: ActuatorGeometry) -> float:
    _check_pressure(p_in)
    return p_in * pressure_arm_volume(geom, inflated)


def bottom_wall_terms(geom: ActuatorGeometry, eb: LinearizedModulus) -> tuple[float, float]:
    """(slope, constant) of the bottom-wall torque as an affine function of theta_i."""
    d, t, width = geom.d, geom.t, geom.b + 2 * geom.t
    slope = eb.e1 * width / (3 * geom.l) * ((d + t) ** 3 - d**3)
    const = eb.e2 * width / 2 * ((d + t) ** 2 - d**2)
    return slope, const


def top_wall_width(inflated: InflatedState) -> float:
    """Width of the flat wall standing in for the semicircular top wall.

    This is the mid-surface arc length of the half shell, so the flat wall
    carries the same material as the curved one.
    """
    return math.pi * (inflated.r0 + inflated.t0 / 2)


def top_wall_terms(
    geom: ActuatorGeometry, inflated: InflatedState, et: LinearizedModulus,
    h_flat: float | None = None,
) -> tuple[float, float]:
    h = geom.h_flat if h_flat is None else h_flat
    t0 = inflated.t0
    if h <= t0:
        raise ValueError(f"flat wall height {h} must exceed inflated wall thickness {t0}")
    width = top_wall_width(inflated)
    slope = et.e1 * width / (3 * geom.l) * (h**3 - (h - t0) ** 3)
    const = et.e2 * width / 2 * (h**2 - (h - t0) ** 2)
    return slope, const


def bottom_torque_approx(theta_i: float, geom: ActuatorGeometry, eb: LinearizedModulus) -> float:
    _check_angle(theta_i)
    slope, const = bottom_wall_terms(geom, eb)
    return slope * theta_i + const


def top_torque_approx(
    theta_i: float, geom: ActuatorGeometry, inflated: InflatedState, et: LinearizedModulus,
    h_flat: float | None = None,
) -> float:
    _check_angle(theta_i)
    slope, const = top_wall_terms(geom, inflated, et, h_flat)
    return slope * theta_i + const


def wall_moduli(mat: HyperelasticMaterial, inflated: InflatedState):
    """(top, bottom) linearized moduli for ``mat`` in the inflated state."""
    return top_wall_modulus(mat, inflated.lt2), bottom_wall_modulus(mat)


def model_coefficients(
    geom: ActuatorGeometry,
    inflated: InflatedState | None,
    mat: HyperelasticMaterial,
    m_f_max: float,
) -> ModelCoefficients:
    if inflated is None:
        inflated = inflate(geom)
    et, eb = wall_moduli(mat, inflated)
    b_slope, b_const = bottom_wall_terms(geom, eb)
    t_slope, t_const = top_wall_terms(geom, inflated, et)
    return ModelCoefficients(
        k1=pressure_arm_volume(geom, inflated),
        k2=b_const + t_const + m_f_max,
        k3=b_slope + t_slope,
    )


def coefficients_for(geom: ActuatorGeometry, params: CalibratedParams) -> ModelCoefficients:
    return model_coefficients(geom, inflate(geom), params.material, params.m_f_max)


def joint_angle(p_in: float, coeffs: ModelCoefficients) -> float:
    """Per-joint angle (rad); zero below the threshold pressure."""
    _check_pressure(p_in)
    return max(0.0, (coeffs.k1 * p_in - coeffs.k2) / coeffs.k3)


def bending_angle(p_in: float, coeffs: ModelCoefficients, n: int) -> tuple[float, float]:
    """(total, per-joint) bending angle in rad for an ``n``-segment actuator.

    The proximal segment is clamped, so ``n - 1`` joints contribute.
    """
    if n < 2:
        raise ValueError(f"need at least two segments, got {n}")
    theta_i = joint_angle(p_in, coeffs)
    return (n - 1) * theta_i, theta_i


def blocked_force(p_in: float, coeffs: ModelCoefficients, l_star: float) -> float:
    """Tip force (N) with the actuator held straight; moment balance about the last joint."""
    _check_pressure(p_in)
    if l_star <= 0:
        raise ValueError(f"l_star must be positive, got {l_star}")
    return max(0.0, (coeffs.k1 * p_in - coeffs.k2) / l_star)


def torque_breakdown(
    p_in: float,
    theta_i: float,
    geom: ActuatorGeometry,
    inflated: InflatedState,
    mat: HyperelasticMaterial,
    m_f_max: float,
) -> TorqueBreakdown:
    """All four joint torques with friction at its limit, opposing the stroke."""
    _check_pressure(p_in)
    _check_angle(theta_i)
    et, eb = wall_moduli(mat, inflated)
    return TorqueBreakdown(
        m_a=pressure_torque(p_in, inflated, geom),
        m_t=top_torque_approx(theta_i, geom, inflated, et),
        m_b=bottom_torque_approx(theta_i, geom, eb),
        m_f=-m_f_max,
    )


def bending_curve(pressures, coeffs: ModelCoefficients, n: int) -> np.ndarray:
    """Total bending angle (rad) for each pressure (MPa)."""
    return np.array([bending_angle(p, coeffs, n)[0] for p in pressures])


def force_curve(pressures, coeffs: ModelCoefficients, l_star: float) -> np.ndarray:
    return np.array([blocked_force(p, coeffs, l_star) for p in pressures])

"""Quasi-static model of a lobster-inspired hybrid rigid-soft pneumatic bending actuator.

Units are N, mm, MPa and radians throughout the library. Files and the CLI use
kPa and degrees; conversion happens only at that boundary.
"""

from .material import HyperelasticMaterial, LinearizedModulus
from .geometry import ActuatorGeometry, InflatedState, inflate
from .statics import (
    CalibratedParams,
    ModelCoefficients,
    TorqueBreakdown,
    bending_angle,
    blocked_force,
    model_coefficients,
)

__all__ = [
    "ActuatorGeometry",
    "CalibratedParams",
    "HyperelasticMaterial",
    "InflatedState",
    "LinearizedModulus",
    "ModelCoefficients",
    "TorqueBreakdown",
    "bending_angle",
    "blocked_force",
    "inflate",
    "model_coefficients",
]

__version__ = "0.1.0"

"""Actuator dimensions, the inflated chamber state and the wall stretch fields."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

# lengths in mm
DEFAULT_D = 1.0
DEFAULT_H_FLAT = 7.0


class NonConformingChamberWarning(UserWarning):
    """The inflated top wall is not stretched (hoop stretch <= 1)."""


@dataclass(frozen=True)
class ActuatorGeometry:
    """Cross-section and segment dimensions, all lengths in mm.

    ``d`` and ``l_star`` are not reported for the prototype; the defaults
    (1 mm and one link length) are assumptions and are echoed in every output.
    """

    a: float = 0.5
    b: float = 10.0
    t: float = 1.5
    l: float = 8.0
    big_r: float = 8.0
    d: float = DEFAULT_D
    n: int = 11
    l_star: float | None = None
    h_flat: float = DEFAULT_H_FLAT

    def __post_init__(self) -> None:
        if self.l_star is None:
            object.__setattr__(self, "l_star", self.l)
        for name in ("a", "b", "t", "l", "big_r", "d", "l_star", "h_flat"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive length, got {value}")
        if self.t >= self.big_r:
            raise ValueError("wall thickness t must be smaller than shell radius big_r")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"segment count n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def r(self) -> float:
        """Uninflated inner radius ``big_r - t``."""
        return self.big_r - self.t

    def replace(self, **changes) -> "ActuatorGeometry":
        return replace(self, **changes)

    def scaled(self, factor: float) -> "ActuatorGeometry":
        lengths = {k: getattr(self, k) * factor
                   for k in ("a", "b", "t", "l", "big_r", "d", "l_star", "h_flat")}
        return replace(self, **lengths)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ActuatorGeometry":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown geometry fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ActuatorGeometry":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("geometry JSON must be an object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class InflatedState:
    lt2: float
    t0: float
    r0: float

    @property
    def conforming(self) -> bool:
        return self.lt2 > 1.0


def inflate(geom: ActuatorGeometry) -> InflatedState:
    """Hoop stretch, thinned wall and inner radius once the chamber fills the shell."""
    perimeter = geom.b + 2 * geom.t + 2 * geom.a
    lt2 = (geom.r + geom.t / 2) * math.pi / perimeter
    if not math.isfinite(lt2):
        raise ValueError("non-finite hoop stretch")
    if lt2 <= 1.0:
        warnings.warn(
            f"hoop stretch {lt2:.6g} <= 1: chamber does not conform to the shell",
            NonConformingChamberWarning,
            stacklevel=2,
        )
    t0 = geom.t / lt2
    return InflatedState(lt2=lt2, t0=t0, r0=geom.big_r - t0)


def bottom_stretch(beta, theta_i, l: float):
    """Length stretch of a fibre at height ``beta`` above the joint axis."""
    return (np.asarray(beta) * theta_i + l) / l


def top_stretch_exact(phi, tau, theta_i, geom: ActuatorGeometry, inflated: InflatedState):
    """Length stretch in the semicircular top wall at angle ``phi``, depth ``tau``.

    The rest term ``l`` sits outside the ``theta_i`` product so the wall is
    unstretched when the joint is straight.
    """
    arm = geom.d + geom.t + (inflated.r0 + np.asarray(tau)) * np.sin(phi)
    return (arm * theta_i + geom.l) / geom.l


def top_stretch_flat(beta, theta_i, l: float):
    return bottom_stretch(beta, theta_i, l)

"""Planar forward kinematics of the hinged shell chain."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import ActuatorGeometry
from .statics import ModelCoefficients, bending_angle

TRAJECTORY_COLUMNS = ("pressure_kpa", "tip_x_mm", "tip_y_mm", "theta_total_deg")


@dataclass(frozen=True)
class ChainConfig:
    link_lengths: tuple[float, ...]
    joint_angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "link_lengths", tuple(float(x) for x in self.link_lengths))
        if not self.link_lengths:
            raise ValueError("chain needs at least one link")
        if any(x <= 0 for x in self.link_lengths):
            raise ValueError("link lengths must be positive")
        if self.joint_angle < 0:
            raise ValueError("joint angle must be non-negative")

    @classmethod
    def uniform(cls, n: int, length: float, joint_angle: float) -> "ChainConfig":
        return cls((length,) * n, joint_angle)


@dataclass(frozen=True)
class TipTrajectory:
    samples: tuple[tuple[float, float, float, float], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for row in self.samples:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _link_angles(config: ChainConfig) -> np.ndarray:
    # link i (1-based) points at i * theta
    return np.arange(1, len(config.link_lengths) + 1) * config.joint_angle


def forward_kinematics(config: ChainConfig) -> np.ndarray:
    """Tip position ``[sum l_i cos(i*theta), sum l_i sin(i*theta), 0]`` in mm.

    Every link, including the first, sits behind a joint. For a clamped
    proximal segment use :func:`clamped_tip`.
    """
    lengths = np.asarray(config.link_lengths)
    angles = _link_angles(config)
    return np.array([np.sum(lengths * np.cos(angles)), np.sum(lengths * np.sin(angles)), 0.0])


def joint_positions(config: ChainConfig) -> np.ndarray:
    """``(n + 1, 3)`` array of chain points from the origin to the tip."""
    lengths = np.asarray(config.link_lengths)
    angles = _link_angles(config)
    pts = np.zeros((len(lengths) + 1, 3))
    pts[1:, 0] = np.cumsum(lengths * np.cos(angles))
    pts[1:, 1] = np.cumsum(lengths * np.sin(angles))
    return pts


def chain_product_tip(link_lengths: Sequence[float], joint_angles: Sequence[float]) -> np.ndarray:
    """Tip from a product of planar homogeneous transforms (rotate, then translate).

    Independent of :func:`forward_kinematics`; used to cross-check it.
    """
    T = np.eye(3)
    for length, q in zip(link_lengths, joint_angles):
        c, s = math.cos(q), math.sin(q)
        T = T @ np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        T = T @ np.array([[1.0, 0.0, length], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    return np.array([T[0, 2], T[1, 2], 0.0])


def clamped_tip(config: ChainConfig) -> np.ndarray:
    """Tip with the proximal link held at zero angle, i.e. ``n - 1`` active joints.

    The distal link then points at ``(n - 1) * theta``, the total bending
    angle, whereas :func:`forward_kinematics` turns it by ``n * theta``.
    """
    n = len(config.link_lengths)
    return chain_product_tip(config.link_lengths, [0.0] + [config.joint_angle] * (n - 1))


def trajectory(
    geom: ActuatorGeometry,
    coeffs: ModelCoefficients,
    pressures_kpa: Sequence[float],
    link_lengths: Sequence[float] | None = None,
    convention: str = "printed",
) -> TipTrajectory:
    """Tip path over a pressure sweep, origin at the clamp.

    ``convention`` selects :func:`forward_kinematics` ("printed") or
    :func:`clamped_tip` ("clamped").
    """
    pressures = [float(p) for p in pressures_kpa]
    if any(b <= a for a, b in zip(pressures, pressures[1:])):
        raise ValueError("pressures must be strictly increasing")
    if convention not in ("printed", "clamped"):
        raise ValueError(f"unknown convention {convention!r}")
    lengths = tuple(link_lengths) if link_lengths is not None else (geom.l,) * geom.n
    tip_fn = forward_kinematics if convention == "printed" else clamped_tip
    samples = []
    for p in pressures:
        total, theta_i = bending_angle(p / 1000.0, coeffs, geom.n)
        tip = tip_fn(ChainConfig(lengths, theta_i))
        samples.append((p, float(tip[0]), float(tip[1]), math.degrees(total)))
    return TipTrajectory(tuple(samples))

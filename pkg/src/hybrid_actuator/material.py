"""Incompressible Neo-Hookean material and its affine linearization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

#: stretch window over which the wall stresses are linearized
WORKING_STRETCH = (1.0, 1.6)
#: number of uniform samples used by :func:`linearize_stress`
LINEARIZE_SAMPLES = 200


def _check_stretch(*stretches: float) -> None:
    for lam in stretches:
        if not np.all(np.asarray(lam) > 0):
            raise ValueError(f"stretch must be positive, got {lam!r}")


@dataclass(frozen=True)
class HyperelasticMaterial:
    """Neo-Hookean solid described by its initial shear modulus ``mu`` (MPa)."""

    mu: float

    def __post_init__(self) -> None:
        # mu == 0 is tolerated so that degenerate "no material" checks can run
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"shear modulus must be non-negative, got {self.mu}")

    def scaled(self, factor: float) -> "HyperelasticMaterial":
        return HyperelasticMaterial(self.mu * factor)


@dataclass(frozen=True)
class LinearizedModulus:
    """Affine stress law ``s = e1 * (stretch - 1) + e2`` fitted on ``[stretch_lo, stretch_hi]``."""

    e1: float
    e2: float
    stretch_lo: float = WORKING_STRETCH[0]
    stretch_hi: float = WORKING_STRETCH[1]

    def __post_init__(self) -> None:
        if self.stretch_lo < 1 or self.stretch_hi <= self.stretch_lo:
            raise ValueError(
                f"invalid stretch window [{self.stretch_lo}, {self.stretch_hi}]"
            )

    def stress(self, stretch):
        return self.e1 * (np.asarray(stretch) - 1.0) + self.e2


def first_invariant(l1: float, l2: float, l3: float) -> float:
    _check_stretch(l1, l2, l3)
    return l1 * l1 + l2 * l2 + l3 * l3


def strain_energy(mat: HyperelasticMaterial, l1: float, l2: float, l3: float) -> float:
    """Strain energy density ``mu/2 * (I1 - 1)``.

    The additive constant is kept as ``-1`` rather than the usual ``-3``; it
    drops out of every stress derivative, so nothing downstream depends on it.
    """
    return 0.5 * mat.mu * (first_invariant(l1, l2, l3) - 1.0)


def stress_top_length(mat: HyperelasticMaterial, lt1, lt2):
    """Nominal length-direction stress in the inflated top wall.

    ``lt2`` is the hoop stretch imposed by inflation; thickness is eliminated
    through incompressibility with a traction-free outer surface.
    """
    _check_stretch(lt1, lt2)
    lt1 = np.asarray(lt1, dtype=float)
    out = mat.mu * (lt1 - 1.0 / (lt2 * lt2 * lt1**3))
    return float(out) if out.ndim == 0 else out


def stress_bottom_length(mat: HyperelasticMaterial, lb1):
    _check_stretch(lb1)
    lb1 = np.asarray(lb1, dtype=float)
    out = mat.mu * (lb1 - 1.0 / lb1**3)
    return float(out) if out.ndim == 0 else out


def linearize_stress(
    stress_curve: Callable[[np.ndarray], np.ndarray],
    lo: float = WORKING_STRETCH[0],
    hi: float = WORKING_STRETCH[1],
    samples: int = LINEARIZE_SAMPLES,
) -> LinearizedModulus:
    """Least-squares affine fit of ``stress_curve`` on a uniform grid over [lo, hi]."""
    if not (hi > lo >= 1):
        raise ValueError(f"degenerate stretch interval [{lo}, {hi}]")
    lam = np.linspace(lo, hi, samples)
    s = np.asarray(stress_curve(lam), dtype=float)
    design = np.column_stack([lam - 1.0, np.ones_like(lam)])
    (e1, e2), *_ = np.linalg.lstsq(design, s, rcond=None)
    return LinearizedModulus(float(e1), float(e2), lo, hi)


def top_wall_modulus(mat: HyperelasticMaterial, lt2: float) -> LinearizedModulus:
    return linearize_stress(lambda lam: stress_top_length(mat, lam, lt2))


def bottom_wall_modulus(mat: HyperelasticMaterial) -> LinearizedModulus:
    return linearize_stress(lambda lam: stress_bottom_length(mat, lam))

"""Physical parameters and the two potentials of a bosonic quantum dot.

Atomic units throughout (hbar = m = 1, trap frequency 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhysicalParams:
    """N identical bosons in a d-dimensional isotropic harmonic trap.

    Parameters
    ----------
    n_particles : int
        Number of bosons N >= 1.
    dimension : int
        Spatial dimension, 1 or 2.
    screening : float
        Yukawa screening constant ``a`` (1/bohr), ``a >= 0``.
    softening : float
        Soft-core length ``b`` (bohr), strictly positive.
    interacting : bool
        If False the pair interaction is switched off entirely; used for
        the non-interacting reference runs.
    """

    n_particles: int
    dimension: int = 1
    screening: float = 0.0
    softening: float = 1.0
    interacting: bool = True

    def __post_init__(self):
        if int(self.n_particles) < 1:
            raise ValueError(f"n_particles must be >= 1, got {self.n_particles}")
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if not self.softening > 0:
            raise ValueError(f"softening b must be > 0, got {self.softening}")
        if not self.screening >= 0:
            raise ValueError(f"screening a must be >= 0, got {self.screening}")

    def with_particles(self, n: int) -> "PhysicalParams":
        return PhysicalParams(n, self.dimension, self.screening, self.softening, self.interacting)


def long_range(n_particles: int, dimension: int = 1) -> PhysicalParams:
    """Soft-core Coulomb preset, a = 0, b = 1."""
    return PhysicalParams(n_particles, dimension, screening=0.0, softening=1.0)


def short_range(n_particles: int, dimension: int = 1) -> PhysicalParams:
    """Screened preset, a = 3, b = 1."""
    return PhysicalParams(n_particles, dimension, screening=3.0, softening=1.0)


def core_potential(position) -> np.ndarray | float:
    """Harmonic trap |r|^2 / 2; the last axis of `position` is the vector axis."""
    r = np.asarray(position, dtype=float)
    if r.ndim == 0:
        return 0.5 * float(r) ** 2
    v = 0.5 * np.sum(r * r, axis=-1)
    return float(v) if np.ndim(v) == 0 else v


def pair_potential_of_distance(r, params: PhysicalParams) -> np.ndarray:
    """exp(-a r) / sqrt(r^2 + b^2) as a function of the separation r >= 0."""
    r = np.asarray(r, dtype=float)
    if not params.interacting:
        return np.zeros_like(r)
    v = 1.0 / np.sqrt(r * r + params.softening**2)
    if params.screening != 0.0:
        v = v * np.exp(-params.screening * r)
    return v


def pair_potential(r_i, r_j, params: PhysicalParams):
    """Yukawa soft-core repulsion between two particles at `r_i` and `r_j`.

    Broadcasts over leading axes; the last axis holds the d components
    (a scalar is accepted for 1D).
    """
    diff = np.asarray(r_i, dtype=float) - np.asarray(r_j, dtype=float)
    dist = np.abs(diff) if diff.ndim == 0 else np.sqrt(np.sum(diff * diff, axis=-1))
    v = pair_potential_of_distance(dist, params)
    return float(v) if np.ndim(v) == 0 else v

"""Uniform Dirichlet grid, finite-difference stencils and the imaginary-time
propagator for guide waves.

Field values are stored flat, length ``n**d``, C order (x index slowest).
Nodes sit at ``-L + i*h`` for ``i = 0..n-1`` with ``h = 2L/(n-1)``; the field
is taken to vanish on the ghost nodes just outside the domain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import ive

from . import _kernels


class CollapsedWaveError(ArithmeticError):
    """A guide wave lost its norm (dtau too large or the potential blew up)."""


class ProbeFlag(enum.IntFlag):
    NONE = 0
    CLAMPED = 1
    NODE = 2


@dataclass(frozen=True)
class Grid:
    half_extent: float
    points: int
    dimension: int = 1

    def __post_init__(self):
        if self.points < 16:
            raise ValueError(f"need at least 16 points per axis, got {self.points}")
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if not self.half_extent > 0:
            raise ValueError("half_extent must be positive")

    @classmethod
    def default(cls, dimension: int = 1) -> "Grid":
        return cls(8.0, 256, 1) if dimension == 1 else cls(5.0, 64, 2)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / (self.points - 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dimension

    @property
    def size(self) -> int:
        return self.points**self.dimension

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.half_extent + self.spacing * np.arange(self.points)

    @cached_property
    def coords(self) -> np.ndarray:
        """Node positions, shape ``(n**d, d)``."""
        if self.dimension == 1:
            return self.axis[:, None].copy()
        X, Y = np.meshgrid(self.axis, self.axis, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=-1)

    @cached_property
    def radius2(self) -> np.ndarray:
        return np.sum(self.coords**2, axis=-1)

    def contains(self, position) -> bool:
        p = np.atleast_1d(np.asarray(position, dtype=float))
        return bool(np.all(np.abs(p) <= self.half_extent))


@dataclass(frozen=True)
class ScalarField:
    """A real field sampled on every node of `grid`."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        object.__setattr__(self, "values", v)

    def norm(self) -> float:
        return float(np.sqrt(self.grid.cell_volume * np.dot(self.values, self.values)))

    def inner(self, other: "ScalarField") -> float:
        return float(self.grid.cell_volume * np.dot(self.values, other.values))

    def as_array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)


def gaussian_ground_state(grid: Grid) -> ScalarField:
    """Normalized trap ground state exp(-r^2/2) sampled on the grid."""
    return normalize(ScalarField(grid, np.exp(-0.5 * grid.radius2)))


# -- stencils ---------------------------------------------------------------

def laplacian_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Central-difference Laplacian of flat fields (leading batch axes allowed)."""
    n, h, d = grid.points, grid.spacing, grid.dimension
    batch = values.shape[:-1]
    f = values.reshape(batch + (n,) * d)
    out = -2.0 * d * f
    for ax in range(len(batch), len(batch) + d):
        out = out + _shift(f, ax, +1) + _shift(f, ax, -1)
    return (out / (h * h)).reshape(values.shape)


def gradient_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Central-difference gradient, shape ``values.shape + (d,)``."""
    n, h, d = grid.points, grid.spacing, grid.dimension
    batch = values.shape[:-1]
    f = values.reshape(batch + (n,) * d)
    comps = [
        (_shift(f, ax, +1) - _shift(f, ax, -1)).reshape(values.shape) / (2.0 * h)
        for ax in range(len(batch), len(batch) + d)
    ]
    return np.stack(comps, axis=-1)


def _shift(f: np.ndarray, axis: int, step: int) -> np.ndarray:
    """Neighbour values f[i+step] along `axis` with zero ghosts."""
    out = np.zeros_like(f)
    src = [slice(None)] * f.ndim
    dst = [slice(None)] * f.ndim
    if step > 0:
        src[axis], dst[axis] = slice(step, None), slice(None, -step)
    else:
        src[axis], dst[axis] = slice(None, step), slice(-step, None)
    out[tuple(dst)] = f[tuple(src)]
    return out


def laplacian_apply(field: ScalarField) -> ScalarField:
    return ScalarField(field.grid, laplacian_values(field.values, field.grid))


def rayleigh_energy(field: ScalarField, potential: ScalarField) -> float:
    """<phi| -lap/2 + V |phi> / <phi|phi> with the grid stencil."""
    v = field.values
    hv = -0.5 * laplacian_values(v, field.grid) + potential.values * v
    return float(np.dot(v, hv) / np.dot(v, v))


def normalize(field: ScalarField) -> ScalarField:
    return ScalarField(field.grid, normalize_values(field.values, field.grid))


def normalize_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    norm2 = grid.cell_volume * np.einsum("...i,...i->...", values, values)
    if np.any(~np.isfinite(norm2)) or np.any(norm2 < 1e-300):
        raise CollapsedWaveError("collapsed wave: zero or non-finite norm")
    return values / np.sqrt(norm2)[..., None]


# -- imaginary-time propagation -------------------------------------------

@lru_cache(maxsize=32)
def kinetic_factor(points: int, spacing: float, dtau: float) -> np.ndarray:
    """exp(dtau/2 * D2) for the 1D Dirichlet second-difference matrix D2.

    On the infinite lattice the heat kernel of D2 is exp(-2t) I_m(2t) with
    t = dtau / (2 h^2); the zero ghost nodes at -1 and n are imposed by
    odd images with period 2(n+1).  Exact for the stencil, and small
    off-diagonal entries come out with full relative precision.
    """
    t = dtau / (2.0 * spacing**2)
    i = np.arange(points)
    diff = np.subtract.outer(i, i)
    summ = np.add.outer(i, i) + 2
    period = 2 * (points + 1)
    reach = 2 + int(np.ceil((2 * t + 40.0 * np.sqrt(t + 1.0)) / period))
    P = np.zeros((points, points))
    for k in range(-reach, reach + 1):
        P += ive(np.abs(diff + k * period), 2 * t) - ive(np.abs(summ + k * period), 2 * t)
    P = 0.5 * (P + P.T)
    P.setflags(write=False)
    return P


@lru_cache(maxsize=32)
def kinetic_bandwidth(points: int, spacing: float, dtau: float, eps: float = 1e-17) -> int:
    """Largest |i - j| at which the kinetic factor exceeds eps times its peak."""
    P = kinetic_factor(points, spacing, dtau)
    i, j = np.nonzero(np.abs(P) > eps * np.abs(P).max())
    return int(np.max(np.abs(i - j)))


def _banded_product(values: np.ndarray, P: np.ndarray, band: int, block: int) -> np.ndarray:
    # each block of output columns only sees inputs within `band` of it
    n = P.shape[0]
    out = np.empty(values.shape)
    for s in range(0, n, block):
        e = min(n, s + block)
        lo, hi = max(0, s - band), min(n, e + band)
        np.matmul(values[..., lo:hi], P[lo:hi, s:e], out=out[..., s:e])
    return out


def apply_kinetic(values: np.ndarray, grid: Grid, dtau: float) -> np.ndarray:
    """exp(dtau * lap/2) on a batch of flat fields.

    1D uses block-banded products when the factor is narrow compared with
    the grid (entries dropped are below 1e-17 of the peak); 2D applies the
    dense factor along both axes.
    """
    n = grid.points
    P = kinetic_factor(n, grid.spacing, float(dtau))
    if grid.dimension == 1:
        band = kinetic_bandwidth(n, grid.spacing, float(dtau))
        block = 16 * max(1, -(-band // 16))
        if block + 2 * band <= (2 * n) // 3:
            return _banded_product(values, P, band, block)
        return values @ P
    f = values.reshape(values.shape[:-1] + (n, n))
    return np.matmul(np.matmul(P, f), P).reshape(values.shape)


def propagate_values(values: np.ndarray, potential: np.ndarray, grid: Grid, dtau: float) -> np.ndarray:
    """One Strang step exp(-V dtau/2) exp(lap dtau/2) exp(-V dtau/2), renormalized.

    `potential` broadcasts against `values`; the half-step factor is formed
    in the potential's precision.
    """
    half = np.multiply(potential, -0.5 * dtau)
    np.exp(half, out=half)
    out = apply_kinetic(values * half, grid, dtau)
    out *= half
    return normalize_values(out, grid)


def imaginary_time_step(field: ScalarField, potential: ScalarField, dtau: float) -> ScalarField:
    if not dtau > 0:
        raise ValueError("dtau must be positive")
    return ScalarField(field.grid, propagate_values(field.values, potential.values, field.grid, dtau))


# -- off-grid probes --------------------------------------------------------

def probe_values(waves: np.ndarray, wave_index: np.ndarray, positions: np.ndarray, grid: Grid):
    """Interpolated value, gradient and Laplacian of selected waves.

    Parameters
    ----------
    waves : (B, n**d) array
    wave_index : (P,) int array, row of `waves` probed for each position
    positions : (P, d) array

    Returns
    -------
    value (P,), gradient (P, d), laplacian (P,), flags (P,) int8
    """
    waves = np.ascontiguousarray(waves, dtype=float)
    idx = np.ascontiguousarray(wave_index, dtype=np.int64)
    pos = np.ascontiguousarray(positions, dtype=float).reshape(-1, grid.dimension)
    lo, h = -grid.half_extent, grid.spacing
    if grid.dimension == 1:
        val, grad, lap, flags = _kernels.probe_1d(waves, idx, pos[:, 0], lo, h)
        return val, grad[:, None], lap, flags
    n = grid.points
    return _kernels.probe_2d(waves.reshape(-1, n, n), idx, pos, lo, h)


def probe_log_gradient(field: ScalarField, position) -> tuple[np.ndarray, ProbeFlag]:
    """grad(phi)/phi at an off-grid point, by cubic interpolation of the nodal stencils.

    Positions outside the domain are clamped (flag CLAMPED); where
    |phi| < 1e-12 a zero vector is returned (flag NODE).
    """
    grid = field.grid
    pos = np.asarray(position, dtype=float).reshape(1, grid.dimension)
    val, grad, _, flags = probe_values(field.values[None, :], np.zeros(1, np.int64), pos, grid)
    flag = ProbeFlag(int(flags[0]))
    if abs(val[0]) < 1e-12:
        return np.zeros(grid.dimension), flag | ProbeFlag.NODE
    return grad[0] / val[0], flag

"""Walker clouds, guide sets and the nonlocal-kernel coupling between them.

Each particle i owns M walkers r_i^k and M guide waves phi_i^k.  The guide
wave of walker k feels the other particles through a Gaussian-kernel average
of the true pair potential over their walkers, weighted around the paired
walker r_j^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .grid import Grid, ProbeFlag, ScalarField, probe_log_gradient
from .model import PhysicalParams

MODES = ("standard", "local", "hartree")


class ConfigurationError(ValueError):
    pass


@dataclass
class WalkerCloud:
    particle_index: int
    positions: np.ndarray = field(repr=False)
    nonlocal_length: float = float("nan")

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim == 1:
            pos = pos[:, None]
        if not np.all(np.isfinite(pos)):
            raise ValueError("walker positions must be finite")
        self.positions = pos

    @property
    def walkers(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    @property
    def sample_stddev(self) -> float:
        return sample_stddev(self)


@dataclass
class GuideSet:
    particle_index: int
    grid: Grid
    waves: np.ndarray = field(repr=False)  # (M, n**d)

    def __post_init__(self):
        self.waves = np.atleast_2d(np.asarray(self.waves, dtype=float))
        if self.waves.shape[1] != self.grid.size:
            raise ValueError("wave length does not match grid")

    def __len__(self) -> int:
        return self.waves.shape[0]

    def __getitem__(self, k: int) -> ScalarField:
        return ScalarField(self.grid, self.waves[k])

    @classmethod
    def from_fields(cls, particle_index: int, fields: Sequence[ScalarField]) -> "GuideSet":
        grid = fields[0].grid
        return cls(particle_index, grid, np.stack([f.values for f in fields]))


@dataclass(frozen=True)
class NoiseSchedule:
    """Annealed amplitude of the Gaussian walker noise.

    ``A(tau) = floor + (A0 - floor) * (1 + tau/tau_c) ** -p``.

    The default keeps the physical diffusion (floor = A0 = 1), under which
    walkers sample |phi|^2.  ``floor=0`` gives the pure power-law decay to
    zero; ``base_amplitude > floor = 1`` anneals an excess on top of it.
    """

    base_amplitude: float = 1.0
    decay_exponent: float = 0.2
    reference_time: float = 1.0
    floor: float = 1.0

    def __post_init__(self):
        if not self.reference_time > 0:
            raise ValueError("reference_time must be positive")
        if self.decay_exponent < 0:
            raise ValueError("decay_exponent must be >= 0")
        if not 0 <= self.floor <= self.base_amplitude:
            raise ValueError("floor must lie in [0, base_amplitude]")


def noise_amplitude(schedule: NoiseSchedule, tau: float) -> float:
    if tau < 0:
        raise ValueError("tau must be >= 0")
    decay = (1.0 + tau / schedule.reference_time) ** (-schedule.decay_exponent)
    return schedule.floor + (schedule.base_amplitude - schedule.floor) * decay


# -- kernel machinery ---------------------------------------------------------

def kernel_weight(r_l, r_k, sigma: float) -> float:
    """Gaussian kernel exp(-|r_l - r_k|^2 / (2 sigma^2))."""
    if not sigma > 0:
        raise ValueError("nonlocal length sigma must be positive")
    d = np.atleast_1d(np.asarray(r_l, dtype=float) - np.asarray(r_k, dtype=float))
    return float(np.exp(-np.dot(d, d) / (2.0 * sigma * sigma)))


def partition_weight(cloud: WalkerCloud, k: int) -> float:
    """Z^k = sum_l K(r^l, r^k); the self term makes it at least 1."""
    sigma = cloud.nonlocal_length
    if not sigma > 0:
        raise ValueError("cloud has no positive nonlocal length")
    d = cloud.positions - cloud.positions[k]
    return float(np.sum(np.exp(-np.einsum("ld,ld->l", d, d) / (2.0 * sigma * sigma))))


def normalized_weights(positions: np.ndarray, sigma: float) -> np.ndarray:
    """Row-normalized kernel matrix W[k, l] = K(r^l, r^k) / Z^k."""
    if not sigma > 0:
        raise ValueError("nonlocal length sigma must be positive")
    K = _kernels.kernel_matrix(np.asarray(positions, dtype=float), float(sigma))
    K /= K.sum(axis=1, keepdims=True)
    return K


def smoothed_field(positions: np.ndarray, V: np.ndarray, sigma: float, dtype=np.float64) -> np.ndarray:
    """sum_l K(r^l, r^k) V[l] / Z^k for every k.

    The kernel matrix, the product and the result are in `dtype`; Z is
    accumulated in double precision.
    """
    if not sigma > 0:
        raise ValueError("nonlocal length sigma must be positive")
    K = _kernels.kernel_matrix(np.asarray(positions, dtype=float), float(sigma), dtype)
    Z = K.sum(axis=1, dtype=np.float64)
    out = K @ V.astype(dtype, copy=False)
    out *= (1.0 / Z).astype(dtype)[:, None]
    return out


def pair_fields(positions: np.ndarray, params: PhysicalParams, grid: Grid) -> np.ndarray:
    """V_ee(x_g, r^l) for every walker l and grid node g, shape (M, n**d)."""
    if not params.interacting:
        return np.zeros((positions.shape[0], grid.size))
    return _kernels.pair_field(
        np.ascontiguousarray(positions, dtype=float), grid.coords, params.screening, params.softening
    )


def interaction_fields(
    positions: np.ndarray,
    sigmas: Sequence[float] | None,
    params: PhysicalParams,
    grid: Grid,
    mode: str = "standard",
    dtype=np.float64,
) -> np.ndarray:
    """Per-particle contributions U[j, k] to the effective potentials.

    ``U[j, k](x) = sum_l W_j[k, l] V_ee(x, r_j^l)``; the effective potential
    of guide (i, k) is then ``sum_{j != i} U[j, k]``.  In ``hartree`` mode
    the weights are uniform and the k axis has length 1; in ``local`` mode
    ``W_j`` is the identity.

    Parameters
    ----------
    positions : (N, M, d) array
    sigmas : per-particle nonlocal lengths (ignored outside standard mode)
    dtype : precision of the kernel matrix and the weighted sum
    """
    N, M, _ = positions.shape
    if mode not in MODES:
        raise ConfigurationError(f"unknown coupling mode {mode!r}")
    rows = 1 if mode == "hartree" else M
    out = np.empty((N, rows, grid.size), dtype=dtype)
    for j in range(N):
        V = pair_fields(positions[j], params, grid)
        if mode == "hartree":
            out[j, 0] = V.mean(axis=0)
        elif mode == "local":
            out[j] = V
        else:
            out[j] = smoothed_field(positions[j], V, sigmas[j], dtype)
    return out


def effective_potentials(U: np.ndarray) -> np.ndarray:
    """Sum over j != i of U[j]: total minus own contribution."""
    return U.sum(axis=0, keepdims=True) - U


def effective_potential_field(
    i: int,
    k: int,
    clouds: Sequence[WalkerCloud],
    params: PhysicalParams,
    grid: Grid,
    mode: str = "standard",
) -> ScalarField:
    """Effective interaction potential seen by guide wave k of particle i."""
    M = clouds[0].walkers
    if any(c.walkers != M for c in clouds):
        raise ConfigurationError("all walker clouds must hold the same number of walkers")
    values = np.zeros(grid.size)
    for j, cloud in enumerate(clouds):
        if j == i:
            continue
        V = pair_fields(cloud.positions, params, grid)
        if mode == "local":
            values += V[k]
        elif mode == "hartree":
            values += V.mean(axis=0)
        elif mode == "standard":
            sigma = cloud.nonlocal_length
            if not sigma > 0:
                raise ValueError(f"particle {j} has no positive nonlocal length")
            d = cloud.positions - cloud.positions[k]
            w = np.exp(-np.einsum("ld,ld->l", d, d) / (2.0 * sigma * sigma))
            values += (w / w.sum()) @ V
        else:
            raise ConfigurationError(f"unknown coupling mode {mode!r}")
    return ScalarField(grid, values)


# -- walker motion ----------------------------------------------------------------

def drift_velocity(wave: ScalarField, position) -> tuple[np.ndarray, ProbeFlag]:
    """(hbar/m) grad(phi)/phi at the walker; hbar = m = 1."""
    return probe_log_gradient(wave, position)


def diffuse_step(position, drift, dtau: float, amplitude: float, rng, drift_enabled: bool = True):
    """Euler-Maruyama move r + v dtau + A eta sqrt(dtau), eta ~ N(0, 1)."""
    if not dtau > 0:
        raise ValueError("dtau must be positive")
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    r = np.asarray(position, dtype=float)
    noise = rng.standard_normal(r.shape)
    step = amplitude * np.sqrt(dtau) * noise
    if drift_enabled:
        step = step + np.asarray(drift, dtype=float) * dtau
    return r + step


def sample_stddev(cloud: WalkerCloud | np.ndarray) -> float:
    """Per-dimension RMS spread of the walkers about their centroid."""
    pos = cloud.positions if isinstance(cloud, WalkerCloud) else np.asarray(cloud, dtype=float)
    if pos.ndim == 1:
        pos = pos[:, None]
    if pos.shape[0] < 2:
        raise ValueError("sample_stddev needs at least 2 walkers")
    dev = pos - pos.mean(axis=0)
    return float(np.sqrt(np.einsum("kd,kd->", dev, dev) / dev.size))


def cloud_stddevs(positions: np.ndarray) -> np.ndarray:
    """sample_stddev for each particle of an (N, M, d) array."""
    dev = positions - positions.mean(axis=1, keepdims=True)
    return np.sqrt(np.einsum("nkd,nkd->n", dev, dev) / (positions.shape[1] * positions.shape[2]))

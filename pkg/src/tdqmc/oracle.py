"""Numerically exact ground states of a few trapped bosons.

The full N-body wave function is held on the product grid (one axis per
particle coordinate) and relaxed in imaginary time with the same kinetic
factor and stencils as the one-body guide waves, so that TDQMC and the
reference share their discretization error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .grid import Grid, kinetic_factor
from .model import PhysicalParams, pair_potential_of_distance
from .observables import DensityMatrix

log = logging.getLogger(__name__)

MEMORY_BUDGET_POINTS = 3 * 10**7


class MemoryBudgetError(MemoryError):
    pass


@dataclass
class ConfigWave:
    grid: Grid
    n_particles: int
    values: np.ndarray = field(repr=False)  # shape (n,) * (N*d)

    @property
    def norm_weight(self) -> float:
        return self.grid.cell_volume**self.n_particles

    def norm(self) -> float:
        return float(np.sqrt(self.norm_weight * np.sum(self.values**2)))

    def particle_axes(self, i: int) -> tuple[int, ...]:
        d = self.grid.dimension
        return tuple(range(i * d, (i + 1) * d))

    def swapped(self, i: int, j: int) -> np.ndarray:
        order = list(range(self.values.ndim))
        for a, b in zip(self.particle_axes(i), self.particle_axes(j)):
            order[a], order[b] = order[b], order[a]
        return np.transpose(self.values, order)

    def exchange_asymmetry(self) -> float:
        """Largest |Psi(..x_i..x_j..) - Psi(..x_j..x_i..)| over all pairs."""
        worst = 0.0
        for i in range(self.n_particles):
            for j in range(i):
                worst = max(worst, float(np.max(np.abs(self.values - self.swapped(i, j)))))
        return worst


def _check_budget(params: PhysicalParams, grid: Grid, budget: int) -> None:
    points = grid.points ** (params.n_particles * grid.dimension)
    if points > budget:
        raise MemoryBudgetError(
            f"{points:.3g} configuration points exceed the budget of {budget:.3g}"
        )


def configuration_potential(params: PhysicalParams, grid: Grid) -> np.ndarray:
    """Trap plus pair interaction on the full product grid."""
    N, d, n = params.n_particles, grid.dimension, grid.points
    ndim = N * d
    x = grid.axis

    def coord(i, a):
        shape = [1] * ndim
        shape[i * d + a] = n
        return x.reshape(shape)

    V = np.zeros((n,) * ndim)
    for i in range(N):
        for a in range(d):
            V = V + 0.5 * coord(i, a) ** 2
    if params.interacting:
        for i in range(N):
            for j in range(i):
                r2 = sum((coord(i, a) - coord(j, a)) ** 2 for a in range(d))
                V = V + pair_potential_of_distance(np.sqrt(r2), params)
    return V


def _along(values: np.ndarray, axis: int, matrix: np.ndarray) -> np.ndarray:
    """Apply an (n, n) matrix along one axis."""
    shape = values.shape
    A = int(np.prod(shape[:axis], dtype=np.int64))
    B = int(np.prod(shape[axis + 1:], dtype=np.int64))
    if B == 1:
        return (values.reshape(A, shape[axis]) @ matrix.T).reshape(shape)
    out = np.matmul(matrix, values.reshape(A, shape[axis], B))
    return out.reshape(shape)


def _second_difference(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    shape = values.shape
    A = int(np.prod(shape[:axis], dtype=np.int64))
    B = int(np.prod(shape[axis + 1:], dtype=np.int64))
    f = values.reshape(A, shape[axis], B)
    out = -2.0 * f
    out[:, 1:, :] += f[:, :-1, :]
    out[:, :-1, :] += f[:, 1:, :]
    return (out / (h * h)).reshape(shape)


def apply_hamiltonian(values: np.ndarray, V: np.ndarray, grid: Grid) -> np.ndarray:
    out = V * values
    for ax in range(values.ndim):
        out -= 0.5 * _second_difference(values, ax, grid.spacing)
    return out


def exact_energy(psi: ConfigWave, params: PhysicalParams, V: np.ndarray | None = None) -> float:
    """Rayleigh quotient <Psi|H|Psi>/<Psi|Psi> with the grid stencil."""
    if V is None:
        V = configuration_potential(params, psi.grid)
    v = psi.values
    return float(np.vdot(v, apply_hamiltonian(v, V, psi.grid)) / np.vdot(v, v))


def _product_gaussian(params: PhysicalParams, grid: Grid, width: float = 1.0) -> np.ndarray:
    g = np.exp(-0.5 * (grid.axis / width) ** 2)
    ndim = params.n_particles * grid.dimension
    out = g
    for _ in range(ndim - 1):
        out = np.multiply.outer(out, g)
    return out.reshape((grid.points,) * ndim)


def exact_ground_state(
    params: PhysicalParams,
    grid: Grid,
    dtau: float = 0.02,
    steps: int = 20000,
    tol: float = 1e-8,
    check_every: int = 5,
    budget: int = MEMORY_BUDGET_POINTS,
) -> ConfigWave:
    """Relax the full many-body wave function in imaginary time.

    Stops when the Rayleigh energy changes by less than `tol` per step,
    measured over `check_every` steps.
    """
    if params.dimension != grid.dimension:
        raise ValueError("grid and params disagree on dimension")
    _check_budget(params, grid, budget)
    V = configuration_potential(params, grid)
    half = np.exp(-0.5 * dtau * V)
    P = kinetic_factor(grid.points, grid.spacing, float(dtau))
    w = grid.cell_volume**params.n_particles
    # wider start for repulsive systems
    psi = _product_gaussian(params, grid, width=1.2 if params.interacting else 1.0)
    psi /= np.sqrt(w * np.sum(psi * psi))
    e_old = np.inf
    for step in range(1, steps + 1):
        psi *= half
        for ax in range(psi.ndim):
            psi = _along(psi, ax, P)
        psi *= half
        norm = np.sqrt(w * np.sum(psi * psi))
        if not np.isfinite(norm) or norm == 0:
            raise ArithmeticError("configuration wave collapsed")
        psi /= norm
        if step % check_every == 0:
            e = float(np.vdot(psi, apply_hamiltonian(psi, V, grid)) * w)
            if abs(e - e_old) < tol * check_every:
                log.info("oracle N=%d converged after %d steps: E=%.10f", params.n_particles, step, e)
                break
            e_old = e
    else:
        log.warning("oracle did not reach tol=%g in %d steps", tol, steps)
    result = ConfigWave(grid, params.n_particles, psi)
    asym = result.exchange_asymmetry()
    if asym > 1e-8:
        raise AssertionError(f"oracle lost bosonic symmetry ({asym:.2e})")
    return result


def lanczos_ground_state(params: PhysicalParams, grid: Grid, tol: float = 1e-12,
                         budget: int = MEMORY_BUDGET_POINTS) -> tuple[float, ConfigWave]:
    """Lowest eigenpair of the same discretized H by implicitly restarted Lanczos.

    Independent of the imaginary-time route; used to cross-check it.
    """
    _check_budget(params, grid, budget)
    V = configuration_potential(params, grid)
    shape = V.shape
    size = V.size
    op = LinearOperator(
        (size, size),
        matvec=lambda v: apply_hamiltonian(v.reshape(shape), V, grid).ravel(),
        dtype=float,
    )
    v0 = _product_gaussian(params, grid).ravel()
    vals, vecs = eigsh(op, k=1, which="SA", v0=v0, tol=tol)
    psi = vecs[:, 0].reshape(shape)
    psi *= np.sign(psi.sum())
    psi /= np.sqrt(grid.cell_volume**params.n_particles * np.sum(psi * psi))
    return float(vals[0]), ConfigWave(grid, params.n_particles, psi)


def exact_one_body_rdm(psi: ConfigWave) -> DensityMatrix:
    """rho(x, x') = int Psi(x, y..) Psi(x', y..) dy.. for particle 1."""
    G = psi.grid.size
    flat = psi.values.reshape(G, -1)
    weight = psi.grid.cell_volume ** (psi.n_particles - 1)
    return DensityMatrix(psi.grid, weight * (flat @ flat.T))


def symmetrize(values: np.ndarray, n_particles: int, dimension: int) -> np.ndarray:
    """Average over all particle permutations."""
    acc = np.zeros_like(values)
    perms = list(permutations(range(n_particles)))
    for perm in perms:
        order = [p * dimension + a for p in perm for a in range(dimension)]
        acc += np.transpose(values, order)
    return acc / len(perms)

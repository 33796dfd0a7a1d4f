"""Imaginary-time relaxation of coupled guide waves and walkers, the
ensemble energy estimator and the variational scan over alpha = sigma/s.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import ensemble
from .ensemble import GuideSet, NoiseSchedule, WalkerCloud, cloud_stddevs, interaction_fields
from .grid import CollapsedWaveError, Grid, gaussian_ground_state, probe_values, propagate_values
from .model import PhysicalParams, pair_potential
from .observables import guide_purity

log = logging.getLogger(__name__)

NODE_EPS = 1e-12


class NumericalError(RuntimeError):
    """A run aborted: collapsed wave, runaway walkers or non-finite energy."""

    def __init__(self, message: str, trace: np.ndarray | None = None):
        super().__init__(message)
        self.trace = trace


class UnreliableEstimateWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams
    grid: Grid
    walkers: int = 1000
    dtau: float = 0.005
    steps: int = 4000
    alpha: float = 1.0
    mode: str = "standard"
    schedule: NoiseSchedule = field(default_factory=NoiseSchedule)
    drift_enabled: bool = True
    seed: int = 0
    energy_window: int | None = None
    max_clamp_fraction: float = 1e-3
    coupling_precision: str = "single"

    def __post_init__(self):
        if self.mode not in ensemble.MODES:
            raise ensemble.ConfigurationError(f"unknown mode {self.mode!r}")
        if self.walkers < 2:
            raise ensemble.ConfigurationError("need at least 2 walkers per particle")
        if not self.dtau > 0 or self.steps < 1:
            raise ensemble.ConfigurationError("dtau must be positive and steps >= 1")
        if self.mode == "standard" and not self.alpha > 0:
            raise ensemble.ConfigurationError("alpha must be positive in standard mode")
        if self.steps * self.dtau < 10 * self.schedule.reference_time:
            raise ensemble.ConfigurationError(
                "steps*dtau must cover at least 10 reference times of the noise schedule"
            )
        if self.grid.dimension != self.params.dimension:
            raise ensemble.ConfigurationError("grid and params disagree on dimension")
        if self.coupling_precision not in ("single", "double"):
            raise ensemble.ConfigurationError("coupling_precision must be 'single' or 'double'")
        if self.energy_window is not None and not 1 <= self.energy_window <= self.steps:
            raise ensemble.ConfigurationError("energy_window must lie in [1, steps]")

    @property
    def window(self) -> int:
        return self.energy_window or max(1, self.steps // 5)

    @classmethod
    def default(cls, params: PhysicalParams, **overrides) -> "RunConfig":
        if params.dimension == 1:
            base = dict(grid=Grid(8.0, 256, 1), walkers=1000)
        else:
            base = dict(grid=Grid(5.0, 64, 2), walkers=500)
        base.update(overrides)
        return cls(params=params, **base)


@dataclass
class RunResult:
    config: RunConfig
    energy: float
    energy_error: float
    trace: np.ndarray  # structured, one row per step
    clouds: list[WalkerCloud]
    guides: list[GuideSet]
    stddevs: np.ndarray
    sigmas: np.ndarray
    linear_entropy: float
    clamp_count: int
    excluded_count: int
    wall_time: float

    @property
    def energy_trace(self) -> np.ndarray:
        return self.trace["energy"]

    def summary(self) -> dict:
        return {
            "energy": self.energy,
            "energy_error": self.energy_error,
            "linear_entropy": self.linear_entropy,
            "stddev": [float(s) for s in self.stddevs],
            "sigma": [float(s) for s in self.sigmas],
            "clamp_count": int(self.clamp_count),
            "excluded_count": int(self.excluded_count),
            "wall_time": self.wall_time,
        }


TRACE_DTYPE = np.dtype(
    [("step", "i8"), ("tau", "f8"), ("energy", "f8"), ("stderr", "f8"),
     ("s", "f8"), ("sigma", "f8"), ("clamped", "i8")]
)


# -- energy estimator ----------------------------------------------------------

def _local_energies(waves, wave_rows, positions, grid, params):
    """Local energies of every paired configuration k.

    waves : (N*Mw, G); wave_rows : (N, M) rows of `waves` owned by walker (i, k);
    positions : (N, M, d).  Returns (E_k, ok_mask, value, grad, flags).
    """
    N, M, d = positions.shape
    val, grad, lap, flags = probe_values(waves, wave_rows.ravel(), positions.reshape(-1, d), grid)
    ok = np.abs(val) >= NODE_EPS
    safe = np.where(ok, val, 1.0)
    one_body = -0.5 * lap / safe + 0.5 * np.einsum("pd,pd->p", positions.reshape(-1, d), positions.reshape(-1, d))
    e = one_body.reshape(N, M).sum(axis=0)
    if params.interacting:
        for i in range(N):
            for j in range(i):
                e += pair_potential(positions[i], positions[j], params)
    ok_k = ok.reshape(N, M).all(axis=0)
    return e, ok_k, val, grad, flags


def _guide_arrays(clouds, guides):
    N = len(clouds)
    positions = np.stack([c.positions for c in clouds])
    M = positions.shape[1]
    Mw = len(guides[0])
    waves = np.concatenate([g.waves for g in guides])
    k = np.arange(M) if Mw == M else np.zeros(M, np.int64)
    rows = np.arange(N)[:, None] * Mw + k[None, :]
    return positions, waves, rows


def local_energy(k: int, clouds: Sequence[WalkerCloud], guides: Sequence[GuideSet], params: PhysicalParams) -> float:
    """Local energy of the k-th paired configuration (r_1^k, ..., r_N^k).

    Returns nan when one of the guide waves has a node at its walker.
    """
    positions, waves, rows = _guide_arrays(clouds, guides)
    e, ok, *_ = _local_energies(waves, rows[:, k:k + 1], positions[:, k:k + 1], guides[0].grid, params)
    return float(e[0]) if ok[0] else float("nan")


def total_energy(clouds: Sequence[WalkerCloud], guides: Sequence[GuideSet], params: PhysicalParams):
    """Ensemble mean of the local energies and its standard error."""
    positions, waves, rows = _guide_arrays(clouds, guides)
    e, ok, *_ = _local_energies(waves, rows, positions, guides[0].grid, params)
    return _mean_stderr(e, ok)


def _mean_stderr(e, ok):
    n_ok = int(ok.sum())
    if n_ok < 0.9 * ok.size:
        warnings.warn(f"{ok.size - n_ok} of {ok.size} walkers excluded at wave nodes", UnreliableEstimateWarning)
    if n_ok == 0:
        return float("nan"), float("nan")
    x = e[ok]
    err = float(x.std(ddof=1) / math.sqrt(n_ok)) if n_ok > 1 else 0.0
    return float(x.mean()), err


# -- relaxation loop ----------------------------------------------------------------

def initial_state(config: RunConfig, rng: np.random.Generator):
    """Trap ground-state guides and walkers drawn from its density."""
    grid, N, M = config.grid, config.params.n_particles, config.walkers
    d = grid.dimension
    Mw = 1 if config.mode == "hartree" else M
    phi0 = gaussian_ground_state(grid).values
    waves = np.broadcast_to(phi0, (N, Mw, grid.size)).copy()
    positions = rng.normal(0.0, math.sqrt(0.5), size=(N, M, d))
    np.clip(positions, -grid.half_extent, grid.half_extent, out=positions)
    return waves, positions


def relax_ground_state(config: RunConfig) -> RunResult:
    """Propagate all guide waves and walkers in imaginary time to steady state."""
    t0 = time.perf_counter()
    params, grid, mode = config.params, config.grid, config.mode
    N, M, d = params.n_particles, config.walkers, grid.dimension
    rng = np.random.default_rng(config.seed)
    waves, positions = initial_state(config, rng)
    Mw = waves.shape[1]
    k = np.arange(M) if Mw == M else np.zeros(M, np.int64)
    rows = np.arange(N)[:, None] * Mw + k[None, :]
    core = 0.5 * grid.radius2
    coupling_dtype = np.float32 if config.coupling_precision == "single" else np.float64
    lo, hi = -grid.half_extent, grid.half_extent
    trace = np.zeros(config.steps, TRACE_DTYPE)
    clamp_total = 0
    excluded_total = 0
    stddevs = cloud_stddevs(positions)
    sigmas = config.alpha * stddevs if mode == "standard" else np.full(N, np.inf if mode == "hartree" else 0.0)

    for step in range(config.steps):
        tau = step * config.dtau
        stddevs = cloud_stddevs(positions)
        if mode == "standard":
            sigmas = config.alpha * stddevs
            if np.any(sigmas <= 0):
                raise NumericalError("walker cloud collapsed to a point", trace[:step])
        if N > 1 and params.interacting:
            U = interaction_fields(positions, sigmas, params, grid, mode, coupling_dtype)
            potentials = ensemble.effective_potentials(U)
            potentials += core.astype(coupling_dtype)
        else:
            potentials = core
        try:
            waves = propagate_values(waves, potentials, grid, config.dtau)
        except CollapsedWaveError as exc:
            raise NumericalError(f"step {step}: {exc}", trace[:step]) from exc

        flat = waves.reshape(N * Mw, grid.size)
        e, ok, val, grad, flags = _local_energies(flat, rows, positions, grid, params)
        excluded_total += int(ok.size - ok.sum())
        energy, err = _mean_stderr(e, ok) if ok.any() else (float("nan"), float("nan"))
        if not math.isfinite(energy):
            raise NumericalError(f"non-finite energy at step {step}", trace[:step])

        node = np.abs(val) < NODE_EPS
        drift = np.where(node[:, None], 0.0, grad / np.where(node, 1.0, val)[:, None]).reshape(N, M, d)
        amp = ensemble.noise_amplitude(config.schedule, tau)
        move = amp * math.sqrt(config.dtau) * rng.standard_normal((N, M, d))
        if config.drift_enabled:
            move += drift * config.dtau
        positions = positions + move
        out = (positions < lo) | (positions > hi)
        n_clamped = int(out.any(axis=-1).sum())
        if n_clamped:
            np.clip(positions, lo, hi, out=positions)
            clamp_total += n_clamped

        trace[step] = (step, tau, energy, err, stddevs.mean(), sigmas.mean(), n_clamped)

    moves = config.steps * N * M
    if clamp_total > config.max_clamp_fraction * moves:
        raise NumericalError(
            f"{clamp_total} of {moves} walker moves clamped at the domain edge; enlarge the grid",
            trace,
        )
    W = config.window
    tail = trace["energy"][-W:]
    E = float(tail.mean())
    E_err = float(tail.std(ddof=1) / math.sqrt(W)) if W > 1 else 0.0
    stddevs = cloud_stddevs(positions)
    if mode == "standard":
        sigmas = config.alpha * stddevs
    clouds = [WalkerCloud(i, positions[i], float(sigmas[i])) for i in range(N)]
    guides = [GuideSet(i, grid, waves[i]) for i in range(N)]
    S_L = 1.0 - guide_purity(waves[0], grid)
    result = RunResult(
        config=config, energy=E, energy_error=E_err, trace=trace, clouds=clouds, guides=guides,
        stddevs=stddevs, sigmas=sigmas, linear_entropy=S_L, clamp_count=clamp_total,
        excluded_count=excluded_total, wall_time=time.perf_counter() - t0,
    )
    log.info("N=%d mode=%s alpha=%g: E=%.6f +- %.6f S_L=%.5f (%.1fs)",
             N, mode, config.alpha, E, E_err, S_L, result.wall_time)
    return result


def hartree_limit_run(config: RunConfig) -> RunResult:
    """sigma -> infinity: one shared guide wave per particle, uniform weights."""
    return relax_ground_state(replace(config, mode="hartree"))


def local_limit_run(config: RunConfig) -> RunResult:
    """sigma -> 0: each guide sees only the paired walkers of the other particles."""
    return relax_ground_state(replace(config, mode="local"))


# -- variational scan ----------------------------------------------------------

@dataclass
class ScanResult:
    rows: list[dict]
    alpha_opt: float
    flat: bool
    local_minima: int
    runs: list[RunResult] = field(default_factory=list, repr=False)

    @property
    def non_convex(self) -> bool:
        return self.local_minima > 1

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows])

    def at_optimum(self) -> dict:
        return next(r for r in self.rows if r["alpha"] == self.alpha_opt)


def alpha_scan(
    config: RunConfig,
    alphas: Sequence[float],
    common_random_numbers: bool = True,
    keep_runs: bool = False,
) -> ScanResult:
    """Relax at each alpha and locate the energy minimum.

    With common random numbers every alpha reuses ``config.seed``;
    otherwise alpha number i runs with ``seed + i``.  Ties go to the
    smaller alpha.
    """
    alphas = sorted(float(a) for a in alphas)
    if not alphas or any(not a > 0 for a in alphas):
        raise ValueError("alphas must be a non-empty list of positive values")
    rows, runs = [], []
    for n, a in enumerate(alphas):
        seed = config.seed if common_random_numbers else config.seed + n
        res = relax_ground_state(replace(config, alpha=a, mode="standard", seed=seed))
        rows.append(_scan_row(a, res))
        if keep_runs:
            runs.append(res)
    return _summarize(rows, config.params, runs)


def _scan_row(alpha: float, res: RunResult) -> dict:
    return {
        "alpha": alpha, "energy": res.energy, "stderr": res.energy_error,
        "entropy": res.linear_entropy, "s": float(res.stddevs.mean()),
        "sigma": float(res.sigmas.mean()),
    }


def _summarize(rows: list[dict], params: PhysicalParams, runs: list[RunResult]) -> ScanResult:
    rows = sorted(rows, key=lambda r: r["alpha"])
    E = np.array([r["energy"] for r in rows])
    err = np.array([r["stderr"] for r in rows])
    best = int(np.argmin(E))  # first occurrence: smaller alpha wins ties
    flat = params.n_particles == 1 or bool(np.ptp(E) <= 2.0 * math.sqrt(2.0) * float(np.max(err)))
    runs = sorted(runs, key=lambda r: r.config.alpha)
    return ScanResult(rows, rows[best]["alpha"], flat, count_local_minima(E, err), runs)


def refined_alpha_scan(
    config: RunConfig,
    coarse: Sequence[float],
    step: float = 0.1,
    span: float = 0.3,
    keep_runs: bool = False,
) -> ScanResult:
    """Scan a coarse alpha grid, then fill in `step` spacing within `span` of its minimum.

    The fine points stay inside the coarse range.  Common random numbers
    throughout, so coarse and fine rows are directly comparable.
    """
    first = alpha_scan(config, coarse, keep_runs=keep_runs)
    done = {round(r["alpha"], 9) for r in first.rows}
    lo, hi = first.rows[0]["alpha"], first.rows[-1]["alpha"]
    n = int(round(span / step))
    fine = [round(first.alpha_opt + i * step, 9) for i in range(-n, n + 1)]
    fine = [a for a in fine if lo <= a <= hi and a not in done]
    if not fine:
        return first
    second = alpha_scan(config, fine, keep_runs=keep_runs)
    return _summarize(first.rows + second.rows, config.params, first.runs + second.runs)


def count_local_minima(E: np.ndarray, err: np.ndarray) -> int:
    """Number of basins whose floor is separated from the rest by more than noise.

    The basin of point m extends while neighbours stay within
    ``tol = 2*sqrt(2)*median(err)`` above E[m]; m counts when it is the lowest
    point of its own basin.
    """
    E = np.asarray(E, dtype=float)
    n = len(E)
    tol = 2.0 * math.sqrt(2.0) * float(np.median(err)) if n else 0.0
    minima = 0
    for m in range(n):
        lo = hi = m
        while lo > 0 and E[lo - 1] <= E[m] + tol:
            lo -= 1
        while hi < n - 1 and E[hi + 1] <= E[m] + tol:
            hi += 1
        if lo + int(np.argmin(E[lo:hi + 1])) == m:
            minima += 1
    return minima

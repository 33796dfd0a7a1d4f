"""Time-dependent quantum Monte Carlo ground states of bosonic quantum dots."""

from .model import PhysicalParams, core_potential, long_range, pair_potential, short_range
from .grid import CollapsedWaveError, Grid, ScalarField
from .ensemble import GuideSet, NoiseSchedule, WalkerCloud
from .solver import (
    NumericalError,
    RunConfig,
    RunResult,
    alpha_scan,
    hartree_limit_run,
    local_limit_run,
    relax_ground_state,
    total_energy,
)
from .observables import DensityMatrix, linear_entropy, reduced_density_matrix

__version__ = "0.1.0"

"""Exact master-equation dynamics of a few two-level atoms with dipole-dipole coupling."""

__version__ = "0.1.0"

from .couplings import CouplingSet, build_couplings, f_exact, gamma_exact
from .ensemble import EnsembleSpec, SweepResult, fit_power_law, run_ensemble, sweep
from .geometry import AtomConfiguration, PairGeometry, pair_geometry, sample_configuration
from .liouvillian import LiouvillianMatrix, apply, assemble, darkness_residual
from .observables import PulseStats, TimeSeries, coherence_l1, cooperativity, intensity, pulse_stats
from .propagator import TimeGrid, evolve
from .state import BlockDensityMatrix, fully_excited_state, ground_state, subradiant_state

__all__ = [
    "AtomConfiguration",
    "BlockDensityMatrix",
    "CouplingSet",
    "EnsembleSpec",
    "LiouvillianMatrix",
    "PairGeometry",
    "PulseStats",
    "SweepResult",
    "TimeGrid",
    "TimeSeries",
    "apply",
    "assemble",
    "build_couplings",
    "coherence_l1",
    "cooperativity",
    "darkness_residual",
    "evolve",
    "f_exact",
    "fit_power_law",
    "fully_excited_state",
    "gamma_exact",
    "ground_state",
    "intensity",
    "pair_geometry",
    "pulse_stats",
    "run_ensemble",
    "sample_configuration",
    "subradiant_state",
    "sweep",
]

"""Radiated intensity, l1 coherence, pulse statistics and cooperativity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .couplings import CouplingSet
from .liouvillian import LiouvillianMatrix
from .propagator import TimeGrid
from .state import BlockDensityMatrix, layout


@dataclass
class TimeSeries:
    grid: TimeGrid
    intensity: np.ndarray
    coherence: np.ndarray
    intensity_stderr: np.ndarray | None = None
    coherence_stderr: np.ndarray | None = None
    n_samples: int = 1

    def __post_init__(self):
        n = len(self.grid)
        self.intensity = np.asarray(self.intensity, dtype=float)
        self.coherence = np.asarray(self.coherence, dtype=float)
        for name in ("intensity", "coherence", "intensity_stderr", "coherence_stderr"):
            arr = getattr(self, name)
            if arr is not None and np.shape(arr) != (n,):
                raise ValueError(f"{name} has shape {np.shape(arr)}, grid has {n} points")

    @property
    def t(self) -> np.ndarray:
        return self.grid.points


@dataclass(frozen=True)
class PulseStats:
    a_intensity: float
    t_intensity: float
    a_coherence: float
    t_coherence: float
    baseline_i0: float
    baseline_c0: float

    @property
    def peak_intensity(self) -> float:
        return self.a_intensity + self.baseline_i0

    @property
    def peak_coherence(self) -> float:
        return self.a_coherence + self.baseline_c0


def _decay_blocks(couplings: CouplingSet):
    return LiouvillianMatrix(couplings).decay_blocks


def intensity(rho: BlockDensityMatrix, couplings: CouplingSet) -> float:
    """Radiated rate ``sum_ij gamma_ij <s+_i s-_j>`` in units of gamma_0."""
    if rho.n_atoms != couplings.n_atoms:
        raise ValueError(f"state has {rho.n_atoms} atoms, couplings {couplings.n_atoms}")
    total = sum(np.trace(g @ r) for g, r in zip(_decay_blocks(couplings), rho.blocks))
    return float(total.real)


def coherence_l1(rho) -> float:
    """Sum of moduli of the off-diagonal elements in the product basis.

    Accepts a :class:`BlockDensityMatrix` or a dense ``2^N x 2^N`` array.
    """
    if isinstance(rho, BlockDensityMatrix):
        return float(sum(np.abs(b).sum() - np.abs(np.diag(b)).sum() for b in rho.blocks))
    rho = np.asarray(rho)
    return float(np.abs(rho).sum() - np.abs(np.diag(rho)).sum())


def offdiagonal_slots(n_atoms: int, top: int | None = None) -> np.ndarray:
    lay = layout(n_atoms)
    slots = np.sort(np.concatenate([lay.upper_slots, lay.lower_slots]))
    if top is not None:
        slots = slots[slots < lay.truncated_size(top)]
    return slots


def trajectory(states: np.ndarray, generator: LiouvillianMatrix, top: int):
    """``(intensity, coherence)`` arrays from vectorized states on sectors ``0..top``."""
    weights = generator.intensity_weights[: states.shape[1]]
    return kernels.trajectory_observables(states, weights, offdiagonal_slots(generator.n_atoms, top))


def intensity_series(states, couplings: CouplingSet, grid: TimeGrid) -> TimeSeries:
    """Intensity and coherence of a list of states sampled on ``grid``."""
    if len(states) != len(grid):
        raise ValueError("one state per grid point is required")
    gen = LiouvillianMatrix(couplings)
    vecs = np.array([s.to_vector() for s in states])
    i_t, c_t = trajectory(vecs, gen, couplings.n_atoms)
    return TimeSeries(grid, i_t, c_t)


def finite_difference_intensity(states, grid: TimeGrid) -> np.ndarray:
    """``-d/dt <n_exc>`` by second-order finite differences (cross-check only)."""
    n_exc = np.array([s.excitation_number() for s in states])
    return -np.gradient(n_exc, grid.points, edge_order=2)


def refine_peak(x, y, index: int):
    """Vertex of the parabola through samples ``index-1, index, index+1``.

    Handles non-uniform abscissae. At the ends of the array the sample itself
    is returned.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if index <= 0 or index >= len(x) - 1:
        return float(x[index]), float(y[index])
    x0, x1, x2 = x[index - 1 : index + 2]
    y0, y1, y2 = y[index - 1 : index + 2]
    # Newton form: y = y1 + b (x - x1) + c (x - x1)(x - x0)
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    c = (d12 - d01) / (x2 - x0)
    if c == 0.0:
        return float(x1), float(y1)
    b = d01 + c * (x1 - x0)
    xv = x1 - b / (2 * c)
    if not x0 <= xv <= x2:
        return float(x1), float(y1)
    yv = y1 + d01 * (xv - x1) + c * (xv - x1) * (xv - x0)
    return float(xv), float(yv)


def series_peak(t, y):
    """Refined global maximum ``(t_peak, y_peak)`` of sampled data."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("empty series")
    return refine_peak(t, y, int(np.argmax(y)))


def pulse_stats(series: TimeSeries, baseline_i0: float, baseline_c0: float) -> PulseStats:
    """Relative maxima of intensity and coherence over the grid."""
    if len(series.intensity) == 0:
        raise ValueError("empty series")
    t_i, i_max = series_peak(series.t, series.intensity)
    t_c, c_max = series_peak(series.t, series.coherence)
    return PulseStats(i_max - baseline_i0, t_i, c_max - baseline_c0, t_c, baseline_i0, baseline_c0)


def cooperativity(n_atoms: int, sphere_radius_xi: float) -> float:
    """Number density times wavelength cubed over 4 pi^2, in k0 units."""
    if not sphere_radius_xi > 0:
        raise ValueError("radius must be positive")
    density = n_atoms / (4.0 * np.pi * sphere_radius_xi**3 / 3.0)
    return float(density * (2 * np.pi) ** 3 / (4 * np.pi**2))

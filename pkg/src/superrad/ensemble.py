"""Monte Carlo averages over random configurations and sweeps in k0R.

Realization ``k`` of an ensemble always uses the seed stream
``realization_seed(base_seed, k)``. Realizations are processed in fixed
chunks whose statistics are merged in chunk order, so results are bitwise
identical for any number of workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .couplings import REGIMES, build_couplings
from .geometry import XI_MIN_DEFAULT, realization_seed, sample_configuration
from .liouvillian import LiouvillianMatrix
from .observables import TimeSeries, pulse_stats, refine_peak, trajectory
from .propagator import TimeGrid, evolve_vectors, superradiant_grid
from .state import INITIAL_STATES, initial_state

log = logging.getLogger(__name__)

CHUNK_SIZE = 32

# the k0R sequence of the subradiant time traces (ratio ~1.397)
FIG5_K0R = (0.466, 0.651, 0.909, 1.268, 1.770, 2.470)


def geometric_k0r_grid(n_below: int = 0, n_above: int = 0) -> np.ndarray:
    """:data:`FIG5_K0R` extended geometrically on both sides."""
    ratio = (FIG5_K0R[-1] / FIG5_K0R[0]) ** (1 / (len(FIG5_K0R) - 1))
    below = [FIG5_K0R[0] / ratio**k for k in range(n_below, 0, -1)]
    above = [FIG5_K0R[-1] * ratio**k for k in range(1, n_above + 1)]
    return np.array(below + list(FIG5_K0R) + above)


@dataclass(frozen=True)
class EnsembleSpec:
    n_atoms: int = 3
    k0R: float = 0.466
    n_samples: int = 5000
    base_seed: int = 0
    regime: str = "exact"
    initial: str = "fully_excited"
    grid: TimeGrid = field(default_factory=superradiant_grid)
    xi_min: float = XI_MIN_DEFAULT
    f0: float = 0.0

    def __post_init__(self):
        if self.n_atoms < 2:
            raise ValueError("ensembles need at least two atoms")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.initial not in INITIAL_STATES:
            raise ValueError(f"unknown initial state {self.initial!r}")
        if self.initial == "subradiant" and self.n_atoms != 3:
            raise ValueError("the subradiant initial state needs n_atoms = 3")
        if not self.k0R > self.xi_min:
            raise ValueError("k0R must exceed xi_min")

    @property
    def baselines(self) -> tuple[float, float]:
        """``(I0, C0)`` used for the relative pulse maxima."""
        if self.initial == "subradiant":
            return 1.0, 1.0
        return float(self.n_atoms), 0.0


def simulate_realization(spec: EnsembleSpec, index: int):
    """``(intensity, coherence)`` of realization ``index`` on ``spec.grid``."""
    config = sample_configuration(spec.n_atoms, spec.k0R, spec.xi_min, realization_seed(spec.base_seed, index))
    gen = LiouvillianMatrix(build_couplings(config, spec.regime, spec.f0))
    rho0 = initial_state(spec.initial, spec.n_atoms)
    states, top = evolve_vectors(gen, rho0, spec.grid)
    return trajectory(states, gen, top)


def _chunk_stats(spec: EnsembleSpec, start: int, stop: int):
    # Welford accumulation over one contiguous chunk, in index order
    n = 0
    mean = np.zeros((2, len(spec.grid)))
    m2 = np.zeros_like(mean)
    for k in range(start, stop):
        x = np.array(simulate_realization(spec, k))
        n += 1
        delta = x - mean
        mean += delta / n
        m2 += delta * (x - mean)
    return n, mean, m2


def _chunk_task(args):
    return _chunk_stats(*args)


def _merge(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), sa + sb + delta**2 * (na * nb / n)


def run_ensemble(spec: EnsembleSpec, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> TimeSeries:
    """Mean and standard error of I(t) and C(t) over ``spec.n_samples`` realizations."""
    bounds = [(s, min(s + chunk_size, spec.n_samples)) for s in range(0, spec.n_samples, chunk_size)]
    tasks = [(spec, s, e) for s, e in bounds]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    else:
        parts = [_chunk_task(t) for t in tasks]
    total = parts[0]
    for p in parts[1:]:
        total = _merge(total, p)
    n, mean, m2 = total
    if n > 1:
        stderr = np.sqrt(m2 / (n - 1) / n)
    else:
        stderr = np.zeros_like(mean)
    return TimeSeries(spec.grid, mean[0], mean[1], stderr[0], stderr[1], n_samples=n)


@dataclass(frozen=True)
class SweepRow:
    k0R: float
    a_intensity: float
    t_intensity: float
    a_coherence: float
    t_coherence: float
    n_samples: int
    a_intensity_stderr: float
    a_coherence_stderr: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    n_atoms: int = 3
    regime: str = "exact"
    initial: str = "fully_excited"

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: r.k0R)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def k0R(self) -> np.ndarray:
        return self.column("k0R")


def _stderr_at(t, stderr, t_peak):
    return float(np.interp(t_peak, t, stderr))


def sweep(base_spec: EnsembleSpec, k0R_values, workers: int = 1) -> SweepResult:
    """Run one ensemble per k0R and extract pulse statistics of the mean curves."""
    values = list(k0R_values)
    if not values:
        raise ValueError("empty k0R list")
    i0, c0 = base_spec.baselines
    rows = []
    for k0R in values:
        series = run_ensemble(replace(base_spec, k0R=float(k0R)), workers=workers)
        stats = pulse_stats(series, i0, c0)
        rows.append(
            SweepRow(
                float(k0R),
                stats.a_intensity,
                stats.t_intensity,
                stats.a_coherence,
                stats.t_coherence,
                series.n_samples,
                _stderr_at(series.t, series.intensity_stderr, stats.t_intensity),
                _stderr_at(series.t, series.coherence_stderr, stats.t_coherence),
            )
        )
        log.info("k0R=%.4g A_I=%.5g t_I=%.4g", k0R, stats.a_intensity, stats.t_intensity)
    return SweepResult(rows, base_spec.n_atoms, base_spec.regime, base_spec.initial)


def fit_power_law(points, window=None):
    """Least-squares ``value = prefactor * k0R**exponent`` in log-log space.

    ``points`` is an iterable of ``(k0R, value)`` pairs; ``window`` an optional
    closed ``(lo, hi)`` interval of k0R.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (k0R, value) pairs")
    if window is not None:
        lo, hi = window
        pts = pts[(pts[:, 0] >= lo) & (pts[:, 0] <= hi)]
    if len(pts) < 3:
        raise ValueError("need at least 3 points inside the window")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(x <= 0):
        raise ValueError("k0R must be positive")
    if not (np.all(y > 0) or np.all(y < 0)):
        raise ValueError("values change sign (or vanish) inside the window")
    sign = np.sign(y[0])
    slope, intercept = np.polyfit(np.log(x), np.log(np.abs(y)), 1)
    return float(slope), float(sign * np.exp(intercept))


def locate_extremum(x, y, kind: str = "max"):
    """Extremum of sampled ``y(x)`` refined by a three-point parabola."""
    y = np.asarray(y, dtype=float)
    sign = 1.0 if kind == "max" else -1.0
    xv, yv = refine_peak(x, sign * y, int(np.argmax(sign * y)))
    return xv, sign * yv


def zero_crossing(x, y):
    """First ``x`` where ``y`` falls to zero.

    The crossing is extrapolated linearly from the last two positive samples
    and clipped to the bracketing interval; returns ``None`` if ``y`` never
    reaches zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hits = np.flatnonzero(y <= 0)
    hits = hits[hits > 0]
    if hits.size == 0:
        return None
    k = int(hits[0])
    if k >= 2 and y[k - 1] > 0 and y[k - 2] > y[k - 1]:
        slope = (y[k - 1] - y[k - 2]) / (x[k - 1] - x[k - 2])
        guess = x[k - 1] - y[k - 1] / slope
    else:
        guess = x[k - 1] + (x[k] - x[k - 1]) * y[k - 1] / (y[k - 1] - y[k])
    return float(np.clip(guess, x[k - 1], x[k]))

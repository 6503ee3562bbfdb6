"""Exact propagation rho(t) = exp(A t) rho(0) on a time grid.

Two methods are available:

``modal``
    Diagonalize the small non-Hermitian matrix ``K_n`` of every excitation
    sector and solve the sector cascade by back-substitution. The state is then
    a sum of exponentials ``sum_m P[:, m] exp(nu_m t)``, evaluated on any grid
    at the cost of one matrix product. Fails (``ModalBreakdown``) when the
    eigenbasis is ill conditioned or two cascade rates are (nearly) resonant,
    which happens in the idealized regimes.
``expm``
    Scaling-and-squaring exponential of the dense generator for every distinct
    step of the grid, applied step by step.

``auto`` tries ``modal`` and falls back to ``expm``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .liouvillian import LiouvillianMatrix
from .state import BlockDensityMatrix, top_block

MODAL_MAX_COND = 1e8
MODAL_MAX_GROWTH = 1e6


class PropagationError(RuntimeError):
    pass


class ModalBreakdown(PropagationError):
    """The sector eigen-expansion is numerically unreliable for this generator."""


@dataclass(frozen=True)
class TimeGrid:
    points: np.ndarray
    spacing_mode: str = "uniform"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a time grid needs at least two points")
        if pts[0] != 0.0:
            raise ValueError("time grids start at t = 0")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if self.spacing_mode not in ("uniform", "log"):
            raise ValueError(f"unknown spacing mode {self.spacing_mode!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    @property
    def t_max(self) -> float:
        return float(self.points[-1])

    @classmethod
    def uniform(cls, t_max: float, n_points: int) -> TimeGrid:
        return cls(np.linspace(0.0, t_max, n_points), "uniform")

    @classmethod
    def log_after(cls, t1: float, n_linear: int, t_max: float, per_decade: int) -> TimeGrid:
        """``n_linear`` uniform points on ``[0, t1]``, then logarithmic up to ``t_max``.

        The logarithmic part is built octave by octave, each octave
        ``[t1 2^k, t1 2^(k+1)]`` holding equally spaced points, so the grid
        has only one distinct step per octave (cheap for step-wise
        exponentials) while the relative resolution stays ~constant.
        """
        if not 0 < t1 < t_max:
            raise ValueError("need 0 < t1 < t_max")
        if n_linear < 2:
            raise ValueError("n_linear must be >= 2")
        per_octave = max(1, int(round(per_decade * np.log10(2.0))))
        pts = [np.linspace(0.0, t1, n_linear)]
        start = t1
        while start < t_max:
            step = start / per_octave
            octave = start + step * np.arange(1, per_octave + 1)
            pts.append(octave[octave < t_max * (1 - 1e-12)])
            start *= 2.0
        pts.append([t_max])
        return cls(np.concatenate(pts), "log")


def superradiant_grid() -> TimeGrid:
    """Default grid for fully excited runs: 2000 points on [0, 10]."""
    return TimeGrid.uniform(10.0, 2000)


def subradiant_grid(t_max: float = 1e5) -> TimeGrid:
    """200 uniform points on [0, 1], then 40 points per decade up to ``t_max``."""
    return TimeGrid.log_after(1.0, 200, t_max, 40)


def sweep_grid(t_max: float, t1: float = 1e-6, per_decade: int = 60) -> TimeGrid:
    """Log grid resolving peaks from ~1e-5 up to ``t_max`` with constant relative step."""
    return TimeGrid.log_after(t1, 4, t_max, per_decade)


def _times(grid) -> np.ndarray:
    return grid.points if isinstance(grid, TimeGrid) else TimeGrid(grid).points


@dataclass
class ModalSolution:
    """``vec(rho(t)) = modes @ exp(rates * t)`` on the sectors ``0..top``."""

    rates: np.ndarray
    modes: np.ndarray
    top: int
    n_atoms: int
    growth: float = field(default=1.0)

    def vectors(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        return np.exp(np.multiply.outer(times, self.rates)) @ self.modes.T


def modal_solution(generator: LiouvillianMatrix, initial: BlockDensityMatrix, top: int | None = None) -> ModalSolution:
    """Sector-by-sector eigen-expansion of the evolution of ``initial``."""
    top = top_block(initial) if top is None else top
    K = generator.effective_blocks[: top + 1]
    kappa, V, W = [], [], []
    for Kn in K:
        lam, vec = np.linalg.eig(Kn)
        if np.linalg.cond(vec) > MODAL_MAX_COND:
            raise ModalBreakdown("ill-conditioned sector eigenbasis")
        kappa.append(lam)
        V.append(vec)
        W.append(np.linalg.inv(vec))
    mu = [(-1j * (lam[:, None] - lam.conj()[None, :])).ravel() for lam in kappa]
    rates = np.concatenate(mu)
    sizes = [m.size for m in mu]
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    x0 = [(W[n] @ initial.blocks[n] @ W[n].conj().T).ravel() for n in range(top + 1)]
    coeff = [None] * (top + 1)  # coeff[n]: (sizes[n], modes of sectors n..top)
    coeff[top] = np.diag(x0[top])
    for n in range(top - 1, -1, -1):
        T = generator.transfer(n, left=W[n], right=V[n + 1])
        src = T @ coeff[n + 1]
        denom = rates[None, offsets[n + 1] :] - mu[n][:, None]
        scale = np.maximum(1.0, np.maximum(np.abs(rates[None, offsets[n + 1] :]), np.abs(mu[n][:, None])))
        if np.any(np.abs(denom) < 1e-9 * scale):
            raise ModalBreakdown("resonant rates between neighbouring sectors")
        part = src / denom
        own = x0[n] - part.sum(axis=1)
        coeff[n] = np.concatenate([np.diag(own), part], axis=1)

    size = offsets[-1]
    modes = np.zeros((size, size), complex)
    for n in range(top + 1):
        modes[offsets[n] : offsets[n + 1], offsets[n] :] = np.kron(V[n], V[n].conj()) @ coeff[n]
    if not np.all(np.isfinite(modes)):
        raise ModalBreakdown("non-finite mode coefficients")
    growth = float(np.abs(modes).max())
    if growth > MODAL_MAX_GROWTH:
        raise ModalBreakdown(f"mode coefficients grow to {growth:.3g}")
    return ModalSolution(rates, modes, top, generator.n_atoms, growth)


def _expm_vectors(generator: LiouvillianMatrix, initial: BlockDensityMatrix, times, top: int) -> np.ndarray:
    A = generator.truncated(top)
    x = initial.to_vector()[: A.shape[0]].copy()
    out = np.empty((times.size, x.size), complex)
    out[0] = x
    steps = np.diff(times)
    cache = {}
    for k, dt in enumerate(steps):
        key = float(f"{dt:.12e}")
        E = cache.get(key)
        if E is None:
            half = cache.get(float(f"{dt / 2:.12e}"))
            E = half @ half if half is not None else scipy.linalg.expm(A * dt)
            if not np.all(np.isfinite(E)):
                raise PropagationError(f"matrix exponential overflowed for step {dt:g}")
            if len(cache) < 256:
                cache[key] = E
        x = E @ x
        out[k + 1] = x
    return out


def evolve_vectors(generator: LiouvillianMatrix, initial: BlockDensityMatrix, grid, method: str = "auto"):
    """Vectorized states on the grid, restricted to the populated sectors.

    Returns ``(states, top)`` where ``states`` has shape ``(T, S)`` and ``S``
    counts the slots of sectors ``0..top``.
    """
    if initial.n_atoms != generator.n_atoms:
        raise ValueError(f"state has {initial.n_atoms} atoms, generator {generator.n_atoms}")
    times = _times(grid)
    top = top_block(initial)
    if method not in ("auto", "modal", "expm"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "modal"):
        try:
            sol = modal_solution(generator, initial, top)
        except ModalBreakdown:
            if method == "modal":
                raise
        else:
            states = sol.vectors(times)
            states[0] = initial.to_vector()[: states.shape[1]]
            return states, top
    return _expm_vectors(generator, initial, times, top), top


def evolve(generator: LiouvillianMatrix, initial: BlockDensityMatrix, grid, method: str = "auto"):
    """List of :class:`BlockDensityMatrix`, one per grid point."""
    states, _ = evolve_vectors(generator, initial, grid, method)
    out = [BlockDensityMatrix.from_vector(v, initial.n_atoms) for v in states]
    out[0] = initial.copy()
    return out

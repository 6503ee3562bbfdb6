"""Random atomic configurations and pair geometry.

Lengths are dimensionless: every coordinate is premultiplied by the
radiation wavenumber k0, so a separation is directly xi = k0 * r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# k0 * a0 for a 500 nm transition
XI_MIN_DEFAULT = 6.6e-4
MAX_REDRAWS_DEFAULT = 10**6


class SamplingError(RuntimeError):
    """Raised when no configuration satisfying the cutoff could be drawn."""


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def realization_seed(base_seed, index: int) -> np.random.SeedSequence:
    """Independent child stream ``index`` of ``base_seed``."""
    return np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))


@dataclass(frozen=True)
class AtomConfiguration:
    positions: np.ndarray
    dipole_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must be an (N, 3) array with N >= 1")
        axis = np.array(self.dipole_axis, dtype=float)
        if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise ValueError("dipole_axis must be a unit 3-vector")
        pos.setflags(write=False)
        axis.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "dipole_axis", axis)
        if len(pos) > 1 and self.pair_distances().min() <= 0.0:
            raise ValueError("atoms must occupy distinct positions")

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    def pair_distances(self) -> np.ndarray:
        """Condensed vector of the N(N-1)/2 separations, pairs in (i<j) order."""
        i, j = np.triu_indices(self.n_atoms, 1)
        return np.linalg.norm(self.positions[i] - self.positions[j], axis=1)

    def separation_matrices(self):
        """Full ``(xi, cos^2 alpha)`` matrices; the diagonal holds zeros."""
        rel = self.positions[:, None, :] - self.positions[None, :, :]
        xi = np.linalg.norm(rel, axis=-1)
        proj = rel @ self.dipole_axis
        with np.errstate(invalid="ignore", divide="ignore"):
            cos2 = np.where(xi > 0, (proj / np.where(xi > 0, xi, 1.0)) ** 2, 0.0)
        return xi, np.clip(cos2, 0.0, 1.0)

    def dumps(self, k0R=None, seed=None) -> str:
        lines = [f"# k0R={k0R if k0R is not None else ''} seed={seed if seed is not None else ''}"]
        lines += [" ".join(f"{x:.17g}" for x in p) for p in self.positions]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, dipole_axis=(0.0, 0.0, 1.0)) -> AtomConfiguration:
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        return cls(np.array(rows, dtype=float), np.asarray(dipole_axis, dtype=float))


@dataclass(frozen=True)
class PairGeometry:
    xi: float
    alpha: float

    def __post_init__(self):
        if not self.xi > 0:
            raise ValueError("xi must be strictly positive")
        if not 0.0 <= self.alpha <= np.pi:
            raise ValueError("alpha must lie in [0, pi]")

    @property
    def cos2(self) -> float:
        return float(np.cos(self.alpha) ** 2)


def pair_geometry(config: AtomConfiguration, i: int, j: int) -> PairGeometry:
    n = config.n_atoms
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"atom index out of range for {n} atoms")
    if i == j:
        raise ValueError("pair_geometry needs two distinct atoms")
    r = config.positions[i] - config.positions[j]
    xi = float(np.linalg.norm(r))
    cosa = float(np.clip(r @ config.dipole_axis / xi, -1.0, 1.0))
    return PairGeometry(xi, float(np.arccos(cosa)))


def uniform_ball(rng: np.random.Generator, n_points: int, radius: float = 1.0) -> np.ndarray:
    """``n_points`` independent points uniformly distributed in a ball."""
    direction = rng.standard_normal((n_points, 3))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    r = radius * rng.random(n_points) ** (1.0 / 3.0)
    return direction * r[:, None]


def sample_configuration(
    n_atoms: int,
    k0R: float,
    xi_min: float = XI_MIN_DEFAULT,
    rng_seed=0,
    *,
    dipole_axis=(0.0, 0.0, 1.0),
    max_redraws: int = MAX_REDRAWS_DEFAULT,
) -> AtomConfiguration:
    """Draw atoms in a sphere and rescale so the mean pair distance is ``k0R``.

    A configuration with any separation ``<= xi_min`` is discarded as a
    whole and redrawn. ``rng_seed`` is an integer or a ``SeedSequence``.
    """
    if n_atoms < 2:
        raise ValueError("sampling needs at least two atoms")
    if not k0R > xi_min:
        raise ValueError(f"k0R={k0R} must exceed xi_min={xi_min}")
    rng = np.random.default_rng(_as_seed_sequence(rng_seed))
    iu, ju = np.triu_indices(n_atoms, 1)
    for _ in range(max_redraws):
        pos = uniform_ball(rng, n_atoms)
        d = np.linalg.norm(pos[iu] - pos[ju], axis=1)
        mean = d.mean()
        if mean == 0.0:
            continue
        scale = k0R / mean
        if (d * scale).min() > xi_min:
            return AtomConfiguration(pos * scale, np.asarray(dipole_axis, dtype=float))
    raise SamplingError(
        f"no configuration of {n_atoms} atoms with all separations > {xi_min} after "
        f"{max_redraws} draws at k0R={k0R}; k0R is too small for this cutoff"
    )

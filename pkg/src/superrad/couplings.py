"""Collective decay rates gamma_ij and dipole-dipole shifts f_ij.

Both are in units of the single-atom decay rate gamma_0 = 1 and depend on a
pair only through its dimensionless separation xi and cos^2 of the angle to
the common dipole axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .geometry import AtomConfiguration, PairGeometry

REGIMES = ("exact", "distant", "close", "pure_superradiant")

XI_SWITCH = 1e-2
_N_SERIES = 6

# (xi cos xi - sin xi) / xi^3 = sum_k (-1)^k 2k xi^(2k-2) / (2k+1)!,  k >= 1
_RADIAL_GAMMA = np.array([(-1) ** k * 2 * k / factorial(2 * k + 1) for k in range(1, _N_SERIES + 1)])
# xi sin xi + cos xi = 1 + sum_k (-1)^k (1-2k) xi^(2k) / (2k)!,  k >= 1
_RADIAL_F = np.array([1.0] + [(-1) ** k * (1 - 2 * k) / factorial(2 * k) for k in range(1, _N_SERIES)])
# sin xi / xi
_SINC = np.array([(-1) ** k / factorial(2 * k + 1) for k in range(_N_SERIES)])


def _poly_xi2(coeffs, xi):
    x2 = xi * xi
    out = np.zeros_like(xi)
    for c in coeffs[::-1]:
        out = out * x2 + c
    return out


def gamma_from(xi, cos2):
    """Vectorized cross-damping rate for separations ``xi > 0``."""
    xi = np.asarray(xi, dtype=float)
    cos2 = np.asarray(cos2, dtype=float)
    xi, cos2 = np.broadcast_arrays(xi, cos2)
    small = xi < XI_SWITCH
    xs = np.where(small, XI_SWITCH, xi)
    radial = (xs * np.cos(xs) - np.sin(xs)) / xs**3
    radial = np.where(small, _poly_xi2(_RADIAL_GAMMA, xi), radial)
    sinc = np.where(small, _poly_xi2(_SINC, xi), np.sin(xs) / xs)
    out = 1.5 * ((1 - 3 * cos2) * radial + (1 - cos2) * sinc)
    return out[()] if out.ndim == 0 else out


def f_from(xi, cos2):
    """Vectorized dipole-dipole shift for separations ``xi > 0``."""
    xi = np.asarray(xi, dtype=float)
    cos2 = np.asarray(cos2, dtype=float)
    xi, cos2 = np.broadcast_arrays(xi, cos2)
    small = xi < XI_SWITCH
    near = np.where(small, _poly_xi2(_RADIAL_F, xi), xi * np.sin(xi) + np.cos(xi))
    out = 0.75 * ((1 - 3 * cos2) * near / xi**3 - (1 - cos2) * np.cos(xi) / xi)
    return out[()] if out.ndim == 0 else out


def f_static(xi, cos2):
    """Short-distance limit of the shift: the static 1/xi^3 interaction."""
    return 0.75 * (1 - 3 * np.asarray(cos2, dtype=float)) / np.asarray(xi, dtype=float) ** 3


def gamma_exact(geom: PairGeometry) -> float:
    return float(gamma_from(geom.xi, geom.cos2))


def f_exact(geom: PairGeometry) -> float:
    return float(f_from(geom.xi, geom.cos2))


@dataclass(frozen=True)
class CouplingSet:
    gamma: np.ndarray
    f: np.ndarray
    regime: str = "exact"

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        f = np.array(self.f, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or f.shape != g.shape:
            raise ValueError("gamma and f must be matching square matrices")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        g.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "f", f)

    @property
    def n_atoms(self) -> int:
        return self.gamma.shape[0]

    def violations(self, tol=1e-10) -> list[str]:
        """Human-readable list of broken invariants (empty when consistent)."""
        out = []
        g, f = self.gamma, self.f
        if np.abs(np.diag(g) - 1.0).max() > tol:
            out.append("gamma_ii != 1")
        if np.abs(g - g.T).max() > tol or np.abs(f - f.T).max() > tol:
            out.append("matrices not symmetric")
        if np.abs(g).max() > 1.0 + tol:
            out.append("|gamma_ij| > 1")
        if np.abs(np.diag(f)).max() > 0:
            out.append("f_ii != 0")
        if np.linalg.eigvalsh(g).min() < -tol:
            out.append("gamma not positive semidefinite")
        return out


def build_couplings(config: AtomConfiguration, regime: str = "exact", f0: float = 0.0) -> CouplingSet:
    """Coupling matrices of ``config`` in one of :data:`REGIMES`.

    ``f0`` is the common shift used by the ``pure_superradiant`` regime.
    """
    n = config.n_atoms
    off = ~np.eye(n, dtype=bool)
    if regime == "distant":
        return CouplingSet(np.eye(n), np.zeros((n, n)), regime)
    if regime == "pure_superradiant":
        return CouplingSet(np.ones((n, n)), np.where(off, float(f0), 0.0), regime)
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; choose from {REGIMES}")

    xi, cos2 = config.separation_matrices()
    xi_safe = np.where(off, xi, 1.0)
    if regime == "close":
        gamma = np.ones((n, n))
        f = np.where(off, f_static(xi_safe, cos2), 0.0)
    else:
        gamma = np.where(off, gamma_from(xi_safe, cos2), 1.0)
        f = np.where(off, f_from(xi_safe, cos2), 0.0)
    return CouplingSet(gamma, f, regime)

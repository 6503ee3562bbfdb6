"""Closed-form intensity and coherence curves.

Independent emission holds for any N; pure superradiance from the fully
excited state is known in closed form for N = 3, 4, 5. Times are in units of
1/gamma_0.
"""

import numpy as np
from scipy.optimize import minimize_scalar

from .observables import PulseStats

SUPPORTED_N = (3, 4, 5)


def independent_emission(n_atoms: int, t):
    """``(N exp(-t), 0)``."""
    t = np.asarray(t, dtype=float)
    return n_atoms * np.exp(-t), np.zeros_like(t)


# exponentials are combined (e.g. e^{-4t} e^{t} -> e^{-3t}) so large t never gives inf * 0


def _pure_3(t):
    i = 3 * (8 * np.exp(-4 * t) + np.exp(-3 * t) * (12 * t - 7))
    c = 3 * (6 * np.exp(-4 * t) + np.exp(-3 * t) * (8 * t - 6))
    return i, c


def _pure_4(t):
    i = np.exp(-6 * t) * (72 * t + 96) + 4 * np.exp(-4 * t) * (36 * t - 23)
    c = 12 * (np.exp(-6 * t) * (4 * t + 6) + np.exp(-4 * t) * (9 * t - 6))
    return i, c


def _pure_5(t):
    i = (5 / 3) * (16 * np.exp(-8 * t) * (24 * t - 1) + np.exp(-5 * t) * (240 * t - 143) + 162 * np.exp(-9 * t))
    c = (20 / 3) * (5 * (6 * t + 5) * np.exp(-8 * t) + np.exp(-5 * t) * (48 * t - 25))
    return i, c


_PURE = {3: _pure_3, 4: _pure_4, 5: _pure_5}


def pure_superradiance(n_atoms: int, t):
    """``(I(t), C(t))`` for the fully excited state with gamma_ij = 1."""
    try:
        curve = _PURE[n_atoms]
    except KeyError:
        raise ValueError(f"closed forms exist for N in {SUPPORTED_N}, not {n_atoms}") from None
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    return curve(t)


def _maximize(fn, t_hi=3.0):
    coarse = np.linspace(0.0, t_hi, 3001)
    vals = fn(coarse)
    k = int(np.argmax(vals))
    lo, hi = coarse[max(k - 1, 0)], coarse[min(k + 1, coarse.size - 1)]
    res = minimize_scalar(lambda s: -fn(s), bracket=(lo, coarse[k], hi), method="golden", tol=1e-10)
    return float(res.x), float(-res.fun)


def pure_superradiance_maxima(n_atoms: int) -> PulseStats:
    """Peak heights and times of the closed-form curves (baselines N and 0)."""
    t_i, i_max = _maximize(lambda s: pure_superradiance(n_atoms, s)[0])
    t_c, c_max = _maximize(lambda s: pure_superradiance(n_atoms, s)[1])
    return PulseStats(i_max - n_atoms, t_i, c_max, t_c, float(n_atoms), 0.0)

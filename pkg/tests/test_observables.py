import numpy as np
import pytest

from conftest import random_block_state, random_couplings
from superrad.couplings import build_couplings
from superrad.geometry import sample_configuration
from superrad.liouvillian import LiouvillianMatrix
from superrad.observables import (
    TimeSeries,
    coherence_l1,
    cooperativity,
    finite_difference_intensity,
    intensity,
    intensity_series,
    pulse_stats,
    refine_peak,
)
from superrad.propagator import TimeGrid, evolve, superradiant_grid
from superrad.reference import pure_superradiance, pure_superradiance_maxima
from superrad.state import fully_excited_state, ground_state, subradiant_state

QUOTED_MAXIMA = {
    3: (3.225, 0.157, 1.109, 0.438),
    4: (4.857, 0.214, 2.460, 0.390),
    5: (6.879, 0.233, 4.892, 0.352),
}


def test_intensity_examples():
    cs = random_couplings(4, 0.6, 3)
    assert intensity(fully_excited_state(4), cs) == pytest.approx(4.0, abs=1e-14)
    assert intensity(ground_state(4), cs) == 0.0
    pure = build_couplings(sample_configuration(3, 0.6, 6.6e-4, 3), "pure_superradiant")
    assert abs(intensity(subradiant_state(), pure)) < 1e-15
    with pytest.raises(ValueError):
        intensity(fully_excited_state(3), cs)


def test_intensity_nonnegative_on_random_states(rng):
    for seed in range(50):
        cs = random_couplings(4, 0.2 + 0.1 * seed, seed)
        assert intensity(random_block_state(4, rng), cs) >= -1e-10


def test_coherence_examples():
    assert coherence_l1(fully_excited_state(3)) == 0
    assert coherence_l1(subradiant_state()) == pytest.approx(1.0)
    psi = np.zeros(4)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    assert coherence_l1(np.outer(psi, psi)) == pytest.approx(1.0)


def test_coherence_block_equals_dense(rng):
    rho = random_block_state(4, rng)
    assert coherence_l1(rho) == pytest.approx(coherence_l1(rho.to_dense()), rel=1e-13)


def test_distant_series_is_independent_decay():
    cs = build_couplings(sample_configuration(3, 0.5, 6.6e-4, 1), "distant")
    grid = TimeGrid.uniform(5.0, 101)
    series = intensity_series(evolve(LiouvillianMatrix(cs), fully_excited_state(3), grid), cs, grid)
    assert np.abs(series.intensity - 3 * np.exp(-grid.points)).max() <= 1e-8
    assert np.abs(series.coherence).max() <= 1e-12


def test_ground_state_series_is_zero():
    cs = random_couplings(3, 0.5, 1)
    grid = TimeGrid.uniform(1.0, 5)
    series = intensity_series(evolve(LiouvillianMatrix(cs), ground_state(3), grid), cs, grid)
    assert not series.intensity.any() and not series.coherence.any()


def test_pure_superradiant_series():
    cs = build_couplings(sample_configuration(3, 0.5, 6.6e-4, 1), "pure_superradiant")
    grid = TimeGrid.uniform(5.0, 101)
    series = intensity_series(evolve(LiouvillianMatrix(cs), fully_excited_state(3), grid), cs, grid)
    i_ref, _ = pure_superradiance(3, grid.points)
    assert np.max(np.abs(series.intensity / i_ref - 1)) < 1e-6


def test_expectation_and_finite_difference_forms_converge():
    errs = []
    for seed, k0R in ((5, 0.6), (2, 1.0), (7, 1.45)):
        gen = LiouvillianMatrix(random_couplings(3, k0R, seed))
        # the asymptotic regime needs the beats to be resolved by the grid
        assert np.abs(gen.couplings.f).max() * 10.0 / 2000 < 0.2
        row = []
        for n in (2000, 3999, 7997):  # default grid, then halved steps
            grid = TimeGrid.uniform(10.0, n)
            states = evolve(gen, fully_excited_state(3), grid)
            exact = intensity_series(states, gen.couplings, grid).intensity
            row.append(np.abs(exact - finite_difference_intensity(states, grid)).max())
        errs.append(row)
    errs = np.array(errs)
    # O(dt^2): each halving divides the deviation by ~4
    ratios = errs[:, :-1] / errs[:, 1:]
    assert np.all((ratios > 3.5) & (ratios < 4.5))
    assert errs[:, 0].max() < 1e-3
    assert errs[:, -1].max() < 1e-4


def test_refine_peak_exact_on_parabola():
    x = np.array([0.0, 0.3, 1.0, 1.2, 2.5])
    y = -((x - 0.9) ** 2) + 2
    assert refine_peak(x, y, 2) == pytest.approx((0.9, 2.0), abs=1e-14)
    assert refine_peak(x, y, 0) == (0.0, y[0])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pulse_stats_on_closed_forms(n):
    grid = superradiant_grid()
    i_t, c_t = pure_superradiance(n, grid.points)
    stats = pulse_stats(TimeSeries(grid, i_t, c_t), n, 0.0)
    exact = pure_superradiance_maxima(n)
    for a, b in (
        (stats.peak_intensity, exact.peak_intensity),
        (stats.t_intensity, exact.t_intensity),
        (stats.peak_coherence, exact.peak_coherence),
        (stats.t_coherence, exact.t_coherence),
    ):
        assert a == pytest.approx(b, rel=1e-3)
    quoted = QUOTED_MAXIMA[n]
    got = (stats.peak_intensity, stats.t_intensity, stats.peak_coherence, stats.t_coherence)
    assert np.allclose(got, quoted, rtol=1e-3, atol=6e-4)


def test_pulse_stats_monotone_series():
    grid = superradiant_grid()
    s = pulse_stats(TimeSeries(grid, 3 * np.exp(-grid.points), np.zeros(len(grid))), 3.0, 0.0)
    assert s.a_intensity == 0.0 and s.t_intensity == 0.0 and s.t_coherence == 0.0


def test_pulse_stats_n3_values():
    grid = superradiant_grid()
    i_t, c_t = pure_superradiance(3, grid.points)
    s = pulse_stats(TimeSeries(grid, i_t, c_t), 3.0, 0.0)
    assert s.a_intensity == pytest.approx(0.225, abs=1e-3)
    assert s.t_intensity == pytest.approx(0.157, abs=1e-3)
    assert s.a_coherence == pytest.approx(1.109, abs=1e-3)
    assert s.t_coherence == pytest.approx(0.438, abs=1e-3)


def test_time_series_validation():
    grid = TimeGrid.uniform(1.0, 5)
    with pytest.raises(ValueError):
        TimeSeries(grid, np.zeros(4), np.zeros(5))


def test_cooperativity():
    assert cooperativity(3, 2.0) == pytest.approx(cooperativity(3, 1.0) / 8)
    assert cooperativity(0, 1.0) == 0.0
    with pytest.raises(ValueError):
        cooperativity(3, 0.0)
    # optimal geometry: container radius of a ball whose mean pair distance is k0R ~ 0.67
    # (mean distance of two uniform points in a unit ball is 36/35)
    c = cooperativity(3, 0.67 * 35 / 36)
    assert 1.0 < c < 100.0

import numpy as np
import pytest
from dataclasses import replace

from superrad.couplings import build_couplings
from superrad.ensemble import (
    FIG5_K0R,
    EnsembleSpec,
    SweepResult,
    SweepRow,
    fit_power_law,
    geometric_k0r_grid,
    locate_extremum,
    run_ensemble,
    simulate_realization,
    sweep,
    zero_crossing,
)
from superrad.geometry import realization_seed, sample_configuration
from superrad.liouvillian import LiouvillianMatrix
from superrad.observables import trajectory
from superrad.propagator import TimeGrid, evolve_vectors, superradiant_grid
from superrad.reference import pure_superradiance
from superrad.state import fully_excited_state

SHORT = TimeGrid.uniform(3.0, 301)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(n_samples=0)
    with pytest.raises(ValueError):
        EnsembleSpec(n_atoms=4, initial="subradiant")
    with pytest.raises(ValueError):
        EnsembleSpec(regime="strong")
    with pytest.raises(ValueError):
        EnsembleSpec(initial="dicke")
    assert EnsembleSpec(initial="subradiant").baselines == (1.0, 1.0)
    assert EnsembleSpec(n_atoms=4).baselines == (4.0, 0.0)


def test_single_sample_equals_realization_zero():
    spec = EnsembleSpec(n_samples=1, base_seed=42, grid=SHORT)
    series = run_ensemble(spec)
    cfg = sample_configuration(3, spec.k0R, spec.xi_min, realization_seed(42, 0))
    gen = LiouvillianMatrix(build_couplings(cfg, "exact"))
    states, top = evolve_vectors(gen, fully_excited_state(3), SHORT)
    i_t, c_t = trajectory(states, gen, top)
    assert np.array_equal(series.intensity, i_t)
    assert np.array_equal(series.coherence, c_t)
    assert not series.intensity_stderr.any()


def test_distant_regime_is_geometry_independent():
    for k0R in (0.2, 3.0):
        series = run_ensemble(EnsembleSpec(k0R=k0R, n_samples=40, regime="distant", grid=SHORT))
        assert np.abs(series.intensity - 3 * np.exp(-SHORT.points)).max() <= 1e-10
        assert series.intensity_stderr.max() <= 1e-10


def test_worker_count_does_not_change_result():
    spec = EnsembleSpec(k0R=0.65, n_samples=70, base_seed=7, grid=SHORT)
    a = run_ensemble(spec, workers=1)
    b = run_ensemble(spec, workers=3)
    for name in ("intensity", "coherence", "intensity_stderr", "coherence_stderr"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_merge_matches_direct_statistics():
    spec = EnsembleSpec(k0R=0.8, n_samples=45, base_seed=3, grid=SHORT)
    series = run_ensemble(spec, chunk_size=8)
    data = np.array([simulate_realization(spec, k)[0] for k in range(45)])
    assert np.allclose(series.intensity, data.mean(axis=0), rtol=1e-12, atol=1e-14)
    assert np.allclose(series.intensity_stderr, data.std(axis=0, ddof=1) / np.sqrt(45), rtol=1e-9, atol=1e-14)


def test_stderr_scaling():
    base = EnsembleSpec(k0R=0.65, base_seed=11, grid=TimeGrid.uniform(1.0, 101))
    small = run_ensemble(replace(base, n_samples=500))
    large = run_ensemble(replace(base, n_samples=2000))
    k = np.argmax(small.intensity)
    ratio = small.intensity_stderr[k] / large.intensity_stderr[k]
    assert ratio == pytest.approx(2.0, rel=0.15)


def test_fig2_ordering_at_peak():
    # averaged pulse sits between pure superradiance and independent decay
    spec = EnsembleSpec(k0R=0.466, n_samples=300, grid=superradiant_grid())
    series = run_ensemble(spec)
    k = int(np.argmax(series.intensity))
    t = series.t[k]
    assert 3 * np.exp(-t) < series.intensity[k] < pure_superradiance(3, t)[0]


def test_pure_envelope_at_small_k0r():
    spec = EnsembleSpec(k0R=0.3, n_samples=200, grid=superradiant_grid())
    series = run_ensemble(spec)
    i_pure, _ = pure_superradiance(3, series.t)
    # envelope over the burst; later the pure cascade has emptied faster and lies below
    burst = series.t <= 0.5
    assert np.all(series.intensity[burst] <= i_pure[burst] + 3 * series.intensity_stderr[burst] + 1e-12)


def test_sweep_rows_sorted_and_baselines():
    spec = EnsembleSpec(n_samples=20, grid=SHORT)
    result = sweep(spec, [1.0, 0.5, 0.7])
    assert list(result.k0R) == [0.5, 0.7, 1.0]
    assert all(r.a_intensity_stderr >= 0 and r.a_coherence_stderr >= 0 for r in result.rows)
    sub = sweep(replace(spec, initial="subradiant"), [0.5])
    # subradiant baselines (1, 1): C starts at 1, so A_C >= 0 and I-baseline is 1
    assert sub.rows[0].a_coherence >= -1e-12
    with pytest.raises(ValueError):
        sweep(spec, [])


def test_fit_power_law():
    x = np.linspace(0.1, 0.5, 9)
    e, p = fit_power_law(zip(x, 2.5 * x**3))
    assert e == pytest.approx(3.0, abs=1e-12) and p == pytest.approx(2.5, rel=1e-12)
    e, p = fit_power_law(zip(x, -0.3 * x**-3), window=(0.1, 0.3))
    assert e == pytest.approx(-3.0, abs=1e-12) and p == pytest.approx(-0.3, rel=1e-12)
    with pytest.raises(ValueError):
        fit_power_law([(0.1, 1.0), (0.2, 2.0)])
    with pytest.raises(ValueError):
        fit_power_law([(0.1, 1.0), (0.2, -2.0), (0.3, 1.0)])


def test_extremum_and_zero_crossing():
    x = np.linspace(0, 2, 21)
    y = 1 - (x - 0.67) ** 2
    xv, yv = locate_extremum(x, y)
    assert xv == pytest.approx(0.67, abs=1e-12) and yv == pytest.approx(1.0)
    xv, yv = locate_extremum(x, -y, kind="min")
    assert xv == pytest.approx(0.67, abs=1e-12) and yv == pytest.approx(-1.0)
    assert zero_crossing(x, 1.3 - x) == pytest.approx(1.3, abs=1e-12)
    assert zero_crossing(x, 1 + x) is None


def test_zero_crossing_handles_clipped_maxima():
    # A_I saturates at exactly 0 once the pulse vanishes
    x = np.array([1.0, 1.1, 1.2, 1.3, 1.4, 1.5])
    y = np.maximum(0.0, 0.1 * (1.33 - x))
    assert zero_crossing(x, y) == pytest.approx(1.33, abs=1e-9)


def test_k0r_grid():
    g = geometric_k0r_grid(2, 1)
    assert np.allclose(g[2:8], FIG5_K0R)
    r = g[1:] / g[:-1]
    assert np.allclose(r, r[0], rtol=5e-3)


def test_sweep_result_column():
    rows = [SweepRow(0.5, 0.1, 0.2, 0.3, 0.4, 10, 0.01, 0.02)]
    res = SweepResult(rows)
    assert res.column("t_coherence")[0] == 0.4

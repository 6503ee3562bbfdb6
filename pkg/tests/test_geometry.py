import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from superrad.geometry import (
    AtomConfiguration,
    PairGeometry,
    SamplingError,
    pair_geometry,
    realization_seed,
    sample_configuration,
    uniform_ball,
)


def test_two_atoms_distance_is_k0r():
    cfg = sample_configuration(2, 0.5, 6.6e-4, 7)
    assert cfg.pair_distances()[0] == pytest.approx(0.5, rel=1e-14)


def test_three_atoms_mean_distance():
    cfg = sample_configuration(3, 0.466, 6.6e-4, 11)
    assert abs(cfg.pair_distances().mean() - 0.466) <= 1e-12 * 0.466


def test_same_seed_same_positions():
    a = sample_configuration(4, 0.9, 6.6e-4, 3)
    b = sample_configuration(4, 0.9, 6.6e-4, 3)
    assert np.array_equal(a.positions, b.positions)
    c = sample_configuration(4, 0.9, 6.6e-4, 4)
    assert not np.array_equal(a.positions, c.positions)


def test_seed_sequences_are_accepted():
    a = sample_configuration(3, 1.0, 6.6e-4, realization_seed(5, 2))
    b = sample_configuration(3, 1.0, 6.6e-4, realization_seed(5, 2))
    assert np.array_equal(a.positions, b.positions)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_rescaling_exact_over_seeds(n):
    for seed in range(100):
        k0R = 0.05 + 3.0 * ((seed * 0.618) % 1.0)
        cfg = sample_configuration(n, k0R, 6.6e-4, seed)
        assert abs(cfg.pair_distances().mean() / k0R - 1.0) <= 1e-12


def test_cutoff_respected_and_whole_redraw():
    # a large cutoff relative to k0R forces many rejections
    for seed in range(30):
        cfg = sample_configuration(4, 0.3, 0.1, seed)
        assert cfg.pair_distances().min() > 0.1


def test_cutoff_exhaustion_raises():
    with pytest.raises(SamplingError, match="too small"):
        sample_configuration(6, 0.2, 0.19, 0, max_redraws=50)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        sample_configuration(1, 0.5)
    with pytest.raises(ValueError):
        sample_configuration(3, 1e-4, 6.6e-4)


def test_uniform_ball_radial_law():
    rng = np.random.default_rng(2024)
    r = np.linalg.norm(uniform_ball(rng, 100_000), axis=1)
    # P(r < u) = u^3  <=>  r^3 uniform on [0, 1]
    p = stats.kstest(r**3, "uniform").pvalue
    assert p > 0.01


@pytest.mark.parametrize(
    "q, xi, alpha",
    [
        ((0, 0, 1), 1.0, 0.0),
        ((1, 0, 0), 1.0, np.pi / 2),
        ((1, 0, 1), np.sqrt(2), np.pi / 4),
    ],
)
def test_pair_geometry_examples(q, xi, alpha):
    cfg = AtomConfiguration(np.array([[0, 0, 0], q], dtype=float))
    g = pair_geometry(cfg, 1, 0)
    assert g.xi == pytest.approx(xi, abs=1e-15)
    assert g.alpha == pytest.approx(alpha, abs=1e-12)


def test_pair_geometry_rejects_same_index():
    cfg = AtomConfiguration(np.eye(3))
    with pytest.raises(ValueError):
        pair_geometry(cfg, 1, 1)
    with pytest.raises(IndexError):
        pair_geometry(cfg, 0, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.floats(0.05, 5.0))
def test_pair_symmetry(seed, n, k0R):
    cfg = sample_configuration(n, k0R, 6.6e-4, seed)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = pair_geometry(cfg, i, j), pair_geometry(cfg, j, i)
            assert a.xi == b.xi
            assert a.cos2 == pytest.approx(b.cos2, abs=1e-14)
            assert 0 <= a.alpha <= np.pi


def test_separation_matrices_match_pairs():
    cfg = sample_configuration(4, 1.3, 6.6e-4, 9)
    xi, cos2 = cfg.separation_matrices()
    for i in range(4):
        for j in range(4):
            if i != j:
                g = pair_geometry(cfg, i, j)
                assert xi[i, j] == pytest.approx(g.xi, rel=1e-14)
                assert cos2[i, j] == pytest.approx(g.cos2, abs=1e-14)


def test_configuration_invariants():
    with pytest.raises(ValueError):
        AtomConfiguration(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        AtomConfiguration(np.eye(3), dipole_axis=(0, 0, 2))
    with pytest.raises(ValueError):
        PairGeometry(0.0, 0.1)
    with pytest.raises(ValueError):
        PairGeometry(1.0, 4.0)


def test_dump_round_trip():
    cfg = sample_configuration(5, 0.8, 6.6e-4, 21)
    text = cfg.dumps(k0R=0.8, seed=21)
    assert text.splitlines()[0] == "# k0R=0.8 seed=21"
    back = AtomConfiguration.loads(text)
    assert np.array_equal(back.positions, cfg.positions)


def test_custom_dipole_axis():
    axis = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    cfg = sample_configuration(3, 0.7, 6.6e-4, 1, dipole_axis=axis)
    assert np.allclose(cfg.dipole_axis, axis)

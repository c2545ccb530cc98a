"""Tests for the Fourier noise model: sampling, statistics, serialization."""

import numpy as np
import numpy.testing as npt
import pytest

from spinphase.noise import (
    INCOMMENSURATE_FREQUENCY,
    NoiseRealization,
    NoiseStatistics,
    field_from_noise,
    sample_noise,
)

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# NoiseStatistics validation


def test_statistics_defaults():
    stats = NoiseStatistics(sigma=1.0, k_max=8)
    assert stats.mode == "isotropic3"
    assert stats.periodic
    assert stats.n_turns == 1


def test_statistics_rejects_bad_sigma():
    with pytest.raises(ValueError):
        NoiseStatistics(sigma=-0.5, k_max=4)


def test_statistics_rejects_bad_k_max():
    with pytest.raises(ValueError):
        NoiseStatistics(sigma=1.0, k_max=0)


def test_statistics_rejects_unknown_mode():
    with pytest.raises(ValueError):
        NoiseStatistics(sigma=1.0, k_max=4, mode="radial")


def test_statistics_rejects_aperiodic_multi_turn():
    with pytest.raises(ValueError):
        NoiseStatistics(sigma=1.0, k_max=4, periodic=False, n_turns=2)


# ---------------------------------------------------------------------------
# Sampling


def test_sampling_is_reproducible():
    stats = NoiseStatistics(sigma=1.3, k_max=6, seed=42)
    a = sample_noise(stats)
    b = sample_noise(stats)
    npt.assert_array_equal(a.cos_coeffs, b.cos_coeffs)
    npt.assert_array_equal(a.sin_coeffs, b.sin_coeffs)
    npt.assert_array_equal(a.frequencies, b.frequencies)


def test_different_seeds_differ():
    stats = NoiseStatistics(sigma=1.0, k_max=6, seed=1)
    other = NoiseStatistics(sigma=1.0, k_max=6, seed=2)
    assert not np.array_equal(
        sample_noise(stats).cos_coeffs, sample_noise(other).cos_coeffs
    )


def test_periodic_frequencies_are_harmonics():
    stats = NoiseStatistics(sigma=1.0, k_max=5, seed=0)
    realization = sample_noise(stats)
    npt.assert_array_equal(realization.frequencies, np.arange(1, 6))
    assert realization.cos_coeffs.shape == (3, 5)
    assert realization.sin_coeffs.shape == (3, 5)


def test_multi_turn_frequencies_include_subharmonics():
    stats = NoiseStatistics(sigma=1.0, k_max=4, seed=0, n_turns=2)
    realization = sample_noise(stats)
    npt.assert_allclose(realization.frequencies, np.arange(1, 9) / 2.0)


def test_z_only_has_single_component_row():
    stats = NoiseStatistics(sigma=1.0, k_max=5, mode="z_only", seed=0)
    realization = sample_noise(stats)
    assert realization.cos_coeffs.shape == (1, 5)


def test_aperiodic_appends_incommensurate_line():
    stats = NoiseStatistics(sigma=1.0, k_max=4, periodic=False, seed=0)
    realization = sample_noise(stats)
    assert realization.frequencies[-1] == INCOMMENSURATE_FREQUENCY
    assert INCOMMENSURATE_FREQUENCY == pytest.approx(np.sqrt(2.0))


def test_pointwise_variance_matches_sigma():
    # Each component is a sum over k of a_k cos + b_k sin with
    # Var(a) = Var(b) = sigma^2/n_freq, so the pointwise variance is sigma^2.
    sigma, k_max, n = 0.8, 6, 3000
    grid = np.array([0.0, 1.0, 2.5, 5.0])
    acc = np.zeros((3, grid.size))
    for i in range(n):
        stats = NoiseStatistics(sigma=sigma, k_max=k_max, seed=10_000 + i)
        values = sample_noise(stats).components(grid)
        acc += values**2
    acc /= n
    # 4-standard-error tolerance for a chi^2 mean estimate.
    tol = 4.0 * sigma**2 * np.sqrt(2.0 / n)
    npt.assert_allclose(acc, sigma**2, atol=tol)


# ---------------------------------------------------------------------------
# Component evaluation


def test_components_shape_and_periodicity():
    stats = NoiseStatistics(sigma=1.0, k_max=8, seed=3)
    realization = sample_noise(stats)
    grid = np.linspace(0.0, 1.0, 7)
    values = realization.components(grid)
    assert values.shape == (3, 7)
    npt.assert_allclose(
        realization.components(grid + TWO_PI), values, atol=1e-12
    )


def test_multi_turn_period_is_stretched():
    stats = NoiseStatistics(sigma=1.0, k_max=4, seed=3, n_turns=2)
    realization = sample_noise(stats)
    grid = np.linspace(0.0, 2.0, 9)
    values = realization.components(grid)
    npt.assert_allclose(
        realization.components(grid + 2.0 * TWO_PI), values, atol=1e-12
    )
    # A single turn is not a period for half-integer harmonics.
    assert not np.allclose(realization.components(grid + TWO_PI), values)


def test_aperiodic_realization_does_not_close():
    stats = NoiseStatistics(sigma=1.0, k_max=4, periodic=False, seed=5)
    realization = sample_noise(stats)
    start = realization.components(np.array([0.0]))
    end = realization.components(np.array([TWO_PI]))
    assert np.max(np.abs(end - start)) > 1e-3


def test_derivative_matches_finite_difference():
    stats = NoiseStatistics(sigma=1.0, k_max=6, seed=9)
    realization = sample_noise(stats)
    grid = np.linspace(0.3, 5.9, 11)
    h = 1e-6
    numeric = (
        realization.components(grid + h) - realization.components(grid - h)
    ) / (2.0 * h)
    exact = realization.components_derivative(grid)
    npt.assert_allclose(exact, numeric, atol=1e-6)


def test_z_only_projection_identities():
    theta0 = 0.7
    stats = NoiseStatistics(sigma=1.0, k_max=5, mode="z_only", seed=4)
    realization = sample_noise(stats)
    grid = np.linspace(0.0, TWO_PI, 33)
    b1, b2, b3 = realization.components(grid, theta0)
    bz = realization.z_series(grid)
    npt.assert_allclose(b1, -np.sin(theta0) * bz, atol=1e-14)
    npt.assert_allclose(b2, 0.0, atol=1e-14)
    npt.assert_allclose(b3, np.cos(theta0) * bz, atol=1e-14)


def test_z_only_requires_theta0():
    stats = NoiseStatistics(sigma=1.0, k_max=5, mode="z_only", seed=4)
    realization = sample_noise(stats)
    with pytest.raises(ValueError):
        realization.components(np.linspace(0.0, 1.0, 4))


def test_z_series_is_z_only_feature():
    stats = NoiseStatistics(sigma=1.0, k_max=5, seed=4)
    realization = sample_noise(stats)
    with pytest.raises(ValueError):
        realization.z_series(np.linspace(0.0, 1.0, 4))


# ---------------------------------------------------------------------------
# Serialization


def test_json_round_trip():
    stats = NoiseStatistics(
        sigma=0.7, k_max=3, mode="z_only", periodic=False, seed=17
    )
    realization = sample_noise(stats)
    clone = NoiseRealization.from_json(realization.to_json())
    npt.assert_array_equal(clone.frequencies, realization.frequencies)
    npt.assert_array_equal(clone.cos_coeffs, realization.cos_coeffs)
    npt.assert_array_equal(clone.sin_coeffs, realization.sin_coeffs)
    assert clone.mode == realization.mode
    assert clone.periodic == realization.periodic
    grid = np.linspace(0.0, 3.0, 5)
    npt.assert_allclose(
        clone.components(grid, 0.5), realization.components(grid, 0.5), atol=0
    )


# ---------------------------------------------------------------------------
# Field construction


def test_field_from_noise_zero_noise_is_circular():
    stats = NoiseStatistics(sigma=1.0, k_max=4, seed=0)
    realization = sample_noise(stats)
    grid = np.linspace(0.0, TWO_PI, 65)
    samples = field_from_noise(0.8, 0.0, realization, grid)
    st = np.sin(0.8)
    npt.assert_allclose(
        samples,
        np.stack(
            [st * np.cos(grid), st * np.sin(grid), np.full_like(grid, np.cos(0.8))],
            axis=1,
        ),
        atol=1e-14,
    )


def test_field_from_noise_stays_near_cone():
    theta0, epsilon = 0.9, 0.05
    stats = NoiseStatistics(sigma=1.0, k_max=8, seed=21)
    realization = sample_noise(stats)
    grid = np.linspace(0.0, TWO_PI, 257)
    samples = field_from_noise(theta0, epsilon, realization, grid)
    cos_theta = samples[:, 2] / np.linalg.norm(samples, axis=1)
    assert np.max(np.abs(np.arccos(cos_theta) - theta0)) < 10.0 * epsilon
    # The loop closes because the noise is periodic.
    npt.assert_allclose(samples[0], samples[-1], atol=1e-12)

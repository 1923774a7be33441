"""
Тесты статистической модели канала.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate, stats

from app.core.exceptions import ValidationException
from app.models.channel import (
    RAYLEIGH_ENERGY_FACTOR,
    ChannelRealization,
    GainSampling,
    PathArrival,
    ScaledGaussianGainModel,
    TriangularAoaModel,
    TruncatedAoaModel,
    TruncatedKind,
)
from app.services.capacity_service import per_path_expected_energy
from app.services.channel_service import (
    aoa_density,
    component_energies,
    component_energies_batch,
    rayleigh_gain_density,
    rayleigh_inverse_cdf,
    sample_aoa,
    sample_channel,
    sample_channel_batch,
    sample_path_gain,
    sigma_squared,
    triangular_density,
    triangular_inverse_cdf,
    truncated_density,
)


class TestScaleMap:
    def test_peak_equals_lambda(self):
        model = ScaledGaussianGainModel(lambda_=2.5e-6, xi=0.1, varsigma=0.2)
        assert sigma_squared(model, 0.1) == 2.5e-6

    def test_symmetric_and_bounded(self):
        model = ScaledGaussianGainModel(lambda_=1.0, xi=0.1, varsigma=0.2)
        offsets = np.linspace(0.01, 1.0, 50)
        left = sigma_squared(model, 0.1 - offsets)
        right = sigma_squared(model, 0.1 + offsets)
        np.testing.assert_allclose(left, right, rtol=1e-14)
        assert np.all(right < 1.0)
        assert np.all(right > 0.0)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValidationError):
            ScaledGaussianGainModel(lambda_=0.0, xi=0.0, varsigma=0.1)
        with pytest.raises(ValidationError):
            ScaledGaussianGainModel(lambda_=1.0, xi=0.0, varsigma=-0.1)

    def test_lambda_alias(self):
        model = ScaledGaussianGainModel.model_validate({"lambda": 3.0, "xi": 0.0, "varsigma": 1.0})
        assert model.lambda_ == 3.0
        assert model.scaled(2.0).lambda_ == 6.0


class TestRayleigh:
    def test_inverse_cdf_examples(self):
        assert rayleigh_inverse_cdf(1.0, 1.0) == 0.0
        assert rayleigh_inverse_cdf(0.5, math.exp(-1.0)) == pytest.approx(1.0, rel=1e-15)

    def test_density_integrates_to_one(self):
        area, _ = integrate.quad(lambda a: rayleigh_gain_density(0.3, a), 0.0, np.inf)
        assert area == pytest.approx(1.0, rel=1e-9)

    def test_density_rejects_bad_arguments(self):
        with pytest.raises(ValidationException):
            rayleigh_gain_density(0.0, 1.0)
        with pytest.raises(ValidationException):
            rayleigh_gain_density(1.0, -1.0)

    def test_second_moment_is_twice_scale(self, rng):
        model = ScaledGaussianGainModel(lambda_=1.0, xi=0.0, varsigma=0.3)
        gamma = np.full(100_000, 0.1)
        energy = sample_path_gain(model, gamma, rng) ** 2
        expected = RAYLEIGH_ENERGY_FACTOR * sigma_squared(model, 0.1)
        stderr = energy.std(ddof=1) / math.sqrt(energy.size)
        assert abs(energy.mean() - expected) <= 3.0 * stderr


class TestTriangular:
    def test_inverse_cdf_endpoints(self):
        model = TriangularAoaModel(theta=0.1, beta=0.05)
        assert triangular_inverse_cdf(model, 0.0) == pytest.approx(0.05, abs=1e-15)
        assert triangular_inverse_cdf(model, 1.0) == pytest.approx(0.15, abs=1e-15)
        assert triangular_inverse_cdf(model, 0.5) == pytest.approx(0.1, abs=1e-15)

    def test_density_integrates_to_one(self):
        model = TriangularAoaModel(theta=-0.2, beta=0.07)
        area, _ = integrate.quad(lambda g: triangular_density(model, g), -0.27, -0.13, points=[-0.2])
        assert area == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_density_is_point_mass(self):
        model = TriangularAoaModel(theta=0.3, beta=0.0)
        assert model.is_degenerate
        assert triangular_density(model, 0.3) == math.inf
        assert triangular_density(model, 0.31) == 0.0

    def test_sampler_passes_chi_square(self, rng):
        model = TriangularAoaModel(theta=0.05, beta=0.2)
        samples = sample_aoa(model, rng, 100_000)
        edges = np.linspace(model.theta - model.beta, model.theta + model.beta, 21)

        def cdf(x):
            a, b = model.support
            left = (x - a) ** 2 / (2.0 * model.beta ** 2)
            right = 1.0 - (b - x) ** 2 / (2.0 * model.beta ** 2)
            return np.where(x <= model.theta, left, right)

        probabilities = np.diff(cdf(edges))
        observed, _ = np.histogram(samples, bins=edges)
        result = stats.chisquare(observed, probabilities / probabilities.sum() * samples.size)
        assert result.pvalue > 1e-3


class TestTruncated:
    @pytest.mark.parametrize("kind", [TruncatedKind.GAUSSIAN, TruncatedKind.LAPLACIAN])
    def test_density_integrates_to_one(self, kind):
        model = TruncatedAoaModel(kind=kind, mu=0.1, sigma=0.8)
        lo, hi = model.support
        area, _ = integrate.quad(lambda g: truncated_density(model, g), lo, hi, points=[0.1])
        assert area == pytest.approx(1.0, abs=1e-9)
        assert truncated_density(model, hi + 0.01) == 0.0

    def test_dispatch(self):
        triangular = TriangularAoaModel(theta=0.0, beta=0.1)
        truncated = TruncatedAoaModel(kind=TruncatedKind.GAUSSIAN, mu=0.0, sigma=0.1)
        assert aoa_density(triangular, 0.0) == pytest.approx(10.0)
        assert aoa_density(truncated, 0.0) == pytest.approx(truncated_density(truncated, 0.0))

    @pytest.mark.parametrize("kind", [TruncatedKind.GAUSSIAN, TruncatedKind.LAPLACIAN])
    def test_sampler_passes_chi_square(self, kind, rng):
        model = TruncatedAoaModel(kind=kind, mu=-0.1, sigma=0.2)
        samples = sample_aoa(model, rng, 100_000)
        lo, hi = model.support
        assert np.all((samples >= lo) & (samples <= hi))

        inner = np.linspace(model.mu - 3 * model.sigma, model.mu + 3 * model.sigma, 19)
        edges = np.concatenate([[lo], inner, [hi]])
        probabilities = np.array(
            [
                integrate.quad(lambda g: truncated_density(model, g), a, b, points=[model.mu] if a < model.mu < b else None)[0]
                for a, b in zip(edges[:-1], edges[1:])
            ]
        )
        observed, _ = np.histogram(samples, bins=edges)
        result = stats.chisquare(observed, probabilities / probabilities.sum() * samples.size)
        assert result.pvalue > 1e-3


class TestSampleChannel:
    def test_degenerate_aoa_is_exact(self, unit_gain_model, rng):
        realization = sample_channel([TriangularAoaModel(theta=0.12, beta=0.0)], [0.5], unit_gain_model, rng)
        assert realization.n_paths == 1
        assert realization.paths[0].aoa == 0.12

    def test_same_seed_same_realization(self, unit_gain_model):
        models = [TriangularAoaModel(theta=t, beta=0.02) for t in (-0.2, 0.0, 0.3)]
        first = sample_channel(models, [0.1, 0.2, 0.3], unit_gain_model, np.random.default_rng(7))
        second = sample_channel(models, [0.1, 0.2, 0.3], unit_gain_model, np.random.default_rng(7))
        assert first == second

    def test_length_mismatch_and_empty(self, unit_gain_model, rng):
        with pytest.raises(ValidationException):
            sample_channel([TriangularAoaModel(theta=0.0, beta=0.1)], [0.1, 0.2], unit_gain_model, rng)
        with pytest.raises(ValidationException):
            sample_channel([], [], unit_gain_model, rng)

    def test_appending_path_keeps_earlier_draws(self, unit_gain_model):
        models = [TriangularAoaModel(theta=t, beta=0.03) for t in (-0.2, -0.1, 0.0, 0.1)]
        short_gains, short_aoas = sample_channel_batch(models[:3], unit_gain_model, np.random.default_rng(3), 500)
        long_gains, long_aoas = sample_channel_batch(models, unit_gain_model, np.random.default_rng(3), 500)
        np.testing.assert_array_equal(short_gains, long_gains[:, :3])
        np.testing.assert_array_equal(short_aoas, long_aoas[:, :3])

    def test_deterministic_gain_sampling(self, unit_gain_model, rng):
        model = TriangularAoaModel(theta=0.2, beta=0.0)
        gains, _ = sample_channel_batch([model], unit_gain_model, rng, 4, GainSampling.DETERMINISTIC)
        expected = math.sqrt(RAYLEIGH_ENERGY_FACTOR * sigma_squared(unit_gain_model, 0.2))
        np.testing.assert_allclose(gains[:, 0], expected, rtol=1e-15)

    def test_mean_energy_matches_expected_energy(self, unit_gain_model):
        models = [TriangularAoaModel(theta=t, beta=0.05) for t in np.linspace(-0.4, 0.4, 15)]
        gains, aoas = sample_channel_batch(models, unit_gain_model, np.random.default_rng(11), 100_000)
        e_p, _, _ = component_energies_batch(gains, aoas)
        expected = RAYLEIGH_ENERGY_FACTOR * sum(per_path_expected_energy(unit_gain_model, m) for m in models)
        stderr = e_p.std(ddof=1) / math.sqrt(e_p.size)
        assert abs(e_p.mean() - expected) <= 4.0 * stderr


class TestComponentEnergies:
    def test_horizontal_arrivals(self):
        realization = ChannelRealization(
            paths=(PathArrival(amplitude=1.0, aoa=0.0, delay=0.0), PathArrival(amplitude=2.0, aoa=0.0, delay=0.1))
        )
        assert component_energies(realization) == (5.0, 5.0, 0.0)

    def test_diagonal_arrivals(self):
        realization = ChannelRealization(paths=(PathArrival(amplitude=3.0, aoa=math.pi / 4, delay=0.0),))
        e_p, e_y, e_z = component_energies(realization)
        assert e_y == pytest.approx(e_p / 2, rel=1e-15)
        assert e_z == pytest.approx(e_p / 2, rel=1e-15)

    def test_energy_identity_over_random_realizations(self, unit_gain_model):
        rng = np.random.default_rng(2024)
        for n_paths in (1, 2, 5, 10, 18):
            models = [TriangularAoaModel(theta=t, beta=0.05) for t in rng.uniform(-1.0, 1.0, n_paths)]
            gains, aoas = sample_channel_batch(models, unit_gain_model, rng, 2_000)
            e_p, e_y, e_z = component_energies_batch(gains, aoas)
            np.testing.assert_allclose(e_p + 2 * e_y + 2 * e_z, 3 * e_p, rtol=1e-12)

    def test_realization_rejects_empty_and_vertical(self):
        with pytest.raises(ValidationError):
            ChannelRealization(paths=())
        with pytest.raises(ValidationError):
            PathArrival(amplitude=1.0, aoa=math.pi / 2, delay=0.0)

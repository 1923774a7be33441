"""
Тесты подгонки карты масштаба.
"""

import math

import numpy as np
import pytest

from app.core.exceptions import FittingException, ValidationException
from app.models.channel import ScaledGaussianGainModel
from app.models.fitting import GainAoaPoint
from app.models.geometry import Eigenray
from app.services.csv_service import parse_csv
from app.services.fitting_service import (
    FIT_COLUMNS,
    bin_gain_vs_aoa,
    dump_fit_csv,
    dump_points_csv,
    fit_scaled_gaussian,
    goodness_of_fit,
    load_points_csv,
    model_gradient,
)
from app.services.ray_service import trace_image_method

TRUE_MODEL = ScaledGaussianGainModel(lambda_=1e-3, xi=0.02, varsigma=0.25)


def synthetic_points(model=TRUE_MODEL, n_points=50, noise=0.0, seed=0, shift=0.0, scale=1.0):
    rng = np.random.default_rng(seed)
    aoas = np.linspace(-0.6, 0.6, n_points)
    values = model.lambda_ * np.exp(-(((aoas - model.xi) / model.varsigma) ** 2))
    if noise:
        values = values * (1.0 + noise * rng.standard_normal(n_points))
    return [
        GainAoaPoint(aoa=float(a + shift), gain_sq=float(max(v, 0.0) * scale), weight=1.0)
        for a, v in zip(aoas, values)
    ]


class TestBinning:
    def test_same_aoa_single_bin(self):
        rays = [Eigenray(aoa=0.1, delay=0.1, amplitude=1.0), Eigenray(aoa=0.1, delay=0.2, amplitude=3.0)]
        points = bin_gain_vs_aoa(rays, 4)
        assert len(points) == 1
        assert points[0].gain_sq == 5.0
        assert points[0].weight == 2.0

    def test_two_bins_at_centers(self):
        rays = [Eigenray(aoa=-0.1, delay=0.1, amplitude=2.0), Eigenray(aoa=0.1, delay=0.2, amplitude=1.0)]
        points = bin_gain_vs_aoa(rays, 2)
        assert [p.aoa for p in points] == pytest.approx([-0.05, 0.05])
        assert [p.gain_sq for p in points] == [4.0, 1.0]

    def test_empty_bins_omitted(self):
        rays = [Eigenray(aoa=a, delay=0.1, amplitude=1.0) for a in (-0.3, -0.29, 0.3)]
        points = bin_gain_vs_aoa(rays, 10)
        assert len(points) == 2
        assert sum(p.weight for p in points) == 3

    def test_invalid_arguments(self):
        with pytest.raises(ValidationException):
            bin_gain_vs_aoa([], 5)
        with pytest.raises(ValidationException):
            bin_gain_vs_aoa([Eigenray(aoa=0.0, delay=0.1, amplitude=1.0)], 1)

    def test_traced_scenario_peaks_near_los(self, table_scenario):
        rays = trace_image_method(table_scenario)
        points = bin_gain_vs_aoa(rays, 15)
        aoas = [r.aoa for r in rays]
        bin_width = (max(aoas) - min(aoas)) / 15
        peak = max(points, key=lambda p: p.gain_sq)
        assert abs(peak.aoa - math.atan(20.0 / 1000.0)) <= bin_width


class TestFit:
    def test_noiseless_recovery(self):
        result = fit_scaled_gaussian(synthetic_points())
        assert result.converged
        assert result.model.lambda_ == pytest.approx(1e-3, rel=1e-8)
        assert result.model.xi == pytest.approx(0.02, rel=1e-8)
        assert result.model.varsigma == pytest.approx(0.25, rel=1e-8)
        assert result.r2 == pytest.approx(1.0, abs=1e-12)

    def test_noisy_recovery(self):
        result = fit_scaled_gaussian(synthetic_points(noise=0.05, seed=17))
        assert result.model.lambda_ == pytest.approx(1e-3, rel=0.1)
        assert result.model.varsigma == pytest.approx(0.25, rel=0.1)
        # xi близко к нулю, поэтому точность xi измеряется в долях ширины
        assert abs(result.model.xi - 0.02) <= 0.1 * 0.25
        assert result.r2 >= 0.93

    def test_three_points_interpolated(self):
        points = [
            GainAoaPoint(aoa=a, gain_sq=float(1e-3 * math.exp(-(((a - 0.02) / 0.25) ** 2))))
            for a in (-0.2, 0.05, 0.3)
        ]
        result = fit_scaled_gaussian(points)
        assert result.n_points == 3
        assert result.sse <= 1e-18

    def test_rmse_consistent_with_sse(self):
        result = fit_scaled_gaussian(synthetic_points(noise=0.05, seed=3))
        assert result.rmse ** 2 * result.n_points == pytest.approx(result.sse, rel=1e-12)

    def test_first_order_optimality(self):
        points = synthetic_points(noise=0.05, seed=4)
        result = fit_scaled_gaussian(points)
        assert result.converged
        assert np.linalg.norm(model_gradient(points, result.model)) <= 1e-8

    def test_scale_equivariance(self):
        base = fit_scaled_gaussian(synthetic_points(noise=0.05, seed=5))
        scaled = fit_scaled_gaussian(synthetic_points(noise=0.05, seed=5, scale=7.0))
        assert scaled.model.lambda_ == pytest.approx(7.0 * base.model.lambda_, rel=1e-7)
        assert scaled.model.xi == pytest.approx(base.model.xi, abs=1e-7)
        assert scaled.model.varsigma == pytest.approx(base.model.varsigma, rel=1e-7)

    def test_shift_equivariance(self):
        base = fit_scaled_gaussian(synthetic_points(noise=0.05, seed=6))
        shifted = fit_scaled_gaussian(synthetic_points(noise=0.05, seed=6, shift=0.1))
        assert shifted.model.xi == pytest.approx(base.model.xi + 0.1, abs=1e-6)
        assert shifted.model.lambda_ == pytest.approx(base.model.lambda_, rel=1e-6)
        assert shifted.model.varsigma == pytest.approx(base.model.varsigma, rel=1e-6)

    def test_degenerate_inputs(self):
        with pytest.raises(FittingException):
            fit_scaled_gaussian(synthetic_points()[:2])
        flat = [GainAoaPoint(aoa=a, gain_sq=1e-4) for a in (-0.1, 0.0, 0.1, 0.2)]
        with pytest.raises(FittingException):
            fit_scaled_gaussian(flat)


class TestGoodnessOfFit:
    def test_perfect_fit(self):
        sse, r2, rmse = goodness_of_fit(synthetic_points(), TRUE_MODEL)
        assert sse == pytest.approx(0.0, abs=1e-30)
        assert r2 == pytest.approx(1.0, abs=1e-12)
        assert rmse == pytest.approx(0.0, abs=1e-15)

    def test_constant_model_explains_nothing(self):
        points = synthetic_points()
        mean = float(np.mean([p.gain_sq for p in points]))
        constant = ScaledGaussianGainModel(lambda_=mean, xi=0.0, varsigma=1e6)
        _, r2, _ = goodness_of_fit(points, constant)
        assert r2 <= 1e-6

    def test_zero_variance_signalled(self):
        points = [GainAoaPoint(aoa=a, gain_sq=2.0) for a in (0.0, 0.1)]
        with pytest.raises(FittingException):
            goodness_of_fit(points, TRUE_MODEL)


class TestCsv:
    def test_load_fixture_points(self, fixtures_dir):
        points = load_points_csv(fixtures_dir / "points_synthetic.csv")
        assert len(points) == 9
        assert points[4].weight == 5.0
        result = fit_scaled_gaussian(points)
        assert result.model.lambda_ == pytest.approx(1e-3, rel=1e-6)
        assert result.model.varsigma == pytest.approx(0.25, rel=1e-6)

    def test_points_round_trip(self, tmp_path):
        points = synthetic_points(n_points=7)
        path = tmp_path / "points.csv"
        dump_points_csv(points, path)
        assert load_points_csv(path) == points

    def test_bad_row_reports_line(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("# comment\naoa_rad,gain_sq\n0.1,1e-3\n0.2,oops\n", encoding="utf-8")
        with pytest.raises(ValidationException, match="line 4"):
            load_points_csv(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("aoa_rad,weight\n0.1,1\n", encoding="utf-8")
        with pytest.raises(ValidationException, match="gain_sq"):
            load_points_csv(path)

    def test_dump_fit(self):
        result = fit_scaled_gaussian(synthetic_points())
        header, rows = parse_csv(dump_fit_csv(result, ["source: synthetic"]))
        assert tuple(header) == FIT_COLUMNS
        assert len(rows) == 1
        assert float(rows[0][1][0]) == result.model.lambda_
        assert rows[0][1][6] == "true"

"""Tests for the edge-coefficient fit and the curve file format it reads."""

import io

import numpy as np
import pytest

from src.algorithms.edge_fit import MIN_POINTS, fit_edge_coefficients, synthetic_ratio
from src.cli.output import read_curve_csv, write_curve_csv
from src.models.casimir_config import PFA_COEFFICIENT, BoundaryCondition, EnergyCurve, EnergyRecord
from src.models.errors import FitError

BETA = 0.00092
GAMMA = -0.0040


def _synthetic_curve(aspects, d=1.0, bc=BoundaryCondition.ELECTROMAGNETIC, errors=None) -> EnergyCurve:
    curve = EnergyCurve(d=d, bc=bc)
    scale = 1.0 if bc is BoundaryCondition.ELECTROMAGNETIC else 0.5
    for index, aspect in enumerate(sorted(aspects, reverse=True)):
        H = 2.0 * d / aspect
        ratio = synthetic_ratio(H, d, BETA, GAMMA)
        pfa = -PFA_COEFFICIENT * 2.0 * d / H**3 * scale
        curve.add(
            EnergyRecord(
                H=H,
                energy_per_length=ratio * pfa,
                ratio_pfa=ratio,
                est_error=0.0 if errors is None else errors[index],
                r_max_used=12,
            )
        )
    return curve


class TestSyntheticRatio:
    def test_unity_at_contact_limit(self):
        assert synthetic_ratio(0.0, 1.0, BETA, GAMMA) == 1.0

    def test_linear_term(self):
        assert synthetic_ratio(0.2, 1.0, BETA, 0.0) == pytest.approx(1.0 - 2.0 * BETA * 0.1 / PFA_COEFFICIENT)


class TestFit:
    def test_recovers_coefficients(self):
        beta, gamma, report = fit_edge_coefficients(_synthetic_curve(np.linspace(2.1, 9.9, 12)))
        assert beta == pytest.approx(BETA, abs=1e-10)
        assert gamma == pytest.approx(GAMMA, abs=1e-10)
        assert report.intercept == pytest.approx(1.0, abs=1e-10)
        assert report.n_points == 12
        assert report.intercept_free

    def test_fixed_intercept(self):
        beta, gamma, report = fit_edge_coefficients(_synthetic_curve(np.linspace(2.1, 9.9, 12)), intercept_free=False)
        assert beta == pytest.approx(BETA, abs=1e-10)
        assert gamma == pytest.approx(GAMMA, abs=1e-10)
        assert report.intercept == 1.0
        assert report.sigma_intercept == 0.0

    def test_stable_under_range_shrink(self):
        curve = _synthetic_curve(np.linspace(2.1, 9.9, 17))
        wide = fit_edge_coefficients(curve, (2.0, 10.0))
        narrow = fit_edge_coefficients(curve, (3.0, 10.0))
        assert narrow[0] == pytest.approx(wide[0], abs=1e-10)
        assert narrow[1] == pytest.approx(wide[1], abs=1e-10)

    def test_range_bounds_order_irrelevant(self):
        curve = _synthetic_curve(np.linspace(2.1, 9.9, 12))
        assert fit_edge_coefficients(curve, (10.0, 2.0))[2].fit_range == (2.0, 10.0)

    def test_points_outside_range_ignored(self):
        curve = _synthetic_curve(list(np.linspace(2.1, 9.9, 8)) + [0.5, 20.0])
        assert fit_edge_coefficients(curve, (2.0, 10.0))[2].n_points == 8

    def test_height_cap(self):
        curve = _synthetic_curve(np.linspace(2.1, 9.9, 12))
        report = fit_edge_coefficients(curve, (2.0, 10.0), h_max=0.5)[2]
        assert report.n_points == sum(1 for record in curve.records if record.H <= 0.5)

    def test_unit_weights_when_errors_missing(self):
        report = fit_edge_coefficients(_synthetic_curve(np.linspace(2.1, 9.9, 12)))[2]
        assert report.reduced_chi2 == pytest.approx(0.0, abs=1e-20)
        assert np.isfinite(report.condition_number)

    def test_error_weights_leave_exact_data_unchanged(self):
        errors = np.linspace(1e-6, 1e-4, 12)
        beta, gamma, _ = fit_edge_coefficients(_synthetic_curve(np.linspace(2.1, 9.9, 12), errors=errors))
        assert beta == pytest.approx(BETA, abs=1e-10)
        assert gamma == pytest.approx(GAMMA, abs=1e-10)

    def test_noisy_data_gives_uncertainties(self):
        rng = np.random.default_rng(7)
        curve = _synthetic_curve(np.linspace(2.1, 9.9, 20), errors=np.full(20, 1e-5))
        noisy = EnergyCurve(d=curve.d, bc=curve.bc)
        for record in curve.records:
            ratio = record.ratio_pfa + rng.normal(scale=1e-5)
            noisy.add(
                EnergyRecord(record.H, record.energy_per_length, ratio, record.est_error, record.r_max_used)
            )
        beta, gamma, report = fit_edge_coefficients(noisy)
        assert report.sigma_beta > 0
        assert report.sigma_gamma > 0
        assert abs(beta - BETA) < 10 * report.sigma_beta
        assert abs(gamma - GAMMA) < 10 * report.sigma_gamma

    def test_too_few_points(self):
        with pytest.raises(FitError):
            fit_edge_coefficients(_synthetic_curve(np.linspace(2.1, 9.9, MIN_POINTS - 1)))

    def test_ill_conditioned_range(self):
        curve = _synthetic_curve(5.0 + np.linspace(0.0, 1e-7, 8))
        with pytest.raises(FitError):
            fit_edge_coefficients(curve, (4.0, 6.0))

    def test_report_serializable(self):
        report = fit_edge_coefficients(_synthetic_curve(np.linspace(2.1, 9.9, 12)))[2]
        data = report.to_dict()
        assert data["fit_range"] == [2.0, 10.0]
        assert set(data) >= {"beta", "gamma", "sigma_beta", "sigma_gamma", "reduced_chi2"}


class TestCurveFile:
    def test_round_trip(self):
        curve = _synthetic_curve(np.linspace(2.1, 9.9, 7))
        buffer = io.StringIO()
        write_curve_csv(curve, buffer)
        buffer.seek(0)
        loaded = read_curve_csv(buffer)
        assert loaded.d == curve.d
        assert loaded.bc is curve.bc
        np.testing.assert_array_equal(loaded.heights(), curve.heights())
        np.testing.assert_array_equal(loaded.ratios(), curve.ratios())

    @pytest.mark.parametrize("bc", [BoundaryCondition.ELECTROMAGNETIC, BoundaryCondition.DIRICHLET])
    def test_half_width_recovered_without_metadata(self, bc):
        curve = _synthetic_curve(np.linspace(2.1, 9.9, 7), d=2.5, bc=bc)
        buffer = io.StringIO()
        write_curve_csv(curve, buffer)
        lines = [line for line in buffer.getvalue().splitlines(keepends=True) if not line.startswith("# d=")]
        loaded = read_curve_csv(io.StringIO("".join(lines)))
        assert loaded.d == pytest.approx(2.5, rel=1e-12)

    def test_fit_from_file(self):
        buffer = io.StringIO()
        write_curve_csv(_synthetic_curve(np.linspace(2.1, 9.9, 12)), buffer)
        buffer.seek(0)
        beta, _, _ = fit_edge_coefficients(read_curve_csv(buffer))
        assert beta == pytest.approx(BETA, abs=1e-10)

    def test_missing_column(self):
        with pytest.raises(FitError):
            read_curve_csv(io.StringIO("H,ratio_pfa\n0.5,0.98\n"))

    def test_empty_body(self):
        with pytest.raises(FitError):
            read_curve_csv(io.StringIO("# d=1.0\nH,energy_per_length,ratio_pfa,est_error,r_max_used\n"))

    def test_malformed_row(self):
        text = "H,energy_per_length,ratio_pfa,est_error,r_max_used\n0.5,abc,0.9,0.0,12\n"
        with pytest.raises(FitError):
            read_curve_csv(io.StringIO(text))

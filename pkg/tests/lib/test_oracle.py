import math

import pytest

from radialdpp.lib import asymptotics
from radialdpp.lib import oracle
from radialdpp.lib.asymptotics import ScalingRegime
from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.error import DomainError
from radialdpp.lib.funcs import TestFunction


### Test for exact moments ###


class TestExactMean:
    @pytest.mark.parametrize("R", [0.5, 10.0, 50.0])
    def test_matches_intensity_ginibre(self, ginibre, R):
        f = TestFunction((-1.0, 0.0, 2.0), (2.0, -1.0))
        assert oracle.exact_mean(ginibre, f, R) == pytest.approx(oracle.intensity_mean(ginibre, f, R), rel=1e-10)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_matches_intensity_hyperbolic(self, alpha, unit_indicator):
        e = Ensemble.hyperbolic(alpha)
        exact = oracle.exact_mean(e, unit_indicator, 5.0)
        assert exact == pytest.approx(oracle.intensity_mean(e, unit_indicator, 5.0), rel=1e-10)

    def test_scaled(self, ginibre, unit_indicator):
        # x ∈ [0, 1) at a_R = 4 covers r ∈ [R, R + 1/4)
        assert oracle.exact_mean(ginibre, unit_indicator, 8.0, 4.0) == pytest.approx(8.25**2 - 64.0, rel=1e-10)

    def test_zero_function(self, ginibre):
        assert oracle.exact_mean(ginibre, TestFunction.zero(), 10.0) == 0.0
        assert oracle.exact_variance(ginibre, TestFunction.zero(), 10.0) == 0.0

    def test_ginibre_expectation_gap(self, ginibre, unit_indicator):
        gaps = [abs(oracle.exact_mean(ginibre, unit_indicator, R) - 2 * R) for R in (50.0, 100.0, 200.0)]
        assert max(gaps) <= 2
        assert all(later <= earlier + 1e-6 for earlier, later in zip(gaps, gaps[1:]))

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_hyperbolic_expectation_gap(self, alpha):
        e = Ensemble.hyperbolic(alpha)
        f = TestFunction.indicator(-1.0, 0.0)
        integral = f.integrals().exp_weighted
        gaps = [
            abs(oracle.exact_mean(e, f, R) - 2 * asymptotics.c_r_alpha(alpha, R) * integral) for R in (8.0, 10.0, 12.0)
        ]
        assert max(gaps) <= 5
        assert all(later <= earlier + 1e-6 for earlier, later in zip(gaps, gaps[1:]))

    def test_hyperbolic_ceiling(self, hyperbolic, unit_indicator):
        with pytest.raises(DomainError):
            oracle.exact_mean(hyperbolic, unit_indicator, 13.0)


class TestExactVariance:
    def test_ginibre_asymptotic(self, ginibre, unit_indicator):
        v_f = asymptotics.v_f_ginibre(unit_indicator)
        gaps = []
        for R in (100.0, 200.0):
            ratio = oracle.exact_variance(ginibre, unit_indicator, R) / (R * v_f)
            assert 0.98 <= ratio <= 1.02
            gaps.append(abs(ratio - 1))
        assert gaps[1] < gaps[0]

    def test_positive_and_scales(self, hyperbolic):
        f = TestFunction((0.0, 0.5, 1.0), (1.0, 3.0))
        var = oracle.exact_variance(hyperbolic, f, 6.0)
        assert var > 0
        assert oracle.exact_variance(hyperbolic, 2 * f, 6.0) == pytest.approx(4 * var, rel=1e-12)

    def test_matches_kernel_integral(self, ginibre, unit_indicator):
        exact = oracle.exact_variance(ginibre, unit_indicator, 10.0)
        bessel = oracle.ginibre_variance_integral(unit_indicator, 10.0)
        assert bessel == pytest.approx(exact, rel=1e-5)

    def test_kernel_integral_methods_agree(self, unit_indicator):
        bessel = oracle.ginibre_variance_integral(unit_indicator, 3.0)
        angular = oracle.ginibre_variance_integral(unit_indicator, 3.0, method="angular")
        assert angular == pytest.approx(bessel, rel=1e-6)
        with pytest.raises(DomainError):
            oracle.ginibre_variance_integral(unit_indicator, 3.0, method="series")


class TestExactCovariance:
    def test_diagonal_is_variance(self, ginibre, unit_indicator):
        cov = oracle.exact_covariance(ginibre, unit_indicator, unit_indicator, 20.0)
        assert cov == pytest.approx(oracle.exact_variance(ginibre, unit_indicator, 20.0), rel=1e-12)

    def test_symmetric(self, hyperbolic, unit_indicator):
        g = TestFunction((0.5, 1.5), (2.0,))
        forward = oracle.exact_covariance(hyperbolic, unit_indicator, g, 5.0)
        backward = oracle.exact_covariance(hyperbolic, g, unit_indicator, 5.0)
        assert forward == pytest.approx(backward, rel=1e-12)

    def test_disjoint_windows_repel(self, ginibre, unit_indicator):
        g = unit_indicator.translate(1.0)
        assert oracle.exact_covariance(ginibre, unit_indicator, g, 20.0) < 0

    def test_zero(self, ginibre, unit_indicator):
        assert oracle.exact_covariance(ginibre, unit_indicator, TestFunction.zero(), 20.0) == 0.0


### Test for reports ###


class TestMomentReport:
    def test_fixed_scale(self, ginibre, unit_indicator):
        report = oracle.moment_report(ginibre, unit_indicator, ScalingRegime("fixed"), 50.0)
        assert report.mean_exact == pytest.approx(101.0, rel=1e-10)
        assert report.mean_asymptotic == pytest.approx(100.0)
        assert report.var_asymptotic == pytest.approx(50.0 * asymptotics.v_f_ginibre(unit_indicator))
        assert report.n_range[0] <= report.n_range[1]
        assert report.truncation_mass <= 1e-12
        assert list(report.csv_row()) == list(oracle.MomentReport.CSV_COLUMNS)
        assert report.to_dict()["n_range"] == list(report.n_range)

    def test_extreme_scale(self, ginibre, unit_indicator):
        report = oracle.moment_report(ginibre, unit_indicator, ScalingRegime("extreme"), 200.0)
        assert report.mean_asymptotic == 2.0
        assert report.var_asymptotic == 2.0
        assert report.mean_exact == pytest.approx(2.0, rel=1e-3)

    def test_superexponential(self, ginibre, unit_indicator):
        report = oracle.moment_report(ginibre, unit_indicator, ScalingRegime.parse("power:2"), 10.0)
        assert report.mean_asymptotic is None
        assert report.var_exact <= report.var_asymptotic * 1.2

    def test_zero_function(self, ginibre):
        report = oracle.moment_report(ginibre, TestFunction.zero(), ScalingRegime("fixed"), 10.0)
        assert (report.mean_exact, report.var_exact, report.n_range) == (0.0, 0.0, (0, -1))


class TestDiagnostics:
    def test_soshnikov(self, ginibre, unit_indicator):
        report = oracle.soshnikov_diagnostics(ginibre, unit_indicator, 50.0)
        assert report.var > 0
        assert report.sup_f == 1.0
        assert report.mean_abs == pytest.approx(101.0, rel=1e-10)
        assert report.mean_abs_ratio == pytest.approx(report.mean_abs / report.var)
        assert report.sup_ratio == pytest.approx(1 / report.var**0.1)

    def test_soshnikov_zero(self, ginibre):
        assert oracle.soshnikov_diagnostics(ginibre, TestFunction.zero(), 5.0) == (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_poisson(self, ginibre):
        f = TestFunction.indicator(0.0, 1.0, 0.5)
        report = oracle.poisson_limit_diagnostics(ginibre, 200.0, 200.0, f)
        assert report.sum_means == pytest.approx(1.0, rel=1e-3)
        assert 0 < report.sup_single < 0.05
        assert report.avoidance_gap < 0.01

    def test_poisson_needs_subunit_values(self, ginibre, unit_indicator):
        with pytest.raises(DomainError):
            oracle.poisson_limit_diagnostics(ginibre, 200.0, 200.0, unit_indicator)

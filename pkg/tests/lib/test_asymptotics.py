import math

import numpy as np
import pytest
from scipy import special

from radialdpp.lib import asymptotics
from radialdpp.lib.asymptotics import LimitLaw
from radialdpp.lib.asymptotics import ScalingRegime
from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.error import DataInvalidError
from radialdpp.lib.error import DomainError
from radialdpp.lib.error import RegimeError
from radialdpp.lib.funcs import QuadratureSpec
from radialdpp.lib.funcs import TestFunction
from radialdpp.lib.funcs import quad_1d
from radialdpp.lib.funcs import quad_2d


# V_f of the indicator of [0, 1) for the Gaussian kernel: 2 ∫₀¹ erfc(x) dx
GINIBRE_V_UNIT = 2 * (special.erfc(1.0) + (1 - math.exp(-1.0)) / math.sqrt(math.pi))


### Test for class `LimitLaw` ###


class TestLimitLaw:
    def test_invalid(self):
        with pytest.raises(DataInvalidError):
            LimitLaw("cauchy")
        with pytest.raises(DataInvalidError):
            LimitLaw("gaussian", variance=-1.0)
        with pytest.raises(DataInvalidError):
            LimitLaw("poisson")

    def test_raw_variance(self):
        assert LimitLaw("gaussian", variance=2.0, normalization=3.0).raw_variance == 6.0
        assert LimitLaw("gaussian", variance=2.0).raw_variance is None

    def test_dict_round_trip(self):
        law = LimitLaw("poisson", intensity=0.5, provenance="p")
        assert law.to_dict() == {"kind": "poisson", "intensity": 0.5, "provenance": "p"}
        assert LimitLaw.from_dict(law.to_dict()) == law
        with pytest.raises(DataInvalidError):
            LimitLaw.from_dict({"kind": "poisson", "rate": 1})


### Test for class `ScalingRegime` ###


class TestScalingRegime:
    @pytest.mark.parametrize(
        "text, family, parameter",
        [("fixed", "fixed", None), ("extreme", "extreme", None), ("power:0.5", "power", 0.5), ("exp:-1", "exp", -1.0)],
    )
    def test_parse(self, text, family, parameter):
        regime = ScalingRegime.parse(text)
        assert (regime.family, regime.parameter) == (family, parameter)

    @pytest.mark.parametrize("text", ["linear", "power", "power:x", "fixed:1", "exp:inf"])
    def test_parse_invalid(self, text):
        with pytest.raises(RegimeError):
            ScalingRegime.parse(text)

    def test_str(self):
        assert str(ScalingRegime.parse("power:0.5")) == "power:0.5"
        assert str(ScalingRegime.parse("extreme")) == "extreme"

    def test_a_R(self, ginibre, hyperbolic):
        assert ScalingRegime.parse("fixed").a_R(ginibre, 7.0) == 1.0
        assert ScalingRegime.parse("power:0.5").a_R(ginibre, 400.0) == pytest.approx(20.0)
        assert ScalingRegime.parse("exp:2").a_R(hyperbolic, 1.0) == pytest.approx(math.exp(2))
        assert ScalingRegime.parse("extreme").a_R(ginibre, 200.0) == 200.0
        assert ScalingRegime.parse("extreme").a_R(hyperbolic, 10.0) == pytest.approx(math.exp(10))

    @pytest.mark.parametrize(
        "text, ginibre_kind, hyperbolic_kind",
        [
            ("fixed", "fixed", "fixed"),
            ("power:0", "fixed", "fixed"),
            ("power:0.5", "intermediate", "intermediate"),
            ("power:1", "extreme", "intermediate"),
            ("power:2", "superexponential", "intermediate"),
            ("power:-0.5", "subunit", "subunit"),
            ("exp:0.5", "superexponential", "intermediate"),
            ("exp:1", "superexponential", "extreme"),
            ("exp:2", "superexponential", "superexponential"),
            ("extreme", "extreme", "extreme"),
        ],
    )
    def test_classify(self, ginibre, hyperbolic, text, ginibre_kind, hyperbolic_kind):
        regime = ScalingRegime.parse(text)
        assert regime.classify(ginibre) == ginibre_kind
        assert regime.classify(hyperbolic) == hyperbolic_kind


### Test for constants ###


def test_c_r_alpha():
    assert asymptotics.c_r_alpha(2.0, 0.0) == 0.25
    assert asymptotics.c_r_alpha(1.0, 10.0) == pytest.approx(math.exp(10) / 8)
    with pytest.raises(DomainError):
        asymptotics.c_r_alpha(0.0, 1.0)


def test_poisson_intensity(ginibre):
    assert asymptotics.poisson_intensity(ginibre) == 2.0
    assert asymptotics.poisson_intensity(Ensemble.hyperbolic(2.0)) == 0.5


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.7])
def test_gamma_moment_constant(alpha):
    constant = asymptotics.gamma_moment_constant(alpha)
    assert constant.closed == alpha / 4
    assert constant.numeric == pytest.approx(constant.closed, rel=1e-9)


### Test for variance functionals ###


class TestGinibreVariance:
    def test_unit_indicator(self, unit_indicator):
        assert asymptotics.v_f_ginibre(unit_indicator) == pytest.approx(GINIBRE_V_UNIT, rel=1e-13)

    def test_methods_agree(self):
        f = TestFunction((-1.0, 0.0, 0.5, 2.0), (1.0, -0.5, 2.0))
        closed = asymptotics.v_f_ginibre(f)
        assert asymptotics.v_f_ginibre(f, method="quadrature") == pytest.approx(closed, rel=1e-8)

    def test_translation_invariant(self, unit_indicator):
        shifted = asymptotics.v_f_ginibre(unit_indicator.translate(3.0))
        assert shifted == pytest.approx(GINIBRE_V_UNIT, rel=1e-12)

    def test_scaling(self, unit_indicator):
        assert asymptotics.v_f_ginibre(3 * unit_indicator) == pytest.approx(9 * GINIBRE_V_UNIT, rel=1e-12)

    def test_zero_function(self):
        assert asymptotics.v_f_ginibre(TestFunction.zero()) == 0.0

    def test_unknown_method(self, unit_indicator):
        with pytest.raises(DomainError):
            asymptotics.v_f_ginibre(unit_indicator, method="series")


class TestHyperbolicVariance:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_methods_agree(self, alpha, unit_indicator):
        beta = asymptotics.v_f_hyperbolic(alpha, unit_indicator)
        assert beta > 0
        quadrature = asymptotics.v_f_hyperbolic(alpha, unit_indicator, QuadratureSpec(1e-9, 1e-9), "quadrature")
        assert quadrature == pytest.approx(beta, rel=1e-6)

    def test_translation_scales_by_exponential(self, unit_indicator):
        # shifting both arguments by s multiplies the kernel by e^s
        base = asymptotics.v_f_hyperbolic(1.0, unit_indicator)
        shifted = asymptotics.v_f_hyperbolic(1.0, unit_indicator.translate(-2.0))
        assert shifted == pytest.approx(math.exp(-2.0) * base, rel=1e-8)

    def test_invalid_alpha(self, unit_indicator):
        with pytest.raises(DomainError):
            asymptotics.v_f_hyperbolic(-1.0, unit_indicator)


class TestKernelMarginal:
    def test_slab_over_line(self):
        for alpha in (0.5, 3.7):
            for x in (-5.0, 0.0, 5.0):
                assert asymptotics.kernel_slab(alpha, x, -math.inf, math.inf) == pytest.approx(math.exp(x), rel=1e-14)

    def test_slab_matches_kernel(self):
        value = asymptotics.kernel_slab(2.0, 0.3, -1.0, 0.5)
        direct = quad_1d(lambda y: asymptotics.hyperbolic_kernel(2.0, 0.3, y), -1.0, 0.5).value
        assert value == pytest.approx(direct, rel=1e-10)

    def test_identity_on_grid(self):
        spec = QuadratureSpec().tightened(10)
        errors = [
            abs(asymptotics.beta_kernel_marginal(alpha, x, spec) - math.exp(x))
            for alpha in (0.5, 1.0, 2.0, 3.7)
            for x in np.linspace(-5.0, 5.0, 41)
        ]
        assert max(errors) <= 1e-8

    def test_invalid_alpha(self):
        with pytest.raises(DomainError):
            asymptotics.beta_kernel_marginal(0.0, 1.0)


### Test for error probes ###


class TestErrorProbes:
    def test_power_decay_error(self):
        assert asymptotics.power_decay_error(10.0, 0.0) == 0.0
        # (1 − 2/3)^{2·2} vs e^{−4}
        assert asymptotics.power_decay_error(2.0, 1.0) == pytest.approx(abs(3.0**-4 - math.exp(-4)))
        with pytest.raises(DomainError):
            asymptotics.power_decay_error(1.0, 1.0)
        with pytest.raises(DomainError):
            asymptotics.power_decay_error(2.0, -1.0)

    def test_power_decay_constant_bounded(self):
        y_grid = np.logspace(2, 6, 9)
        t_grid = np.linspace(0.0, 20.0, 21)
        constant = asymptotics.power_decay_constant(y_grid, t_grid, 1.0)
        assert 0 < constant < 20
        wider = asymptotics.power_decay_constant(np.logspace(2, 7, 11), t_grid, 1.0)
        assert wider <= 1.5 * constant

    def test_coefficient_growth_error(self):
        # k_n^(1) = n + 1
        assert asymptotics.coefficient_growth_error(1.0, 2.5) == pytest.approx(0.5)
        # k_3^(2) = 20
        assert asymptotics.coefficient_growth_error(2.0, 3.0) == pytest.approx(11.0)
        with pytest.raises(DomainError):
            asymptotics.coefficient_growth_error(1.0, -1.0)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_coefficient_growth_constant_bounded(self, alpha):
        grid = list(np.linspace(0.0, 1.0, 4, endpoint=False)) + list(np.logspace(0, 3, 31))
        constant = asymptotics.coefficient_growth_constant(alpha, grid)
        wider = asymptotics.coefficient_growth_constant(alpha, grid + list(np.logspace(3, 5, 11)))
        assert math.isfinite(constant)
        assert wider <= 1.5 * constant


### Test for regime-specific variances ###


class TestRegimeVariances:
    def test_whitenoise_variance_ginibre(self, ginibre, unit_indicator):
        expected = 2 * 400 / 20 - 2 * 400 / (math.sqrt(math.pi) * 400)
        assert asymptotics.whitenoise_variance(ginibre, unit_indicator, 400.0, 20.0) == pytest.approx(expected)

    def test_whitenoise_variance_hyperbolic_lead(self, hyperbolic, unit_indicator):
        R, a_R = 10.0, 1e3
        lead = 2 * asymptotics.c_r_alpha(1.0, R) / a_R
        assert asymptotics.whitenoise_variance(hyperbolic, unit_indicator, R, a_R) == pytest.approx(lead, rel=1e-2)

    def test_half_plane_kernel_mass(self):
        assert asymptotics.half_plane_kernel_mass() == 0.5
        mass = asymptotics.half_plane_kernel_mass(1.0)
        direct = quad_2d(
            lambda x, y: asymptotics.hyperbolic_kernel(1.0, x, y),
            ((0.0, math.inf), (-math.inf, 0.0)),
            QuadratureSpec(1e-9, 1e-9),
        ).value
        assert mass == pytest.approx(direct, rel=1e-6)

    def test_jump_variance_ginibre(self, ginibre, unit_indicator):
        R = 12.0
        a_R = R**-0.5
        expected = 2 / math.sqrt(math.pi) * 0.5 * (R + 1 / a_R)
        assert asymptotics.jump_variance_asymptotic(ginibre, unit_indicator, R, a_R) == pytest.approx(expected)

    def test_jump_variance_zero_function(self, ginibre):
        with pytest.raises(RegimeError):
            asymptotics.jump_variance_asymptotic(ginibre, TestFunction.zero(), 1.0, 0.5)

    def test_vanishing_envelope(self, ginibre, hyperbolic, unit_indicator):
        assert asymptotics.vanishing_envelope(ginibre, unit_indicator, 10.0, 100.0) == pytest.approx(0.2)
        assert asymptotics.vanishing_envelope(hyperbolic, unit_indicator, 0.0, 2.0) == pytest.approx(0.125)


### Test for function `predicted_limit` ###


class TestPredictedLimit:
    def test_fixed_ginibre(self, ginibre, unit_indicator):
        law = asymptotics.predicted_limit(ginibre, ScalingRegime("fixed"), unit_indicator, 100.0)
        assert law.kind == asymptotics.GAUSSIAN
        assert law.centering == pytest.approx(200.0)
        assert law.normalization == 100.0
        assert law.variance == pytest.approx(GINIBRE_V_UNIT)

    def test_fixed_hyperbolic(self, hyperbolic, unit_indicator):
        law = asymptotics.predicted_limit(hyperbolic, ScalingRegime("fixed"), unit_indicator, 10.0)
        c_r = asymptotics.c_r_alpha(1.0, 10.0)
        assert law.centering == pytest.approx(2 * c_r * (math.e - 1))
        assert law.raw_variance == pytest.approx(c_r * asymptotics.v_f_hyperbolic(1.0, unit_indicator))

    def test_intermediate(self, ginibre, unit_indicator):
        law = asymptotics.predicted_limit(ginibre, ScalingRegime.parse("power:0.5"), unit_indicator, 400.0)
        assert law.kind == asymptotics.WHITE_NOISE
        assert law.variance == 2.0
        assert law.normalization == pytest.approx(20.0)
        assert law.centering == pytest.approx(40.0)

    def test_extreme(self, ginibre, unit_indicator):
        law = asymptotics.predicted_limit(ginibre, ScalingRegime("extreme"), unit_indicator, 200.0)
        assert law.kind == asymptotics.POISSON
        assert law.intensity == 2.0
        law = asymptotics.predicted_limit(Ensemble.hyperbolic(2.0), ScalingRegime("extreme"), unit_indicator, 10.0)
        assert law.intensity == 0.5

    def test_superexponential(self, ginibre, unit_indicator):
        law = asymptotics.predicted_limit(ginibre, ScalingRegime.parse("power:2"), unit_indicator, 10.0)
        assert law.kind == asymptotics.DEGENERATE
        assert law.variance == 0.0

    def test_subunit_jump(self, ginibre, unit_indicator):
        law = asymptotics.predicted_limit(ginibre, ScalingRegime.parse("power:-0.5"), unit_indicator, 12.0)
        assert law.kind == asymptotics.GAUSSIAN
        assert law.variance == 1.0
        assert law.normalization == pytest.approx(
            asymptotics.jump_variance_asymptotic(ginibre, unit_indicator, 12.0, 12.0**-0.5)
        )

    def test_subunit_zero_statistic(self, ginibre):
        f = TestFunction.indicator(-2.0, -1.0)
        law = asymptotics.predicted_limit(ginibre, ScalingRegime.parse("power:-0.5"), f, 1.0)
        assert law.kind == asymptotics.DEGENERATE
        assert law.centering == 0.0

    def test_subunit_zero_function(self, ginibre):
        law = asymptotics.predicted_limit(ginibre, ScalingRegime.parse("power:-0.5"), TestFunction.zero(), 4.0)
        assert law.kind == asymptotics.DEGENERATE

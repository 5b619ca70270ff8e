"""
A module for the limit laws of radial linear statistics and their constants.

Classes:
    LimitLaw: The predicted limit of a normalized linear statistic.
    ScalingRegime: A declared scaling family a_R and its classification.
    MomentConstant: A constant evaluated in closed form and by quadrature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from typing import NamedTuple
from typing import Optional
from typing import Sequence

import numpy as np
from scipy import special

from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.error import DataInvalidError
from radialdpp.lib.error import DomainError
from radialdpp.lib.error import RegimeError
from radialdpp.lib.funcs import DEFAULT_QUADRATURE
from radialdpp.lib.funcs import QuadratureSpec
from radialdpp.lib.funcs import TestFunction
from radialdpp.lib.funcs import beta_fn
from radialdpp.lib.funcs import quad_1d
from radialdpp.lib.funcs import quad_2d


logger = logging.getLogger(__name__)

GAUSSIAN = "gaussian"
WHITE_NOISE = "white_noise_gaussian"
POISSON = "poisson"
DEGENERATE = "degenerate"
LAW_KINDS = (GAUSSIAN, WHITE_NOISE, POISSON, DEGENERATE)


@dataclass(frozen=True)
class LimitLaw:
    """
    The predicted limit of (S − centering)/√normalization.

    Attributes:
        kind (str): One of "gaussian", "white_noise_gaussian", "poisson", "degenerate".
        variance (float): Limit variance of the normalized statistic.
        centering (float): Asymptotic mean of the raw statistic.
        normalization (float): Asymptotic scale of the raw variance.
        intensity (float): Intensity of a Poisson limit.
        provenance (str): The result producing the law.
    """

    kind: str
    variance: Optional[float] = None
    centering: Optional[float] = None
    normalization: Optional[float] = None
    intensity: Optional[float] = None
    provenance: str = ""

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise DataInvalidError(f"Unknown limit law {self.kind!r}")
        if self.variance is not None and self.variance < 0:
            raise DataInvalidError(f"Limit variance must be >= 0, got {self.variance}")
        if self.kind == POISSON and not (self.intensity and self.intensity > 0):
            raise DataInvalidError("A Poisson limit needs a positive intensity.")

    @property
    def raw_variance(self) -> Optional[float]:
        """Predicted variance of the raw statistic."""

        if self.variance is None or self.normalization is None:
            return None
        return self.variance * self.normalization

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "LimitLaw":
        try:
            return cls(**data)
        except TypeError as e:
            raise DataInvalidError(f"Invalid limit law payload: {e}") from e


### Scaling regimes ###

FIXED = "fixed"
INTERMEDIATE = "intermediate"
EXTREME = "extreme"
SUPEREXPONENTIAL = "superexponential"
SUBUNIT = "subunit"

FAMILIES = ("fixed", "power", "exp", "extreme")


@dataclass(frozen=True)
class ScalingRegime:
    """
    A scaling family a_R declared symbolically.

    Attributes:
        family (str): "fixed" (a_R = 1), "power" (a_R = R^p), "exp" (a_R = e^{cR})
            or "extreme" (e^R for the hyperbolic ensemble, R for Ginibre).
        parameter (float): p or c.
    """

    family: str
    parameter: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise RegimeError(f"Unknown scaling family {self.family!r}, expected one of {FAMILIES}")
        needs_parameter = self.family in ("power", "exp")
        if needs_parameter and (self.parameter is None or not math.isfinite(self.parameter)):
            raise RegimeError(f"Scaling family {self.family} needs a finite parameter.")
        if not needs_parameter and self.parameter is not None:
            raise RegimeError(f"Scaling family {self.family} takes no parameter.")

    @classmethod
    def parse(cls, text: str) -> "ScalingRegime":
        """Parse "fixed", "extreme", "power:P" or "exp:C"."""

        family, _, value = text.strip().partition(":")
        if not value:
            return cls(family)
        try:
            return cls(family, float(value))
        except ValueError as e:
            raise RegimeError(f"Invalid scaling parameter in {text!r}") from e

    def __str__(self) -> str:
        return self.family if self.parameter is None else f"{self.family}:{self.parameter:g}"

    def a_R(self, e: Ensemble, R: float) -> float:
        if self.family == "fixed":
            return 1.0
        if self.family == "power":
            return R**self.parameter
        if self.family == "exp":
            return math.exp(self.parameter * R)
        return math.exp(R) if e.is_hyperbolic else float(R)

    def classify(self, e: Ensemble) -> str:
        """
        Position of a_R relative to 1 and to the extreme scale of the ensemble.

        Raises:
            RegimeError: If the family cannot be placed.
        """
        family, p = self.family, self.parameter
        if family == "fixed" or (family in ("power", "exp") and p == 0):
            return FIXED
        if family == "extreme":
            return EXTREME
        if p < 0:
            return SUBUNIT
        if family == "power":
            if e.is_hyperbolic:
                return INTERMEDIATE
            return INTERMEDIATE if p < 1 else EXTREME if p == 1 else SUPEREXPONENTIAL
        if family == "exp":
            if not e.is_hyperbolic:
                return SUPEREXPONENTIAL
            return INTERMEDIATE if p < 1 else EXTREME if p == 1 else SUPEREXPONENTIAL
        raise RegimeError(f"Cannot classify scaling {self}")


### Constants ###


def c_r_alpha(alpha: float, R: float) -> float:
    """C_R^(α) = α e^R / 8."""

    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    return alpha * math.exp(R) / 8


def poisson_intensity(e: Ensemble) -> float:
    """Intensity of the extreme-scale Poisson limit: α/4 or 2."""

    return e.alpha / 4 if e.is_hyperbolic else 2.0


def _pieces_with_tails(f: TestFunction) -> list[tuple[float, float, float]]:
    return [(-math.inf, f.breakpoints[0], 0.0)] + list(f.pieces()) + [(f.breakpoints[-1], math.inf, 0.0)]


def _differing_pairs(f: TestFunction):
    pieces = _pieces_with_tails(f)
    for i, (a, b, v) in enumerate(pieces):
        for c, d, w in pieces[i + 1 :]:
            if v != w:
                # the finite piece goes first
                if math.isinf(a) or math.isinf(b):
                    yield (c, d), (a, b), (v - w) ** 2
                else:
                    yield (a, b), (c, d), (v - w) ** 2


### Ginibre variance functional ###


def _gauss_antiderivative(z: float) -> float:
    # second antiderivative of e^{−z²}, scaled by 2/√π
    return z * special.erf(z) + math.exp(-z * z) / math.sqrt(math.pi)


def _gauss_block(a: float, b: float, c: float, d: float) -> float:
    """(2/√π) ∫_a^b ∫_c^d e^{−(x−y)²} dy dx for finite [a, b]."""

    def primitive(z):
        if z == math.inf:
            return b - a
        if z == -math.inf:
            return a - b
        return _gauss_antiderivative(z - a) - _gauss_antiderivative(z - b)

    return primitive(d) - primitive(c)


def v_f_ginibre(f: TestFunction, spec: QuadratureSpec = DEFAULT_QUADRATURE, method: str = "closed") -> float:
    """
    V_f = (1/√π) ∫∫ [f(x) − f(y)]² e^{−(x−y)²} dx dy.

    Args:
        f: The test function.
        spec: Quadrature tolerances.
        method: "closed" (erf antiderivative per pair of pieces) or "quadrature"
            (iterated adaptive quadrature per pair).

    Returns:
        float: V_f ≥ 0.

    Raises:
        QuadratureError: If a quadrature does not converge.
    """
    total = []
    for (a, b), (c, d), weight in _differing_pairs(f):
        if method == "closed":
            block = _gauss_block(a, b, c, d)
        elif method == "quadrature":
            block = 2 / math.sqrt(math.pi) * quad_2d(lambda x, y: math.exp(-((x - y) ** 2)), ((a, b), (c, d)), spec).value
        else:
            raise DomainError(f"Unknown method {method!r}")
        total.append(weight * block)
    return max(math.fsum(total), 0.0)


### Hyperbolic variance functional ###


def hyperbolic_kernel(alpha: float, x: float, y: float) -> float:
    """e^{(α+1)(x+y)} / (e^x + e^y)^{2α+1} / B(α, α+1), evaluated in log form."""

    log_value = (alpha + 1) * (x + y) - (2 * alpha + 1) * np.logaddexp(x, y) - special.betaln(alpha, alpha + 1)
    return float(np.exp(log_value))


def kernel_slab(alpha: float, x: float, c: float, d: float) -> float:
    """
    ∫_c^d of the normalized kernel in y at fixed x.

    With t = expit(y − x) the integral is e^x [I_t(α+1, α)] between the limits; the
    complement side is used when both limits exceed ½.
    """
    t_lo, t_hi = special.expit(c - x), special.expit(d - x)
    if t_lo > 0.5:
        mass = special.betainc(alpha, alpha + 1, special.expit(x - c)) - special.betainc(
            alpha, alpha + 1, special.expit(x - d)
        )
    else:
        mass = special.betainc(alpha + 1, alpha, t_hi) - special.betainc(alpha + 1, alpha, t_lo)
    return math.exp(x) * float(mass)


def v_f_hyperbolic(
    alpha: float,
    f: TestFunction,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    method: str = "beta",
) -> float:
    """
    V_f^(α) = (1/B(α, α+1)) ∫∫ [f(x) − f(y)]² e^{(α+1)(x+y)}/(e^x + e^y)^{2α+1} dx dy.

    Args:
        alpha: α > 0.
        f: The test function.
        spec: Quadrature tolerances.
        method: "beta" (inner integral as an incomplete beta function, outer by
            quadrature) or "quadrature" (iterated quadrature of the kernel).

    Returns:
        float: V_f^(α) ≥ 0.

    Raises:
        QuadratureError: If a quadrature does not converge.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    total = []
    for (a, b), (c, d), weight in _differing_pairs(f):
        if method == "beta":
            block = quad_1d(lambda x: kernel_slab(alpha, x, c, d), a, b, spec).value
        elif method == "quadrature":
            block = quad_2d(lambda x, y: hyperbolic_kernel(alpha, x, y), ((a, b), (c, d)), spec).value
        else:
            raise DomainError(f"Unknown method {method!r}")
        total.append(2 * weight * block)
    return max(math.fsum(total), 0.0)


def beta_kernel_marginal(alpha: float, x: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    ∫_ℝ of the normalized hyperbolic kernel in y at fixed x, by quadrature.

    The integral equals e^x for every α > 0.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    below = quad_1d(lambda y: hyperbolic_kernel(alpha, x, y), -math.inf, x, spec)
    above = quad_1d(lambda y: hyperbolic_kernel(alpha, x, y), x, math.inf, spec)
    return below.value + above.value


class MomentConstant(NamedTuple):
    closed: float
    numeric: float


def gamma_moment_constant(alpha: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> MomentConstant:
    """(4^α/Γ(α)) ∫₀^∞ t^α e^{−4t} dt, in closed form (α/4) and by quadrature."""

    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    log_front = alpha * math.log(4) - special.gammaln(alpha)

    def integrand(t):
        if t == 0:
            return 0.0
        return math.exp(log_front + alpha * math.log(t) - 4 * t)

    numeric = quad_1d(integrand, 0.0, math.inf, spec).value
    return MomentConstant(alpha / 4, numeric)


### Error probes ###


def power_decay_error(y: float, t: float) -> float:
    """|(1 − 2/(y+1))^{2⌊ty⌋} − e^{−4t}|."""

    if not y > 1 or t < 0:
        raise DomainError(f"power_decay_error requires y > 1 and t >= 0, got ({y}, {t})")
    power = 2 * math.floor(t * y) * math.log1p(-2 / (y + 1))
    return abs(math.exp(power) - math.exp(-4 * t))


def coefficient_growth_error(alpha: float, y: float) -> float:
    """|k_⌊y⌋^(α) − y^α/Γ(α)|."""

    if not alpha > 0 or y < 0:
        raise DomainError(f"coefficient_growth_error requires alpha > 0 and y >= 0, got ({alpha}, {y})")
    n = math.floor(y)
    k = special.poch(n + 1, alpha) / special.gamma(alpha)
    return abs(k - y**alpha / special.gamma(alpha))


def power_decay_constant(y_grid: Sequence[float], t_grid: Sequence[float], c0: float = 1.0) -> float:
    """sup of y·e^{t/c0}·power_decay_error(y, t) over the grid."""

    return max(y * math.exp(t / c0) * power_decay_error(y, t) for y in y_grid for t in t_grid)


def coefficient_growth_constant(alpha: float, y_grid: Sequence[float]) -> float:
    """
    The smallest C with error ≤ C on [0, 1) and ≤ C·y^{α−1} on [1, ∞), over the grid.
    """
    return max(coefficient_growth_error(alpha, y) / (y ** (alpha - 1) if y >= 1 else 1.0) for y in y_grid)


### Regime-specific variances ###


def whitenoise_variance(e: Ensemble, f: TestFunction, R: float, a_R: float) -> float:
    """
    Two-term expansion of Var S_f at intermediate scales.

    Hyperbolic: (2C_R/a_R)∫f² − α(∫f)² e^R/(2^{2α+3} B(α, α+1) a_R²).
    Ginibre: (2R/a_R)∫f² − 2R(∫f)²/(√π a_R²).
    """
    integrals = f.integrals()
    if e.is_hyperbolic:
        lead = 2 * c_r_alpha(e.alpha, R) / a_R * integrals.square
        correction = e.alpha * integrals.total**2 * math.exp(R) / (2 ** (2 * e.alpha + 3) * beta_fn(e.alpha, e.alpha + 1))
        return lead - correction / a_R**2
    return 2 * R / a_R * integrals.square - 2 * R * integrals.total**2 / (math.sqrt(math.pi) * a_R**2)


def half_plane_kernel_mass(alpha: Optional[float] = None, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    Kernel mass of the quadrant x > 0 > y.

    Hyperbolic (α given): (1/B(α, α+1)) ∫₀^∞∫_{−∞}^0 e^{(α+1)(x+y)}/(e^x + e^y)^{2α+1} dy dx.
    Gaussian (α omitted): ∫₀^∞∫_{−∞}^0 e^{−(x−y)²} dy dx = ½.
    """
    if alpha is None:
        return 0.5
    return quad_1d(lambda x: kernel_slab(alpha, x, -math.inf, 0.0), 0.0, math.inf, spec).value


def jump_variance_asymptotic(
    e: Ensemble,
    f: TestFunction,
    R: float,
    a_R: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """
    Leading variance of S_f for a_R ≪ 1, driven by the jump of f at M_f.

    Hyperbolic: (α f(M_f⁻)²/4)·(half-plane kernel mass)·e^{R + M_f/a_R}.
    Ginibre: the lower bound (2/√π) f(M_f⁻)²·½·(R + M_f/a_R).

    Raises:
        RegimeError: If f ≡ 0.
    """
    end = f.right_endpoint()
    if end is None:
        raise RegimeError("The zero function has no right endpoint.")
    jump = f.left_limit_at_right_endpoint()
    reach = R + end / a_R
    if e.is_hyperbolic:
        return e.alpha * jump**2 / 4 * half_plane_kernel_mass(e.alpha, spec) * math.exp(reach)
    return 2 / math.sqrt(math.pi) * jump**2 * half_plane_kernel_mass() * reach


def vanishing_envelope(e: Ensemble, f: TestFunction, R: float, a_R: float) -> float:
    """Σ E f² bound on Var S_f: (αe^R/(4a_R))∫f² or (2R/a_R)∫f²."""

    square = f.integrals().square
    if e.is_hyperbolic:
        return e.alpha * math.exp(R) / (4 * a_R) * square
    return 2 * R / a_R * square


def predicted_limit(
    e: Ensemble,
    regime: ScalingRegime,
    f: TestFunction,
    R: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> LimitLaw:
    """
    The limit law of the linear statistic of f under a declared scaling.

    Fixed scale gives a Gaussian with variance V_f^(α) (normalized by C_R^(α)) or
    V_f (normalized by R); intermediate scales give a white-noise Gaussian with
    variance 2∫f²; the extreme scale gives a Poisson process of intensity α/4 or
    2; faster scales degenerate; a_R ≪ 1 gives a standard Gaussian after
    normalizing by the jump variance, or the zero statistic once R + M_f/a_R ≤ 0.

    Raises:
        RegimeError: If the regime is unclassifiable or f has no jump at M_f under
            a_R ≪ 1.
    """
    kind = regime.classify(e)
    a_R = regime.a_R(e, R)
    integrals = f.integrals()
    if kind == FIXED:
        if e.is_hyperbolic:
            c_r = c_r_alpha(e.alpha, R)
            return LimitLaw(
                GAUSSIAN,
                variance=v_f_hyperbolic(e.alpha, f, spec),
                centering=2 * c_r * integrals.exp_weighted,
                normalization=c_r,
                provenance="fixed-scale CLT, hyperbolic",
            )
        return LimitLaw(
            GAUSSIAN,
            variance=v_f_ginibre(f, spec),
            centering=2 * R * integrals.total,
            normalization=R,
            provenance="fixed-scale CLT, Ginibre",
        )
    if kind == INTERMEDIATE:
        if e.is_hyperbolic:
            c_r = c_r_alpha(e.alpha, R)
            centering = 2 * c_r / a_R * f.integral_exp_scaled(1 / a_R)
            normalization = c_r / a_R
        else:
            centering = 2 * R / a_R * integrals.total
            normalization = R / a_R
        return LimitLaw(
            WHITE_NOISE,
            variance=2 * integrals.square,
            centering=centering,
            normalization=normalization,
            provenance="white-noise CLT",
        )
    if kind == EXTREME:
        return LimitLaw(POISSON, intensity=poisson_intensity(e), provenance="extreme-scale Poisson limit")
    if kind == SUPEREXPONENTIAL:
        return LimitLaw(DEGENERATE, variance=0.0, provenance="vanishing variance")
    end = f.right_endpoint()
    if end is None:
        return LimitLaw(DEGENERATE, variance=0.0, provenance="zero function")
    if R + end / a_R <= 0:
        return LimitLaw(DEGENERATE, variance=0.0, centering=0.0, provenance="almost surely zero statistic")
    if f.left_limit_at_right_endpoint() == 0:
        raise RegimeError("No limit law is known for a_R << 1 without a jump at the right endpoint.")
    return LimitLaw(
        GAUSSIAN,
        variance=1.0,
        normalization=jump_variance_asymptotic(e, f, R, a_R, spec),
        provenance="jump CLT",
    )

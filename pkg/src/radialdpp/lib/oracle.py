"""
A module for exact moments of radial linear statistics.

The moduli are independent, so the mean and variance of S_f = Σ_n f(X_n) are sums
over n of one-particle moments. For a piecewise-constant f each one-particle law
is a finite distribution over the pieces of f plus "outside", whose probabilities
are incomplete gamma/beta differences; no quadrature is involved.

Classes:
    MomentReport: Exact and asymptotic moments of a statistic.
    SoshnikovReport: Growth diagnostics of a statistic.
    PoissonDiagnostics: Extreme-scale diagnostics of a statistic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from typing import NamedTuple
from typing import Optional

import numpy as np
from scipy import special

from radialdpp.lib import asymptotics
from radialdpp.lib.asymptotics import ScalingRegime
from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.ensembles import Window
from radialdpp.lib.error import DomainError
from radialdpp.lib.funcs import DEFAULT_QUADRATURE
from radialdpp.lib.funcs import QuadratureSpec
from radialdpp.lib.funcs import TestFunction
from radialdpp.lib.funcs import common_refinement
from radialdpp.lib.funcs import quad_1d
from radialdpp.lib.funcs import quad_2d
from radialdpp.lib.sampler import WindowTable
from radialdpp.lib.sampler import window_table


logger = logging.getLogger(__name__)

# hyperbolic index ranges grow like e^R
HYPERBOLIC_R_LIMIT = 12.0


def _table(
    e: Ensemble,
    breakpoints: tuple,
    R: float,
    a_R: float,
    eps: float,
    allow_large_R: bool = False,
) -> WindowTable:
    if e.is_hyperbolic and R > HYPERBOLIC_R_LIMIT and not allow_large_R:
        raise DomainError(f"Hyperbolic exact sums beyond R = {HYPERBOLIC_R_LIMIT:g} need allow_large_R.")
    window = Window.scaled(breakpoints[0], breakpoints[-1], R, a_R)
    return window_table(e, window, tuple(float(x) for x in breakpoints), float(eps))


def _pairwise(probabilities: np.ndarray, f_values: np.ndarray, g_values: np.ndarray) -> np.ndarray:
    """
    Per-row Σ_{a<b} P_a P_b (f_a − f_b)(g_a − g_b).

    Equals the covariance of f and g under each row's distribution when the row
    sums to one, without the cancellation of E[fg] − E[f]E[g].
    """
    total = np.zeros(probabilities.shape[0])
    k = probabilities.shape[1]
    for a in range(k):
        for b in range(a + 1, k):
            weight = (f_values[a] - f_values[b]) * (g_values[a] - g_values[b])
            if weight != 0:
                total += probabilities[:, a] * probabilities[:, b] * weight
    return total


def _with_outside(table: WindowTable) -> np.ndarray:
    return np.column_stack([table.pieces, table.outside])


def exact_mean(
    e: Ensemble,
    f: TestFunction,
    R: float,
    a_R: float = 1.0,
    eps: float = 1e-12,
    allow_large_R: bool = False,
) -> float:
    """
    E S_f for S_f = Σ_n f(a_R(c(ρ_n) − R)), c the modulus of the ensemble.

    The error is at most ‖f‖_∞·eps from truncation plus rounding.
    """
    if f.is_zero():
        return 0.0
    table = _table(e, f.breakpoints, R, a_R, eps, allow_large_R)
    per_piece = [math.fsum(table.pieces[:, j]) for j in range(f.num_pieces)]
    return math.fsum(v * p for v, p in zip(f.values, per_piece))


def exact_variance(
    e: Ensemble,
    f: TestFunction,
    R: float,
    a_R: float = 1.0,
    eps: float = 1e-12,
    allow_large_R: bool = False,
) -> float:
    """Var S_f = Σ_n Var f(X_n), each term in pairwise form."""

    if f.is_zero():
        return 0.0
    table = _table(e, f.breakpoints, R, a_R, eps, allow_large_R)
    values = np.append(np.asarray(f.values), 0.0)
    return math.fsum(_pairwise(_with_outside(table), values, values))


def exact_covariance(
    e: Ensemble,
    f: TestFunction,
    g: TestFunction,
    R: float,
    a_R: float = 1.0,
    eps: float = 1e-12,
    allow_large_R: bool = False,
) -> float:
    """Cov(S_f, S_g), summed per n on the common refinement of f and g."""

    if f.is_zero() or g.is_zero():
        return 0.0
    grid, f_values, g_values = common_refinement(f, g)
    table = _table(e, grid, R, a_R, eps, allow_large_R)
    return math.fsum(
        _pairwise(_with_outside(table), np.append(f_values, 0.0), np.append(g_values, 0.0))
    )


def intensity_mean(e: Ensemble, f: TestFunction, R: float, a_R: float = 1.0) -> float:
    """
    E S_f from the one-point intensity, in closed form per piece.

    Ginibre: Σ v_j (r_b² − r_a²). Hyperbolic: Σ v_j α (sinh²(s_b/2) − sinh²(s_a/2)).
    Coordinates left of the origin are clipped to it.
    """
    total = []
    for lo, hi, v in f.pieces():
        a, b = max(R + lo / a_R, 0.0), max(R + hi / a_R, 0.0)
        if e.is_hyperbolic:
            # sinh²(b/2) − sinh²(a/2) = sinh((b−a)/2) sinh((b+a)/2)
            total.append(v * e.alpha * math.sinh((b - a) / 2) * math.sinh((b + a) / 2))
        else:
            total.append(v * (b - a) * (b + a))
    return math.fsum(total)


### Ginibre variance integral ###


def _clipped_pieces(f: TestFunction, lower: float, margin: float) -> list[tuple[float, float, float]]:
    pieces = [(f.breakpoints[0] - margin, f.breakpoints[0], 0.0)]
    pieces += list(f.pieces())
    pieces.append((f.breakpoints[-1], f.breakpoints[-1] + margin, 0.0))
    return [(max(a, lower), b, v) for a, b, v in pieces if b > lower]


def ginibre_variance_integral(
    f: TestFunction,
    R: float,
    a_R: float = 1.0,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    method: str = "bessel",
    margin: float = 10.0,
) -> float:
    """
    Var S_f for the Ginibre ensemble from the kernel, by nested quadrature.

    With a = R + x/a_R and b = R + y/a_R,

        Var = (2/a_R²) ∫∫ [f(x) − f(y)]² e^{−(a−b)²} ab (1/π)∫₀^π e^{−2ab(1−cos θ)} dθ dx dy.

    The angular integral is e^{−2ab} I₀(2ab) ("bessel") or evaluated by
    quadrature ("angular"). Zero pieces beyond the support extend `margin`
    radial units, where the Gaussian factor has decayed below e^{−margin²}.

    Raises:
        DomainError: For an unknown method.
        QuadratureError: If a quadrature does not converge.
    """
    if method not in ("bessel", "angular"):
        raise DomainError(f"Unknown method {method!r}")
    if f.is_zero():
        return 0.0

    def angular(ab: float) -> float:
        if method == "bessel":
            return float(special.i0e(2 * ab))
        return quad_1d(lambda t: math.exp(-2 * ab * (1 - math.cos(t))), 0.0, math.pi, spec.tightened(10)).value / math.pi

    def integrand(x: float, y: float) -> float:
        a, b = R + x / a_R, R + y / a_R
        return math.exp(-((a - b) ** 2)) * a * b * angular(a * b)

    pieces = _clipped_pieces(f, -R * a_R, margin * a_R)
    total = []
    for i, (a, b, v) in enumerate(pieces):
        for c, d, w in pieces[i + 1 :]:
            if v != w:
                total.append((v - w) ** 2 * quad_2d(integrand, ((a, b), (c, d)), spec).value)
    return 4 * math.fsum(total) / a_R**2


### Reports ###


@dataclass(frozen=True)
class MomentReport:
    """
    Exact and asymptotic moments of S_f at one R.

    Attributes:
        R (float): Centre.
        a_R (float): Scale.
        mean_exact (float): E S_f.
        var_exact (float): Var S_f.
        mean_asymptotic (float): Predicted centering, `None` if none applies.
        var_asymptotic (float): Predicted variance, `None` if none applies.
        n_range (tuple[int, int]): Truncation range of the window.
        truncation_mass (float): Certified expected points outside the range.
        quadrature_error (float): Rounding bound of the per-index sums.
    """

    R: float
    a_R: float
    mean_exact: float
    var_exact: float
    mean_asymptotic: Optional[float]
    var_asymptotic: Optional[float]
    n_range: tuple
    truncation_mass: float
    quadrature_error: float

    CSV_COLUMNS = ("R", "a_R", "mean_exact", "var_exact", "mean_asym", "var_asym", "trunc_mass")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["n_range"] = list(self.n_range)
        return data

    def csv_row(self) -> dict:
        return dict(
            zip(
                self.CSV_COLUMNS,
                (
                    self.R,
                    self.a_R,
                    self.mean_exact,
                    self.var_exact,
                    self.mean_asymptotic,
                    self.var_asymptotic,
                    self.truncation_mass,
                ),
            )
        )


def _asymptotic_moments(
    e: Ensemble,
    f: TestFunction,
    regime: ScalingRegime,
    R: float,
    spec: QuadratureSpec,
) -> tuple[Optional[float], Optional[float]]:
    kind = regime.classify(e)
    a_R = regime.a_R(e, R)
    if kind == asymptotics.EXTREME:
        rate = asymptotics.poisson_intensity(e)
        integrals = f.integrals()
        return rate * integrals.total, rate * integrals.square
    if kind == asymptotics.SUPEREXPONENTIAL:
        return None, asymptotics.vanishing_envelope(e, f, R, a_R)
    if kind == asymptotics.INTERMEDIATE:
        law = asymptotics.predicted_limit(e, regime, f, R, spec)
        return law.centering, asymptotics.whitenoise_variance(e, f, R, a_R)
    law = asymptotics.predicted_limit(e, regime, f, R, spec)
    if law.kind == asymptotics.DEGENERATE:
        return law.centering, 0.0
    return law.centering, law.raw_variance


def moment_report(
    e: Ensemble,
    f: TestFunction,
    regime: ScalingRegime,
    R: float,
    eps: float = 1e-12,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    allow_large_R: bool = False,
) -> MomentReport:
    """Exact moments of S_f next to the asymptotics of the declared regime."""

    a_R = regime.a_R(e, R)
    mean_asym, var_asym = _asymptotic_moments(e, f, regime, R, spec)
    if f.is_zero():
        return MomentReport(R, a_R, 0.0, 0.0, mean_asym, var_asym, (0, -1), 0.0, 0.0)
    table = _table(e, f.breakpoints, R, a_R, eps, allow_large_R)
    report = MomentReport(
        R=R,
        a_R=a_R,
        mean_exact=exact_mean(e, f, R, a_R, eps, allow_large_R),
        var_exact=exact_variance(e, f, R, a_R, eps, allow_large_R),
        mean_asymptotic=mean_asym,
        var_asymptotic=var_asym,
        n_range=(table.truncation.n_min, table.truncation.n_max),
        truncation_mass=table.truncation.mass_bound,
        quadrature_error=table.n.size * np.finfo(float).eps * f.sup_norm() ** 2,
    )
    logger.info("Moments at R=%g: mean %.10g, variance %.10g", R, report.mean_exact, report.var_exact)
    return report


class SoshnikovReport(NamedTuple):
    var: float
    sup_f: float
    mean_abs: float
    mean_abs_ratio: float
    sup_ratio: float


def soshnikov_diagnostics(
    e: Ensemble,
    f: TestFunction,
    R: float,
    a_R: float = 1.0,
    eps: float = 1e-12,
) -> SoshnikovReport:
    """
    Var S_f, ‖f‖_∞, E S_|f| and the ratios E S_|f|/Var and ‖f‖_∞/Var^{0.1}.

    Charted along R, a divergent variance with bounded ratios signals the growth
    conditions of Soshnikov's CLT.
    """
    if f.is_zero():
        return SoshnikovReport(0.0, 0.0, 0.0, 0.0, 0.0)
    var = exact_variance(e, f, R, a_R, eps)
    mean_abs = exact_mean(e, f.absolute(), R, a_R, eps)
    sup_f = f.sup_norm()
    if var == 0:
        return SoshnikovReport(0.0, sup_f, mean_abs, math.inf, math.inf)
    return SoshnikovReport(var, sup_f, mean_abs, mean_abs / var, sup_f / var**0.1)


class PoissonDiagnostics(NamedTuple):
    sum_means: float
    sup_single: float
    avoidance_gap: float


def poisson_limit_diagnostics(
    e: Ensemble,
    R: float,
    a_R: float,
    f: TestFunction,
    eps: float = 1e-12,
) -> PoissonDiagnostics:
    """
    Σ_n E f(X_n), sup_n P(X_n ∈ supp f) and |Π_n (1 − E f(X_n)) − exp(−Σ_n E f(X_n))|.

    Raises:
        DomainError: If f takes values outside [0, 1).
    """
    if any(v < 0 or v >= 1 for v in f.values):
        raise DomainError("Poisson diagnostics need 0 <= f < 1.")
    if f.is_zero():
        return PoissonDiagnostics(0.0, 0.0, 0.0)
    table = _table(e, f.breakpoints, R, a_R, eps)
    means = table.pieces @ np.asarray(f.values)
    support = table.pieces[:, np.asarray(f.values) > 0].sum(axis=1)
    sum_means = math.fsum(means)
    log_avoidance = math.fsum(np.log1p(-means))
    gap = abs(math.exp(log_avoidance) - math.exp(-sum_means))
    return PoissonDiagnostics(sum_means, float(support.max()) if support.size else 0.0, gap)

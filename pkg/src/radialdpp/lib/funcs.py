"""
A module for special functions, piecewise-constant test functions and quadrature.

Classes:
    TestFunction: A compactly supported piecewise-constant real function.
    TFIntegrals: The closed-form integrals of a test function.
    QuadratureSpec: Tolerances and limits for adaptive quadrature.
    QuadResult: A quadrature value with its error estimate.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Callable
from typing import NamedTuple
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
from scipy import integrate
from scipy import special

from radialdpp.lib.error import DataInvalidError
from radialdpp.lib.error import DomainError
from radialdpp.lib.error import QuadratureError


logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _scalar_or_array(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def _require(condition: bool, message: str):
    if not condition:
        raise DomainError(message)


### Special functions ###


def log_gamma(x: ArrayLike):
    """ln Γ(x) for x > 0."""

    arr = np.asarray(x, dtype=float)
    _require(np.all(arr > 0), f"log_gamma requires x > 0, got {x}")
    return _scalar_or_array(special.gammaln(arr))


def beta_fn(a: float, b: float) -> float:
    """Γ(a)Γ(b)/Γ(a+b), computed through `log_gamma`."""

    _require(a > 0 and b > 0, f"beta_fn requires a, b > 0, got ({a}, {b})")
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def reg_inc_gamma_lower(s: ArrayLike, x: ArrayLike):
    """Regularized lower incomplete gamma P(s, x) for s > 0, x ≥ 0."""

    s_arr, x_arr = np.asarray(s, dtype=float), np.asarray(x, dtype=float)
    _require(np.all(s_arr > 0), f"reg_inc_gamma_lower requires s > 0, got {s}")
    _require(np.all(x_arr >= 0), f"reg_inc_gamma_lower requires x >= 0, got {x}")
    return _scalar_or_array(special.gammainc(s_arr, x_arr))


def reg_inc_gamma_upper(s: ArrayLike, x: ArrayLike):
    """Regularized upper incomplete gamma Q(s, x) = 1 − P(s, x), without cancellation."""

    s_arr, x_arr = np.asarray(s, dtype=float), np.asarray(x, dtype=float)
    _require(np.all(s_arr > 0), f"reg_inc_gamma_upper requires s > 0, got {s}")
    _require(np.all(x_arr >= 0), f"reg_inc_gamma_upper requires x >= 0, got {x}")
    return _scalar_or_array(special.gammaincc(s_arr, x_arr))


def reg_inc_beta(a: ArrayLike, b: ArrayLike, x: ArrayLike):
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""

    a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    _require(np.all(a_arr > 0) and np.all(b_arr > 0), f"reg_inc_beta requires a, b > 0, got ({a}, {b})")
    _require(np.all((x_arr >= 0) & (x_arr <= 1)), f"reg_inc_beta requires x in [0, 1], got {x}")
    return _scalar_or_array(special.betainc(a_arr, b_arr, x_arr))


def erf(x: ArrayLike):
    """The error function; erf(±∞) = ±1."""

    arr = np.asarray(x, dtype=float)
    _require(not np.any(np.isnan(arr)), "erf is undefined at NaN")
    return _scalar_or_array(special.erf(arr))


### Test functions ###


class TFIntegrals(NamedTuple):
    total: float
    exp_weighted: float
    square: float
    absolute: float
    absolute_exp_weighted: float


@dataclass(frozen=True)
class TestFunction:
    """
    A compactly supported piecewise-constant real function.

    The function takes `values[i]` on [breakpoints[i], breakpoints[i+1]) and
    vanishes outside [breakpoints[0], breakpoints[-1]).

    Attributes:
        breakpoints (tuple[float, ...]): Strictly increasing, finite.
        values (tuple[float, ...]): One finite value per interval.
    """

    __test__ = False  # not a pytest class

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        try:
            breakpoints = tuple(float(x) for x in self.breakpoints)
            values = tuple(float(v) for v in self.values)
        except (TypeError, ValueError) as e:
            raise DataInvalidError(f"Test function entries must be numbers: {e}") from e
        if len(breakpoints) < 2:
            raise DataInvalidError("A test function needs at least one interval.")
        if len(values) != len(breakpoints) - 1:
            raise DataInvalidError(
                f"Expected {len(breakpoints) - 1} values for {len(breakpoints)} breakpoints, got {len(values)}."
            )
        if not all(math.isfinite(x) for x in breakpoints + values):
            raise DataInvalidError("Breakpoints and values must be finite.")
        if any(b <= a for a, b in zip(breakpoints, breakpoints[1:])):
            raise DataInvalidError("Breakpoints must be strictly increasing.")
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    @classmethod
    def indicator(cls, lo: float, hi: float, height: float = 1.0) -> "TestFunction":
        """`height` times the indicator of [lo, hi)."""

        return cls((lo, hi), (height,))

    @classmethod
    def zero(cls) -> "TestFunction":
        return cls((0.0, 1.0), (0.0,))

    @classmethod
    def from_dict(cls, data: dict) -> "TestFunction":
        if not isinstance(data, dict) or set(data) != {"breakpoints", "values"}:
            raise DataInvalidError('A test function is {"breakpoints": [...], "values": [...]}.')
        if not isinstance(data["breakpoints"], list) or not isinstance(data["values"], list):
            raise DataInvalidError("Breakpoints and values must be lists.")
        return cls(tuple(data["breakpoints"]), tuple(data["values"]))

    @classmethod
    def from_file(cls, filepath: str) -> "TestFunction":
        with open(filepath, "r") as file:
            try:
                data = json.load(file)
            except json.JSONDecodeError as e:
                raise DataInvalidError(f"{filepath} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @property
    def num_pieces(self) -> int:
        return len(self.values)

    def pieces(self):
        """Iterate over (lo, hi, value) triples."""

        return zip(self.breakpoints, self.breakpoints[1:], self.values)

    def evaluate(self, x: ArrayLike):
        """Evaluate at any real point(s), 0 outside [x_0, x_m)."""

        arr = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, arr, side="right") - 1
        inside = (idx >= 0) & (idx < self.num_pieces)
        values = np.where(inside, np.asarray(self.values)[np.clip(idx, 0, self.num_pieces - 1)], 0.0)
        return _scalar_or_array(values)

    def __call__(self, x: ArrayLike):
        return self.evaluate(x)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def integrals(self) -> TFIntegrals:
        """∫f, ∫f e^x, ∫f², ∫|f| and ∫|f| e^x, exactly per piece."""

        total = exp_weighted = square = absolute = absolute_exp = 0.0
        for lo, hi, v in self.pieces():
            width = hi - lo
            # e^hi − e^lo without cancellation
            exp_mass = math.exp(lo) * math.expm1(width)
            total += v * width
            exp_weighted += v * exp_mass
            square += v * v * width
            absolute += abs(v) * width
            absolute_exp += abs(v) * exp_mass
        return TFIntegrals(total, exp_weighted, square, absolute, absolute_exp)

    def integral_exp_scaled(self, c: float) -> float:
        """∫ f(x) e^{cx} dx."""

        if c == 0:
            return self.integrals().total
        return sum(v * math.exp(c * lo) * math.expm1(c * (hi - lo)) / c for lo, hi, v in self.pieces())

    def first_moment(self) -> float:
        """∫ x f(x) dx."""

        return sum(v * (hi * hi - lo * lo) / 2 for lo, hi, v in self.pieces())

    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values)

    def right_endpoint(self) -> Optional[float]:
        """M_f, the right end of the last nonzero piece; `None` for f ≡ 0."""

        for (_, hi, v) in reversed(list(self.pieces())):
            if v != 0:
                return hi
        return None

    def left_limit_at_right_endpoint(self) -> float:
        """f(M_f⁻); 0 for f ≡ 0."""

        for v in reversed(self.values):
            if v != 0:
                return v
        return 0.0

    def support_hull(self) -> Optional[tuple[float, float]]:
        """Smallest interval containing every nonzero piece."""

        nonzero = [(lo, hi) for lo, hi, v in self.pieces() if v != 0]
        if not nonzero:
            return None
        return nonzero[0][0], nonzero[-1][1]

    def lattice_step(self, max_denominator: int = 12) -> Optional[float]:
        """
        Common step h such that every value is an integer multiple of h.

        Returns:
            The largest such h found among |v_min|/k for k ≤ `max_denominator`,
            or `None` if the values are not commensurate.
        """
        nonzero = [abs(v) for v in self.values if v != 0]
        if not nonzero:
            return None
        smallest = min(nonzero)
        for k in range(1, max_denominator + 1):
            h = smallest / k
            if all(abs(v / h - round(v / h)) < 1e-9 for v in nonzero):
                return h
        return None

    def refine(self, points: Sequence[float]) -> "TestFunction":
        """The same function on a breakpoint set extended by `points`."""

        grid = sorted(set(self.breakpoints) | {float(p) for p in points})
        return TestFunction(tuple(grid), tuple(float(self.evaluate(lo)) for lo in grid[:-1]))

    def translate(self, shift: float) -> "TestFunction":
        """x ↦ f(x − shift)."""

        return TestFunction(tuple(b + shift for b in self.breakpoints), self.values)

    def reflect(self) -> "TestFunction":
        """x ↦ f(−x), equal to the reflection up to the endpoints of pieces."""

        return TestFunction(tuple(-x for x in reversed(self.breakpoints)), tuple(reversed(self.values)))

    def absolute(self) -> "TestFunction":
        return TestFunction(self.breakpoints, tuple(abs(v) for v in self.values))

    def __add__(self, other: "TestFunction") -> "TestFunction":
        grid, f_values, g_values = common_refinement(self, other)
        return TestFunction(grid, tuple(a + b for a, b in zip(f_values, g_values)))

    def __mul__(self, other: Union[float, "TestFunction"]) -> "TestFunction":
        if isinstance(other, TestFunction):
            grid, f_values, g_values = common_refinement(self, other)
            return TestFunction(grid, tuple(a * b for a, b in zip(f_values, g_values)))
        return TestFunction(self.breakpoints, tuple(float(other) * v for v in self.values))

    __rmul__ = __mul__

    def __neg__(self) -> "TestFunction":
        return -1.0 * self


def common_refinement(*functions: TestFunction) -> tuple:
    """
    Express several test functions on the union of their breakpoints.

    Returns:
        tuple: The common breakpoints followed by one tuple of piece values per
        function.
    """
    grid = tuple(sorted(set().union(*(f.breakpoints for f in functions))))
    lefts = np.asarray(grid[:-1])
    return (grid,) + tuple(tuple(np.atleast_1d(f.evaluate(lefts)).tolist()) for f in functions)


### Quadrature ###


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Tolerances and limits for adaptive quadrature.

    Attributes:
        abs_tol (float): Absolute tolerance, > 0.
        rel_tol (float): Relative tolerance, > 0.
        max_subdivisions (int): Subinterval limit, ≥ 1.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        _require(self.abs_tol > 0 and self.rel_tol > 0, "Quadrature tolerances must be positive.")
        _require(self.max_subdivisions >= 1, "max_subdivisions must be at least 1.")

    @classmethod
    def from_settings(cls, settings) -> "QuadratureSpec":
        return cls(settings.abs_tol, settings.rel_tol, settings.max_subdivisions)

    def tightened(self, factor: float) -> "QuadratureSpec":
        return QuadratureSpec(self.abs_tol / factor, self.rel_tol / factor, self.max_subdivisions)


DEFAULT_QUADRATURE = QuadratureSpec()


class QuadResult(NamedTuple):
    value: float
    error_estimate: float


def _quad_finite(g: Callable[[float], float], lo: float, hi: float, spec: QuadratureSpec) -> QuadResult:
    result = integrate.quad(
        g,
        lo,
        hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, error = float(result[0]), float(result[1])
    # A fourth element carries the QUADPACK message when ier != 0
    if len(result) > 3 and error > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise QuadratureError(
            f"Quadrature on [{lo}, {hi}] did not converge: {result[3]}",
            value=value,
            error_estimate=error,
        )
    return QuadResult(value, error)


def quad_1d(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadResult:
    """
    Adaptive 1-D integration of `g` over [lo, hi].

    Infinite ends are mapped to [0, 1) by t = u/(1−u) before integrating.

    Args:
        g: Integrand, finite on the range.
        lo: Lower limit, may be −∞.
        hi: Upper limit, may be +∞.
        spec: Tolerances.

    Returns:
        QuadResult: The value and its error estimate.

    Raises:
        DomainError: If lo ≥ hi.
        QuadratureError: On non-convergence, carrying the best estimate.
    """
    _require(lo < hi, f"quad_1d requires lo < hi, got [{lo}, {hi}]")
    if math.isinf(lo) and math.isinf(hi):
        left = quad_1d(g, -math.inf, 0.0, spec)
        right = quad_1d(g, 0.0, math.inf, spec)
        return QuadResult(left.value + right.value, left.error_estimate + right.error_estimate)
    if math.isinf(hi):
        return _quad_finite(lambda u: g(lo + u / (1 - u)) / (1 - u) ** 2, 0.0, 1.0, spec)
    if math.isinf(lo):
        return _quad_finite(lambda u: g(hi - u / (1 - u)) / (1 - u) ** 2, 0.0, 1.0, spec)
    return _quad_finite(g, lo, hi, spec)


def quad_2d(
    g: Callable[[float, float], float],
    box: tuple[tuple[float, float], tuple[float, float]],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> QuadResult:
    """
    Iterated integration of g(x, y) over box = ((x_lo, x_hi), (y_lo, y_hi)).

    The inner integrals run at a tenth of the outer tolerances; the reported
    error adds the outer estimate to the largest inner estimate scaled by the
    outer width (1 for infinite ranges).
    """
    (x_lo, x_hi), (y_lo, y_hi) = box
    inner_spec = spec.tightened(10)
    inner_errors = [0.0]

    def outer(x: float) -> float:
        inner = quad_1d(lambda y: g(x, y), y_lo, y_hi, inner_spec)
        inner_errors.append(inner.error_estimate)
        return inner.value

    result = quad_1d(outer, x_lo, x_hi, spec)
    width = x_hi - x_lo if math.isfinite(x_hi - x_lo) else 1.0
    return QuadResult(result.value, result.error_estimate + max(inner_errors) * width)

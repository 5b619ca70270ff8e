"""
A module for the radial laws, kernels and windows of the Ginibre and hyperbolic ensembles.

The moduli of both ensembles are independent radii: ρ_n² ~ Gamma(n+1, 1) for
Ginibre and ρ_n² ~ Beta(n+1, α) for the hyperbolic ensemble. Every probability
here is evaluated on the squared radius u = r² and, for the hyperbolic
ensemble, on its complement v = 1 − r², so windows close to the unit circle
keep their relative precision.

Classes:
    Ensemble: Ginibre or hyperbolic with parameter α.
    Window: An interval in one of the radial coordinates.
    RadialGrid: Squared radii (and complements) of a set of window points.
    Truncation: A certified index range for a window.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple
from typing import Optional
from typing import Sequence

import numpy as np
from scipy import special

from radialdpp.lib.error import DataInvalidError
from radialdpp.lib.error import DomainError
from radialdpp.lib.error import TruncationError
from radialdpp.lib.funcs import DEFAULT_QUADRATURE
from radialdpp.lib.funcs import QuadratureSpec
from radialdpp.lib.funcs import quad_1d


logger = logging.getLogger(__name__)

GINIBRE = "ginibre"
HYPERBOLIC = "hyperbolic"
KINDS = (GINIBRE, HYPERBOLIC)

RAW = "raw"
HYPERBOLIC_MODULUS = "hyperbolic"
SCALED = "scaled"
COORDINATES = (RAW, HYPERBOLIC_MODULUS, SCALED)

# hyperbolic windows reaching r ≥ 1 − 1e-15 hold infinitely many points in expectation
MIN_COMPLEMENT = 2e-15
MAX_INDEX = 10**9
# hyperbolic pieces narrower than this share of their outer complement are integrated in v
NARROW_PIECE = 1e-3
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
NARROW_BLOCK = 1 << 16


@dataclass(frozen=True)
class Ensemble:
    """
    Ginibre or hyperbolic with parameter α.

    Attributes:
        kind (str): "ginibre" or "hyperbolic".
        alpha (float): α > 0, required iff hyperbolic.
    """

    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataInvalidError(f"Unknown ensemble kind {self.kind!r}, expected one of {KINDS}.")
        if self.kind == HYPERBOLIC:
            if self.alpha is None or not self.alpha > 0 or not math.isfinite(self.alpha):
                raise DataInvalidError(f"The hyperbolic ensemble needs a finite alpha > 0, got {self.alpha}.")
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise DataInvalidError("The Ginibre ensemble takes no alpha.")

    @classmethod
    def ginibre(cls) -> "Ensemble":
        return cls(GINIBRE)

    @classmethod
    def hyperbolic(cls, alpha: float) -> "Ensemble":
        return cls(HYPERBOLIC, alpha)

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == HYPERBOLIC

    @classmethod
    def from_dict(cls, data: dict) -> "Ensemble":
        if not isinstance(data, dict) or "kind" not in data:
            raise DataInvalidError('An ensemble is {"kind": "ginibre"} or {"kind": "hyperbolic", "alpha": ...}.')
        unknown = set(data) - {"kind", "alpha"}
        if unknown:
            raise DataInvalidError(f"Unknown ensemble fields: {sorted(unknown)}")
        return cls(data["kind"], data.get("alpha"))

    def to_dict(self) -> dict:
        if self.is_hyperbolic:
            return {"kind": self.kind, "alpha": self.alpha}
        return {"kind": self.kind}

    def __str__(self) -> str:
        return f"hyperbolic(alpha={self.alpha:g})" if self.is_hyperbolic else "ginibre"


@dataclass(frozen=True)
class Window:
    """
    An interval [lo, hi] in one of the radial coordinates.

    Coordinates are "raw" (the modulus r), "hyperbolic" (s = |z|_h, hyperbolic
    ensemble only) and "scaled" (x = a_R(c − R) where c is r for Ginibre and s for
    the hyperbolic ensemble).

    Attributes:
        lo (float): Lower end.
        hi (float): Upper end, > lo.
        coordinate (str): One of "raw", "hyperbolic", "scaled".
        R (float): Centre of a scaled window.
        a_R (float): Scale of a scaled window, > 0.
    """

    lo: float
    hi: float
    coordinate: str = RAW
    R: Optional[float] = None
    a_R: Optional[float] = None

    def __post_init__(self):
        if self.coordinate not in COORDINATES:
            raise DataInvalidError(f"Unknown coordinate {self.coordinate!r}, expected one of {COORDINATES}.")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise DataInvalidError(f"A window needs finite lo < hi, got [{self.lo}, {self.hi}].")
        if self.coordinate == SCALED:
            if self.R is None or self.a_R is None or not self.a_R > 0 or not math.isfinite(self.a_R):
                raise DataInvalidError("A scaled window needs R and a finite a_R > 0.")
        elif self.R is not None or self.a_R is not None:
            raise DataInvalidError(f"A {self.coordinate} window takes no R or a_R.")

    @classmethod
    def scaled(cls, lo: float, hi: float, R: float, a_R: float) -> "Window":
        return cls(lo, hi, SCALED, float(R), float(a_R))

    @classmethod
    def from_dict(cls, data: dict) -> "Window":
        try:
            return cls(
                float(data["lo"]),
                float(data["hi"]),
                data.get("coordinate", RAW),
                data.get("R"),
                data.get("a_R"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataInvalidError(f"Invalid window payload {data!r}: {e}") from e

    def to_dict(self) -> dict:
        data = {"lo": self.lo, "hi": self.hi, "coordinate": self.coordinate}
        if self.coordinate == SCALED:
            data.update(R=self.R, a_R=self.a_R)
        return data

    def with_bounds(self, lo: float, hi: float) -> "Window":
        return Window(lo, hi, self.coordinate, self.R, self.a_R)


### Moduli and coefficients ###


def hyperbolic_modulus(r):
    """|z|_h = log((1+r)/(1−r)) for 0 ≤ r < 1."""

    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(arr >= 1):
        raise DomainError(f"hyperbolic_modulus requires 0 <= r < 1, got {r}")
    values = np.log1p(arr) - np.log1p(-arr)
    return float(values) if values.ndim == 0 else values


def inverse_hyperbolic_modulus(s):
    """r = (e^s − 1)/(e^s + 1) = tanh(s/2) for s ≥ 0."""

    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise DomainError(f"inverse_hyperbolic_modulus requires s >= 0, got {s}")
    values = np.tanh(arr / 2)
    return float(values) if values.ndim == 0 else values


def k_coeff(alpha: float, n):
    """k_n = Γ(α+n+1)/(Γ(α)Γ(n+1)), the normalization of ρ_n^(α)."""

    if not alpha > 0:
        raise DomainError(f"k_coeff requires alpha > 0, got {alpha}")
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 0) or np.any(arr != np.floor(arr)):
        raise DomainError(f"k_coeff requires integer n >= 0, got {n}")
    # poch(n+1, α) = Γ(n+1+α)/Γ(n+1) keeps full precision for large n
    values = np.exp(np.log(special.poch(arr + 1, alpha)) - special.gammaln(alpha))
    return float(values) if values.ndim == 0 else values


### Radial laws ###


def _check_index(n):
    arr = np.asarray(n)
    if np.any(arr < 0):
        raise DomainError(f"Particle index must be >= 0, got {n}")
    return arr.astype(float)


def _check_radius(e: Ensemble, r) -> tuple[np.ndarray, Optional[np.ndarray]]:
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise DomainError(f"Radius must be >= 0, got {r}")
    if e.is_hyperbolic:
        if np.any(arr > 1):
            raise DomainError(f"Hyperbolic radii lie in [0, 1], got {r}")
        return arr * arr, (1 - arr) * (1 + arr)
    return arr * arr, None


def cdf_squared(e: Ensemble, n, u, v=None):
    """P(ρ_n² ≤ u), broadcasting over n and u."""

    if e.is_hyperbolic:
        return special.betainc(n + 1.0, e.alpha, u)
    return special.gammainc(n + 1.0, u)


def sf_squared(e: Ensemble, n, u, v=None):
    """P(ρ_n² > u); the hyperbolic case reads the complement v = 1 − u."""

    if e.is_hyperbolic:
        v = 1.0 - u if v is None else v
        return special.betainc(e.alpha, n + 1.0, v)
    return special.gammaincc(n + 1.0, u)


def radial_cdf(e: Ensemble, n, r):
    """P(ρ_n ≤ r)."""

    n_arr = _check_index(n)
    u, v = _check_radius(e, r)
    values = cdf_squared(e, n_arr, u, v)
    return float(values) if np.ndim(values) == 0 else values


def radial_sf(e: Ensemble, n, r):
    """P(ρ_n > r), accurate when it is small."""

    n_arr = _check_index(n)
    u, v = _check_radius(e, r)
    values = sf_squared(e, n_arr, u, v)
    return float(values) if np.ndim(values) == 0 else values


def radial_pdf(e: Ensemble, n, r):
    """Density of ρ_n at r."""

    n_arr = _check_index(n)
    u, v = _check_radius(e, r)
    r_arr = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        if e.is_hyperbolic:
            log_density = (
                np.log(2 * k_coeff(e.alpha, n_arr))
                + special.xlogy(2 * n_arr + 1, r_arr)
                + special.xlogy(e.alpha - 1, v)
            )
        else:
            log_density = np.log(2.0) + special.xlogy(2 * n_arr + 1, r_arr) - u - special.gammaln(n_arr + 1)
    values = np.exp(log_density)
    return float(values) if np.ndim(values) == 0 else values


def sample_squared_radii(e: Ensemble, n, rng: np.random.Generator) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Draw ρ_n² for every index in `n`.

    Gamma variates come from numpy's Marsaglia–Tsang sampler; the hyperbolic
    Beta(n+1, α) is G₁/(G₁+G₂) and its complement G₂/(G₁+G₂) is returned as well.
    """
    shape = np.asarray(n, dtype=float) + 1.0
    g1 = rng.standard_gamma(shape)
    if not e.is_hyperbolic:
        return g1, None
    g2 = rng.standard_gamma(np.full_like(shape, e.alpha))
    total = g1 + g2
    return g1 / total, g2 / total


def sample_radius(e: Ensemble, n, rng: np.random.Generator):
    """Draw ρ_n: √Gamma(n+1, 1) or √Beta(n+1, α)."""

    u, _ = sample_squared_radii(e, _check_index(n), rng)
    values = np.sqrt(u)
    return float(values) if np.ndim(values) == 0 else values


### Kernels and intensities ###


def kernel_eval(e: Ensemble, z: complex, w: complex) -> complex:
    """
    The correlation kernel K(z, w) with respect to Lebesgue measure.

    Ginibre: (1/π) exp(z w̄ − |z|²/2 − |w|²/2). Hyperbolic:
    (α/π) (1−|z|²)^{(α−1)/2} (1−|w|²)^{(α−1)/2} / (1 − z w̄)^{α+1}.
    """
    z, w = complex(z), complex(w)
    if not e.is_hyperbolic:
        return cmath.exp(z * w.conjugate() - abs(z) ** 2 / 2 - abs(w) ** 2 / 2) / math.pi
    if abs(z) >= 1 or abs(w) >= 1:
        raise DomainError(f"The hyperbolic kernel lives on the unit disc, got z={z}, w={w}")
    weight = ((1 - abs(z) ** 2) * (1 - abs(w) ** 2)) ** ((e.alpha - 1) / 2)
    return e.alpha / math.pi * weight / (1 - z * w.conjugate()) ** (e.alpha + 1)


def count_closed_form(e: Ensemble, r: float) -> float:
    """Expected number of points in the disc of radius r: r² or αr²/(1−r²)."""

    u, v = _check_radius(e, r)
    if e.is_hyperbolic:
        if float(v) == 0:
            raise DomainError("The unit disc holds infinitely many points in expectation.")
        return float(e.alpha * u / v)
    return float(u)


def intensity_count(e: Ensemble, r: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """∫_{|z|<r} K(z, z) dm(z) by quadrature over the radius."""

    if r <= 0:
        return 0.0
    result = quad_1d(lambda s: 2 * math.pi * s * kernel_eval(e, s, s).real, 0.0, r, spec)
    return result.value


### Windows and truncation ###


@dataclass(frozen=True)
class RadialGrid:
    """
    Squared radii of window points.

    Attributes:
        u (np.ndarray): r² at each point, nondecreasing.
        v (np.ndarray): 1 − r² for the hyperbolic ensemble, `None` otherwise.
    """

    u: np.ndarray
    v: Optional[np.ndarray]

    @property
    def empty(self) -> bool:
        return not self.u[-1] > self.u[0]


def base_coordinate(window: Window, points) -> np.ndarray:
    """Map window coordinates to r (Ginibre, raw) or s (hyperbolic modulus)."""

    arr = np.asarray(points, dtype=float)
    if window.coordinate == SCALED:
        return window.R + arr / window.a_R
    return arr


def window_grid(e: Ensemble, window: Window, points: Sequence[float]) -> RadialGrid:
    """
    Squared radii of `points` given in the window's coordinate.

    Points left of the origin are clipped to r = 0; hyperbolic raw points at or
    beyond r = 1 are clipped to the circle.

    Raises:
        DomainError: For a hyperbolic-modulus window on the Ginibre ensemble, or a
            hyperbolic window reaching r ≥ 1 − 1e-15 from inside the disc.
    """
    base = base_coordinate(window, points)
    if not e.is_hyperbolic:
        if window.coordinate == HYPERBOLIC_MODULUS:
            raise DomainError("Hyperbolic-modulus windows need the hyperbolic ensemble.")
        r = np.maximum(base, 0.0)
        return RadialGrid(r * r, None)
    if window.coordinate == RAW:
        r = np.clip(base, 0.0, 1.0)
        u, v = r * r, (1 - r) * (1 + r)
    else:
        s = np.maximum(base, 0.0)
        decay = np.exp(-s)
        u = ((1 - decay) / (1 + decay)) ** 2
        v = 4 * decay / (1 + decay) ** 2
    if v[0] > 0 and v[-1] < MIN_COMPLEMENT:
        raise DomainError("Hyperbolic windows must stay below r = 1 - 1e-15.")
    return RadialGrid(u, v)


def to_coordinate(e: Ensemble, window: Window, u: np.ndarray, v: Optional[np.ndarray]) -> np.ndarray:
    """Inverse of `window_grid` for sampled squared radii."""

    r = np.sqrt(u)
    if window.coordinate == RAW:
        return r
    if e.is_hyperbolic:
        with np.errstate(divide="ignore"):
            base = 2 * np.log1p(r) - np.log(v)
    else:
        base = r
    if window.coordinate == SCALED:
        return window.a_R * (base - window.R)
    return base


def _window_bounds(e: Ensemble, grid: RadialGrid) -> tuple:
    v_lo = None if grid.v is None else grid.v[0]
    v_hi = None if grid.v is None else grid.v[-1]
    return grid.u[0], grid.u[-1], v_lo, v_hi


def window_probabilities(e: Ensemble, n: np.ndarray, grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """
    Per-index probabilities of each piece of a partitioned window.

    Each difference is taken on the CDF side while the CDF is at most ½ and on
    the survival side beyond, so neither tail loses precision.

    Args:
        e: The ensemble.
        n: Particle indices, shape (N,).
        grid: Squared radii of the m+1 partition points.

    Returns:
        tuple: P with shape (N, m), P[i, j] = P(ρ_{n_i} in piece j), and the
        probability of landing outside the window, shape (N,).
    """
    n_col = np.asarray(n, dtype=float)[:, None]
    u_row = grid.u[None, :]
    v_row = None if grid.v is None else grid.v[None, :]
    cdf = np.broadcast_to(cdf_squared(e, n_col, u_row), (n_col.shape[0], grid.u.size)).copy()
    sf = 1.0 - cdf
    upper = cdf > 0.5
    if np.any(upper):
        n_full = np.broadcast_to(n_col, cdf.shape)
        u_full = np.broadcast_to(u_row, cdf.shape)
        v_full = None if v_row is None else np.broadcast_to(v_row, cdf.shape)[upper]
        sf[upper] = sf_squared(e, n_full[upper], u_full[upper], v_full)
    low_side = cdf[:, 1:] <= 0.5
    pieces = np.where(low_side, cdf[:, 1:] - cdf[:, :-1], sf[:, :-1] - sf[:, 1:])
    if grid.v is not None:
        narrow = (grid.v[1:] > 0) & (grid.v[:-1] - grid.v[1:] < NARROW_PIECE * grid.v[:-1])
        if np.any(narrow):
            pieces[:, narrow] = _narrow_pieces(e, n_col, grid.v[:-1][narrow], grid.v[1:][narrow])
    np.maximum(pieces, 0.0, out=pieces)
    outside = cdf[:, 0] + sf[:, -1]
    return pieces, outside


def _narrow_pieces(e: Ensemble, n_col: np.ndarray, v_outer: np.ndarray, v_inner: np.ndarray) -> np.ndarray:
    """
    Beta(n+1, α) masses of thin pieces, integrating the density of v = 1 − u
    over [v_inner, v_outer] by Gauss–Legendre. A CDF difference in u would
    cancel almost every digit there.
    """
    half = (v_outer - v_inner) / 2
    nodes = ((v_outer + v_inner) / 2)[:, None] + half[:, None] * GAUSS_NODES
    log_complement, log_nodes = np.log1p(-nodes), (e.alpha - 1) * np.log(nodes)
    pieces = np.empty((n_col.shape[0], half.size))
    for start in range(0, n_col.shape[0], NARROW_BLOCK):
        n = n_col[start : start + NARROW_BLOCK, :, None]
        log_density = n * log_complement + log_nodes - special.betaln(n + 1.0, e.alpha)
        pieces[start : start + NARROW_BLOCK] = np.exp(log_density) @ GAUSS_WEIGHTS * half
    return pieces


class Truncation(NamedTuple):
    n_min: int
    n_max: int
    mass_bound: float

    @property
    def empty(self) -> bool:
        return self.n_max < self.n_min

    @property
    def size(self) -> int:
        return max(0, self.n_max - self.n_min + 1)


def _initial_extent(e: Ensemble, u_hi: float, v_hi: Optional[float]) -> int:
    if e.is_hyperbolic:
        extent = (e.alpha + 40.0) / max(v_hi, MIN_COMPLEMENT)
    else:
        extent = u_hi + 12.0 * math.sqrt(u_hi) + 40.0
    return int(min(max(extent, 64.0), 2.0**24))


def _tail_ratio(e: Ensemble, u_hi: float, count: int) -> float:
    # F_{k+1}(u)/F_k(u) ≤ q for all k ≥ count − 1
    if e.is_hyperbolic:
        return u_hi * (count + e.alpha) / count
    return u_hi / count


def truncation_range(e: Ensemble, window: Window, eps: float) -> Truncation:
    """
    The index range holding all but `eps` of a window's expected points.

    Window probabilities are computed for n < N with N doubling until the
    geometric bound on Σ_{k≥N} P(ρ_k ≤ r_hi) drops below eps/2; the rest of the
    budget trims the computed range from both ends.

    Args:
        e: The ensemble.
        window: The window.
        eps: Budget for the expected number of missed points, > 0.

    Returns:
        Truncation: (n_min, n_max, mass_bound), or (0, −1, mass) when the whole
        window carries at most `eps` points in expectation.

    Raises:
        DomainError: If eps ≤ 0 or the window is invalid for the ensemble.
        TruncationError: If the tail bound is not reached for n ≤ 10⁹.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    grid = window_grid(e, window, [window.lo, window.hi])
    if grid.empty:
        return Truncation(0, -1, 0.0)
    probabilities, tail = _window_mass_by_index(e, grid, eps)
    return _trim(probabilities, tail, eps)


def _window_mass_by_index(e: Ensemble, grid: RadialGrid, eps: float) -> tuple[np.ndarray, float]:
    u_lo, u_hi, v_lo, v_hi = _window_bounds(e, grid)
    count = _initial_extent(e, u_hi, v_hi)
    blocks = []
    start = 0
    while True:
        n = np.arange(start, count, dtype=float)
        pieces, _ = window_probabilities(e, n, grid)
        blocks.append(pieces[:, 0] if pieces.shape[1] == 1 else pieces.sum(axis=1))
        last_cdf = float(cdf_squared(e, float(count - 1), u_hi))
        ratio = _tail_ratio(e, u_hi, count)
        if ratio < 1:
            tail = last_cdf * ratio / (1 - ratio)
            if tail <= eps / 2:
                break
        if count > MAX_INDEX:
            raise TruncationError(f"Tail bound not reached below n = {MAX_INDEX}; the window is ill-posed.")
        start, count = count, 2 * count
    logger.debug("Window mass computed over n < %d (tail bound %.3g)", count, tail)
    return np.concatenate(blocks), tail


def _trim(probabilities: np.ndarray, tail: float, eps: float) -> Truncation:
    total = math.fsum(probabilities) + tail
    if total <= eps:
        return Truncation(0, -1, total)
    budget = eps - tail
    from_bottom = np.cumsum(probabilities)
    n_min = int(np.searchsorted(from_bottom, budget / 2, side="right"))
    lower = float(from_bottom[n_min - 1]) if n_min > 0 else 0.0
    from_top = np.cumsum(probabilities[::-1])
    dropped = int(np.searchsorted(from_top, budget - lower, side="right"))
    upper = float(from_top[dropped - 1]) if dropped > 0 else 0.0
    n_max = probabilities.size - 1 - dropped
    return Truncation(n_min, n_max, lower + upper + tail)


def expected_count(e: Ensemble, r: float, eps: float = 1e-12) -> float:
    """
    Σ_n P(ρ_n ≤ r), summed until the certified geometric tail is below eps.

    Equals the expected number of points within radius r.
    """
    u, v = _check_radius(e, r)
    u = float(u)
    if u == 0:
        return 0.0
    if e.is_hyperbolic and float(v) < MIN_COMPLEMENT:
        raise DomainError("The unit disc holds infinitely many points in expectation.")
    count = _initial_extent(e, u, None if v is None else float(v))
    terms = []
    start = 0
    while True:
        terms.append(cdf_squared(e, np.arange(start, count, dtype=float), u))
        ratio = _tail_ratio(e, u, count)
        if ratio < 1 and terms[-1][-1] * ratio / (1 - ratio) <= eps:
            return math.fsum(np.concatenate(terms))
        if count > MAX_INDEX:
            raise TruncationError(f"Counting sum did not converge below n = {MAX_INDEX}.")
        start, count = count, 2 * count

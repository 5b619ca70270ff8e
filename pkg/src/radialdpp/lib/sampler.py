"""
A module for window-restricted sampling of radial configurations.

A window partitioned by breakpoints is turned once into a `WindowTable` holding,
for every index of its certified truncation range, the probability that ρ_n lands
in each piece. Replicates then draw only the indices that hit the window: indices
with window probability above ½ use one uniform each, the others are drawn through
a Poisson embedding (index n is hit iff a Poisson(−log(1−p_n)) variable is
positive), so a replicate costs time proportional to the number of hits.

Classes:
    WindowTable: Per-index piece probabilities of a partitioned window.
    RadialSample: The sampled coordinates of one replicate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from dataclasses import field
from functools import lru_cache
from typing import Optional
from typing import Sequence

import numpy as np
from scipy import special

from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.ensembles import RadialGrid
from radialdpp.lib.ensembles import Truncation
from radialdpp.lib.ensembles import Window
from radialdpp.lib.ensembles import cdf_squared
from radialdpp.lib.ensembles import sample_squared_radii
from radialdpp.lib.ensembles import sf_squared
from radialdpp.lib.ensembles import to_coordinate
from radialdpp.lib.ensembles import truncation_range
from radialdpp.lib.ensembles import window_grid
from radialdpp.lib.ensembles import window_probabilities
from radialdpp.lib.error import DataInvalidError
from radialdpp.lib.rng import replicate_generator


logger = logging.getLogger(__name__)

# index ranges up to this size draw every radius directly
DIRECT_LIMIT = 4096


@dataclass(frozen=True)
class RadialSample:
    """
    The sampled coordinates of one replicate.

    Attributes:
        n_min (int): First index of the truncation range.
        n_max (int): Last index of the truncation range (n_max < n_min if empty).
        indices (np.ndarray): Indices of the particles that landed in the window.
        values (np.ndarray): Their coordinates, in the window's coordinate.
        seed (int): Master seed.
        replicate_id (int): Replicate number.
        truncation_mass (float): Certified bound on the expected missed points.
    """

    n_min: int
    n_max: int
    indices: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    seed: int
    replicate_id: int
    truncation_mass: float

    @property
    def count(self) -> int:
        return int(self.values.size)

    def rows(self) -> list[tuple[int, int, float]]:
        """(replicate_id, n, value) rows in index order."""

        return [(self.replicate_id, int(n), float(x)) for n, x in zip(self.indices, self.values)]

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "indices": [int(n) for n in self.indices],
            "values": [float(x) for x in self.values],
            "seed": self.seed,
            "replicate_id": self.replicate_id,
            "truncation_mass": self.truncation_mass,
        }


class WindowTable:
    """
    Per-index piece probabilities of a window partitioned by breakpoints.

    Attributes:
        ensemble (Ensemble): The ensemble.
        window (Window): The window spanning all breakpoints.
        breakpoints (np.ndarray): Partition points in the window's coordinate.
        grid (RadialGrid): Squared radii of the breakpoints.
        truncation (Truncation): The certified index range.
        n (np.ndarray): Indices n_min..n_max.
        pieces (np.ndarray): P(ρ_n in piece j), shape (len(n), m).
        hit (np.ndarray): P(ρ_n in the window), shape (len(n),).
        outside (np.ndarray): P(ρ_n outside the window), accurate when small.
    """

    def __init__(self, ensemble: Ensemble, window: Window, breakpoints: Sequence[float], eps: float):
        breakpoints = np.asarray(breakpoints, dtype=float)
        if breakpoints.ndim != 1 or breakpoints.size < 2 or np.any(np.diff(breakpoints) <= 0):
            raise DataInvalidError("Breakpoints must be a strictly increasing sequence of at least two points.")
        self.ensemble = ensemble
        self.window = window.with_bounds(float(breakpoints[0]), float(breakpoints[-1]))
        self.breakpoints = breakpoints
        self.grid: RadialGrid = window_grid(ensemble, self.window, breakpoints)
        self.truncation: Truncation = truncation_range(ensemble, self.window, eps)
        self.n = np.arange(self.truncation.n_min, self.truncation.n_max + 1, dtype=np.int64)
        if self.n.size:
            self.pieces, self.outside = window_probabilities(ensemble, self.n.astype(float), self.grid)
        else:
            self.pieces, self.outside = np.zeros((0, self.num_pieces)), np.zeros(0)
        self.cumulative = np.cumsum(self.pieces, axis=1)
        self.hit = self.cumulative[:, -1] if self.n.size else np.zeros(0)
        self.dense = np.flatnonzero(self.hit > 0.5)
        self.sparse = np.flatnonzero(self.hit <= 0.5)
        rates = -np.log1p(-self.hit[self.sparse])
        self.sparse_rates = np.cumsum(rates)
        logger.debug(
            "Window table for %s on [%g, %g]: n in [%d, %d], %d dense indices, sparse rate %.4g",
            ensemble,
            breakpoints[0],
            breakpoints[-1],
            self.truncation.n_min,
            self.truncation.n_max,
            self.dense.size,
            self.sparse_rates[-1] if self.sparse_rates.size else 0.0,
        )

    @property
    def num_pieces(self) -> int:
        return self.breakpoints.size - 1

    @property
    def direct(self) -> bool:
        return self.n.size <= DIRECT_LIMIT

    def expected_counts(self) -> np.ndarray:
        """Σ_n P(ρ_n in piece j) over the truncation range."""

        return self.pieces.sum(axis=0)

    ### Drawing ###

    def draw(self, rng: np.random.Generator, with_values: bool = True):
        """
        Draw the particles of one replicate that land in the window.

        Args:
            rng: The replicate's generator.
            with_values: Whether to draw coordinates inside the pieces.

        Returns:
            tuple: Hit indices (ascending), their piece numbers and, with
            `with_values`, their coordinates (else `None`).
        """
        if self.n.size == 0:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, (np.zeros(0) if with_values else None)
        if self.direct:
            return self._draw_direct(rng)
        rows, pieces = self._draw_hits(rng)
        values = self._draw_values(rows, pieces, rng) if with_values else None
        return self.n[rows], pieces, values

    def piece_counts(self, rng: np.random.Generator) -> np.ndarray:
        """Number of particles in each piece for one replicate."""

        _, pieces, _ = self.draw(rng, with_values=False)
        return np.bincount(pieces, minlength=self.num_pieces)

    def _draw_direct(self, rng: np.random.Generator):
        u, v = sample_squared_radii(self.ensemble, self.n, rng)
        if v is None:
            pieces = np.searchsorted(self.grid.u, u, side="right") - 1
        else:
            pieces = np.searchsorted(-self.grid.v, -v, side="right") - 1
        inside = (pieces >= 0) & (pieces < self.num_pieces)
        pieces = pieces[inside]
        values = to_coordinate(self.ensemble, self.window, u[inside], None if v is None else v[inside])
        values = np.clip(values, self.breakpoints[pieces], self.breakpoints[pieces + 1])
        return self.n[inside], pieces, values

    def _draw_hits(self, rng: np.random.Generator):
        dense_draws = rng.random(self.dense.size)
        dense_hit = dense_draws < self.hit[self.dense]
        dense_rows = self.dense[dense_hit]
        dense_pieces = self._piece_of(dense_rows, dense_draws[dense_hit])

        sparse_rows = np.zeros(0, dtype=np.int64)
        if self.sparse_rates.size:
            total = self.sparse_rates[-1]
            arrivals = rng.random(rng.poisson(total)) * total
            positions = np.searchsorted(self.sparse_rates, arrivals, side="right")
            positions = np.minimum(positions, self.sparse.size - 1)
            sparse_rows = self.sparse[np.unique(positions)]
        sparse_pieces = self._piece_of(sparse_rows, rng.random(sparse_rows.size) * self.hit[sparse_rows])

        rows = np.concatenate([dense_rows, sparse_rows])
        pieces = np.concatenate([dense_pieces, sparse_pieces])
        order = np.argsort(rows, kind="stable")
        return rows[order], pieces[order]

    def _piece_of(self, rows: np.ndarray, targets: np.ndarray) -> np.ndarray:
        pieces = (targets[:, None] >= self.cumulative[rows]).sum(axis=1)
        return np.minimum(pieces, self.num_pieces - 1)

    def _draw_values(self, rows: np.ndarray, pieces: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Inverse-CDF draw inside each hit's piece."""

        shape = self.n[rows].astype(float) + 1.0
        e = self.ensemble
        u_lo, u_hi = self.grid.u[pieces], self.grid.u[pieces + 1]
        v_lo = None if self.grid.v is None else self.grid.v[pieces]
        v_hi = None if self.grid.v is None else self.grid.v[pieces + 1]
        cdf_lo, cdf_hi = cdf_squared(e, shape - 1, u_lo), cdf_squared(e, shape - 1, u_hi)
        sf_lo, sf_hi = sf_squared(e, shape - 1, u_lo, v_lo), sf_squared(e, shape - 1, u_hi, v_hi)
        w = rng.random(rows.size)
        low_side = cdf_hi <= 0.5
        cdf_target = cdf_lo + w * (cdf_hi - cdf_lo)
        sf_target = np.where(low_side, 1.0 - cdf_target, sf_lo - w * (sf_lo - sf_hi))
        if e.is_hyperbolic:
            u = np.where(low_side, special.betaincinv(shape, e.alpha, cdf_target), np.nan)
            v_from_sf = special.betaincinv(e.alpha, shape, sf_target)
            near_circle = ~low_side | (u > 0.5)
            v = np.where(near_circle, v_from_sf, 1.0 - u)
            u = np.where(near_circle, 1.0 - v, u)
        else:
            u = np.where(low_side, special.gammaincinv(shape, cdf_target), special.gammainccinv(shape, sf_target))
            v = None
        values = to_coordinate(e, self.window, u, v)
        return np.clip(values, self.breakpoints[pieces], self.breakpoints[pieces + 1])


@lru_cache(maxsize=32)
def window_table(ensemble: Ensemble, window: Window, breakpoints: tuple, eps: float) -> WindowTable:
    """A cached `WindowTable`; each worker process keeps its own cache."""

    return WindowTable(ensemble, window, breakpoints, eps)


def sample_window(
    ensemble: Ensemble,
    window: Window,
    seed: int,
    replicate_id: int,
    eps: float,
    breakpoints: Optional[Sequence[float]] = None,
) -> RadialSample:
    """
    Draw the particles of one replicate that land in a window.

    Args:
        ensemble: The ensemble.
        window: The window.
        seed: Master seed.
        replicate_id: Replicate number; (seed, replicate_id) keys the stream.
        eps: Truncation budget.
        breakpoints: Optional partition of the window, defaults to its ends.

    Returns:
        RadialSample: The coordinates in the window, a pure function of the inputs.

    Raises:
        DomainError: If the window is invalid for the ensemble.
        TruncationError: If the window is ill-posed.
    """
    points = tuple(breakpoints) if breakpoints is not None else (window.lo, window.hi)
    table = window_table(ensemble, window, tuple(float(p) for p in points), float(eps))
    indices, _, values = table.draw(replicate_generator(seed, replicate_id))
    return RadialSample(
        table.truncation.n_min,
        table.truncation.n_max,
        indices,
        values,
        seed,
        replicate_id,
        table.truncation.mass_bound,
    )

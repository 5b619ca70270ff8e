"""
A module for goodness-of-fit tests and tolerance checks.

Every check returns a `GofReport` with a statistic and a threshold such that the
check passes iff statistic ≤ threshold.

Classes:
    GofReport: The outcome of one test.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Optional

import numpy as np
from scipy import optimize
from scipy import stats


logger = logging.getLogger(__name__)

DEFAULT_LEVEL = 0.01
# critical values of A² for a fully specified null
AD_CRITICAL_VALUES = {0.10: 1.933, 0.05: 2.492, 0.025: 3.070, 0.01: 3.857}
MIN_EXPECTED = 5.0


@dataclass
class GofReport:
    """
    The outcome of one test.

    Attributes:
        test (str): Test name.
        statistic (float): Test statistic.
        threshold (float): The test passes iff statistic ≤ threshold.
        passed (bool): Outcome.
        sample_size (int): Observations used.
        notes (str): Remarks on the run.
        p_value (float): p-value where the test has one.
        level (float): Significance level where the test has one.
        details (dict): Extra values, e.g. the compared quantities.
    """

    test: str
    statistic: float
    threshold: float
    passed: bool
    sample_size: int
    notes: str = ""
    p_value: Optional[float] = None
    level: Optional[float] = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = {
            "test": self.test,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
            "sample_size": self.sample_size,
            "notes": self.notes,
        }
        if self.p_value is not None:
            data["p_value"] = self.p_value
        if self.level is not None:
            data["level"] = self.level
        if self.details:
            data["details"] = self.details
        return data


def _report(test, statistic, threshold, sample_size, **kwargs) -> GofReport:
    statistic, threshold = float(statistic), float(threshold)
    report = GofReport(test, statistic, threshold, bool(statistic <= threshold), int(sample_size), **kwargs)
    logger.info("%s: statistic %.6g, threshold %.6g, %s", test, statistic, threshold, "pass" if report.passed else "FAIL")
    return report


### Anderson–Darling ###


def anderson_darling_statistic(sample, cdf=stats.norm) -> float:
    """A² of a sample against a fully specified continuous distribution."""

    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    i = np.arange(1, n + 1)
    terms = (2 * i - 1) * (cdf.logcdf(x) + cdf.logsf(x[::-1]))
    return float(-n - terms.sum() / n)


def ad_limit_cdf(z: float) -> float:
    """P(A² ≤ z) in the large-sample limit (Marsaglia–Marsaglia approximation)."""

    if z <= 0:
        return 0.0
    if z < 2:
        poly = 2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.0116720 - 0.00168691 * z) * z) * z) * z) * z
        return z**-0.5 * math.exp(-1.2337141 / z) * poly
    exponent = 1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z
    return math.exp(-math.exp(exponent))


def ad_critical_value(level: float) -> float:
    if level in AD_CRITICAL_VALUES:
        return AD_CRITICAL_VALUES[level]
    return optimize.brentq(lambda z: 1 - ad_limit_cdf(z) - level, 0.05, 50.0)


def anderson_darling_normal(sample, level: float = DEFAULT_LEVEL) -> GofReport:
    """Anderson–Darling test of a standardized sample against N(0, 1)."""

    statistic = anderson_darling_statistic(sample)
    return _report(
        "anderson_darling",
        statistic,
        ad_critical_value(level),
        len(sample),
        p_value=1 - ad_limit_cdf(statistic),
        level=level,
    )


### Kolmogorov–Smirnov ###


def _ks(test: str, sample, cdf, args: tuple, level: float) -> GofReport:
    result = stats.kstest(np.asarray(sample, dtype=float), cdf, args=args)
    n = len(sample)
    return _report(
        test,
        result.statistic,
        stats.kstwo.ppf(1 - level, n),
        n,
        p_value=float(result.pvalue),
        level=level,
    )


def ks_normal(sample, level: float = DEFAULT_LEVEL) -> GofReport:
    """Kolmogorov–Smirnov test of a standardized sample against N(0, 1)."""

    return _ks("kolmogorov_smirnov", sample, "norm", (), level)


def exponential_ks(spacings, rate: float, level: float = DEFAULT_LEVEL) -> GofReport:
    """Kolmogorov–Smirnov test of spacings against Exp(rate)."""

    return _ks("exponential_spacings_ks", spacings, "expon", (0.0, 1.0 / rate), level)


### Poisson counts ###


def _merge_cells(observed: np.ndarray, expected: np.ndarray) -> tuple[list, list]:
    cells_obs, cells_exp = [], []
    acc_obs = acc_exp = 0.0
    for o, e in zip(observed, expected):
        acc_obs += o
        acc_exp += e
        if acc_exp >= MIN_EXPECTED:
            cells_obs.append(acc_obs)
            cells_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if acc_exp > 0 or acc_obs > 0:
        if cells_exp:
            cells_obs[-1] += acc_obs
            cells_exp[-1] += acc_exp
        else:
            cells_obs.append(acc_obs)
            cells_exp.append(acc_exp)
    return cells_obs, cells_exp


def poisson_chisquare(counts, mean: float, level: float = DEFAULT_LEVEL) -> GofReport:
    """
    Chi-square test of counts against Poisson(mean), tail cells merged until
    each expects at least five observations.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    k_max = max(int(counts.max()) if n else 0, int(stats.poisson.ppf(1 - 1e-12, mean)))
    observed = np.bincount(counts, minlength=k_max + 1).astype(float)
    expected = n * stats.poisson.pmf(np.arange(k_max + 1), mean)
    expected[-1] += n * stats.poisson.sf(k_max, mean)
    cells_obs, cells_exp = _merge_cells(observed, expected)
    if len(cells_obs) < 2:
        return GofReport(
            "poisson_chisquare",
            0.0,
            0.0,
            True,
            n,
            notes="single cell after merging; no degrees of freedom",
            p_value=1.0,
            level=level,
        )
    result = stats.chisquare(cells_obs, cells_exp)
    return _report(
        "poisson_chisquare",
        result.statistic,
        stats.chi2.ppf(1 - level, len(cells_obs) - 1),
        n,
        notes=f"{len(cells_obs)} cells",
        p_value=float(result.pvalue),
        level=level,
    )


### Tolerance checks ###


def tolerance_check(test: str, value: float, target: float, tolerance: float, sample_size: int, notes: str = "") -> GofReport:
    """Pass iff |value − target| ≤ tolerance."""

    return _report(
        test,
        abs(value - target),
        tolerance,
        sample_size,
        notes=notes,
        details={"value": float(value), "target": float(target)},
    )


def standard_error(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.inf

"""Statistics and report records used by the verification checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sp_stats
from scipy.spatial.distance import cdist, pdist


def ks_statistic(sample, cdf) -> float:
    """Exact one-sample Kolmogorov-Smirnov statistic against a CDF callable.

    No binning: sup |F_emp - F| over the sorted sample, both sides of each
    jump of the empirical CDF. Infinite sample points are allowed and sit
    at F = 1.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("empty sample")
    f = np.where(np.isinf(x), 1.0, np.asarray(cdf(np.where(np.isinf(x), 0.0, x)), dtype=float))
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample KS statistic and p-value."""
    res = sp_stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def energy_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Energy distance between two samples of vectors (rows).

    2 E|X-Y| - E|X-X'| - E|Y-Y'| with the within-sample means taken over
    all ordered pairs (the V-statistic), which is the energy distance of
    the two empirical measures: nonnegative, zero iff they coincide.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    exy = cdist(x, y).mean()
    exx = 2.0 * pdist(x).sum() / x.shape[0] ** 2
    eyy = 2.0 * pdist(y).sum() / y.shape[0] ** 2
    return float(2.0 * exy - exx - eyy)


def order_statistic_cdf(marginal_cdf, k: int, j: int):
    """CDF of the (k-1)-th order statistic of j i.i.d. draws from a law with
    the given marginal CDF: Beta-incomplete of the marginal."""
    if not 2 <= k <= j:
        raise ValueError("need 2 <= k <= j")

    def cdf(x):
        f = np.asarray(marginal_cdf(x), dtype=float)
        return sp_stats.beta.cdf(f, k - 1, j - k + 2)

    return cdf


def max_cdf(marginal_cdf, j: int):
    """CDF of the maximum of j i.i.d. draws."""

    def cdf(x):
        return np.asarray(marginal_cdf(x), dtype=float) ** j

    return cdf


@dataclass(frozen=True)
class EmpiricalSample:
    """A pooled Monte Carlo sample with enough metadata to reproduce it."""

    values: np.ndarray
    n: int
    family: str
    seed: int
    replicas: int
    label: str = ""


@dataclass
class TestReport:
    """One verification result row.

    value is the realized statistic; passed must agree with
    value <= threshold whenever a threshold is set.
    """

    __test__ = False  # a report record, not a pytest class

    name: str
    statistic: str
    value: float
    threshold: float | None
    family: str
    n: int
    replicas: int
    seed: int
    reference: str = ""
    sample_size: int = 0
    passed: bool | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("statistic values are nonnegative")
        if self.threshold is not None:
            ok = self.value <= self.threshold
            if self.passed is None:
                self.passed = ok
            elif self.passed != ok:
                raise ValueError("pass flag inconsistent with threshold")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
            "family": self.family,
            "n": self.n,
            "replicas": self.replicas,
            "seed": self.seed,
            "reference": self.reference,
            "sample_size": self.sample_size,
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and (obj != obj):
        return None
    return obj

import numpy as np
import pytest

from cuttree.rng import stream
from cuttree.stats import (
    TestReport,
    energy_distance,
    ks_statistic,
    max_cdf,
    order_statistic_cdf,
)


def test_ks_exact_small():
    # sample {0.25, 0.75} vs U[0,1]: sup gap is 0.25 at both points
    assert ks_statistic([0.25, 0.75], lambda x: np.asarray(x)) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        ks_statistic([], lambda x: x)


def test_ks_self_consistency():
    # a sample tested against its own generating CDF passes at the 1% level
    rng = stream(3001)
    x = rng.random(20_000)
    d = ks_statistic(x, lambda v: np.asarray(v))
    assert d < 1.63 / np.sqrt(20_000)  # asymptotic 1% critical value


def test_ks_detects_wrong_law():
    rng = stream(3002)
    x = rng.random(20_000) ** 2
    assert ks_statistic(x, lambda v: np.asarray(v)) > 0.1


def test_ks_handles_inf():
    d = ks_statistic([0.5, np.inf], lambda x: np.asarray(x))
    assert 0 <= d <= 1


def test_energy_distance_properties():
    rng = stream(3003)
    x = rng.normal(size=(400, 3))
    y = rng.normal(size=(400, 3))
    z = rng.normal(loc=2.0, size=(400, 3))
    same = energy_distance(x, y)
    diff = energy_distance(x, z)
    assert same >= 0
    assert diff > 10 * max(same, 1e-12)


def test_order_statistic_and_max_cdfs():
    uniform = lambda x: np.clip(np.asarray(x, dtype=float), 0, 1)
    f = max_cdf(uniform, 3)
    assert f(1.0) == pytest.approx(1.0)
    assert f(0.5) == pytest.approx(0.125)
    g = order_statistic_cdf(uniform, 2, 3)  # first order statistic of 3
    # P(min of 3 <= x)... (k-1)=1st order stat: 1-(1-x)^3
    assert g(0.5) == pytest.approx(1 - 0.5**3)
    with pytest.raises(ValueError):
        order_statistic_cdf(uniform, 1, 3)


def test_report_pass_flag_consistency():
    r = TestReport(name="x", statistic="KS", value=0.1, threshold=0.2,
                   family="urt", n=10, replicas=1, seed=0)
    assert r.passed is True
    r2 = TestReport(name="x", statistic="KS", value=0.3, threshold=0.2,
                    family="urt", n=10, replicas=1, seed=0)
    assert r2.passed is False
    with pytest.raises(ValueError):
        TestReport(name="x", statistic="KS", value=0.3, threshold=0.2,
                   family="urt", n=10, replicas=1, seed=0, passed=True)
    with pytest.raises(ValueError):
        TestReport(name="x", statistic="KS", value=-0.1, threshold=None,
                   family="urt", n=10, replicas=1, seed=0)
    d = r.to_dict()
    assert d["passed"] is True and d["value"] == 0.1

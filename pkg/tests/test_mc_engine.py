import json
import math

import numpy as np
import pytest

from doobsim.core_paths import DomainError, Path, TimeGrid
from doobsim.mc_engine import (
    BatchConfig,
    VerificationReport,
    binned_drift_sums,
    drift_regression_test,
    estimate_survival,
    independence_test,
    ks_repeated,
    ks_test,
    martingale_residual_test,
    martingale_test_from_values,
    mean_equality_test,
    pseudo_stopping_test,
    quadratic_variation_test,
    qv_test_from_values,
    resolve_workers,
    run_blocks,
)

RNG = np.random.default_rng(2024)


def test_estimate_survival_constant_sampler():
    assert estimate_survival(lambda n: np.full(n, 5.0), 3.0, n=1000) == (1.0, 0.0)
    with pytest.raises(DomainError):
        estimate_survival(np.ones(50), 0.5)


def test_ks_self_test_and_power():
    u = RNG.random(5000)
    d, ok = ks_test(u, "uniform01")
    assert ok and d < 1.358 / math.sqrt(5000)
    _, ok = ks_test(u ** 0.8, "uniform01")
    assert not ok
    _, ok = ks_test(RNG.exponential(0.5, 5000), ("exponential", 2.0))
    assert ok
    _, ok = ks_test(1.0 / RNG.random(5000), "reciprocal_uniform")
    assert ok
    with pytest.raises(DomainError):
        ks_test(u[:999], "uniform01")
    with pytest.raises(DomainError):
        ks_test(u, "normal")


def test_ks_repeated_two_of_three():
    sets = [RNG.random(2000) for _ in range(3)]
    _, _, ok, ds = ks_repeated(sets, "uniform01")
    assert ok and len(ds) == 3
    bad = [RNG.random(2000) ** 0.7 for _ in range(2)] + [RNG.random(2000)]
    assert not ks_repeated(bad, "uniform01")[2]


def test_martingale_test_detects_planted_drift():
    x = RNG.standard_normal((4000, 3))
    assert martingale_test_from_values(x)[1]
    assert not martingale_test_from_values(x + 0.2)[1]
    stat, ok, per = martingale_test_from_values(x[:, 0])
    assert len(per) == 1


def test_martingale_residual_test_on_paths():
    grid = TimeGrid.from_horizon(1.0, 0.01)
    paths = [Path(grid, np.concatenate([[0.0], np.cumsum(0.1 * RNG.standard_normal(100))]))
             for _ in range(500)]
    stat, ok = martingale_residual_test(paths, [0.5, 1.0])
    assert ok
    drifted = [p.with_values(p.values + grid.times) for p in paths]
    assert not martingale_residual_test(drifted, [0.5, 1.0])[1]


def test_quadratic_variation_detects_wrong_scale():
    grid = TimeGrid.from_horizon(1.0, 0.01)
    bm = [Path(grid, np.concatenate([[0.0], np.cumsum(0.1 * RNG.standard_normal(100))]))
          for _ in range(300)]
    assert quadratic_variation_test(bm, [0.5, 1.0])[1]
    fast = [p.with_values(1.2 * p.values) for p in bm]
    assert not quadratic_variation_test(fast, [0.5, 1.0])[1]
    assert qv_test_from_values([1.0, 1.0], [1.0, 1.0]) == (0.0, True)


def test_independence_test():
    u = RNG.standard_normal(5000)
    assert independence_test(u, RNG.standard_normal(5000))[2]
    assert not independence_test(u, u + RNG.standard_normal(5000))[2]
    assert independence_test(u, np.ones(5000))[2]
    with pytest.raises(DomainError):
        independence_test(u, u[:10])


def test_mean_equality_and_pseudo_stopping():
    a, b = RNG.standard_normal(4000), RNG.standard_normal(4000)
    assert mean_equality_test(a, b)[1]
    assert not mean_equality_test(a, b + 0.3)[1]
    assert pseudo_stopping_test(1.0 + RNG.standard_normal(4000))[1]
    assert not pseudo_stopping_test(1.2 + RNG.standard_normal(4000))[1]


def test_drift_regression_recovers_known_drift():
    dt = 1e-3
    edges = np.linspace(-1, 1, 5)
    x = np.empty(200001)
    x[0] = 0.0
    xi = RNG.standard_normal(200000)
    for i in range(200000):  # Ornstein-Uhlenbeck, drift -x
        x[i + 1] = x[i] - x[i] * dt + math.sqrt(dt) * xi[i]
    acc = binned_drift_sums([x], dt, edges, lambda s: -s, lambda s: np.ones_like(s))
    assert drift_regression_test(acc, edges, min_count=100)[1]
    wrong = binned_drift_sums([x], dt, edges, lambda s: -3 * s)
    assert not drift_regression_test(wrong, edges, min_count=100)[1]
    with pytest.raises(DomainError):
        drift_regression_test(acc, edges, min_count=10 ** 9)


def _block(master, a, b, scale):
    return np.arange(a, b) * scale + master


def test_run_blocks_order_and_workers():
    one = np.concatenate(run_blocks(_block, 2500, 7, 1, args=(2,), block=1000))
    two = np.concatenate(run_blocks(_block, 2500, 7, 2, args=(2,), block=1000))
    np.testing.assert_array_equal(one, two)
    np.testing.assert_array_equal(one, np.arange(2500) * 2 + 7)
    assert resolve_workers(0) >= 1 and resolve_workers(3) == 3


def test_report_serialisation():
    r = VerificationReport("x", 10, float("nan"), 1.0, True, 0.1, 3, 5, {"a": np.float64(1.5)})
    d = json.loads(r.to_json())
    assert d["pass"] is True and d["status"] == "INVALID" and d["statistic"] is None
    assert d["details"]["a"] == 1.5
    assert VerificationReport("x", 10, 0.5, 1.0, False).status == "FAIL"


def test_batch_config_validation():
    with pytest.raises(DomainError):
        BatchConfig(0, 1, TimeGrid(0.0, 0.1, 3))

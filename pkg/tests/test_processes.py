import math

import numpy as np
import pytest
from scipy import integrate

from doobsim.core_paths import DomainError, TimeGrid
from doobsim.processes import (
    GbmSpec,
    PoissonMartingaleSpec,
    ScaleSpec,
    bessel_scale,
    gen_bessel3,
    gen_brownian_stopped,
    gen_diffusion,
    gen_gbm_martingale,
    gen_poisson_exp_martingale,
    gen_transient_diffusion_bessel,
    poisson_exact_log_sup,
    poisson_jump_times,
)

GRID = TimeGrid.from_horizon(5.0, 1e-3)


def test_brownian_is_absorbed_and_reproducible():
    a = gen_brownian_stopped(0.3, GRID, 4)
    b = gen_brownian_stopped(0.3, GRID, 4)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.stopped_at is not None
    assert np.all(a.values[a.stopped_at:] == 0.0)
    assert np.all(a.values[: a.stopped_at] > 0.0)


def test_bridge_monitor_stops_no_later():
    for seed in range(20):
        g = gen_brownian_stopped(0.3, GRID, seed, monitor="grid")
        b = gen_brownian_stopped(0.3, GRID, seed, monitor="bridge")
        if g.stopped_at is not None:
            assert b.stopped_at is not None and b.stopped_at <= g.stopped_at


def test_brownian_rejects_bad_input():
    with pytest.raises(DomainError):
        gen_brownian_stopped(0.0, GRID, 1)
    with pytest.raises(DomainError):
        gen_brownian_stopped(1.0, GRID, 1, monitor="sometimes")


def test_gbm_is_exponential_of_driving_bm():
    n, b = gen_gbm_martingale(GbmSpec(0.5), GRID, 2)
    np.testing.assert_allclose(np.log(n.values), b.values - 0.5 * GRID.times, rtol=1e-10, atol=1e-12)
    assert isinstance(n.meta["resolved"], bool)
    with pytest.raises(DomainError):
        GbmSpec(0.0)


def test_bessel3_stays_positive():
    r = gen_bessel3(0.0, GRID, 3)
    assert r.values[0] == 0.0 and np.all(r.values[1:] > 0.0)
    r, n = gen_transient_diffusion_bessel(1.0, GRID, 3)
    np.testing.assert_allclose(n.values * r.values, 1.0)
    assert bessel_scale(2.0) == -0.5


def test_scale_closed_forms_match_quadrature():
    z = np.array([0.0, 0.5, 1.0, 3.0])
    for spec, b in [(ScaleSpec.constant(-0.5), lambda x: -0.5),
                    (ScaleSpec.linear(0.2, 0.3), lambda x: 0.2 + 0.3 * x),
                    (ScaleSpec.linear(0.2, -0.1), lambda x: 0.2 - 0.1 * x)]:
        ref = [integrate.quad(lambda y: math.exp(-2 * integrate.quad(b, 0, y)[0]), 0, zz)[0]
               for zz in z]
        np.testing.assert_allclose(spec.s(z), ref, rtol=1e-7, atol=1e-12)
        tab = ScaleSpec(b, z_max=5.0, n_nodes=1 << 12)
        np.testing.assert_allclose(tab.s(z), ref, rtol=1e-7, atol=1e-12)
        y = float(spec.s(1.5))
        assert spec.s_inv(y) == pytest.approx(1.5, rel=1e-9)


def test_scale_table_bounds():
    tab = ScaleSpec(lambda x: -0.5, z_max=5.0, n_nodes=256)
    with pytest.raises(DomainError):
        tab.s(6.0)


def test_diffusion_martingale_is_normalised():
    x, n = gen_diffusion(ScaleSpec.constant(-0.5), 1.0, GRID, 9)
    assert n.values[0] == pytest.approx(1.0)
    if x.stopped_at is not None:
        assert n.values[-1] == 0.0


def test_poisson_martingale_between_jumps():
    spec = PoissonMartingaleSpec(2.0)
    e, counts = gen_poisson_exp_martingale(spec, GRID, 1)
    jt = e.meta["jump_times"]
    assert counts.values[-1] == jt.size
    expect = -counts.values + spec.compensator(GRID.times)
    np.testing.assert_allclose(np.log(e.values), expect, rtol=1e-12, atol=1e-12)
    assert poisson_exact_log_sup(spec, jt, GRID.horizon) >= np.log(e.values).max() - 1e-12


def test_poisson_jump_times_sorted_positive():
    jt = poisson_jump_times(3.0, 10.0, np.random.default_rng(0))
    assert np.all(np.diff(jt) > 0) and jt[0] > 0 and jt[-1] <= 10.0
    with pytest.raises(DomainError):
        PoissonMartingaleSpec(0.0)

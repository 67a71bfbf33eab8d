import math
import warnings

import numpy as np
import pytest

from doobsim.core_paths import DomainError, Path, TimeGrid
from doobsim.decompositions import (
    TestFunction,
    azema_yor,
    conditional_sup_law,
    conditional_sup_law_batch,
    decompose,
    dual_projection_sides,
    enlargement_compensator,
    h_transform,
    jump_factor,
    lambda_dot,
    realized_covariation,
    reconstruct_multiplicative,
    reconstruct_multiplicative_jumps,
    rho_density,
)
from doobsim.processes import (
    PoissonMartingaleSpec,
    gen_brownian_stopped,
    gen_poisson_exp_martingale,
)


# test functions -------------------------------------------------------------

def test_indicator_is_strict():
    f = TestFunction.indicator(2.0)
    np.testing.assert_array_equal(f(np.array([1.0, 2.0, 2.5])), [0, 0, 1])
    assert f.primitive(3.0) == pytest.approx(1.0)
    assert f.tail(1.0) == pytest.approx(0.5)
    assert f.tail(4.0) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        f.tail(0.0)


def test_piecewise_linear_matches_generic_quadrature():
    xs, ys = [1.0, 2.0, 3.0], [0.0, 1.0, 0.5]
    pl = TestFunction.piecewise_linear(xs, ys)
    gen = TestFunction.generic(lambda x: float(np.interp(x, xs, ys)))
    for x in [0.5, 1.0, 1.7, 2.5, 4.0, 10.0]:
        assert pl.tail(x) == pytest.approx(gen.tail(x), rel=1e-6, abs=1e-9)
        assert pl.primitive(x) == pytest.approx(gen.primitive(x), rel=1e-6, abs=1e-9)


def test_constant_function():
    c = TestFunction.constant(3.0)
    assert c(5.0) == 3.0
    assert c.tail(2.0) == pytest.approx(1.5)


# decompose ------------------------------------------------------------------

def test_decompose_hand_example():
    d = decompose(np.array([1.0, 2.0, 1.0]))
    np.testing.assert_allclose(d.S, [1, 2, 2])
    np.testing.assert_allclose(d.Z, [1, 1, 0.5])
    np.testing.assert_allclose(d.M, [1, 2, 1.5])
    np.testing.assert_allclose(d.A, [0, math.log(2), math.log(2)])
    s = d.summary()
    assert s["g_index"] == 1 and s["n_points"] == 3


def test_decompose_normalises_start():
    a = decompose(np.array([2.0, 4.0, 2.0]))
    b = decompose(np.array([1.0, 2.0, 1.0]))
    np.testing.assert_allclose(a.M, b.M)


@pytest.mark.parametrize("bad", [[0.0, 1.0], [1.0, -0.5], [1.0, 0.0, 1.0], [1.0, np.inf]])
def test_decompose_rejects(bad):
    with pytest.raises(DomainError):
        decompose(np.array(bad))


def test_decompose_allows_terminal_absorption():
    d = decompose(np.array([1.0, 0.5, 0.0, 0.0]))
    assert d.summary()["resolved"]


# multiplicative reconstruction ---------------------------------------------

def test_reconstruction_without_new_maxima_is_exact():
    n = np.array([1.0, 0.8, 0.9, 0.4, 0.5])
    N, S = reconstruct_multiplicative(n / np.maximum.accumulate(n))
    np.testing.assert_allclose(N, n, rtol=1e-12)
    np.testing.assert_allclose(S, 1.0)


def test_reconstruction_rejects_bad_ratio():
    with pytest.raises(DomainError):
        reconstruct_multiplicative(np.array([0.5, 0.4]))
    with pytest.raises(DomainError):
        reconstruct_multiplicative(np.array([1.0, 1.2]))


def test_reconstruction_recovers_brownian_path_roughly():
    grid = TimeGrid.from_horizon(2.0, 1e-4)
    p = gen_brownian_stopped(1.0, grid, 11)
    d = decompose(p)
    N, S = reconstruct_multiplicative(d.Z)
    np.testing.assert_allclose(np.asarray(N) / np.asarray(S), d.Z, rtol=1e-10)
    assert np.max(np.abs(np.asarray(N) - p.values)) < 0.5


def test_jump_reconstruction_is_exact_for_poisson():
    spec = PoissonMartingaleSpec(1.0)
    grid = TimeGrid.from_horizon(10.0, 1e-3)
    e, _ = gen_poisson_exp_martingale(spec, grid, 5)
    ev = e.values
    z = ev / np.maximum.accumulate(ev)
    N, _ = reconstruct_multiplicative_jumps(z, e.meta["jump_indices"])
    assert np.max(np.abs(np.asarray(N) / ev - 1.0)) < 1e-9


def test_jump_reconstruction_validates_indices():
    z = np.array([1.0, 0.5, 0.6])
    with pytest.raises(DomainError):
        reconstruct_multiplicative_jumps(z, [3])
    with pytest.raises(DomainError):
        reconstruct_multiplicative_jumps(z, [2])


def test_jump_factor():
    assert jump_factor(-0.5) == pytest.approx(0.5 * math.exp(0.5))
    assert jump_factor(0.0) == 1.0
    with pytest.raises(DomainError):
        jump_factor(0.1)


# Azema-Yor and the conditional law ----------------------------------------

def test_azema_yor_constant_f_is_exact():
    n = np.array([1.0, 1.3, 0.7, 1.6, 0.2])
    x, rhs = azema_yor(TestFunction.constant(2.0), n)
    np.testing.assert_allclose(x, rhs, atol=1e-12)


def test_azema_yor_indicator_small_gap():
    grid = TimeGrid.from_horizon(1.0, 1e-4)
    p = gen_brownian_stopped(1.0, grid, 3)
    x, rhs = azema_yor(TestFunction.indicator(1.2), p)
    assert np.max(np.abs(np.asarray(x) - np.asarray(rhs))) < 0.1


def test_conditional_sup_law():
    f = TestFunction.indicator(3.0)
    assert conditional_sup_law(f, 2.0, 2.0) == pytest.approx(2.0 / 3.0)
    assert conditional_sup_law(TestFunction.indicator(4.0), 1.0, 1.0) == pytest.approx(0.25)
    # above the level the indicator is already decided
    assert conditional_sup_law(TestFunction.indicator(1.0), 0.3, 2.0) == pytest.approx(1.0)
    np.testing.assert_allclose(conditional_sup_law_batch(f, [2.0, 1.0], [2.0, 2.0]),
                               [2 / 3, 1 / 3])
    for n, s in [(3.0, 2.0), (-1.0, 2.0), (0.5, 0.0)]:
        with pytest.raises(DomainError):
            conditional_sup_law(f, n, s)


def test_h_transform_and_lambda_dot():
    f = TestFunction.indicator(2.0)
    assert h_transform(f, 1.0) == pytest.approx(0.5)
    assert h_transform(f, 3.0) == pytest.approx(0.0)
    assert lambda_dot(f, 1.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        h_transform(f, 0.0)


def test_rho_density():
    assert rho_density(3.0, 1.0, 2.0) == 1.0
    assert rho_density(1.5, 1.0, 2.0) == 0.0
    assert rho_density(2.0, 1.0, 2.0) == -1.0
    assert rho_density(2.0, 2.0, 2.0) == 0.0
    with pytest.raises(DomainError):
        rho_density(1.0, 0.0, 1.0)


# enlargement and dual projection ------------------------------------------

def test_realized_covariation():
    np.testing.assert_allclose(realized_covariation([0, 1, 3], [0, 2, 2]), [0, 2, 2])


def test_enlargement_compensator_pre_and_post():
    grid = TimeGrid(0.0, 0.25, 4)
    n = Path(grid, [1.0, 2.0, 1.0, 0.5])
    s = Path(grid, [1.0, 2.0, 2.0, 2.0])
    br = Path(grid, np.arange(4) * 0.25)
    c = enlargement_compensator(n, n, s, 1, br)
    np.testing.assert_allclose(c, [0, 0.25, 0.25 - 0.25 / 0.5, 0.25 - 0.5 - 0.25])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        c2 = enlargement_compensator(n, n, s, None, br)
    assert w and np.all(np.diff(c2) > 0)
    with pytest.raises(DomainError):
        enlargement_compensator(n.values, n.values, s.values, 1, br.values)


def test_dual_projection_sides():
    lhs, rhs = dual_projection_sides(lambda t: np.ones_like(t), [1.0, 2.0, 1.0], [1.0, 2.0, 2.0],
                                     1, times=[0.0, 1.0, 2.0])
    assert lhs == 1.0
    assert rhs == pytest.approx(1.0)
    with pytest.raises(DomainError):
        dual_projection_sides(np.exp, [1.0, 2.0], [1.0, 2.0], None, times=[0.0, 1.0])

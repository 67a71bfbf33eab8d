"""The named verification suites.

A suite turns a :class:`SuiteConfig` into a :class:`VerificationReport`
plus optional per-path samples for ``--dump-samples`` / ``--dump-times``.
Simulated batches are cached per process, so suites that share a batch
(for example the three killed-BM law suites) simulate it once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .core_paths import DomainError, TimeGrid
from .decompositions import (
    EPS_STOP,
    TestFunction,
    azema_yor,
    decompose,
    reconstruct_multiplicative,
    reconstruct_multiplicative_jumps,
)
from .mc_engine import (
    Timer,
    VerificationReport,
    drift_regression_test,
    estimate_survival,
    independence_test,
    ks_repeated,
    martingale_test_from_values,
    mean_equality_test,
    nested_conditional_test,
    pseudo_stopping_test,
    qv_test_from_values,
    run_blocks,
)
from .processes import PoissonMartingaleSpec, gen_poisson_exp_martingale
from .seeding import StreamBank, path_seed

RENEW_K_BM = 4.0
RENEW_K_BES = 2.0
MAX_STEPS = 10 ** 7
COMPOSITE_MAX_STEPS = 10 ** 6
GBM_STEP_FACTOR = 10
MESH_MAX_PATHS = 4000
MESH_HORIZON = 4.0
CHECKPOINTS = np.array([0.1, 0.5, 1.0, 2.0])
BINS_PRE = np.array([0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0])
BINS_POST = np.array([0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0])


@dataclass
class SuiteConfig:
    n_paths: int = 100_000
    seed: int = 42
    step: float = 1e-3
    horizon: float | None = None
    workers: int = 1
    generator: str | None = None


@dataclass
class SuiteResult:
    report: VerificationReport
    samples: dict = field(default_factory=dict)
    times: list = field(default_factory=list)


def replicate_seed(seed: int, k: int) -> int:
    """Master seed of the ``k``-th replicate batch (``k = 0`` is ``seed``)."""
    return int(seed) if k == 0 else path_seed(int(seed), (1 << 63) | k)


# ---------------------------------------------------------------------------
# Worker entry points (module level so they pickle)


def _law_block(master, start, stop, kind, params):
    bank = StreamBank(master)
    rows = []
    p = params
    for i in range(start, stop):
        rng = bank.at(i)
        if kind == "stopped-bm":
            rows.append(_kernels.stopped_bm_law(rng, p["step"], RENEW_K_BM, MAX_STEPS))
        elif kind == "gbm":
            rows.append(_kernels.gbm_log_sup(rng, p["nu"], p["step"], math.log(EPS_STOP),
                                             p["max_steps"]))
        elif kind == "bessel3":
            rows.append(_kernels.bessel3_min(rng, p["step"], RENEW_K_BES, EPS_STOP, MAX_STEPS))
        elif kind == "poisson":
            rows.append(_kernels.poisson_log_sup(rng, p["c"], p["f"], math.log(EPS_STOP),
                                                 MAX_STEPS))
        elif kind == "diffusion":
            rows.append(_kernels.drifted_bm_sup(rng, p["x0"], p["beta"], p["step"], MAX_STEPS))
        else:
            raise DomainError(f"unknown law kernel {kind!r}")
    return np.array(rows, dtype=float)


def _composite_block(master, start, stop, step):
    bank = StreamBank(master)
    m = COMPOSITE_MAX_STEPS
    bufs = [np.empty(m + 1) for _ in range(5)]
    acc_pre = np.zeros((BINS_PRE.size - 1, 5))
    acc_post = np.zeros((BINS_POST.size - 1, 5))
    rows = []
    for i in range(start, stop):
        s_end, g_t, t0, res, cp, dual = _kernels.stopped_bm_composite(
            bank.at(i), step, RENEW_K_BM, m, CHECKPOINTS, BINS_PRE, BINS_POST,
            acc_pre, acc_post, *bufs)
        rows.append(np.concatenate([[s_end, g_t, t0, float(res)], cp.ravel(), dual]))
    return np.array(rows), acc_pre, acc_post


def _nested_block(master, start, stop, t, kind, level, n_inner, step, max_steps):
    bank = StreamBank(master)
    rows = []
    for i in range(start, stop):
        x, s, absorbed = _kernels.bm_state_at(bank.at(i), 1.0, t, step)
        unresolved = 0.0
        if kind == "constant":
            avg = level
        elif s > level:
            avg = 1.0
        elif absorbed:
            avg = 0.0
        else:
            hits = 0
            for j in range(n_inner):
                h = _kernels.bm_hits_before_zero(bank.at(i, branch=j), x, level, step, max_steps)
                if h < 0:
                    unresolved = 1.0
                else:
                    hits += h
            avg = hits / n_inner
        rows.append((x, s, avg, unresolved))
    return np.array(rows, dtype=float)


def _mesh_block(master, start, stop, step, horizon):
    """Per path: coarse/fine gaps of the Azema-Yor identity (indicator and
    constant f), of ``log S = max M - 1`` and of the multiplicative
    roundtrip, on coupled killed-BM paths at ``step`` and ``step/2``."""
    bank = StreamBank(master)
    fine = step / 2
    n_f = int(round(horizon / fine))
    ind = TestFunction.indicator(2.0)
    const = TestFunction.constant(1.0)
    rows = []
    for i in range(start, stop):
        rng = bank.at(i)
        bf = 1.0 + np.concatenate([[0.0], np.cumsum(math.sqrt(fine) * rng.standard_normal(n_f))])
        row = []
        for b in (bf[::2].copy(), bf.copy()):
            hit = np.flatnonzero(b <= 0.0)
            if hit.size:
                b[hit[0]:] = 0.0
            d = decompose(b)
            x, rhs = azema_yor(ind, b, d.S)
            xc, rc = azema_yor(const, b, d.S)
            sko = np.abs(d.A - (np.maximum.accumulate(d.M) - 1.0))
            n_rec, _ = reconstruct_multiplicative(d.Z)
            row.extend([np.max(np.abs(x - rhs)), np.max(np.abs(xc - rc)), np.max(sko),
                        np.max(np.abs(n_rec - b))])
        rows.append(row)
    return np.array(rows)


# ---------------------------------------------------------------------------
# Batch caches

_CACHE: dict = {}


def law_batch(kind: str, n: int, seed: int, workers: int, **params) -> np.ndarray:
    key = ("law", kind, n, seed, tuple(sorted(params.items())))
    if key not in _CACHE:
        parts = run_blocks(_law_block, n, seed, workers, args=(kind, params))
        _CACHE[key] = np.concatenate(parts)
    return _CACHE[key]


def composite_batch(n: int, seed: int, step: float, workers: int):
    key = ("composite", n, seed, step)
    if key not in _CACHE:
        parts = run_blocks(_composite_block, n, seed, workers, args=(step,))
        rows = np.concatenate([p[0] for p in parts])
        acc_pre = np.zeros((BINS_PRE.size - 1, 5))
        acc_post = np.zeros((BINS_POST.size - 1, 5))
        for p in parts:  # block order keeps the float sums reproducible
            acc_pre += p[1]
            acc_post += p[2]
        _CACHE[key] = (rows, acc_pre, acc_post)
    return _CACHE[key]


def mesh_batch(n: int, seed: int, step: float, horizon: float, workers: int):
    key = ("mesh", n, seed, step, horizon)
    if key not in _CACHE:
        _CACHE[key] = np.concatenate(run_blocks(_mesh_block, n, seed, workers,
                                                args=(step, horizon), block=100))
    return _CACHE[key]


def clear_cache():
    _CACHE.clear()


# column layout of composite rows
_NCP = CHECKPOINTS.size
_CP0 = 4
_DUAL0 = _CP0 + 3 * _NCP


def _cp(rows, k, col):
    return rows[:, _CP0 + 3 * k + col]


# ---------------------------------------------------------------------------
# Suites


def _need_ks(cfg):
    if cfg.n_paths < 1000:
        raise DomainError(f"KS suites need n_paths >= 1000, got {cfg.n_paths}")


def _bm_law(cfg, k=0):
    return law_batch("stopped-bm", cfg.n_paths, replicate_seed(cfg.seed, k), cfg.workers,
                     step=cfg.step)


def _bm_times(rows):
    return [{"path_id": i, "g": r[1], "rho": r[6], "t0": r[2] if r[7] else "",
             "s_end": r[0], "r_rho": r[3]} for i, r in enumerate(rows)]


def _bm_samples(rows):
    return {"s_end": rows[:, 0], "g": rows[:, 1], "t0": rows[:, 2], "r_rho": rows[:, 3],
            "resolved": rows[:, 7]}


def suite_doob_survival(cfg):
    with Timer() as tm:
        rows = _bm_law(cfg)
        s = rows[:, 0]
        det, worst = {}, 0.0
        for a in (2.0, 4.0, 8.0):
            p, ci = estimate_survival(s, a)
            r = abs(p - 1.0 / a) / ci if ci > 0 else math.inf
            worst = max(worst, r)
            det[f"a={a:g}"] = {"p_hat": p, "expected": 1.0 / a, "ci": ci}
    rep = VerificationReport("doob-survival", cfg.n_paths, worst, 1.0, worst <= 1.0,
                             float(1 - rows[:, 7].mean()), cfg.seed, tm.ms, det)
    return SuiteResult(rep, _bm_samples(rows), _bm_times(rows))


def suite_uniform_ratio(cfg):
    _need_ks(cfg)
    with Timer() as tm:
        sets = [_bm_law(cfg, k) for k in range(3)]
        d, thr, ok, ds = ks_repeated([1.0 / r[:, 0] for r in sets], "uniform01")
    unres = max(float(1 - r[:, 7].mean()) for r in sets)
    rep = VerificationReport("uniform-ratio", cfg.n_paths, d, thr, ok, unres, cfg.seed, tm.ms,
                             {"D": ds, "replicate_seeds": [replicate_seed(cfg.seed, k) for k in range(3)]})
    return SuiteResult(rep, _bm_samples(sets[0]), _bm_times(sets[0]))


def suite_log_sup_mean(cfg):
    with Timer() as tm:
        rows = _bm_law(cfg)
        ls = np.log(rows[:, 0])
        stat, ok = pseudo_stopping_test(ls, 1.0)
    rep = VerificationReport("log-sup-mean", cfg.n_paths, stat, 1.0, ok,
                             float(1 - rows[:, 7].mean()), cfg.seed, tm.ms,
                             {"mean": float(ls.mean()), "stderr": float(ls.std(ddof=1) / math.sqrt(ls.size))})
    return SuiteResult(rep, _bm_samples(rows), _bm_times(rows))


def suite_pseudo_stopping(cfg):
    _need_ks(cfg)
    with Timer() as tm:
        sets = [_bm_law(cfg, k) for k in range(3)]
        rows = sets[0]
        level = 10.0
        # M = N stopped at its first passage above 10
        m_rho = np.where(rows[:, 5] < level, rows[:, 4], level)
        m_g = np.minimum(rows[:, 0], level)
        stat_rho, ok_rho = pseudo_stopping_test(m_rho, 1.0)
        stat_g, ok_g = pseudo_stopping_test(m_g, 1.0)
        d, thr, ok_ks, ds = ks_repeated([r[:, 3] for r in sets], "uniform01")
    power = not ok_g
    stat = max(stat_rho, d / thr)
    ok = ok_rho and ok_ks and power
    rep = VerificationReport("pseudo-stopping", cfg.n_paths, stat, 1.0, ok,
                             max(float(1 - r[:, 7].mean()) for r in sets), cfg.seed, tm.ms,
                             {"mean_M_rho": float(m_rho.mean()), "stat_M_rho": stat_rho,
                              "r_rho_D": ds, "r_rho_threshold": thr,
                              "control_mean_M_g": float(m_g.mean()), "control_stat": stat_g,
                              "control_rejected": power})
    return SuiteResult(rep, _bm_samples(rows), _bm_times(rows))


def _mesh(cfg):
    n = min(cfg.n_paths, MESH_MAX_PATHS)
    horizon = cfg.horizon or MESH_HORIZON
    return n, horizon, mesh_batch(n, cfg.seed, cfg.step, horizon, cfg.workers)


def _mesh_ratio(rows, coarse_col, fine_col):
    c, f = rows[:, coarse_col].mean(), rows[:, fine_col].mean()
    return float(f / c) if c > 0 else math.inf, float(c), float(f)


def suite_azema_yor(cfg):
    with Timer() as tm:
        n, horizon, rows = _mesh(cfg)
        ratio, c, f = _mesh_ratio(rows, 0, 4)
        const_gap = float(max(rows[:, 1].max(), rows[:, 5].max()))
    ok = ratio <= 0.5 and const_gap <= 1e-12
    rep = VerificationReport("azema-yor-pathwise", n, ratio, 0.5, ok, 0.0, cfg.seed, tm.ms,
                             {"mean_gap_step": c, "mean_gap_half_step": f,
                              "constant_f_gap": const_gap, "step": cfg.step, "horizon": horizon})
    return SuiteResult(rep, {"gap_step": rows[:, 0], "gap_half_step": rows[:, 4]})


def suite_skorokhod(cfg):
    with Timer() as tm:
        n, horizon, rows = _mesh(cfg)
        ratio, c, f = _mesh_ratio(rows, 2, 6)
    rep = VerificationReport("skorokhod-roundtrip", n, ratio, 0.5, ratio <= 0.5, 0.0, cfg.seed,
                             tm.ms, {"mean_gap_step": c, "mean_gap_half_step": f,
                                     "step": cfg.step, "horizon": horizon})
    return SuiteResult(rep, {"gap_step": rows[:, 2], "gap_half_step": rows[:, 6]})


def poisson_roundtrip_error(n_paths: int, seed: int, step: float, horizon: float = 20.0) -> float:
    """Worst relative error of the jump-aware reconstruction at jump times."""
    bank = StreamBank(seed)
    grid = TimeGrid.from_horizon(horizon, step)
    spec = PoissonMartingaleSpec(1.0, TestFunction.constant(1.0))
    worst = 0.0
    for i in range(n_paths):
        e, _ = gen_poisson_exp_martingale(spec, grid, bank.at(i))
        d = decompose(e)
        ji = e.meta["jump_indices"]
        n_rec, _ = reconstruct_multiplicative_jumps(d.Z, ji)
        if ji.size:
            worst = max(worst, float(np.max(np.abs(n_rec.values[ji] / e.values[ji] - 1.0))))
    return worst


def suite_mult_reconstruct(cfg):
    with Timer() as tm:
        n, horizon, rows = _mesh(cfg)
        ratio, c, f = _mesh_ratio(rows, 3, 7)
        diff = rows[:, 7] - rows[:, 3]
        se = float(diff.std(ddof=1) / math.sqrt(diff.size)) if diff.size > 1 else math.inf
        pois = poisson_roundtrip_error(min(cfg.n_paths, 200), cfg.seed, cfg.step)
    ok = ratio < 1.0 and pois <= 1e-6
    rep = VerificationReport("mult-reconstruct-roundtrip", n, ratio, 1.0, ok, 0.0, cfg.seed, tm.ms,
                             {"mean_err_step": c, "mean_err_half_step": f,
                              "paired_diff_stderr": se, "poisson_max_rel_err": pois,
                              "poisson_tolerance": 1e-6})
    return SuiteResult(rep, {"err_step": rows[:, 3], "err_half_step": rows[:, 7]})


def suite_nested(cfg):
    rep = nested_conditional_test(0.5, TestFunction.indicator(2.0), min(cfg.n_paths, 200), 500,
                                  cfg.seed, cfg.step, cfg.workers)
    return SuiteResult(rep)


def _composite(cfg):
    return composite_batch(cfg.n_paths, cfg.seed, cfg.step, cfg.workers)


def _composite_samples(rows):
    out = {"s_end": rows[:, 0], "g": rows[:, 1], "t0": rows[:, 2], "resolved": rows[:, 3]}
    for k, t in enumerate(CHECKPOINTS):
        out[f"btilde_{t:g}"] = _cp(rows, k, 0)
        out[f"qv_{t:g}"] = _cp(rows, k, 1)
    return out


def suite_dual_projection(cfg):
    with Timer() as tm:
        rows, _, _ = _composite(cfg)
        d = rows[:, _DUAL0:_DUAL0 + 4]
        s1, ok1 = mean_equality_test(d[:, 0], d[:, 1])
        s2, ok2 = mean_equality_test(d[:, 2], d[:, 3])
    stat = max(s1, s2)
    rep = VerificationReport("dual-projection", cfg.n_paths, stat, 1.0, ok1 and ok2,
                             float(1 - rows[:, 3].mean()), cfg.seed, tm.ms,
                             {"k=1": {"lhs": float(d[:, 0].mean()), "rhs": float(d[:, 1].mean()), "stat": s1},
                              "k=exp(-t)": {"lhs": float(d[:, 2].mean()), "rhs": float(d[:, 3].mean()),
                                            "stat": s2}})
    return SuiteResult(rep, _composite_samples(rows))


def suite_enlargement(cfg):
    with Timer() as tm:
        rows, _, _ = _composite(cfg)
        incr = np.column_stack([_cp(rows, k, 0) - 1.0 for k in range(1, _NCP)])
        m_stat, m_ok, per_cp = martingale_test_from_values(incr)
        qv_errs = [qv_test_from_values(_cp(rows, k, 1), _cp(rows, k, 2))[0] for k in range(_NCP)]
        qv_stat = max(qv_errs) / 0.05
        rho, thr, i_ok = independence_test(rows[:, 0], _cp(rows, 0, 0))
    stat = max(m_stat, qv_stat, abs(rho) / thr)
    ok = m_ok and qv_stat <= 1.0 and i_ok
    rep = VerificationReport("enlargement-stopped-bm", cfg.n_paths, stat, 1.0, ok,
                             float(1 - rows[:, 3].mean()), cfg.seed, tm.ms,
                             {"checkpoints": CHECKPOINTS[1:], "martingale_stats": per_cp,
                              "mean_increments": incr.mean(0),
                              "qv_rel_err": qv_errs, "qv_checkpoints": CHECKPOINTS,
                              "spearman": rho, "spearman_threshold": thr,
                              "spearman_checkpoint": float(CHECKPOINTS[0])})
    return SuiteResult(rep, _composite_samples(rows))


def _drift_suite(cfg, name, which, edges):
    with Timer() as tm:
        rows, acc_pre, acc_post = _composite(cfg)
        acc = acc_pre if which == "pre" else acc_post
        stat, ok, det = drift_regression_test(acc, edges)
    rep = VerificationReport(name, cfg.n_paths, stat, 1.0, ok, float(1 - rows[:, 3].mean()),
                             cfg.seed, tm.ms, det)
    return SuiteResult(rep, _composite_samples(rows))


def suite_pre_g(cfg):
    return _drift_suite(cfg, "bessel3-pre-g-drift", "pre", BINS_PRE)


def suite_post_g(cfg):
    return _drift_suite(cfg, "post-g-bessel3", "post", BINS_POST)


def suite_gbm(cfg):
    _need_ks(cfg)
    step = cfg.step * GBM_STEP_FACTOR
    with Timer() as tm:
        det, worst, ok, unres = {}, 0.0, True, 0.0
        for nu in (0.25, 0.5):
            horizon = cfg.horizon or 40.0 / nu
            ms = int(math.ceil(horizon / step))
            sets = [law_batch("gbm", cfg.n_paths, replicate_seed(cfg.seed, k), cfg.workers,
                              nu=nu, step=step, max_steps=ms) for k in range(3)]
            d, thr, k_ok, ds = ks_repeated([r[:, 0] for r in sets], ("exponential", 2 * nu))
            u = max(float(1 - r[:, 1].mean()) for r in sets)
            det[f"nu={nu:g}"] = {"D": ds, "threshold": thr, "unresolved": u, "horizon": horizon}
            worst = max(worst, d / thr)
            ok = ok and k_ok
            unres = max(unres, u)
    rep = VerificationReport("gbm-exp-law", cfg.n_paths, worst, 1.0, ok, unres, cfg.seed, tm.ms,
                             dict(det, step=step))
    return SuiteResult(rep, {"sup_nu_0.5": sets[0][:, 0]})


def suite_scale_law(cfg):
    _need_ks(cfg)
    beta, x0 = -0.5, 1.0
    with Timer() as tm:
        sets = [law_batch("diffusion", cfg.n_paths, replicate_seed(cfg.seed, k), cfg.workers,
                          x0=x0, beta=beta, step=cfg.step) for k in range(3)]
        s0 = math.expm1(-2 * beta * x0) / (-2 * beta)
        ys = [np.expm1(-2 * beta * r[:, 0]) / (-2 * beta) / s0 for r in sets]
        d, thr, ok, ds = ks_repeated(ys, "reciprocal_uniform")
    rep = VerificationReport("diffusion-scale-law", cfg.n_paths, d, thr, ok,
                             max(float(1 - r[:, 1].mean()) for r in sets), cfg.seed, tm.ms,
                             {"D": ds, "drift": beta, "x0": x0})
    return SuiteResult(rep, {"sup_x": sets[0][:, 0], "scaled": ys[0]})


def suite_bessel_min(cfg):
    _need_ks(cfg)
    with Timer() as tm:
        sets = [law_batch("bessel3", cfg.n_paths, replicate_seed(cfg.seed, k), cfg.workers,
                          step=cfg.step) for k in range(3)]
        d, thr, ok, ds = ks_repeated([r[:, 0] for r in sets], "uniform01")
    rep = VerificationReport("bessel3-min-uniform", cfg.n_paths, d, thr, ok,
                             max(float(1 - r[:, 1].mean()) for r in sets), cfg.seed, tm.ms,
                             {"D": ds})
    return SuiteResult(rep, {"min_r": sets[0][:, 0], "resolved": sets[0][:, 1]})


def suite_poisson(cfg):
    _need_ks(cfg)
    with Timer() as tm:
        sets = [law_batch("poisson", cfg.n_paths, replicate_seed(cfg.seed, k), cfg.workers,
                          c=1.0, f=1.0) for k in range(3)]
        d, thr, ok, ds = ks_repeated([r[:, 0] for r in sets], ("exponential", 1.0))
    rep = VerificationReport("poisson-exp1", cfg.n_paths, d, thr, ok,
                             max(float(1 - r[:, 1].mean()) for r in sets), cfg.seed, tm.ms,
                             {"D": ds, "c": 1.0, "f": 1.0})
    return SuiteResult(rep, {"log_sup": sets[0][:, 0], "resolved": sets[0][:, 1]})


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable
    generators: tuple
    citation: str
    ks: bool = False


_ALL = [
    Suite("doob-survival", suite_doob_survival, ("stopped-bm",),
          "Doob maximal identity: P(S_inf > a) = 1/a for a >= 1"),
    Suite("uniform-ratio", suite_uniform_ratio, ("stopped-bm",),
          "N_0/S_inf is uniform on (0,1)", ks=True),
    Suite("log-sup-mean", suite_log_sup_mean, ("stopped-bm",),
          "E[log S_inf] = 1, from the uniform law of 1/S_inf"),
    Suite("skorokhod-roundtrip", suite_skorokhod, ("stopped-bm",),
          "log S_t = max_{s<=t} M_s - 1 with M = 1 + int dN/S (Skorokhod reflection)"),
    Suite("azema-yor-pathwise", suite_azema_yor, ("stopped-bm",),
          "Azema-Yor: F(S_t) - f(S_t)(S_t - N_t) = F(S_0) + int f(S) dN"),
    Suite("conditional-sup-nested", suite_nested, ("stopped-bm",),
          "E[f(S_inf) | F_t] = f(S_t)(1 - N_t/S_t) + N_t int_{S_t}^inf f(x) dx/x^2"),
    Suite("dual-projection", suite_dual_projection, ("stopped-bm",),
          "E[k(g)] = E[int k(s) dS_s/S_s] (dual projection of 1{g <= t})"),
    Suite("mult-reconstruct-roundtrip", suite_mult_reconstruct, ("stopped-bm", "poisson"),
          "Z = N/S determines (N, S): N = exp(int dM/Z - (1/2) int d<M>/Z^2), S = exp(A)"),
    Suite("enlargement-stopped-bm", suite_enlargement, ("stopped-bm",),
          "B - int^{t^g} ds/B + int_g^{t^T0} ds/(S_inf - B) is Brownian given S_inf"),
    Suite("bessel3-pre-g-drift", suite_pre_g, ("stopped-bm",),
          "killed BM before its last maximum is Bessel(3): drift 1/x"),
    Suite("post-g-bessel3", suite_post_g, ("stopped-bm",),
          "S_inf - B after the last maximum is Bessel(3) from 0: drift 1/x"),
    Suite("gbm-exp-law", suite_gbm, ("gbm",),
          "sup_t (B_t - nu t) is exponential with rate 2 nu", ks=True),
    Suite("diffusion-scale-law", suite_scale_law, ("diffusion",),
          "s(sup X)/s(x0) has the law of 1/U for a diffusion killed at 0", ks=True),
    Suite("bessel3-min-uniform", suite_bessel_min, ("bessel3",),
          "the overall minimum of Bessel(3) from 1 is uniform on (0,1)", ks=True),
    Suite("poisson-exp1", suite_poisson, ("poisson",),
          "log sup of the Poisson exponential martingale is Exp(1)", ks=True),
    Suite("pseudo-stopping", suite_pseudo_stopping, ("stopped-bm",),
          "pseudo-stopping time rho: E[M_rho] = M_0 and N_rho/S_rho uniform", ks=True),
]

SUITES = {s.name: s for s in sorted(_ALL, key=lambda s: s.name)}

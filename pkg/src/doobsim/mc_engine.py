"""Batch orchestration and the statistical tests that turn laws into verdicts.

Paths are grouped in fixed blocks of ``BLOCK`` consecutive indices.  Blocks
run in any order on any number of workers and are merged in block order, so
every statistic is bit-for-bit independent of the worker count.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .core_paths import DomainError, Path, TimeGrid
from .decompositions import TestFunction, conditional_sup_law_batch

BLOCK = 1000
KS_COEF = 1.358
MAX_UNRESOLVED = 0.05


@dataclass
class BatchConfig:
    n_paths: int
    master_seed: int
    grid: TimeGrid
    generator: str = "stopped-bm"
    params: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise DomainError("n_paths must be >= 1")
        if self.workers < 0:
            raise DomainError("workers must be >= 0")


@dataclass
class VerificationReport:
    identity_name: str
    n: int
    statistic: float
    threshold: float
    passed: bool
    unresolved_fraction: float = 0.0
    seed: int = 0
    runtime_ms: int = 0
    details: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.unresolved_fraction < MAX_UNRESOLVED

    @property
    def status(self) -> str:
        if not self.valid:
            return "INVALID"
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = bool(d.pop("passed"))
        d["status"] = self.status
        return _jsonable(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


# ---------------------------------------------------------------------------
# Block runner


def resolve_workers(workers: int) -> int:
    if workers == 0:
        return os.cpu_count() or 1
    return workers


def run_blocks(fn: Callable, n: int, master_seed: int, workers: int = 1,
               args: tuple = (), block: int = BLOCK) -> list:
    """Call ``fn(master_seed, start, stop, *args)`` on consecutive index
    blocks covering ``range(n)`` and return the results in block order."""
    bounds = [(i, min(i + block, n)) for i in range(0, n, block)]
    workers = resolve_workers(workers)
    if workers <= 1 or len(bounds) == 1:
        return [fn(master_seed, a, b, *args) for a, b in bounds]
    with ProcessPoolExecutor(max_workers=min(workers, len(bounds))) as ex:
        futs = [ex.submit(fn, master_seed, a, b, *args) for a, b in bounds]
        return [f.result() for f in futs]


class Timer:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round(1000 * (time.perf_counter() - self.t)))


# ---------------------------------------------------------------------------
# Estimators and tests


def _stderr(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0


def estimate_survival(sampler, a: float, n: int | None = None):
    """Fraction of samples above ``a`` with a 3-sigma binomial half-width.

    ``sampler`` is an array of samples or a callable ``sampler(n)``.
    """
    x = np.asarray(sampler(n) if callable(sampler) else sampler, dtype=float)
    if n is None:
        n = x.size
    if n < 100 or x.size < n:
        raise DomainError("estimate_survival needs n >= 100 samples")
    x = x[:n]
    p = float(np.mean(x > a))
    return p, 3.0 * math.sqrt(p * (1.0 - p) / n)


def reference_cdf(reference):
    """CDF for ``"uniform01"``, ``"reciprocal_uniform"`` or
    ``("exponential", rate)``."""
    if reference == "uniform01":
        return lambda x: np.clip(x, 0.0, 1.0)
    if reference == "reciprocal_uniform":
        return lambda y: np.where(y < 1.0, 0.0, 1.0 - 1.0 / np.maximum(y, 1.0))
    if isinstance(reference, tuple) and reference[0] == "exponential":
        lam = float(reference[1])
        if not lam > 0:
            raise DomainError("exponential rate must be > 0")
        return lambda x: np.where(x < 0, 0.0, -np.expm1(-lam * np.maximum(x, 0.0)))
    raise DomainError(f"unknown reference law {reference!r}")


def ks_test(samples, reference):
    """One-sample Kolmogorov-Smirnov distance; pass iff ``D <= 1.358/sqrt(n)``."""
    x = np.asarray(samples, dtype=float)
    if x.size < 1000:
        raise DomainError(f"KS test needs n >= 1000 samples, got {x.size}")
    d = float(stats.kstest(x, reference_cdf(reference)).statistic)
    return d, d <= KS_COEF / math.sqrt(x.size)


def ks_repeated(sample_sets, reference):
    """2-of-3 rule: returns ``(median D, threshold, pass, all D)``."""
    ds = []
    n = None
    for x in sample_sets:
        d, _ = ks_test(x, reference)
        ds.append(d)
        n = len(x) if n is None else min(n, len(x))
    thr = KS_COEF / math.sqrt(n)
    passes = sum(d <= thr for d in ds)
    need = (len(ds) + 1) // 2 if len(ds) > 1 else 1
    return float(np.median(ds)), thr, passes >= need, ds


def _checkpoint_matrix(residual_paths, checkpoints):
    if isinstance(residual_paths, np.ndarray) and residual_paths.ndim == 2:
        cols = np.asarray(checkpoints, dtype=int)
        return residual_paths[:, cols] - residual_paths[:, :1]
    rows = []
    for p in residual_paths:
        if not isinstance(p, Path):
            raise DomainError("residual paths must be Paths or a 2-d array")
        idx = [p.grid.index_at(t) for t in checkpoints]
        rows.append(p.values[idx] - p.values[0])
    return np.asarray(rows)


def martingale_test_from_values(values):
    """``values[path, checkpoint]`` are increments ``X_t - X_0``.

    Statistic ``max_t |mean| / (3 stderr)``; pass iff ``<= 1``.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    out = []
    for col in v.T:
        m, se = float(col.mean()), _stderr(col)
        out.append(abs(m) / (3 * se) if se > 0 else (0.0 if m == 0 else math.inf))
    stat = max(out)
    return stat, stat <= 1.0, out


def martingale_residual_test(residual_paths, checkpoints):
    """Batch mean of ``X~_t - X~_0`` at each checkpoint against 0.

    ``residual_paths`` is a list of Paths (checkpoints are times) or a 2-d
    array (checkpoints are column indices).  Returns ``(statistic, pass)``.
    """
    stat, ok, _ = martingale_test_from_values(_checkpoint_matrix(residual_paths, checkpoints))
    return stat, ok


def qv_test_from_values(qv, bracket, rel_tol: float = 0.05):
    """Relative error ``|mean(qv) / mean(bracket) - 1|``; pass iff ``<= rel_tol``."""
    q, b = float(np.mean(qv)), float(np.mean(bracket))
    err = abs(q / b - 1.0) if b > 0 else math.inf
    return err, err <= rel_tol


def quadratic_variation_test(residual_paths, checkpoints, rel_tol: float = 0.05):
    """Realised ``sum (dX~)^2`` up to ``t ^ T0`` against ``mean(t ^ T0)``.

    For every checkpoint the relative error must be within ``rel_tol``.
    Returns ``(worst relative error, pass)``.
    """
    worst = 0.0
    for t in checkpoints:
        qv, br = [], []
        for p in residual_paths:
            i = p.grid.index_at(t)
            if p.stopped_at is not None:
                i = min(i, p.stopped_at)
            d = np.diff(p.values[: i + 1])
            qv.append(float(np.sum(d * d)))
            br.append(p.times[i] - p.grid.t0)
        err, _ = qv_test_from_values(qv, br, rel_tol)
        worst = max(worst, err)
    return worst, worst <= rel_tol


def independence_test(u, v):
    """Spearman rank correlation; pass iff ``|rho_S| <= 3/sqrt(n)``.

    A necessary, not sufficient, check of independence.  Returns
    ``(rho_s, threshold, pass)``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DomainError("independence_test needs paired samples")
    thr = 3.0 / math.sqrt(u.size)
    if np.ptp(u) == 0 or np.ptp(v) == 0:
        return 0.0, thr, True  # a constant sample carries no rank information
    rho = float(stats.spearmanr(u, v).statistic)
    return rho, thr, abs(rho) <= thr


def mean_equality_test(lhs, rhs):
    """``|mean(lhs) - mean(rhs)| / (3 sqrt(se_l^2 + se_r^2))``; pass iff ``<= 1``."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    diff = abs(float(lhs.mean() - rhs.mean()))
    se = math.hypot(_stderr(lhs), _stderr(rhs))
    stat = diff / (3 * se) if se > 0 else (0.0 if diff == 0 else math.inf)
    return stat, stat <= 1.0


def dual_projection_test(lhs, rhs):
    """Batch means of the two sides of ``E k(g) = E int k dS/S``."""
    return mean_equality_test(lhs, rhs)


def pseudo_stopping_test(m_rho, m0: float = 1.0):
    """Empirical mean of ``M_rho`` against ``M_0`` within 3 stderr."""
    x = np.asarray(m_rho, dtype=float)
    diff = abs(float(x.mean()) - m0)
    se = _stderr(x)
    stat = diff / (3 * se) if se > 0 else (0.0 if diff == 0 else math.inf)
    return stat, stat <= 1.0


# drift regression ----------------------------------------------------------

#: columns of the binned accumulators
ACC_COLS = ("count", "sum_v", "sum_v2", "sum_drift", "sum_allow")


def binned_drift_sums(paths, step: float, edges, theoretical_drift: Callable,
                      drift_slope: Callable | None = None, masks=None) -> np.ndarray:
    """Accumulate ``ACC_COLS`` over the steps of ``paths`` binned by the
    state at the left end of each step.

    ``v = dX/step``.  The allowance column sums ``sqrt(step) |b'(x)|``
    (``drift_slope`` gives ``|b'|``; default: 0).
    """
    edges = np.asarray(edges, dtype=float)
    acc = np.zeros((edges.size - 1, 5))
    for k, p in enumerate(paths):
        x = np.asarray(p, dtype=float)
        state, v = x[:-1], np.diff(x) / step
        keep = np.ones(state.size, dtype=bool) if masks is None else np.asarray(masks[k], bool)
        i = np.searchsorted(edges, state, side="right") - 1
        keep &= (i >= 0) & (i < edges.size - 1)
        i, s, vv = i[keep], state[keep], v[keep]
        slope = np.abs(drift_slope(s)) if drift_slope is not None else np.zeros_like(s)
        np.add.at(acc[:, 0], i, 1.0)
        np.add.at(acc[:, 1], i, vv)
        np.add.at(acc[:, 2], i, vv * vv)
        np.add.at(acc[:, 3], i, theoretical_drift(s))
        np.add.at(acc[:, 4], i, math.sqrt(step) * slope)
    return acc


def drift_regression_test(acc: np.ndarray, edges, min_count: int = 500):
    """Compare the binned mean of ``dX/step`` with the bin-averaged drift.

    A bin passes when ``|mean - drift| <= 3 stderr + allowance``; bins with
    fewer than ``min_count`` samples are skipped and reported.  The
    statistic is the worst ``|mean - drift| / (3 stderr + allowance)``.
    """
    edges = np.asarray(edges, dtype=float)
    rows, worst, skipped = [], 0.0, []
    for i in range(acc.shape[0]):
        n = acc[i, 0]
        if n < min_count:
            skipped.append([float(edges[i]), float(edges[i + 1]), int(n)])
            continue
        mean = acc[i, 1] / n
        var = max(acc[i, 2] / n - mean * mean, 0.0)
        se = math.sqrt(var / n)
        theo = acc[i, 3] / n
        allow = acc[i, 4] / n
        tol = 3 * se + allow
        r = abs(mean - theo) / tol if tol > 0 else math.inf
        worst = max(worst, r)
        rows.append({"lo": float(edges[i]), "hi": float(edges[i + 1]), "n": int(n),
                     "mean": mean, "drift": theo, "stderr": se, "allowance": allow,
                     "ratio": r})
    if not rows:
        raise DomainError("no populated bins")
    return worst, worst <= 1.0, {"bins": rows, "skipped": skipped}


# nested conditional law ------------------------------------------------------


def nested_conditional_test(t: float, f: TestFunction, n_outer: int, n_inner: int,
                            master_seed: int = 0, step: float = 1e-3, workers: int = 1,
                            max_steps: int = 10 ** 7):
    """Branch ``n_inner`` continuations of killed Brownian motion from the
    state of each of ``n_outer`` outer paths at time ``t`` and compare the
    branch average of ``f(S_inf)`` with the conditional law.

    Supported: indicator and constant ``f`` (the continuation only needs to
    decide whether ``S_inf`` exceeds the level).  The statistic is
    ``|sum D| / (3 sqrt(sum var))`` with ``D`` the per-path deviation and
    ``var = lambda (1 - lambda) / n_inner``; a dispersion check
    ``mean(D^2/var) <= 1 + 3 sqrt(2/n_outer)`` guards against deviations of
    alternating sign.
    """
    if f.kind not in ("indicator", "constant"):
        raise DomainError(f"nested test supports indicator/constant f, got {f.kind}")
    from .suites import _nested_block  # worker entry point

    with Timer() as tm:
        parts = run_blocks(_nested_block, n_outer, master_seed, workers,
                           args=(t, f.kind, f.params.get("a", f.params.get("c")),
                                 n_inner, step, max_steps), block=max(1, min(BLOCK, 25)))
    rows = np.concatenate(parts)
    n, s, avg, unresolved = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    lam = conditional_sup_law_batch(f, n, s)
    var = lam * (1 - lam) / n_inner
    d = avg - lam
    total_var = float(var.sum())
    stat_sum = abs(float(d.sum())) / (3 * math.sqrt(total_var)) if total_var > 0 else (
        0.0 if np.all(d == 0) else math.inf)
    pos = var > 0
    disp = float(np.mean(d[pos] ** 2 / var[pos])) if pos.any() else 0.0
    disp_thr = 1.0 + 3.0 * math.sqrt(2.0 / max(int(pos.sum()), 1))
    stat = max(stat_sum, disp / disp_thr)
    return VerificationReport(
        "conditional-sup-nested", int(n_outer), stat, 1.0, stat <= 1.0,
        unresolved_fraction=float(unresolved.mean()), seed=master_seed, runtime_ms=tm.ms,
        details={"t": t, "n_inner": n_inner, "sum_stat": stat_sum, "dispersion": disp,
                 "dispersion_threshold": disp_thr, "mean_lambda": float(lam.mean()),
                 "mean_branch": float(avg.mean())})

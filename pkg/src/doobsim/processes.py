"""Seeded path generators for the example martingales: killed Brownian motion,
the geometric Brownian martingale, Bessel(3) and its reciprocal, general
one-dimensional diffusions in natural scale, and the Poisson exponential
martingale.

Each generator takes a ``seed`` that may be a ``numpy.random.Generator``, a
``(master_seed, path_index)`` pair or a plain integer (see :mod:`.seeding`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, interpolate, optimize, special

from . import _kernels
from .core_paths import DomainError, Path, TimeGrid
from .decompositions import EPS_STOP, TestFunction
from .seeding import as_rng

MONITORS = ("grid", "bridge")


def _check_monitor(monitor):
    if monitor not in MONITORS:
        raise DomainError(f"monitor must be one of {MONITORS}, got {monitor!r}")


def _bridge_crossed(a, b, dt, u):
    """First step whose Brownian bridge from ``a[j]`` to ``b[j]`` touches 0."""
    with np.errstate(over="ignore"):
        p = np.exp(-2.0 * np.maximum(a, 0.0) * np.maximum(b, 0.0) / dt)
    hit = (b <= 0.0) | (u < p)
    idx = np.flatnonzero(hit)
    return int(idx[0]) if idx.size else None


# ---------------------------------------------------------------------------
# Killed Brownian motion


def gen_brownian_stopped(x0: float, grid: TimeGrid, seed, monitor: str = "grid") -> Path:
    """Brownian motion from ``x0`` absorbed at 0.

    ``monitor="grid"`` stops at the first grid value ``<= 0``.  With
    ``"bridge"`` a step from ``a`` to ``b`` is also taken to cross 0 with the
    Brownian-bridge probability ``exp(-2ab/step)``.
    """
    if not x0 > 0:
        raise DomainError("x0 must be > 0")
    _check_monitor(monitor)
    rng = as_rng(seed)
    dt = grid.step
    b = x0 + np.concatenate([[0.0], np.cumsum(math.sqrt(dt) * rng.standard_normal(grid.n_points - 1))])
    if monitor == "grid":
        hit = np.flatnonzero(b <= 0.0)
        stop = int(hit[0]) if hit.size else None
    else:
        u = rng.random(grid.n_points - 1)
        j = _bridge_crossed(b[:-1], b[1:], dt, u)
        stop = None if j is None else j + 1
    if stop is not None:
        b[stop:] = 0.0
    return Path(grid, b, stop, meta={"monitor": monitor})


# ---------------------------------------------------------------------------
# Geometric Brownian martingale


@dataclass(frozen=True)
class GbmSpec:
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("nu must be > 0")


def gen_gbm_martingale(spec: GbmSpec, grid: TimeGrid, seed, eps_stop: float = EPS_STOP):
    """``N = exp(2 nu B - 2 nu^2 t)`` with its driving Brownian motion.

    ``N.meta["resolved"]`` tells whether ``N/S < eps_stop`` at the horizon.
    """
    rng = as_rng(seed)
    dt = grid.step
    b = np.concatenate([[0.0], np.cumsum(math.sqrt(dt) * rng.standard_normal(grid.n_points - 1))])
    t = grid.times - grid.t0
    n = np.exp(2 * spec.nu * b - 2 * spec.nu ** 2 * t)
    resolved = bool(n[-1] / n.max() < eps_stop)
    return Path(grid, n, meta={"resolved": resolved}), Path(grid, b)


# ---------------------------------------------------------------------------
# Bessel(3)


def gen_bessel3(x0: float, grid: TimeGrid, seed) -> Path:
    """Euler scheme for ``dR = dbeta + dt/R``; the drift uses
    ``max(R, sqrt(step))`` and negative proposals are reflected."""
    if x0 < 0:
        raise DomainError("x0 must be >= 0")
    rng = as_rng(seed)
    xi = rng.standard_normal(grid.n_points - 1)
    return Path(grid, _kernels.bessel3_euler(float(x0), grid.step, xi))


def gen_transient_diffusion_bessel(x0: float, grid: TimeGrid, seed):
    """Bessel(3) ``R`` from ``x0`` and ``N = x0 / R``, the scale function
    ``s(z) = -1/z`` normalised to start at 1."""
    if not x0 > 0:
        raise DomainError("x0 must be > 0")
    r = gen_bessel3(x0, grid, seed)
    with np.errstate(divide="ignore"):
        n = x0 / np.maximum(r.values, np.finfo(float).tiny)
    return r, Path(grid, n)


def bessel_scale(z):
    """``s(z) = -1/z``: increasing, ``s(0+) = -inf``, ``s(inf) = 0``."""
    return -1.0 / np.asarray(z, dtype=float)


# ---------------------------------------------------------------------------
# Diffusions dX = dB + b(X) dt and their scale functions


class ScaleSpec:
    """Drift ``b`` of ``dX = dB + b(X) dt`` with its scale function
    ``s(z) = int_0^z exp(-2 bhat(y)) dy``, ``bhat(y) = int_0^y b``.

    Use :meth:`constant` or :meth:`linear` for closed forms; a general
    callable is tabulated on ``[0, z_max]`` by cumulative Simpson and
    evaluated by Hermite interpolation (the derivative ``s'`` is exact at
    the nodes).
    """

    def __init__(self, drift_b: Callable | float, z_max: float = 50.0, n_nodes: int = 1 << 14,
                 _kind: str = "quadrature", _coef=(0.0, 0.0)):
        self.kind = _kind
        self.z_max = float(z_max)
        self.b0, self.b1 = (float(c) for c in _coef)
        if _kind == "quadrature":
            if not callable(drift_b):
                raise DomainError("drift_b must be callable (use ScaleSpec.constant)")
            self.drift_b = drift_b
            z = np.linspace(0.0, self.z_max, n_nodes + 1)
            bz = np.asarray(np.vectorize(drift_b, otypes=[float])(z))
            if not np.all(np.isfinite(bz)):
                raise DomainError("drift is not finite on the scale table")
            bhat = integrate.cumulative_simpson(bz, x=z, initial=0.0)
            ds = np.exp(-2.0 * bhat)
            if not np.all(np.isfinite(ds)):
                raise DomainError("scale density overflows; shrink z_max")
            s = integrate.cumulative_simpson(ds, x=z, initial=0.0)
            self._table = interpolate.CubicHermiteSpline(z, s, ds)
        else:
            b0, b1 = self.b0, self.b1
            self.drift_b = lambda x: b0 + b1 * x

    @classmethod
    def constant(cls, beta: float) -> "ScaleSpec":
        return cls(None, _kind="constant", _coef=(beta, 0.0))

    @classmethod
    def linear(cls, b0: float, b1: float) -> "ScaleSpec":
        """``b(x) = b0 + b1 x``."""
        return cls(None, _kind="linear", _coef=(b0, b1))

    def bhat(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "quadrature":
            raise DomainError("bhat is only tabulated implicitly; use s or s_prime")
        return self.b0 * z + 0.5 * self.b1 * z * z

    def s_prime(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "quadrature":
            return self._table.derivative()(z)
        return np.exp(-2.0 * self.bhat(z))

    def s(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "constant" or (self.kind == "linear" and self.b1 == 0.0):
            beta = self.b0
            if beta == 0.0:
                return z.copy()
            return -np.expm1(-2.0 * beta * z) / (2.0 * beta)
        if self.kind == "linear" and self.b1 > 0:
            # int_0^z exp(-2 b0 y - b1 y^2) dy by completing the square
            a, b0 = self.b1, self.b0
            r = math.sqrt(a)
            c = b0 / a
            return (math.sqrt(math.pi) / (2 * r)) * math.exp(b0 * c) * (
                special.erf(r * (z + c)) - special.erf(r * c))
        if self.kind == "linear":
            fn = lambda y: math.exp(-2.0 * (self.b0 * y + 0.5 * self.b1 * y * y))
            out = np.vectorize(lambda zz: integrate.quad(fn, 0.0, zz, epsrel=1e-10)[0],
                               otypes=[float])(z)
            return out if out.ndim else float(out)
        if np.any(z > self.z_max) or np.any(z < 0):
            raise DomainError(f"scale table covers [0, {self.z_max}]")
        return self._table(z)

    def s_inv(self, y: float) -> float:
        hi = 1.0
        while self.s(hi) < y:
            hi *= 2.0
            if hi > 1e6:
                raise DomainError("s^-1 out of range")
        return optimize.brentq(lambda z: float(self.s(z)) - y, 0.0, hi, xtol=1e-14, rtol=1e-12)


def gen_diffusion(scale: ScaleSpec, x0: float, grid: TimeGrid, seed, monitor: str = "grid"):
    """Euler path of ``dX = dB + b(X) dt`` absorbed at 0 and
    ``N = s(X) / s(x0)``.

    ``monitor="bridge"`` adds the bridge crossing probability of each step.
    """
    if not x0 > 0:
        raise DomainError("x0 must be > 0")
    _check_monitor(monitor)
    s0 = float(scale.s(x0))
    if s0 == 0.0 or not math.isfinite(s0):
        raise DomainError("s(x0) must be finite and nonzero")
    rng = as_rng(seed)
    dt = grid.step
    xi = rng.standard_normal(grid.n_points - 1)
    if scale.kind in ("constant", "linear"):
        x, stop = _kernels.diffusion_euler(float(x0), dt, xi, scale.b0, scale.b1)
        stop = None if stop < 0 else int(stop)
    else:
        x = np.empty(grid.n_points)
        x[0] = x0
        stop = None
        sq = math.sqrt(dt)
        b = scale.drift_b
        for i in range(grid.n_points - 1):
            nxt = x[i] + sq * xi[i] + b(x[i]) * dt
            if nxt <= 0.0:
                x[i + 1:] = 0.0
                stop = i + 1
                break
            x[i + 1] = nxt
    if monitor == "bridge":
        u = rng.random(grid.n_points - 1)
        j = _bridge_crossed(x[:-1], x[1:], dt, u)
        if j is not None and (stop is None or j + 1 < stop):
            stop = j + 1
            x[stop:] = 0.0
    n = np.asarray(scale.s(x), dtype=float) / s0
    if stop is not None:
        n[stop:] = n[stop]
    return Path(grid, x, stop), Path(grid, n, stop)


# ---------------------------------------------------------------------------
# Poisson exponential martingale


@dataclass(frozen=True)
class PoissonMartingaleSpec:
    rate_c: float
    f: TestFunction = field(default_factory=lambda: TestFunction.constant(1.0))

    def __post_init__(self):
        if not self.rate_c > 0:
            raise DomainError("rate_c must be > 0")

    def compensator(self, t):
        """``c int_0^t (1 - exp(-f(s))) ds``."""
        t = np.asarray(t, dtype=float)
        if self.f.kind == "constant":
            return self.rate_c * -math.expm1(-self.f.params["c"]) * t
        g = lambda s: -math.expm1(-float(self.f(s)))
        out = np.vectorize(lambda tt: integrate.quad(g, 0.0, tt, epsrel=1e-10, limit=200)[0],
                           otypes=[float])(t)
        return self.rate_c * out


def poisson_jump_times(rate: float, horizon: float, rng) -> np.ndarray:
    """Exact jump times on ``(0, horizon]`` from exponential inter-arrivals."""
    out = []
    t = 0.0
    while True:
        t += rng.standard_exponential() / rate
        if t > horizon:
            break
        out.append(t)
    return np.asarray(out)


def gen_poisson_exp_martingale(spec: PoissonMartingaleSpec, grid: TimeGrid, seed):
    """``E_t = exp(-int f dX + c int (1 - e^{-f}) ds)`` for a rate-``c``
    Poisson process ``X``, sampled on the grid.

    Jump times are exact.  ``E.meta`` carries ``jump_times`` and
    ``jump_indices`` (grid index ``i`` whose step ``(t_{i-1}, t_i]`` holds
    a jump).
    """
    rng = as_rng(seed)
    t = grid.times - grid.t0
    jumps = poisson_jump_times(spec.rate_c, float(t[-1]), rng)
    counts = np.searchsorted(jumps, t, side="right")
    fj = np.asarray(spec.f(jumps), dtype=float) if jumps.size else np.zeros(0)
    cum_f = np.concatenate([[0.0], np.cumsum(fj)])[counts]
    log_e = -cum_f + spec.compensator(t)
    e = np.exp(log_e)
    idx = np.unique(np.searchsorted(t, jumps, side="left"))
    meta = {"jump_times": jumps, "jump_indices": idx}
    return Path(grid, e, meta=meta), Path(grid, counts.astype(float))


def poisson_exact_log_sup(spec: PoissonMartingaleSpec, jump_times: np.ndarray, horizon: float) -> float:
    """Supremum over ``[0, horizon]`` of ``log E`` in continuous time.

    With ``f >= 0`` the exponent only jumps down, so the supremum is
    among 0, the left limits at the jumps and the value at ``horizon``.
    """
    jt = np.asarray(jump_times, dtype=float)
    fj = np.asarray(spec.f(jt), dtype=float) if jt.size else np.zeros(0)
    before = np.concatenate([[0.0], np.cumsum(fj)[:-1]]) if jt.size else np.zeros(0)
    left = -before + spec.compensator(jt) if jt.size else np.zeros(0)
    end = -float(np.sum(fj)) + float(spec.compensator(horizon))
    return float(max(0.0, end, left.max() if left.size else 0.0))

"""Objects derived from a positive martingale path N and its running maximum S:
the ratio Z = N/S with its additive (martingale minus increasing) split, the
reverse multiplicative reconstruction, Azema-Yor martingales, the conditional
law of the terminal maximum, and drift compensators under filtration
enlargement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .core_paths import (
    DomainError,
    Path,
    PathLike,
    TimeIndex,
    _same_grid,
    _values,
    _wrap,
    ito_sum,
    running_supremum,
)

EPS_STOP = 1e-3


# ---------------------------------------------------------------------------
# Test functions


class TestFunction:
    """A bounded function on (0, inf) together with the integrals the kernels
    need: the primitive ``F(x) = int_0^x f`` and the tail ``int_x^inf f(y)/y^2 dy``.

    Build one with :meth:`indicator`, :meth:`constant`, :meth:`piecewise_linear`
    or :meth:`generic`.
    """

    __test__ = False  # not a pytest class

    def __init__(self, kind: str, fn: Callable, primitive: Callable | None = None,
                 tail: Callable | None = None, params: dict | None = None):
        self.kind = kind
        self._fn = fn
        self._primitive = primitive
        self._tail = tail
        self.params = params or {}

    def __repr__(self):
        return f"TestFunction({self.kind}, {self.params})"

    # constructors -------------------------------------------------------

    @classmethod
    def indicator(cls, a: float) -> "TestFunction":
        """``f(x) = 1{x > a}``."""
        a = float(a)
        if a < 0:
            raise DomainError("indicator level must be >= 0")
        return cls(
            "indicator",
            lambda x: (np.asarray(x, dtype=float) > a).astype(float),
            primitive=lambda x: np.maximum(np.asarray(x, dtype=float) - a, 0.0),
            tail=lambda x: 1.0 / np.maximum(np.asarray(x, dtype=float), a),
            params={"a": a},
        )

    @classmethod
    def constant(cls, c: float) -> "TestFunction":
        c = float(c)
        return cls(
            "constant",
            lambda x: np.full(np.shape(x), c),
            primitive=lambda x: c * np.asarray(x, dtype=float),
            tail=lambda x: c / np.asarray(x, dtype=float),
            params={"c": c},
        )

    @classmethod
    def piecewise_linear(cls, xs: Sequence[float], ys: Sequence[float]) -> "TestFunction":
        """Linear interpolation through ``(xs, ys)``, constant outside the knots."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 1:
            raise DomainError("knots must be two 1-d arrays of equal length")
        if np.any(np.diff(xs) <= 0) or xs[0] < 0:
            raise DomainError("knot abscissae must be increasing and >= 0")
        # pieces (lo, hi, p, q) with f = p + q*y on [lo, hi)
        edges = np.concatenate([[0.0], xs[xs > 0], [np.inf]])
        edges = np.unique(edges)
        pieces = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if math.isinf(hi) or hi <= xs[0] or lo >= xs[-1]:
                val = ys[0] if hi <= xs[0] else ys[-1]
                pieces.append((lo, hi, float(val), 0.0))
            else:
                f_lo, f_hi = np.interp([lo, hi], xs, ys)
                q = (f_hi - f_lo) / (hi - lo)
                pieces.append((lo, hi, float(f_lo - q * lo), float(q)))

        def fn(x):
            return np.interp(np.asarray(x, dtype=float), xs, ys)

        def primitive(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for lo, hi, p, q in pieces:
                u = np.clip(x, lo, hi) if not math.isinf(hi) else np.maximum(x, lo)
                out += np.where(x > lo, p * (u - lo) + 0.5 * q * (u * u - lo * lo), 0.0)
            return out

        def tail(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for lo, hi, p, q in pieces:
                u = np.maximum(x, lo)
                if math.isinf(hi):
                    out += np.where(True, p / u, 0.0)
                    continue
                term = p * (1.0 / u - 1.0 / hi) + q * np.log(hi / u)
                out += np.where(x < hi, term, 0.0)
            return out

        return cls("piecewise_linear", fn, primitive, tail,
                   params={"xs": xs.tolist(), "ys": ys.tolist()})

    @classmethod
    def generic(cls, fn: Callable[[float], float],
                primitive: Callable | None = None) -> "TestFunction":
        """Arbitrary bounded ``fn``; integrals by adaptive quadrature."""
        return cls("generic", np.vectorize(fn, otypes=[float]), primitive=primitive,
                   params={"fn": getattr(fn, "__name__", "callable")})

    # evaluation ---------------------------------------------------------

    def __call__(self, x):
        return self._fn(x)

    def primitive(self, x):
        """``F(x) = int_0^x f(y) dy``."""
        if self._primitive is not None:
            return self._primitive(x)
        return _vector_quad(lambda u: float(self._fn(u)), 0.0, x)

    def tail(self, x):
        """``int_x^inf f(y) / y^2 dy`` for ``x > 0``."""
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr <= 0):
            raise DomainError("tail integral needs x > 0")
        if self._tail is not None:
            return self._tail(x_arr)

        # u = 1/y maps (x, inf) onto (0, 1/x]
        def one(xv):
            val, err = integrate.quad(lambda u: float(self._fn(1.0 / u)) if u > 0 else
                                      float(self._fn(1e300)), 0.0, 1.0 / xv,
                                      epsabs=0.0, epsrel=1e-8, limit=200)
            if not np.isfinite(val):
                raise FloatingPointError(f"tail integral diverged at x={xv}")
            return val

        out = np.vectorize(one, otypes=[float])(x_arr)
        return out if out.ndim else float(out)


def _vector_quad(fn, lo, x):
    x_arr = np.asarray(x, dtype=float)

    def one(xv):
        val, _ = integrate.quad(fn, lo, xv, epsabs=1e-12, epsrel=1e-8, limit=200)
        return val

    out = np.vectorize(one, otypes=[float])(x_arr)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Ratio / additive decomposition


@dataclass(frozen=True)
class DecomposedPath:
    N: PathLike
    S: PathLike
    Z: PathLike
    M: PathLike
    A: PathLike

    @property
    def residual(self) -> np.ndarray:
        """``Z - (M - A)``: the discretisation gap of the additive split."""
        return _values(self.Z) - (_values(self.M) - _values(self.A))

    def summary(self, eps_stop: float = EPS_STOP) -> dict:
        from .random_times import last_passage

        n, s, m, a = (_values(x) for x in (self.N, self.S, self.M, self.A))
        resolved = bool(n[-1] / s[-1] <= eps_stop)
        return {
            "n_points": int(n.size),
            "N_end": float(n[-1]),
            "S_end": float(s[-1]),
            "Z_end": float(n[-1] / s[-1]),
            "M_end": float(m[-1]),
            "A_end": float(a[-1]),
            "g_index": last_passage(n, s),
            "resolved": resolved,
            "terminal_gap": float(m[-1] - (1.0 + a[-1])),
            "residual_sup": float(np.max(np.abs(self.residual))),
        }


def decompose(N: PathLike) -> DecomposedPath:
    """Split ``N`` into running maximum ``S``, ratio ``Z = N/S`` and the
    additive parts ``M = 1 + int dN/S`` and ``A = log S``.

    ``N`` must be positive, except for a terminal stretch absorbed at 0.  A
    start other than 1 is normalised away by dividing through by ``N[0]``.
    """
    n = _values(N)
    if n.size == 0 or not n[0] > 0:
        raise DomainError("decompose needs N[0] > 0")
    if np.any(n < 0) or not np.all(np.isfinite(n)):
        raise DomainError("decompose needs a finite nonnegative path")
    zero = np.flatnonzero(n == 0.0)
    if zero.size and np.any(n[zero[0]:] != 0.0):
        raise DomainError("N may only reach 0 as a terminal absorption")
    if n[0] != 1.0:
        n = n / n[0]
        N = _wrap(N, n)
    s = np.maximum.accumulate(n)
    z = n / s
    a = np.log(s)
    m = 1.0 + _values(ito_sum(1.0 / s, n))
    return DecomposedPath(N, _wrap(N, s), _wrap(N, z, keep_stop=False),
                          _wrap(N, m, keep_stop=False), _wrap(N, a))


# ---------------------------------------------------------------------------
# Multiplicative reconstruction from Z


def _pushed_increment(x_gap, mean, msq, deterministic):
    """Estimated log-increment of N on a step where Z was pushed back to 1.

    ``x_gap = -log Z`` before the step: the increment must exceed it.  In the
    diffusive regime the increment is taken as the conditional mean of a
    centred normal with second moment ``msq`` given that it exceeds the gap.
    """
    out = np.empty_like(x_gap)
    det = deterministic
    out[det] = np.maximum(mean[det], x_gap[det])
    d = ~det
    sd = np.sqrt(msq[d])
    with np.errstate(divide="ignore", invalid="ignore"):
        k = x_gap[d] / sd
        mills = np.exp(-0.5 * k * k - 0.5 * math.log(2 * math.pi) - special.log_ndtr(-k))
        excess = np.where(sd > 0, sd * (mills - k), 0.0)
    out[d] = x_gap[d] + np.maximum(excess, 0.0)
    return out


def _reconstruct(z: np.ndarray, jumps: np.ndarray, window: int):
    n = z.size
    if n == 0 or z[0] != 1.0:
        raise DomainError("reconstruction needs Z[0] == 1")
    if np.any(z < 0) or np.any(z > 1.0) or not np.all(np.isfinite(z)):
        raise DomainError("reconstruction needs 0 <= Z <= 1")
    zero = np.flatnonzero(z == 0.0)
    end = n
    if zero.size:
        end = int(zero[0])
        if np.any(z[end:] != 0.0):
            raise DomainError("Z may only vanish as a terminal absorption")
    zp = z[:end]
    if zp.size < 2:
        logn = np.zeros(zp.size)
    else:
        step_jump = np.zeros(zp.size - 1, dtype=bool)
        j = jumps[(jumps >= 1) & (jumps < end)]
        step_jump[j - 1] = True
        ratio = np.log(zp[1:]) - np.log(zp[:-1])
        pushed = (zp[1:] == 1.0) & ~step_jump
        ordinary = ~pushed & ~step_jump
        inc = ratio.copy()
        if pushed.any():
            gaps = -np.log(zp[:-1][pushed])
            o_idx = np.flatnonzero(ordinary)
            if o_idx.size == 0:
                inc[pushed] = gaps
            else:
                d = ratio[o_idx]
                w = min(window, o_idx.size)
                pos = np.searchsorted(o_idx, np.flatnonzero(pushed))
                lo = np.clip(pos - w // 2, 0, o_idx.size - w)
                win = d[lo[:, None] + np.arange(w)]
                mean = win.mean(axis=1)
                msq = (win * win).mean(axis=1)
                spread = win.max(axis=1) - win.min(axis=1)
                det = spread <= 1e-7 * np.abs(mean)
                inc[pushed] = _pushed_increment(gaps, mean, msq, det)
        logn = np.concatenate([[0.0], np.cumsum(inc)])
    a = np.maximum.accumulate(logn)
    s = np.exp(a)
    if end < n:
        s = np.concatenate([s, np.full(n - end, s[-1] if s.size else 1.0)])
    return z * s, s


def reconstruct_multiplicative(Z: PathLike, window: int = 32):
    """Recover ``(N, S)`` with ``N/S = Z`` from a continuous ratio path.

    On ordinary steps the log-increment of ``N`` equals that of ``Z``.  On
    steps where ``Z`` returns to 1 the path made a new maximum and the
    increment of ``log S`` is not visible in ``Z``; it is replaced by its
    conditional mean given the local quadratic variation, estimated from the
    ``window`` nearest ordinary steps.  ``log S`` is then the running maximum
    of the accumulated log-increments.
    """
    N, S = _reconstruct(_values(Z), np.zeros(0, dtype=int), window)
    return _wrap(Z, N, keep_stop=False), _wrap(Z, S, keep_stop=False)


def reconstruct_multiplicative_jumps(Z: PathLike, jump_indices, window: int = 32):
    """As :func:`reconstruct_multiplicative` with declared downward jumps.

    ``jump_indices`` are the grid indices ``i`` whose step ``i-1 -> i``
    carries a jump.  Each contributes ``log(1 + dZ/Z_-)``, i.e. the
    continuous-part increment ``dZ/Z_-`` times the product factor
    ``(1 + dZ/Z_-) exp(-dZ/Z_-)``.
    """
    z = _values(Z)
    jumps = np.unique(np.asarray(jump_indices, dtype=int).ravel())
    if jumps.size:
        if jumps.min() < 1 or jumps.max() >= z.size:
            raise DomainError("jump index outside the grid")
        if np.any(z[jumps] > z[jumps - 1]):
            raise DomainError("declared jumps must be downward (dZ <= 0)")
    N, S = _reconstruct(z, jumps, window)
    return _wrap(Z, N, keep_stop=False), _wrap(Z, S, keep_stop=False)


def jump_factor(dz_over_z: float) -> float:
    """``(1 + x) exp(-x)`` for a relative jump ``x = dZ/Z_-``."""
    if dz_over_z > 0:
        raise DomainError("only nonpositive jumps are allowed")
    return (1.0 + dz_over_z) * math.exp(-dz_over_z)


# ---------------------------------------------------------------------------
# Azema-Yor martingales and the conditional law of the terminal maximum


def azema_yor(f: TestFunction, N: PathLike, S: PathLike | None = None):
    """Both sides of ``F(S_t) - f(S_t)(S_t - N_t) = F(S_0) + int_0^t f(S_s) dN_s``.

    Returns ``(X, integral_side)``.
    """
    if S is None:
        S = running_supremum(N)
    _same_grid(N, S)
    n, s = _values(N), _values(S)
    fs = f(s)
    x = f.primitive(s) - fs * (s - n)
    rhs = f.primitive(s[:1])[0] + _values(ito_sum(fs, n))
    return _wrap(N, np.asarray(x, dtype=float), keep_stop=False), _wrap(N, rhs, keep_stop=False)


def h_transform(f: TestFunction, x: float) -> float:
    """``h_f(x) = int_x^inf (f(y) - f(x)) / y^2 dy``."""
    if not x > 0:
        raise DomainError("h_transform needs x > 0")
    return float(f.tail(x) - float(f(x)) / x)


def lambda_dot(f: TestFunction, s: float) -> float:
    """Integral of ``f`` against ``-(1/s) delta_s(dx) + 1{x>s} dx/x^2``."""
    return float(-float(f(s)) / s + f.tail(s))


def conditional_sup_law(f: TestFunction, n: float, s: float) -> float:
    """``E[f(S_inf) | N_t = n, S_t = s] = f(s)(1 - n/s) + n int_s^inf f(x)/x^2 dx``."""
    if n < 0 or not s > 0:
        raise DomainError("conditional_sup_law needs 0 <= n and s > 0")
    if n > s:
        raise DomainError(f"current value n={n} exceeds running maximum s={s}")
    return float(float(f(s)) * (1.0 - n / s) + n * f.tail(s))


def conditional_sup_law_batch(f: TestFunction, n, s) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(n > s) or np.any(n < 0):
        raise DomainError("need 0 <= n <= s")
    return f(s) * (1.0 - n / s) + n * f.tail(s)


def rho_density(x: float, n: float, s: float) -> float:
    """Density of the derivative measure with respect to the conditional law
    of the terminal maximum: ``-1/(s-n)`` on the atom ``x = s``, ``1/n`` above."""
    if not 0 < n <= s:
        raise DomainError("rho_density needs 0 < n <= s")
    if x > s:
        return 1.0 / n
    if x < s:
        return 0.0
    if n == s:
        return 0.0  # the atom carries no mass
    return -1.0 / (s - n)


# ---------------------------------------------------------------------------
# Enlargement compensators and the dual-projection identity


def realized_covariation(X: PathLike, Y: PathLike):
    """Cumulative ``sum_{j<i} (X[j+1]-X[j]) (Y[j+1]-Y[j])``."""
    _same_grid(X, Y)
    dx, dy = np.diff(_values(X)), np.diff(_values(Y))
    out = np.concatenate([[0.0], np.cumsum(dx * dy)])
    return _wrap(X, out, keep_stop=False)


def enlargement_compensator(X: PathLike, N: PathLike, S: PathLike, g: TimeIndex,
                            bracket_XN: PathLike, delta_den: float | None = None):
    """Drift of ``X`` once the terminal maximum of ``N`` is known.

    ``C[i] = sum_{j<i, j<g} d<X,N>_j / N[j] - sum_{j<i, j>=g} d<X,N>_j / (S_end - N[j])``

    so that ``X - C`` is a martingale in the enlarged filtration.  After
    ``g`` the denominator is floored at ``delta_den`` (default ``sqrt(step)``).
    With ``g`` unattained only the pre-``g`` part is used and a warning is
    issued.
    """
    _same_grid(X, N)
    _same_grid(N, bracket_XN)
    n, s = _values(N), _values(S)
    db = np.diff(_values(bracket_XN))
    if delta_den is None:
        if not isinstance(N, Path):
            raise DomainError("delta_den is required for bare arrays")
        delta_den = math.sqrt(N.grid.step)
    idx = np.arange(db.size)
    if g is None:
        warnings.warn("g not attained: compensator restricted to its pre-g part",
                      stacklevel=2)
        pre = np.ones(db.size, dtype=bool)
    else:
        pre = idx < g
    inc = np.zeros(db.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        inc[pre] = db[pre] / n[:-1][pre]
        post = ~pre
        inc[post] = -db[post] / np.maximum(s[-1] - n[:-1][post], delta_den)
    inc[db == 0.0] = 0.0
    out = np.concatenate([[0.0], np.cumsum(inc)])
    return _wrap(X, out, keep_stop=False)


def dual_projection_sides(k, N: PathLike, S: PathLike, g: TimeIndex, times=None):
    """Per-path sides of ``E[k(g)] = E[int k(s) dS_s / S_s]``.

    Returns ``(k(t_g), sum_j k(t_j) (S[j+1]-S[j]) / S[j])``.
    """
    s = _values(S)
    if times is None:
        if not isinstance(N, Path):
            raise DomainError("times are required for bare arrays")
        times = N.times
    times = np.asarray(times, dtype=float)
    if g is None:
        raise DomainError("dual projection needs an attained g")
    kt = np.asarray(k(times), dtype=float) * np.ones_like(times)
    lhs = float(kt[g])
    rhs = float(np.sum(kt[:-1] * np.diff(s) / s[:-1]))
    return lhs, rhs

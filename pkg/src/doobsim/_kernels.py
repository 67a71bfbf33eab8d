"""Compiled per-path samplers for the law-level suites.

Each kernel simulates one path from a numpy ``Generator`` handed in by the
caller and returns a handful of scalars.  Shared tricks:

* Bridge monitoring: the maximum (minimum) of a Brownian step from ``a`` to
  ``b`` over ``dt`` is sampled exactly as
  ``(a + b +- sqrt((b - a)^2 - 2 dt log V)) / 2``, ``V`` uniform, so sup
  and absorption statistics carry no grid bias.
* Scale renewal: a self-similar path is measured in local units that are
  reset to 1 whenever the local value passes ``K``; the real step of the
  next stretch is ``dt * scale^2``.  Relative resolution stays fixed while
  the lifetime of the path can be arbitrarily long.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _bridge_max(a, b, dt, v):
    d = b - a
    return 0.5 * (a + b + math.sqrt(d * d - 2.0 * dt * math.log(1.0 - v)))


@njit(cache=True)
def _bridge_min(a, b, dt, v):
    d = b - a
    return 0.5 * (a + b - math.sqrt(d * d - 2.0 * dt * math.log(1.0 - v)))


#: bisection depth for steps that may set a new maximum (law kernel)
REFINE_DEPTH = 6


@njit(cache=True)
def stopped_bm_law(rng, dt, K, max_steps):
    """Brownian motion from 1 killed at 0, bridge-monitored with renewal.

    A step that can reach the running maximum is bisected with Brownian
    bridge midpoints (down to ``dt / 2**REFINE_DEPTH``) so that the dips of
    ``N/S`` between successive maxima are resolved below the step size;
    elsewhere the bridge maximum and minimum of the whole step are used.

    Returns ``(s_end, g_time, t0_time, r_rho, n_rho, s_rho, rho_time,
    resolved)``: the terminal maximum, the times of the last maximum and of
    absorption, the minimum of ``N/S`` before ``g`` with the values of ``N``
    and ``S`` and the time where it is reached.
    """
    sq = math.sqrt(dt)
    x = 1.0
    s = 1.0
    scale = 1.0
    t = 0.0
    g_t = 0.0
    cur_min = 1.0
    cur_s = 1.0
    cur_t = 0.0
    r_best = np.inf
    s_best = 1.0
    t_best = 0.0
    resolved = False
    dead = False
    st_b = np.empty(REFINE_DEPTH + 2)
    st_d = np.empty(REFINE_DEPTH + 2, dtype=np.int64)
    for _ in range(max_steps):
        b_end = x + sq * rng.standard_normal()
        # depth-first over the pieces of the step, left to right
        a = x
        top = 0
        st_b[0] = b_end
        st_d[0] = 0
        while top >= 0:
            b = st_b[top]
            d = st_d[top]
            h = dt / (1 << d)
            if d < REFINE_DEPTH and (b >= s or (s - a) * (s - b) < 3.0 * h):
                mid = 0.5 * (a + b) + 0.5 * math.sqrt(h) * rng.standard_normal()
                st_b[top] = b
                st_d[top] = d + 1
                top += 1
                st_b[top] = mid
                st_d[top] = d + 1
                continue
            top -= 1
            t += h * scale * scale
            if b <= 0.0:
                dead = True
                break
            m = _bridge_max(a, b, h, rng.random())
            mn = _bridge_min(a, b, h, rng.random())
            if m > s:
                # the stretch before the maximum closes the running excursion
                if mn / s < cur_min:
                    cur_min = max(mn, 0.0) / s
                    cur_t = t
                if cur_min < r_best:
                    r_best = cur_min
                    s_best = cur_s
                    t_best = cur_t
                s = m
                g_t = t
                cur_s = s * scale
                cur_min = b / s
                cur_t = t
            else:
                if mn <= 0.0:
                    dead = True
                    break
                if mn / s < cur_min:
                    cur_min = mn / s
                    cur_t = t
            a = b
        if dead:
            resolved = True
            break
        x = b_end
        if x >= K:
            scale *= x
            s /= x
            x = 1.0
    if r_best == np.inf:
        r_best = 1.0
        s_best = 1.0
    return s * scale, g_t, t, r_best, r_best * s_best, s_best, t_best, resolved


@njit(cache=True)
def bm_state_at(rng, x0, t_end, dt):
    """Bridge-monitored killed BM run to ``t_end``: ``(x, s, absorbed)``."""
    sq = math.sqrt(dt)
    n = int(round(t_end / dt))
    x = x0
    s = x0
    for _ in range(n):
        b = x + sq * rng.standard_normal()
        if b <= 0.0:
            return 0.0, s, True
        m = _bridge_max(x, b, dt, rng.random())
        if m > s:
            s = m
        else:
            if _bridge_min(x, b, dt, rng.random()) <= 0.0:
                return 0.0, s, True
        x = b
    return x, s, False


@njit(cache=True)
def bm_hits_before_zero(rng, x0, level, dt, max_steps):
    """1 if killed BM from ``x0`` exceeds ``level`` before 0, else 0
    (-1 when ``max_steps`` runs out)."""
    sq = math.sqrt(dt)
    x = x0
    for _ in range(max_steps):
        b = x + sq * rng.standard_normal()
        if b <= 0.0:
            return 0
        if b > level:
            return 1
        if _bridge_max(x, b, dt, rng.random()) > level:
            return 1
        if _bridge_min(x, b, dt, rng.random()) <= 0.0:
            return 0
        x = b
    return -1


@njit(cache=True)
def drifted_bm_sup(rng, x0, beta, dt, max_steps):
    """``X = x0 + B + beta t`` killed at 0: ``(sup X, resolved)``."""
    sq = math.sqrt(dt)
    x = x0
    s = x0
    for _ in range(max_steps):
        b = x + sq * rng.standard_normal() + beta * dt
        if b <= 0.0:
            return s, True
        m = _bridge_max(x, b, dt, rng.random())
        if m > s:
            s = m
        elif _bridge_min(x, b, dt, rng.random()) <= 0.0:
            return s, True
        x = b
    return s, False


@njit(cache=True)
def gbm_log_sup(rng, nu, dt, log_eps, max_steps):
    """Supremum of ``W = B - nu t`` until ``2 nu (sup W - W) > -log_eps``."""
    sq = math.sqrt(dt)
    w = 0.0
    s = 0.0
    lim = -log_eps / (2.0 * nu)
    for _ in range(max_steps):
        b = w + sq * rng.standard_normal() - nu * dt
        m = _bridge_max(w, b, dt, rng.random())
        if m > s:
            s = m
        w = b
        if s - w > lim:
            return s, True
    return s, False


@njit(cache=True)
def bessel3_min(rng, dt, K, eps, max_steps):
    """Overall minimum of a 3-d Bessel process from 1.

    The radial step is exact (norm of a 3-d Gaussian step); the minimum
    inside a step uses the Brownian bridge law, drawn only when the step
    comes within reach of the current minimum.  Stops when ``I/R < eps``.
    """
    sq = math.sqrt(dt)
    r = 1.0
    low = 1.0
    scale = 1.0
    for _ in range(max_steps):
        y = r + sq * rng.standard_normal()
        rn = math.sqrt(y * y + 2.0 * dt * rng.standard_exponential())
        if rn < low:
            low = rn
        if (r - low) * (rn - low) < 20.0 * dt:
            mn = _bridge_min(r, rn, dt, rng.random())
            if 0.0 < mn < low:
                low = mn
        r = rn
        if low < eps * r:
            return low * scale, True
        if r >= K:
            scale *= r
            low /= r
            r = 1.0
    return low * scale, False


@njit(cache=True)
def poisson_log_sup(rng, c, fval, log_eps, max_jumps):
    """Supremum of ``log E = -fval X_t + c (1 - exp(-fval)) t``.

    Jumps arrive at rate ``c``; between jumps the exponent grows linearly,
    so the supremum is reached at a left limit before a jump.
    """
    kappa = c * (1.0 - math.exp(-fval))
    y = 0.0
    s = 0.0
    for _ in range(max_jumps):
        y += kappa * rng.standard_exponential() / c
        if y > s:
            s = y
        y -= fval
        if s - y > -log_eps:
            return s, True
    return s, False

_SQ2 = math.sqrt(2.0)
_ISQ2PI = 1.0 / math.sqrt(2.0 * math.pi)
_WIDE = 8.0


@njit(cache=True)
def _gauss_moments(a, b, mu, sig):
    """int_a^b y^k phi_sig(y - mu) dy for k = 0..3."""
    al = (a - mu) / sig
    be = (b - mu) / sig
    pa = _ISQ2PI * math.exp(-0.5 * al * al) if al > -40.0 else 0.0
    pb = _ISQ2PI * math.exp(-0.5 * be * be) if be < 40.0 else 0.0
    j0 = 0.5 * (math.erfc(-be / _SQ2) - math.erfc(-al / _SQ2))
    j1 = pa - pb
    j2 = j0 + (al * pa if al > -40.0 else 0.0) - (be * pb if be < 40.0 else 0.0)
    j3 = ((al * al + 2.0) * pa if al > -40.0 else 0.0) - ((be * be + 2.0) * pb if be < 40.0 else 0.0)
    i0 = j0
    i1 = mu * j0 + sig * j1
    i2 = mu * mu * j0 + 2.0 * mu * sig * j1 + sig * sig * j2
    i3 = (mu ** 3 * j0 + 3.0 * mu * mu * sig * j1 + 3.0 * mu * sig * sig * j2
          + sig ** 3 * j3)
    return i0, i1, i2, i3


@njit(cache=True)
def bes3_mean_step(x, sig):
    """E[R_dt] - x for Bessel(3) from x >= 0, sig = sqrt(dt)."""
    lam = x / sig
    if lam < 1e-6:
        return sig * 2.0 * math.sqrt(2.0 / math.pi) - x
    return sig * (math.sqrt(2.0 / math.pi) * math.exp(-0.5 * lam * lam)
                  + (lam + 1.0 / lam) * math.erf(lam / _SQ2)) - x


@njit(cache=True)
def enl_drift_pre(x, m, sig):
    """One-step conditional mean of dB before the last maximum given S_inf = m."""
    if m - x > _WIDE * sig:
        return bes3_mean_step(x, sig)
    r = 2.0 * m - x
    # paths staying below m: density phi(y - x) - phi(y - r), weight y / m^2
    _, _, a2, _ = _gauss_moments(-1e300, m, x, sig)
    _, _, b2, _ = _gauss_moments(-1e300, m, r, sig)
    stay = (a2 - b2) / (m * m)
    # paths whose step maximum is m: density 2u/sig^2 phi_sig(u), u = r - y
    _, u1, u2, u3 = _gauss_moments(m - x, math.inf, 0.0, sig)
    c = r
    top = (c * (x - m) / m * u1 + (2.0 * c / m - 1.0) * u2 - u3 / m) * 2.0 / (sig * sig)
    return (stay + top) * m * m / x - x


@njit(cache=True)
def enl_drift_post(x, m, sig):
    """One-step conditional mean of dB after the last maximum given S_inf = m."""
    if x > _WIDE * sig:
        return -bes3_mean_step(m - x, sig)
    # killed at 0 and at m: phi(y - x) - phi(y + x) - phi(y - (2m - x)), weight y (m - y)
    num = 0.0
    for sgn, mu in ((1.0, x), (-1.0, -x), (-1.0, 2.0 * m - x)):
        _, i1, i2, _ = _gauss_moments(0.0, m, mu, sig)
        num += sgn * (m * i1 - i2)
    return num / (m - x) - x


@njit(cache=True)
def stopped_bm_composite(rng, dt, K, max_steps, checkpoints, bins_pre, bins_post,
                         acc_pre, acc_post, bx, bdx, bscale, bs, bt):
    """Bridge-monitored killed BM from 1 with renewal, plus the statistics of
    the enlarged-filtration decomposition.

    The path is first written to the work buffers ``bx`` (local value),
    ``bdx`` (local increment), ``bscale``, ``bs`` (local running maximum,
    bridge sampled) and ``bt`` (real time).  Then ``S_inf`` and the step
    holding ``g`` are known and a second pass builds ``B~ = B - C``, where
    each increment of ``C`` is the exact one-step conditional mean of ``dB``
    given ``S_inf`` (see ``enl_drift_pre`` / ``enl_drift_post``).  Its
    continuous limit is

        dC = dt/B before g,   dC = -dt/(S_inf - B) after g.

    Per checkpoint the output holds ``B~``, its realised quadratic variation
    and ``t ^ T0`` at the last grid time not after the checkpoint.  Binned
    drift sums (count, sum v, sum v^2, sum 1/x, sum sqrt(dt)/x^2 with
    ``v = dx/dt`` in local units) are added to ``acc_pre`` / ``acc_post``.

    Returns ``(s_end, g_time, t0, resolved, cp_out, dual)`` where
    ``dual = [1, int dS/S, exp(-t_g), int exp(-t) dS/S]`` (left-point k).
    """
    sq = math.sqrt(dt)
    x = 1.0
    s = 1.0
    scale = 1.0
    t = 0.0
    n = 0
    g = 0
    resolved = False
    for j in range(max_steps):
        b = x + sq * rng.standard_normal()
        bx[j] = x
        bscale[j] = scale
        bs[j] = s
        bt[j] = t
        if b <= 0.0:
            b = 0.0
        else:
            top = _bridge_max(x, b, dt, rng.random())
            if top > s:
                s = top
                g = j + 1
            if _bridge_min(x, b, dt, rng.random()) <= 0.0:
                b = 0.0
        bdx[j] = b - x
        t += dt * scale * scale
        n = j + 1
        x = b
        if x == 0.0:
            resolved = True
            break
        if x >= K:
            scale *= x
            s /= x
            x = 1.0
    bt[n] = t
    bs[n] = s
    bscale[n] = scale
    s_real = s * scale
    t0 = t

    ncp = checkpoints.shape[0]
    cp_out = np.zeros((ncp, 3))
    for k in range(ncp):
        cp_out[k, 2] = -1.0
    bt_val = 1.0
    qv = 0.0
    dual = np.zeros(4)
    dual[0] = 1.0
    k = 0
    edge_cut = 3.0 * sq
    for j in range(n):
        tj = bt[j]
        while k < ncp and tj <= checkpoints[k] < bt[j + 1]:
            cp_out[k, 0] = bt_val
            cp_out[k, 1] = qv
            cp_out[k, 2] = tj
            k += 1
        sc = bscale[j]
        xr = sc * bx[j]
        dxr = sc * bdx[j]
        dtr = dt * sc * sc
        if j < g:
            dc = enl_drift_pre(xr, s_real, math.sqrt(dtr))
        else:
            dc = enl_drift_post(xr, s_real, math.sqrt(dtr))
        dbt = dxr - dc
        bt_val += dbt
        qv += dbt * dbt
        # dS/S over the step, in real units (scale-free ratio)
        s_loc = bs[j]
        s_next = bs[j + 1] * bscale[j + 1] / sc
        ds = math.log(s_next / s_loc)  # exact dS/S for a continuous S
        dual[1] += ds
        dual[3] += math.exp(-tj) * ds
        v = bdx[j] / dt
        if j < g:
            st = bx[j]
            i = np.searchsorted(bins_pre, st, side="right") - 1
            if 0 <= i < bins_pre.shape[0] - 1:
                acc_pre[i, 0] += 1.0
                acc_pre[i, 1] += v
                acc_pre[i, 2] += v * v
                acc_pre[i, 3] += 1.0 / st
                acc_pre[i, 4] += sq / (st * st)
        elif bx[j] >= edge_cut:
            st = s_real / sc - bx[j]
            i = np.searchsorted(bins_post, st, side="right") - 1
            if 0 <= i < bins_post.shape[0] - 1:
                vv = -v
                acc_post[i, 0] += 1.0
                acc_post[i, 1] += vv
                acc_post[i, 2] += vv * vv
                acc_post[i, 3] += 1.0 / st
                acc_post[i, 4] += sq / (st * st)
    while k < ncp:
        cp_out[k, 0] = bt_val
        cp_out[k, 1] = qv
        cp_out[k, 2] = t0 if checkpoints[k] >= t0 else bt[n]
        k += 1
    dual[2] = math.exp(-bt[g - 1]) if g > 0 else 1.0
    return s_real, bt[g], t0, resolved, cp_out, dual


@njit(cache=True)
def bessel3_euler(x0, dt, xi):
    """Euler scheme for ``dR = dbeta + dt/R`` with the drift floored at
    ``sqrt(dt)`` and negative proposals reflected."""
    n = xi.shape[0] + 1
    out = np.empty(n)
    out[0] = x0
    sq = math.sqrt(dt)
    r = x0
    for i in range(n - 1):
        r = r + sq * xi[i] + dt / max(r, sq)
        if r < 0.0:
            r = -r
        out[i + 1] = r
    return out


@njit(cache=True)
def diffusion_euler(x0, dt, xi, b0, b1):
    """Euler scheme for ``dX = dB + (b0 + b1 X) dt`` absorbed at 0.

    Returns the path and the absorption index (-1 if none).
    """
    n = xi.shape[0] + 1
    out = np.empty(n)
    out[0] = x0
    sq = math.sqrt(dt)
    x = x0
    stop = -1
    for i in range(n - 1):
        if stop >= 0:
            out[i + 1] = 0.0
            continue
        x = x + sq * xi[i] + (b0 + b1 * x) * dt
        if x <= 0.0:
            x = 0.0
            stop = i + 1
        out[i + 1] = x
    return out, stop

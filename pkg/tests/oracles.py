"""Independent reference computations used by the tests.

Nothing here imports from :mod:`trihybrid`; each routine recomputes its
quantity by a different route (scalar loops, extended precision, grid
search, power iteration).
"""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np


def rx_steering_loop(theta, phi, n_rx, k0, d):
    return np.array([cmath.exp(1j * i * k0 * d * math.sin(theta) * math.cos(phi)) / math.sqrt(n_rx)
                     for i in range(n_rx)])


def upa_steering_loop(theta, phi, n_x, n_y, k0, dx, dy):
    n = n_x * n_y
    out = np.zeros(n, dtype=complex)
    for iy in range(n_y):
        for ix in range(n_x):
            out[iy * n_x + ix] = (cmath.exp(1j * ix * k0 * dx * math.sin(theta) * math.cos(phi))
                                  * cmath.exp(1j * iy * k0 * dy * math.sin(theta) * math.sin(phi))
                                  / math.sqrt(n))
    return out


def raised_cosine_mp(t, ts, beta, dps=50):
    """Raised cosine in extended precision; singular points approached numerically."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(t) / mpmath.mpf(ts)
        beta = mpmath.mpf(beta)

        def f(x):
            if x == 0:
                return mpmath.mpf(1)
            return (mpmath.sin(mpmath.pi * x) / (mpmath.pi * x) * mpmath.cos(mpmath.pi * beta * x)
                    / (1 - (2 * beta * x) ** 2))

        if beta != 0 and abs(abs(2 * beta * x) - 1) < mpmath.mpf(10) ** (-30):
            eps = mpmath.mpf(10) ** (-(dps // 2))
            return (f(x + eps) + f(x - eps)) / 2
        return f(x)


def pulse_response_mp(tau, ts, beta, n_taps, n_sub, k, dps=50):
    with mpmath.workdps(dps):
        total = mpmath.mpc(0)
        for d in range(n_taps):
            p = raised_cosine_mp(d * ts - tau, ts, beta, dps)
            total += p * mpmath.exp(-2j * mpmath.pi * k * d / n_sub)
        return complex(total)


def channel_loop(paths, n_rx, n_x, n_y, k0, dr, dx, dy, ts, beta, n_taps, n_sub):
    """H[k] by explicit accumulation of outer products, one entry at a time."""
    n_tx = n_x * n_y
    n_paths = len(paths)
    h = np.zeros((n_sub, n_rx, n_tx), dtype=complex)
    for k in range(n_sub):
        for p in paths:
            omega = pulse_response_mp(p["delay"], ts, beta, n_taps, n_sub, k, dps=30)
            ar = rx_steering_loop(p["aoa_el"], p["aoa_az"], n_rx, k0, dr)
            at = upa_steering_loop(p["aod_el"], p["aod_az"], n_x, n_y, k0, dx, dy)
            for r in range(n_rx):
                for t in range(n_tx):
                    h[k, r, t] += p["gain"] * omega * ar[r] * at[t].conjugate()
    return h * math.sqrt(n_tx * n_rx / n_paths)


def gram_loop(h_stack, cols):
    k_count = len(h_stack)
    n = len(cols)
    r = np.zeros((n, n), dtype=complex)
    for h in h_stack:
        for i, ci in enumerate(cols):
            for j, cj in enumerate(cols):
                acc = 0j
                for row in range(h.shape[0]):
                    acc += h[row, ci].conjugate() * h[row, cj]
                r[i, j] += acc
    return r / k_count


def power_iteration(m, tol=1e-13, max_iter=200_000, seed=0):
    """Dominant eigenpair of a Hermitian PSD matrix."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m.shape[0]) + 1j * rng.standard_normal(m.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = m @ x
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return 0.0, x
        y /= nrm
        new_lam = float(np.real(np.vdot(y, m @ y)))
        # align phase so convergence can be measured on the vector itself
        y *= np.exp(-1j * np.angle(np.vdot(x, y)))
        if np.linalg.norm(y - x) < tol and abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            return new_lam, y
        x, lam = y, new_lam
    return lam, x


def deflated_eigenvectors(m, n):
    vecs = []
    work = m.copy()
    for _ in range(n):
        lam, v = power_iteration(work)
        vecs.append(v)
        work = work - lam * np.outer(v, v.conj())
    return vecs


def first_entry_real_positive(v):
    for z in v:
        if abs(z) > 1e-12 * max(abs(w) for w in v):
            return v * (z.conjugate() / abs(z))
    return v


def wf_objective(gains, powers):
    return sum(math.log2(1.0 + g * p) for g, p in zip(gains, powers))


def grid_waterfill_2(gains, total, n_points=1_000_001):
    """Dense grid over the one-dimensional simplex for two gains."""
    g1, g2 = gains
    p1 = np.linspace(0.0, total, n_points)
    obj = np.log2(1.0 + g1 * p1) + np.log2(1.0 + g2 * (total - p1))
    i = int(np.argmax(obj))
    return float(obj[i]), np.array([p1[i], total - p1[i]])


def _pair_grid(gi, gj, pi, pj, n_grid=401, levels=8):
    # gain relative to the current split, written so tiny moves stay resolvable
    a = gi / (1.0 + gi * pi)
    b = gj / (1.0 + gj * pj)
    lo, hi = -pi, pj
    best_t, best_f = 0.0, 0.0
    for _ in range(levels):
        t = np.linspace(lo, hi, n_grid)
        with np.errstate(divide="ignore"):
            f = np.log1p(np.maximum(a * t, -1.0)) + np.log1p(np.maximum(-b * t, -1.0))
        k = int(np.argmax(f))
        if f[k] > best_f:
            best_t, best_f = float(t[k]), float(f[k])
        step = (hi - lo) / (n_grid - 1)
        lo, hi = max(best_t - step, -pi), min(best_t + step, pj)
    return best_t


def grid_waterfill(gains, total, max_iter=5000, gap_tol=1e-10):
    """Maximize sum(log2(1 + g p)) over the power simplex by pairwise grid search.

    Starting from equal powers, the pair with the largest marginal-gain gap
    is re-split by a zooming grid search until every pair is balanced. For
    a separable concave objective, pairwise optimality is global optimality.
    """
    g = np.asarray(gains, dtype=float)
    n = g.size
    if n == 2:
        return grid_waterfill_2(g, total)
    p = np.full(n, total / n)
    for _ in range(max_iter):
        marg = g / (1.0 + g * p)
        i = int(np.argmax(marg))
        donors = np.flatnonzero(p > 0)
        j = int(donors[np.argmin(marg[donors])])
        if marg[i] - marg[j] <= gap_tol * marg[i] or i == j:
            break
        t = _pair_grid(g[i], g[j], p[i], p[j])
        p[i] = max(p[i] + t, 0.0)
        p[j] = max(p[j] - t, 0.0)
        if p[j] < 1e-15 * total:
            p[i] += p[j]
            p[j] = 0.0
    return wf_objective(g, p), p


def det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

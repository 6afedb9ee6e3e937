"""Independent reference computations for the test-suite.

Nothing here imports the package: dispersion and Tamm residuals are
re-derived with mpmath, transfer matrices by direct ODE integration.
"""

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

mp.mp.dps = 40


def mp_rhs(E, m0, V0, a):
    E = mp.mpf(E)
    k = mp.sqrt(E ** 2 - mp.mpf(m0) ** 2)
    if k == 0:
        return mp.cos(V0) + E * a * mp.sin(V0)
    return mp.re(mp.cos(V0) * mp.cos(k * a) + E / k * mp.sin(V0) * mp.sin(k * a))


def mp_nonrel_rhs(E, m0, V0, a):
    E = mp.mpf(E)
    k = mp.sqrt(E ** 2 - mp.mpf(m0) ** 2)
    return mp.re(mp.cos(k * a) + m0 * V0 / k * mp.sin(k * a))


def mp_tamm(E, m0, V0, a, V1):
    E = mp.mpf(E)
    k = mp.sqrt(E ** 2 - mp.mpf(m0) ** 2)
    K = mp.sqrt(mp.mpf(m0) ** 2 - (E - V1) ** 2)
    return k * mp.cot(k * a) - V1 * mp.cot(V0) + K


def mp_bisect(fn, lo, hi, iters=120):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    f_lo = fn(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        f_mid = fn(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return (lo + hi) / 2


def brute_band_edges(m0, V0, a, window, n=200_001):
    """Edges of |rhs| = 1 from a dense float scan refined in mpmath."""
    E = np.linspace(window[0], window[1], n)
    k = np.sqrt((E * E - m0 * m0).astype(complex))
    k = np.where(np.abs(k) < 1e-14, 1e-14, k)
    r = (np.cos(V0) * np.cos(k * a) + E / k * np.sin(V0) * np.sin(k * a)).real
    allowed = np.abs(r) <= 1
    edges = []
    for i in np.nonzero(allowed[1:] != allowed[:-1])[0]:
        g = lambda x: abs(mp_rhs(x, m0, V0, a)) - 1
        edges.append(float(mp_bisect(g, E[i], E[i + 1])))
    return edges


def brute_tamm_roots(m0, V0, a, V1, n=1_000_000):
    """Roots of the Tamm residual from an n-point scan, poles rejected by size."""
    eps = 1e-9
    E = np.linspace(m0 + eps, m0 + V1 - eps, n)
    k = np.sqrt(E * E - m0 * m0)
    K = np.sqrt(m0 * m0 - (E - V1) ** 2)
    f = k / np.tan(k * a) - V1 / np.tan(V0) + K
    roots = []
    for i in np.nonzero(np.signbit(f[1:]) != np.signbit(f[:-1]))[0]:
        # a pole flips sign through a huge jump; a root through a small one
        if abs(f[i]) + abs(f[i + 1]) > 1.0:
            continue
        root = float(mp_bisect(lambda x: mp_tamm(x, m0, V0, a, V1), E[i], E[i + 1]))
        Kr = np.sqrt(m0 * m0 - (root - V1) ** 2)
        valid = root - V1 - Kr / np.tan(V0) > 0
        gap = abs(float(mp_rhs(root, m0, V0, a))) > 1
        roots.append((root, bool(valid), bool(gap)))
    return roots


def ode_segment_matrix(kappa, slope, length, E, rtol=1e-13, atol=1e-14):
    """Propagate the stationary coupled-mode equations numerically.

    Columns are the images of (1, 0) and (0, 1).
    """
    d = E - slope / 2

    def rhs(x, y):
        p1 = y[0] + 1j * y[1]
        p2 = y[2] + 1j * y[3]
        dp1 = 1j * d * p1 + 1j * kappa * p2
        dp2 = -1j * kappa * p1 - 1j * d * p2
        return [dp1.real, dp1.imag, dp2.real, dp2.imag]

    cols = []
    for y0 in ([1, 0, 0, 0], [0, 0, 1, 0]):
        sol = solve_ivp(rhs, (0.0, length), y0, method="DOP853", rtol=rtol, atol=atol)
        y = sol.y[:, -1]
        cols.append([y[0] + 1j * y[1], y[2] + 1j * y[3]])
    return np.array(cols).T

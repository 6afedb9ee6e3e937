"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba kernels are used when numba imports and the environment variable
``DIRACFBG_DISABLE_NUMBA`` is unset (or ``0``). Both paths are always importable
under explicit names so they can be compared against each other.

Element encoding for grating kernels (one row per element, propagation order):
``kind`` 0 = uniform segment (``kappa``, ``slope``, ``length`` used),
``kind`` 1 = phase slip (``dphi`` used).
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "HAVE_NUMBA",
    "backend_name",
    "transfer_matrices",
    "dispersion_rhs_real",
    "nonrel_rhs_real",
    "tamm_residual_real",
    "numpy_transfer_matrices",
    "numpy_dispersion_rhs_real",
    "numpy_nonrel_rhs_real",
    "numpy_tamm_residual_real",
]

SEGMENT = 0
SLIP = 1

# |gamma*L| below this switches sinh(x)/x, cosh(x) to their Taylor series
_SERIES_EPS = 1e-4

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DIRACFBG_DISABLE_NUMBA", "0") in ("", "0")


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy implementations (vectorized over energies)
# ---------------------------------------------------------------------------


def _np_cs(q, L):
    """cosh/cos(g L) and sinh/sin(g L)/g for g**2 = q, vectorized over q."""
    g = np.sqrt(np.abs(q))
    x = g * L
    pos = q >= 0
    small = x < _SERIES_EPS
    x2 = np.where(pos, 1.0, -1.0) * x * x
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        c = np.where(pos, np.cosh(x), np.cos(x))
        s = np.where(pos, np.sinh(x), np.sin(x)) / np.where(small, 1.0, g)
    c = np.where(small, 1.0 + x2 / 2 + x2 * x2 / 24, c)
    s = np.where(small, L * (1.0 + x2 / 6 + x2 * x2 / 120), s)
    return c, s


def numpy_transfer_matrices(kind, kappa, slope, length, dphi, energies):
    """Total 2x2 transfer matrix at every energy, shape ``(n, 2, 2)``.

    Overflowing products become inf/nan silently, as on the numba path;
    callers flag non-finite matrices.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _numpy_transfer_matrices(kind, kappa, slope, length, dphi, energies)


def _numpy_transfer_matrices(kind, kappa, slope, length, dphi, energies):
    E = np.asarray(energies, dtype=float)
    m11 = np.ones(E.shape, dtype=complex)
    m12 = np.zeros(E.shape, dtype=complex)
    m21 = np.zeros(E.shape, dtype=complex)
    m22 = np.ones(E.shape, dtype=complex)
    for j in range(len(kind)):
        if kind[j] == SEGMENT:
            k = kappa[j]
            d = E - 0.5 * slope[j]
            c, s = _np_cs(k * k - d * d, length[j])
            a11 = c + 1j * d * s
            a12 = 1j * k * s
            a21 = -a12
            a22 = c - 1j * d * s
            m11, m12, m21, m22 = (
                a11 * m11 + a12 * m21,
                a11 * m12 + a12 * m22,
                a21 * m11 + a22 * m21,
                a21 * m12 + a22 * m22,
            )
        else:
            p = np.exp(-0.5j * dphi[j])
            m11 = p * m11
            m12 = p * m12
            m21 = m21 / p
            m22 = m22 / p
    out = np.empty(E.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = m11
    out[..., 0, 1] = m12
    out[..., 1, 0] = m21
    out[..., 1, 1] = m22
    return out


def _np_free_cs(E, m0, a):
    """cos(kappa a) and sin(kappa a)/kappa continued through the mass gap."""
    return _np_cs(m0 * m0 - E * E, a)


def numpy_dispersion_rhs_real(E, m0, V0, a):
    E = np.asarray(E, dtype=float)
    c, s = _np_free_cs(E, m0, a)
    return math.cos(V0) * c + E * math.sin(V0) * s


def numpy_nonrel_rhs_real(E, m0, V0, a):
    E = np.asarray(E, dtype=float)
    c, s = _np_free_cs(E, m0, a)
    return c + m0 * V0 * s


def numpy_tamm_residual_real(E, m0, V0, a, V1):
    E = np.asarray(E, dtype=float)
    c, s = _np_free_cs(E, m0, a)
    # kappa*cot(kappa*a) = cos(kappa a) / (sin(kappa a)/kappa)
    with np.errstate(divide="ignore", invalid="ignore"):
        kcot = c / s
    K = np.sqrt(np.maximum(m0 * m0 - (E - V1) ** 2, 0.0))
    return kcot - V1 * math.cos(V0) / math.sin(V0) + K


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _nb_cs(q, L):
        g = math.sqrt(abs(q))
        x = g * L
        if x < _SERIES_EPS:
            x2 = x * x if q >= 0 else -x * x
            return 1.0 + x2 / 2 + x2 * x2 / 24, L * (1.0 + x2 / 6 + x2 * x2 / 120)
        if q >= 0:
            return math.cosh(x), math.sinh(x) / g
        return math.cos(x), math.sin(x) / g

    @numba.njit(cache=True)
    def numba_transfer_matrices(kind, kappa, slope, length, dphi, energies):
        n = energies.shape[0]
        out = np.empty((n, 2, 2), dtype=np.complex128)
        nel = kind.shape[0]
        for i in range(n):
            E = energies[i]
            m11 = 1.0 + 0j
            m12 = 0j
            m21 = 0j
            m22 = 1.0 + 0j
            for j in range(nel):
                if kind[j] == 0:
                    k = kappa[j]
                    d = E - 0.5 * slope[j]
                    c, s = _nb_cs(k * k - d * d, length[j])
                    a11 = complex(c, d * s)
                    a12 = complex(0.0, k * s)
                    a22 = complex(c, -d * s)
                    t11 = a11 * m11 + a12 * m21
                    t12 = a11 * m12 + a12 * m22
                    t21 = -a12 * m11 + a22 * m21
                    t22 = -a12 * m12 + a22 * m22
                    m11, m12, m21, m22 = t11, t12, t21, t22
                else:
                    h = -0.5 * dphi[j]
                    p = complex(math.cos(h), math.sin(h))
                    pc = p.conjugate()
                    m11 = p * m11
                    m12 = p * m12
                    m21 = pc * m21
                    m22 = pc * m22
            out[i, 0, 0] = m11
            out[i, 0, 1] = m12
            out[i, 1, 0] = m21
            out[i, 1, 1] = m22
        return out

    @numba.njit(cache=True)
    def numba_dispersion_rhs_real(E, m0, V0, a):
        out = np.empty(E.shape[0])
        cv = math.cos(V0)
        sv = math.sin(V0)
        for i in range(E.shape[0]):
            c, s = _nb_cs(m0 * m0 - E[i] * E[i], a)
            out[i] = cv * c + E[i] * sv * s
        return out

    @numba.njit(cache=True)
    def numba_nonrel_rhs_real(E, m0, V0, a):
        out = np.empty(E.shape[0])
        for i in range(E.shape[0]):
            c, s = _nb_cs(m0 * m0 - E[i] * E[i], a)
            out[i] = c + m0 * V0 * s
        return out

    @numba.njit(cache=True)
    def numba_tamm_residual_real(E, m0, V0, a, V1):
        out = np.empty(E.shape[0])
        shift = V1 * math.cos(V0) / math.sin(V0)
        for i in range(E.shape[0]):
            c, s = _nb_cs(m0 * m0 - E[i] * E[i], a)
            w = m0 * m0 - (E[i] - V1) ** 2
            K = math.sqrt(w) if w > 0 else 0.0
            out[i] = (c / s if s != 0.0 else math.copysign(math.inf, c)) - shift + K
        return out


def _as_1d(E):
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(E, dtype=float)))
    return arr


def _wrap_scalar(fn):
    def wrapped(E, *args):
        scalar = np.ndim(E) == 0
        out = fn(_as_1d(E).ravel(), *(float(x) for x in args))
        if scalar:
            return float(out[0])
        return out.reshape(np.shape(E))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _pick(nb_name, np_fn):
    if USE_NUMBA:
        return _wrap_scalar(globals()[nb_name])
    return _wrap_scalar(np_fn)


dispersion_rhs_real = _pick("numba_dispersion_rhs_real", numpy_dispersion_rhs_real)
nonrel_rhs_real = _pick("numba_nonrel_rhs_real", numpy_nonrel_rhs_real)
tamm_residual_real = _pick("numba_tamm_residual_real", numpy_tamm_residual_real)


def transfer_matrices(kind, kappa, slope, length, dphi, energies):
    """Dispatch to the active backend; returns ``(n, 2, 2)`` complex."""
    E = _as_1d(energies)
    if USE_NUMBA:
        return numba_transfer_matrices(
            np.ascontiguousarray(kind, dtype=np.int8),
            np.ascontiguousarray(kappa, dtype=float),
            np.ascontiguousarray(slope, dtype=float),
            np.ascontiguousarray(length, dtype=float),
            np.ascontiguousarray(dphi, dtype=float),
            E,
        )
    return numpy_transfer_matrices(kind, kappa, slope, length, dphi, E)

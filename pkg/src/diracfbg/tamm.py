"""Relativistic Tamm surface states of the semi-infinite lattice.

The x < 0 region carries a constant potential ``V1`` and the lattice of delta
barriers occupies x > 0 (barriers at n*a, n >= 1). For ``0 < V1 < m0`` surface
states sit at energies ``m0 < E < m0 + V1`` solving

    kappa cot(kappa a) = V1 cot(V0) - K,      K = sqrt(m0**2 - (E - V1)**2),

subject to ``E - V1 - K cot(V0) > 0`` and to ``E`` lying in a lattice gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import _accel
from .bands import in_gap
from .core import CotangentPole, DegenerateBarrier, DiracFBGError, DiracParams

__all__ = ["TammState", "tamm_residual", "tamm_decay", "tamm_validity", "find_tamm_states"]

ENDPOINT_MARGIN = 1e-9
POLE_MARGIN = 1e-9
DEFAULT_SCAN = 100_000


@dataclass(frozen=True)
class TammState:
    E0: float
    K: float
    kappa: float
    residual: float


def _cot_V0(p: DiracParams) -> float:
    s = math.sin(p.V0)
    if abs(s) < 1e-12:
        raise DegenerateBarrier(f"V0 degenerate: sin(V0) = {s:.3g}, cot(V0) undefined")
    return math.cos(p.V0) / s


def tamm_decay(E: float, p: DiracParams) -> float:
    """Decay constant ``K`` of the surface state into the x < 0 region."""
    w = p.m0 ** 2 - (E - p.V1) ** 2
    return math.sqrt(w) if w > 0 else 0.0


def tamm_validity(E: float, p: DiracParams) -> float:
    """``E - V1 - K cot(V0)``; must be positive for a physical state."""
    return E - p.V1 - tamm_decay(E, p) * _cot_V0(p)


def tamm_residual(E: float, p: DiracParams) -> float:
    """``f(E) = kappa cot(kappa a) - V1 cot(V0) + K``.

    Raises :class:`CotangentPole` within ``1e-9`` of ``kappa a = n pi`` and
    :class:`DegenerateBarrier` when ``sin(V0)`` vanishes.
    """
    p.require_tamm()
    cot_v0 = _cot_V0(p)
    E = float(E)
    if not p.m0 < E < p.m0 + p.V1:
        raise DiracFBGError(f"E={E} outside the surface-state interval ({p.m0}, {p.m0 + p.V1})")
    k = math.sqrt(E * E - p.m0 * p.m0)
    ka = k * p.a
    n = round(ka / math.pi)
    if n >= 1 and abs(ka - n * math.pi) < POLE_MARGIN:
        raise CotangentPole(f"cotangent pole: kappa*a = {ka!r} is within {POLE_MARGIN} of {n}*pi")
    kcot = 1.0 / p.a if ka < 1e-8 else k * math.cos(ka) / math.sin(ka)
    return kcot - p.V1 * cot_v0 + tamm_decay(E, p)


def _sub_intervals(p: DiracParams):
    lo = p.m0 + ENDPOINT_MARGIN
    hi = p.m0 + p.V1 - ENDPOINT_MARGIN
    if not lo < hi:
        return []
    cuts = [lo]
    n = 1
    while True:
        E_pole = math.sqrt((n * math.pi / p.a) ** 2 + p.m0 ** 2)
        if E_pole >= hi:
            break
        if E_pole > lo:
            # d(kappa a) = a**2 E dE / (n pi) at the pole
            dE = 10 * POLE_MARGIN * n * math.pi / (p.a ** 2 * E_pole)
            cuts.extend([E_pole - dE, E_pole + dE])
        n += 1
    cuts.append(hi)
    return [(cuts[i], cuts[i + 1]) for i in range(0, len(cuts), 2) if cuts[i] < cuts[i + 1]]


def _f(E, p):
    return _accel.tamm_residual_real(E, p.m0, p.V0, p.a, p.V1)


def _bisect_root(lo, hi, p, tol):
    f_lo = _f(lo, p)
    f_hi = _f(hi, p)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = _f(mid, p)
        if abs(f_mid) <= tol and hi - lo <= tol:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo if abs(f_lo) <= abs(f_hi) else hi


def find_tamm_states(p: DiracParams, tolerance: float = 1e-10, scan_points: int = DEFAULT_SCAN) -> List[TammState]:
    """All surface states of ``p`` in ``(m0, m0 + V1)``, sorted by energy.

    The interval is split at every cotangent pole so that each remaining sign
    change of the residual brackets a genuine root; roots are bisected to
    ``|f| <= tolerance`` and then filtered by the validity constraint and by
    gap membership.
    """
    if tolerance <= 0:
        raise DiracFBGError("tolerance must be > 0")
    if p.V1 is None:
        raise DiracFBGError("V1 is required for Tamm problems")
    if p.V1 <= 0:
        return []
    p.require_tamm()
    _cot_V0(p)

    states = []
    for lo, hi in _sub_intervals(p):
        grid = np.linspace(lo, hi, scan_points)
        f = _f(grid, p)
        sign = np.signbit(f)
        for i in np.nonzero(sign[1:] != sign[:-1])[0]:
            E0 = float(_bisect_root(grid[i], grid[i + 1], p, tolerance))
            if tamm_validity(E0, p) <= 0 or not in_gap(E0, p):
                continue
            k = math.sqrt(E0 * E0 - p.m0 * p.m0)
            states.append(TammState(E0=E0, K=tamm_decay(E0, p), kappa=k, residual=abs(tamm_residual(E0, p))))
    return sorted(states, key=lambda s: s.E0)

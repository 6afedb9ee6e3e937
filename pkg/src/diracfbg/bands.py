"""Band structure of the infinite Dirac-Kronig-Penney lattice.

The dispersion relation is ``cos(q a) = rhs(E)`` with

    rhs(E) = cos(V0) cos(kappa a) + (E / kappa) sin(V0) sin(kappa a),
    kappa  = sqrt(E**2 - m0**2).

Energies with ``|rhs| <= 1`` are allowed; the rest are gaps. The Bloch
momentum is only fixed up to sign; we report the representative in
``[0, pi/a]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _accel
from .core import DiracFBGError, DiracParams, ResolutionTooCoarse, kappa_of

__all__ = [
    "BandStructure",
    "dispersion_rhs",
    "nonrel_dispersion_rhs",
    "bloch_momentum",
    "find_bands",
    "default_scan_points",
    "in_gap",
]

# classification slack: |rhs| <= 1 + BAND_SLACK counts as allowed, so that
# exact band touchings (e.g. V0 = n*pi) are not split by rounding noise
BAND_SLACK = 1e-12
_IMAG_TOL = 1e-10


def dispersion_rhs(E, p: DiracParams):
    """Right-hand side of the relativistic dispersion relation.

    Evaluated on the complex kappa branch of :func:`~diracfbg.core.kappa_of`
    so the mass-gap continuation (cos -> cosh, sin/kappa -> sinh/|kappa|)
    comes out automatically. The imaginary residue is checked and dropped.
    At ``kappa = 0`` the limit ``cos(V0) + E a sin(V0)`` is used.
    """
    E_arr = np.asarray(E, dtype=float)
    k = np.atleast_1d(kappa_of(E_arr, p.m0))
    ka = k * p.a
    small = np.abs(ka) < 1e-8
    k_safe = np.where(small, 1.0, k)
    with np.errstate(invalid="ignore", over="ignore"):
        sinc_a = np.where(small, p.a * (1 - ka * ka / 6), np.sin(ka) / k_safe)
        cos_ka = np.where(small, 1 - ka * ka / 2, np.cos(ka))
    Ef = np.atleast_1d(E_arr)
    val = math.cos(p.V0) * cos_ka + Ef * math.sin(p.V0) * sinc_a
    scale = np.maximum(1.0, np.abs(val.real))
    if np.any(np.abs(val.imag) > _IMAG_TOL * scale):
        raise ArithmeticError("dispersion rhs has a non-negligible imaginary part")
    out = val.real
    if E_arr.ndim == 0:
        return float(out[0])
    return out.reshape(E_arr.shape)


def nonrel_dispersion_rhs(E, p: DiracParams):
    """Non-relativistic Kronig-Penney right-hand side ``cos(ka) + (m0 V0/k) sin(ka)``.

    Meaningful for ``E > m0`` close to ``m0`` and small ``V0``.
    """
    return _accel.nonrel_rhs_real(E, p.m0, p.V0, p.a)


def bloch_momentum(E: float, p: DiracParams) -> Optional[float]:
    """Bloch momentum in ``[0, pi/a]`` or ``None`` inside a gap."""
    r = dispersion_rhs(float(E), p)
    if abs(r) > 1 + BAND_SLACK:
        return None
    return math.acos(min(1.0, max(-1.0, r))) / p.a


def in_gap(E, p: DiracParams):
    """True where ``|rhs(E)| > 1``."""
    return np.abs(_accel.dispersion_rhs_real(E, p.m0, p.V0, p.a)) > 1 + BAND_SLACK


@dataclass(frozen=True)
class BandStructure:
    """Allowed-energy intervals found inside ``search_window``.

    ``clipped`` marks interval ends that coincide with the search window
    rather than a genuine band edge (one ``(lo, hi)`` flag pair per band).
    """

    bands: Tuple[Tuple[float, float], ...]
    params: DiracParams
    search_window: Tuple[float, float]
    edge_tolerance: float
    clipped: Tuple[Tuple[bool, bool], ...] = field(default=())

    @property
    def edges(self) -> List[float]:
        """Genuine band edges (window clipping excluded), ascending."""
        out = []
        for (lo, hi), (clo, chi) in zip(self.bands, self.clipped):
            if not clo:
                out.append(lo)
            if not chi:
                out.append(hi)
        return out

    @property
    def gaps(self) -> List[Tuple[float, float]]:
        """Complement of the bands inside the search window."""
        lo_w, hi_w = self.search_window
        out = []
        cur = lo_w
        for lo, hi in self.bands:
            if lo > cur:
                out.append((cur, lo))
            cur = hi
        if cur < hi_w:
            out.append((cur, hi_w))
        return out

    def contains(self, E: float) -> bool:
        return any(lo <= E <= hi for lo, hi in self.bands)

    def q(self, E: float) -> Optional[float]:
        """Bloch momentum map q(E); ``None`` in gaps."""
        return bloch_momentum(E, self.params)


def default_scan_points(window: Tuple[float, float]) -> int:
    """20000 points per unit window of 12, never fewer than 100."""
    width = window[1] - window[0]
    return max(100, int(math.ceil(20000 * width / 12.0)))


def _g(E, p):
    return abs(_accel.dispersion_rhs_real(E, p.m0, p.V0, p.a)) - 1.0


def _bisect_edge(lo: float, hi: float, p: DiracParams, tol: float) -> float:
    """Edge of ``|rhs| = 1`` between an allowed and a forbidden sample."""
    g_lo = _g(lo, p) - BAND_SLACK
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        g_mid = _g(mid, p) - BAND_SLACK
        if (g_mid <= 0) == (g_lo <= 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
        if hi - lo <= tol and min(abs(_g(lo, p)), abs(_g(hi, p))) <= tol:
            break
    return lo if abs(_g(lo, p)) <= abs(_g(hi, p)) else hi


def find_bands(
    p: DiracParams,
    window: Tuple[float, float],
    scan_points: Optional[int] = None,
    edge_tolerance: float = 1e-10,
) -> BandStructure:
    """Scan ``|rhs| - 1`` on a uniform grid and bisect every sign change.

    The grid always contains ``E = +-m0`` (the kappa branch points) when they
    fall inside the window. Raises :class:`ResolutionTooCoarse` when the grid
    step could miss a band.
    """
    E_min, E_max = float(window[0]), float(window[1])
    if not E_min < E_max:
        raise DiracFBGError(f"empty window [{E_min}, {E_max}]")
    if edge_tolerance <= 0:
        raise DiracFBGError("edge_tolerance must be > 0")
    if scan_points is None:
        scan_points = default_scan_points((E_min, E_max))
    if scan_points < 100:
        raise DiracFBGError("scan_points must be >= 100")
    step = (E_max - E_min) / scan_points
    e_ref = max(abs(E_min), abs(E_max), p.m0)
    if step > math.pi / (2 * p.a * e_ref):
        raise ResolutionTooCoarse(
            f"resolution too coarse: step {step:.3g} > pi/(2 a E_max) = {math.pi / (2 * p.a * e_ref):.3g}"
        )

    grid = np.linspace(E_min, E_max, scan_points + 1)
    extra = [x for x in (-p.m0, p.m0) if E_min < x < E_max]
    if extra:
        grid = np.union1d(grid, extra)
    allowed = np.abs(_accel.dispersion_rhs_real(grid, p.m0, p.V0, p.a)) <= 1 + BAND_SLACK

    bands = []
    clipped = []
    start = E_min if allowed[0] else None
    start_clipped = bool(allowed[0])
    for i in range(1, grid.size):
        if allowed[i] == allowed[i - 1]:
            continue
        a, b = grid[i - 1], grid[i]
        edge = _bisect_edge(a, b, p, edge_tolerance)
        if allowed[i]:
            start, start_clipped = edge, False
        else:
            bands.append((start, edge))
            clipped.append((start_clipped, False))
            start = None
    if start is not None:
        bands.append((start, E_max))
        clipped.append((start_clipped, True))

    return BandStructure(
        bands=tuple(bands),
        params=p,
        search_window=(E_min, E_max),
        edge_tolerance=edge_tolerance,
        clipped=tuple(clipped),
    )

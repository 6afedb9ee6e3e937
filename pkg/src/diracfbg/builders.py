"""Grating designs realizing the Dirac-Kronig-Penney and Tamm lattices.

The amplitude ``m(x)`` plays the role of the rest mass and the local phase
slope ``d(phi)/dx = 2 V(x)`` sets the potential. A lumped phase slip
``2 V0`` realizes a delta barrier of area ``V0``.

Both builders place the grating on ``[-L/2, L/2]`` with a flat-top
super-Gaussian envelope::

    m(x) = m0                                   |x| <= P
    m(x) = m0 exp(-((|x| - P) / w) ** (2 N))    P < |x| <= L/2

where ``P = plateau_fraction * L / 2``. The ramps are sampled at cell
midpoints into ``segments_per_ramp`` uniform segments.

For the Tamm design the x < 0 half carries the constant slope ``2 V1``.
Physically that half is a uniform grating whose period differs from the
nominal one: with ``Lambda`` the nominal period and ``Z`` the length unit
(see :mod:`diracfbg.units`), a normalized slope ``s`` means the local
grating wavenumber ``2 pi / Lambda + s / Z``, i.e. a period
``Lambda' = Lambda / (1 + s Lambda / (2 pi Z))``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .core import DiracFBGError, LatticeTooShort
from .tmm import GratingProfile, PhaseSlip, Segment

__all__ = [
    "ApodizationSpec",
    "KPGratingSpec",
    "TammGratingSpec",
    "UniformGratingSpec",
    "build_kp_grating",
    "build_tamm_grating",
    "build_uniform_grating",
    "apodization_profile",
    "period_from_slope",
]

BOUNDARY_KAPPA_RATIO = 1e-4


@dataclass(frozen=True)
class ApodizationSpec:
    """Super-Gaussian ramps. ``ramp_width=None`` means ``L / 10``."""

    order: int = 3
    ramp_width: Optional[float] = None
    plateau_fraction: float = 0.6
    segments_per_ramp: int = 4000

    def width(self, L: float) -> float:
        return L / 10 if self.ramp_width is None else self.ramp_width

    def validate(self, L: float):
        if self.order < 1 or int(self.order) != self.order:
            raise DiracFBGError(f"apodization order must be a positive integer, got {self.order}")
        if self.width(L) <= 0:
            raise DiracFBGError("ramp_width must be > 0")
        if not 0 < self.plateau_fraction < 1:
            raise DiracFBGError("plateau_fraction must lie in (0, 1)")
        if self.segments_per_ramp < 1:
            raise DiracFBGError("segments_per_ramp must be >= 1")


@dataclass(frozen=True)
class KPGratingSpec:
    m0: float = 1.0
    V0: float = math.pi / 2
    a: float = 2.0
    L: float = 50.0
    apod: ApodizationSpec = field(default_factory=ApodizationSpec)
    slips_in_ramps: bool = True

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class TammGratingSpec:
    m0: float = 1.0
    V0: float = math.pi / 2
    a: float = 2.0
    V1: float = 0.8
    L: float = 50.0
    apod: ApodizationSpec = field(default_factory=ApodizationSpec)
    slips_in_ramps: bool = True

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class UniformGratingSpec:
    """Uniform grating; ``apodized=False`` gives a single abrupt segment."""

    m0: float = 1.0
    L: float = 50.0
    phase_slope: float = 0.0
    apodized: bool = True
    apod: ApodizationSpec = field(default_factory=ApodizationSpec)

    def to_dict(self):
        return asdict(self)


def apodization_profile(x, m0: float, L: float, apod: ApodizationSpec):
    """Continuous envelope ``m(x)`` on ``[-L/2, L/2]``."""
    x = np.asarray(x, dtype=float)
    P = apod.plateau_fraction * L / 2
    w = apod.width(L)
    d = np.maximum(np.abs(x) - P, 0.0)
    return m0 * np.exp(-((d / w) ** (2 * apod.order)))


def period_from_slope(slope: float, Lambda: float, Z: float) -> float:
    """Physical grating period realizing a normalized phase slope."""
    return Lambda / (1 + slope * Lambda / (2 * math.pi * Z))


def _check_common(m0, L, apod):
    if not (m0 > 0 and math.isfinite(m0)):
        raise DiracFBGError(f"m0 must be > 0, got {m0}")
    if not (L > 0 and math.isfinite(L)):
        raise DiracFBGError(f"L must be > 0, got {L}")
    apod.validate(L)
    if not L > 4 * apod.width(L):
        raise DiracFBGError(f"L={L} must exceed 4*ramp_width={4 * apod.width(L)}")


def _ramp_cells(m0, L, apod):
    """Right-ramp cell edges and midpoint couplings."""
    P = apod.plateau_fraction * L / 2
    edges = np.linspace(P, L / 2, apod.segments_per_ramp + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    kap = apodization_profile(mids, m0, L, apod)
    if kap[-1] > BOUNDARY_KAPPA_RATIO * m0:
        raise DiracFBGError(
            f"apodization too weak: boundary coupling {kap[-1]:.3g} > {BOUNDARY_KAPPA_RATIO:g}*m0"
        )
    return edges, kap


def _assemble(m0, L, apod, slips: List[float], dphi: float, slope_left: float, interface: bool):
    half = L / 2
    P = apod.plateau_fraction * half
    edges, kap = _ramp_cells(m0, L, apod)

    slip_set = set(slips)
    fixed = slip_set | ({0.0} if interface else set())
    points = sorted(set(edges.tolist()) | set((-edges).tolist()) | fixed)
    # drop ramp edges within 1e-9 of a slip/interface (keeps slips exact)
    kept = []
    for x in points:
        if kept and x - kept[-1] < 1e-9:
            if x in fixed:
                kept[-1] = x
            continue
        kept.append(x)
    kept[0], kept[-1] = -half, half
    xs = np.array(kept)

    def kappa_at(xm):
        d = abs(xm)
        if d <= P:
            return m0
        i = min(int(np.searchsorted(edges, d, side="right")) - 1, len(kap) - 1)
        return float(kap[i])

    elements = []
    for x0, x1 in zip(xs[:-1], xs[1:]):
        if x1 - x0 <= 0:
            continue
        xm = 0.5 * (x0 + x1)
        slope = slope_left if xm < 0 else 0.0
        elements.append(Segment(length=float(x1 - x0), kappa=kappa_at(xm), phase_slope=slope))
        if float(x1) in slip_set:
            elements.append(PhaseSlip(dphi))
    return GratingProfile(tuple(elements), x_start=-half)


def _slip_positions(a, lo, hi):
    n_lo = math.floor(lo / a)
    n_hi = math.ceil(hi / a)
    return [n * a for n in range(n_lo, n_hi + 1) if lo < n * a < hi]


def build_kp_grating(spec: KPGratingSpec) -> GratingProfile:
    """Apodized uniform grating with phase slips ``2 V0`` at every ``x = n a``.

    Slips cover the whole support unless ``slips_in_ramps`` is False, in which
    case only the plateau carries them. Raises :class:`LatticeTooShort` when
    the plateau holds fewer than two slips.
    """
    _check_common(spec.m0, spec.L, spec.apod)
    if not spec.a > 0:
        raise DiracFBGError(f"a must be > 0, got {spec.a}")
    half = spec.L / 2
    P = spec.apod.plateau_fraction * half
    if len(_slip_positions(spec.a, -P, P)) < 2:
        raise LatticeTooShort(f"lattice too short: plateau [-{P}, {P}] holds fewer than 2 slips of spacing {spec.a}")
    lim = half if spec.slips_in_ramps else P
    slips = _slip_positions(spec.a, -lim, lim)
    return _assemble(spec.m0, spec.L, spec.apod, slips, 2 * spec.V0, 0.0, interface=False)


def build_tamm_grating(spec: TammGratingSpec) -> GratingProfile:
    """Phase ramp of slope ``2 V1`` for x < 0, slip staircase at ``x = n a, n >= 1``."""
    _check_common(spec.m0, spec.L, spec.apod)
    if not spec.a > 0:
        raise DiracFBGError(f"a must be > 0, got {spec.a}")
    if not (math.isfinite(spec.V1) and 0 <= spec.V1 < spec.m0):
        raise DiracFBGError(f"Tamm grating needs 0 <= V1 < m0, got V1={spec.V1}")
    half = spec.L / 2
    P = spec.apod.plateau_fraction * half
    if P < 2 * spec.a:
        raise DiracFBGError(f"interface x=0 must sit >= 2a={2 * spec.a} from the ramps (plateau half-width {P})")
    if len(_slip_positions(spec.a, 0.0, P)) < 2:
        raise LatticeTooShort(f"lattice too short: (0, {P}) holds fewer than 2 slips of spacing {spec.a}")
    lim = half if spec.slips_in_ramps else P
    slips = _slip_positions(spec.a, 0.0, lim)
    return _assemble(spec.m0, spec.L, spec.apod, slips, 2 * spec.V0, 2 * spec.V1, interface=True)


def build_uniform_grating(spec: UniformGratingSpec) -> GratingProfile:
    if not (spec.m0 >= 0 and math.isfinite(spec.m0)):
        raise DiracFBGError(f"m0 must be >= 0, got {spec.m0}")
    if not (spec.L > 0 and math.isfinite(spec.L)):
        raise DiracFBGError(f"L must be > 0, got {spec.L}")
    if not spec.apodized or spec.m0 == 0:
        return GratingProfile((Segment(spec.L, spec.m0, spec.phase_slope),), x_start=-spec.L / 2)
    _check_common(spec.m0, spec.L, spec.apod)
    g = _assemble(spec.m0, spec.L, spec.apod, [], 0.0, spec.phase_slope, interface=False)
    # _assemble only applies the slope on x < 0; uniform gratings carry it everywhere
    return GratingProfile(
        tuple(Segment(s.length, s.kappa, spec.phase_slope) for s in g.elements), x_start=g.x_start
    )

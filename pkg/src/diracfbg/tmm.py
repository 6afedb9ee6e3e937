"""Stationary transfer-matrix solver for the grating coupled-mode equations.

With envelopes ``phi1`` (forward) and ``phi2`` (backward), coupling ``kappa``
and local potential ``V = phase_slope / 2``, the stationary equations read

    d(phi1)/dx =  i delta phi1 + i kappa phi2
    d(phi2)/dx = -i kappa phi1 - i delta phi2,     delta = E - V.

A uniform segment of length L therefore propagates ``(phi1, phi2)`` by
``exp(A L) = cosh(gL) I + A sinh(gL)/g`` with ``g = sqrt(kappa**2 - delta**2)``.
A phase slip ``dphi`` is the delta-function limit of a steep phase ramp and
multiplies the envelopes by ``exp(-+i dphi/2)``.

Left incidence: ``(1, r)`` at the left end maps to ``(t, 0)`` at the right
end, so ``t = 1/M22`` and ``r = -M21/M22`` up to the free-propagation phase
references documented in :func:`scattering`.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from . import _accel
from .core import DiracFBGError, IllConditioned

__all__ = [
    "Segment",
    "PhaseSlip",
    "GratingProfile",
    "SpectralResponse",
    "SweepPointError",
    "segment_matrix",
    "slip_matrix",
    "total_matrix",
    "total_matrices",
    "scattering",
    "sweep",
    "CONSERVATION_TOL",
]

CONSERVATION_TOL = 1e-8
_OVERFLOW = 1e300


@dataclass(frozen=True)
class Segment:
    length: float
    kappa: float
    phase_slope: float = 0.0

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise DiracFBGError(f"segment length must be finite and > 0, got {self.length}")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise DiracFBGError(f"segment kappa must be finite and >= 0, got {self.kappa}")
        if not math.isfinite(self.phase_slope):
            raise DiracFBGError(f"segment phase_slope must be finite, got {self.phase_slope}")


@dataclass(frozen=True)
class PhaseSlip:
    """Lumped jump of the grating phase; a delta barrier of area ``delta_phi / 2``.

    Positive ``delta_phi`` corresponds to a positive barrier ``V0``.
    """

    delta_phi: float

    def __post_init__(self):
        if not math.isfinite(self.delta_phi):
            raise DiracFBGError(f"delta_phi must be finite, got {self.delta_phi}")


Element = Union[Segment, PhaseSlip]


def _compensated_cumsum(start: float, steps: np.ndarray) -> np.ndarray:
    # Neumaier summation; plain cumsum drifts ~1e-11 over thousands of cells
    out = np.empty(len(steps))
    total, comp = float(start), 0.0
    for i, h in enumerate(steps.tolist()):
        t = total + h
        if abs(total) >= abs(h):
            comp += (total - t) + h
        else:
            comp += (h - t) + total
        total = t
        out[i] = total + comp
    return out


@dataclass(frozen=True)
class GratingProfile:
    """Ordered grating elements from left (x = -inf side) to right.

    ``x_start`` is the coordinate of the left end; it only sets the phase
    reference of ``r``.
    """

    elements: Tuple[Element, ...]
    x_start: float = 0.0
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        if not any(isinstance(e, Segment) for e in els):
            raise DiracFBGError("a grating needs at least one Segment")
        n = len(els)
        kind = np.empty(n, dtype=np.int8)
        kap = np.zeros(n)
        slope = np.zeros(n)
        length = np.zeros(n)
        dphi = np.zeros(n)
        for i, e in enumerate(els):
            if isinstance(e, Segment):
                kind[i] = _accel.SEGMENT
                kap[i], slope[i], length[i] = e.kappa, e.phase_slope, e.length
            elif isinstance(e, PhaseSlip):
                kind[i] = _accel.SLIP
                dphi[i] = e.delta_phi
            else:
                raise DiracFBGError(f"unknown grating element {e!r}")
        for arr in (kind, kap, slope, length, dphi):
            arr.flags.writeable = False
        object.__setattr__(self, "_arrays", (kind, kap, slope, length, dphi))

    @property
    def total_length(self) -> float:
        return float(self._arrays[3].sum())

    @property
    def x_end(self) -> float:
        return self.x_start + self.total_length

    @property
    def segments(self) -> Tuple[Segment, ...]:
        return tuple(e for e in self.elements if isinstance(e, Segment))

    @property
    def slips(self) -> Tuple[PhaseSlip, ...]:
        return tuple(e for e in self.elements if isinstance(e, PhaseSlip))

    def slip_positions(self) -> np.ndarray:
        """x coordinate of every phase slip."""
        kind, _, _, length, _ = self._arrays
        return _compensated_cumsum(self.x_start, length)[kind == _accel.SLIP]

    def boundary_kappa(self) -> Tuple[float, float]:
        segs = self.segments
        return segs[0].kappa, segs[-1].kappa

    def digest(self) -> str:
        """Stable SHA-256 of the element list (for run metadata)."""
        h = hashlib.sha256()
        h.update(np.float64(self.x_start).tobytes())
        for arr in self._arrays:
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()

    @classmethod
    def from_elements(cls, elements: Iterable[Element], x_start: float = 0.0) -> "GratingProfile":
        return cls(tuple(elements), x_start=x_start)


@dataclass(frozen=True)
class SpectralResponse:
    energies: np.ndarray
    t: np.ndarray
    r: np.ndarray
    ok: np.ndarray
    condition: np.ndarray

    @property
    def transmission(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    @property
    def reflection(self) -> np.ndarray:
        return np.abs(self.r) ** 2

    @property
    def conservation_residual(self) -> np.ndarray:
        return np.abs(self.transmission + self.reflection - 1.0)

    def transmission_db(self, floor: float = -300.0) -> np.ndarray:
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(self.transmission)
        return np.maximum(db, floor)


class SweepPointError(DiracFBGError):
    def __init__(self, E, reason):
        super().__init__(f"sweep failed at E={E!r}: {reason}")
        self.E = E
        self.reason = reason


def segment_matrix(s: Segment, E: float) -> np.ndarray:
    """2x2 propagator of a uniform segment at energy ``E``."""
    k = s.kappa
    d = E - 0.5 * s.phase_slope
    q = k * k - d * d
    g = math.sqrt(abs(q))
    x = g * s.length
    if x < 1e-4:
        x2 = x * x if q >= 0 else -x * x
        c = 1 + x2 / 2 + x2 * x2 / 24
        sh = s.length * (1 + x2 / 6 + x2 * x2 / 120)
    elif q >= 0:
        c, sh = math.cosh(x), math.sinh(x) / g
    else:
        c, sh = math.cos(x), math.sin(x) / g
    return np.array([[c + 1j * d * sh, 1j * k * sh], [-1j * k * sh, c - 1j * d * sh]])


def slip_matrix(ps: PhaseSlip) -> np.ndarray:
    """``diag(exp(-i dphi/2), exp(+i dphi/2))``."""
    h = 0.5 * ps.delta_phi
    return np.array([[complex(math.cos(h), -math.sin(h)), 0], [0, complex(math.cos(h), math.sin(h))]])


def total_matrix(g: GratingProfile, E: float) -> np.ndarray:
    """Ordered product of element matrices (rightmost element applied last)."""
    return total_matrices(g, np.array([float(E)]))[0]


def total_matrices(g: GratingProfile, energies) -> np.ndarray:
    """Total matrices for an energy array, shape ``(n, 2, 2)``, on the active backend."""
    return _accel.transfer_matrices(*g._arrays, np.asarray(energies, dtype=float))


def _extract(g: GratingProfile, E, M):
    m21 = M[..., 1, 0]
    m22 = M[..., 1, 1]
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        t = np.exp(-1j * E * g.total_length) / m22
        r = -(m21 / m22) * np.exp(2j * E * g.x_start)
    return t, r


def scattering(g: GratingProfile, E: float) -> Tuple[complex, complex]:
    """Left-incidence transmission and reflection amplitudes.

    Reference planes are the grating ends: the incident wave is
    ``exp(iEx)`` and the transmitted wave ``t exp(iEx)`` in a free medium.
    The boundary segments should be (nearly) uncoupled so that this free-wave
    basis applies. Raises :class:`IllConditioned` when ``M22`` overflows.
    """
    E = float(E)
    M = total_matrix(g, E)
    if not np.all(np.isfinite(M)) or abs(M[1, 1]) > _OVERFLOW:
        raise IllConditioned(f"ill-conditioned: |M22| overflow at E={E}")
    t, r = _extract(g, E, M)
    return complex(t), complex(r)


def sweep(g: GratingProfile, grid: Sequence[float], strict: bool = True) -> SpectralResponse:
    """Scattering over an energy grid.

    Every point is checked for flux conservation ``|t|^2 + |r|^2 = 1``.
    With ``strict`` the first failing point raises :class:`SweepPointError`;
    otherwise failures are reported in ``ok``. ``condition`` is the
    Frobenius norm of the total matrix per point (growth monitor).
    """
    E = np.asarray(grid, dtype=float)
    if E.ndim != 1 or not np.all(np.isfinite(E)):
        raise DiracFBGError("energy grid must be a finite 1-d array")
    if E.size > 1 and np.any(np.diff(E) < 0):
        raise DiracFBGError("energy grid must be sorted")
    M = total_matrices(g, E)
    finite = np.all(np.isfinite(M), axis=(1, 2))
    cond = np.where(finite, np.sqrt(np.sum(np.abs(np.where(finite[:, None, None], M, 0)) ** 2, axis=(1, 2))), np.inf)
    t, r = _extract(g, E, M)
    resid = np.abs(np.abs(t) ** 2 + np.abs(r) ** 2 - 1.0)
    ok = finite & (cond < _OVERFLOW) & (resid <= CONSERVATION_TOL)
    if strict and not ok.all():
        i = int(np.argmin(ok))
        reason = "ill-conditioned" if not (finite[i] and cond[i] < _OVERFLOW) else f"conservation residual {resid[i]:.3g}"
        raise SweepPointError(float(E[i]), reason)
    t = np.where(ok, t, np.nan + 0j)
    r = np.where(ok, r, np.nan + 0j)
    return SpectralResponse(energies=E, t=t, r=r, ok=ok, condition=cond)

"""Shared types, normalized-unit conventions and error classes.

All quantities are dimensionless (hbar = c = 1 analogue). The energy ``E`` is
the normalized frequency detuning from the Bragg frequency, with ``E > 0``
meaning a frequency above the Bragg frequency. Conversion to physical units
lives in :mod:`diracfbg.units`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "DiracFBGError",
    "ResolutionTooCoarse",
    "CotangentPole",
    "DegenerateBarrier",
    "IllConditioned",
    "LatticeTooShort",
    "DiracParams",
    "ComplexAmplitudePair",
    "kappa_of",
]


class DiracFBGError(ValueError):
    """Base class for validation and numerical errors raised by the package."""


class ResolutionTooCoarse(DiracFBGError):
    pass


class CotangentPole(DiracFBGError):
    pass


class DegenerateBarrier(DiracFBGError):
    """sin(V0) vanishes, so cot(V0) is undefined."""


class IllConditioned(DiracFBGError, ArithmeticError):
    pass


class LatticeTooShort(DiracFBGError):
    pass


@dataclass(frozen=True)
class DiracParams:
    """Normalized Dirac-Kronig-Penney lattice parameters.

    Parameters
    ----------
    m0 : float
        Rest mass (plateau coupling of the grating), > 0.
    V0 : float
        Area of each delta barrier. A phase slip of ``2*V0`` realizes it.
    a : float
        Lattice period, > 0.
    V1 : float, optional
        Constant potential of the x < 0 region in the Tamm problem.
    """

    m0: float
    V0: float
    a: float
    V1: Optional[float] = None

    def __post_init__(self):
        for name in ("m0", "V0", "a"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DiracFBGError(f"{name} must be finite, got {v!r}")
        if self.m0 <= 0:
            raise DiracFBGError(f"m0 must be > 0, got {self.m0}")
        if self.a <= 0:
            raise DiracFBGError(f"a must be > 0, got {self.a}")
        if self.V1 is not None and not math.isfinite(self.V1):
            raise DiracFBGError(f"V1 must be finite, got {self.V1!r}")

    def require_tamm(self) -> float:
        """Return V1 after checking the ``0 < V1 < m0`` regime."""
        if self.V1 is None:
            raise DiracFBGError("V1 is required for Tamm problems")
        if not 0 < self.V1 < self.m0:
            raise DiracFBGError(f"Tamm problems need 0 < V1 < m0, got V1={self.V1}, m0={self.m0}")
        return self.V1


@dataclass(frozen=True)
class ComplexAmplitudePair:
    """Forward (``phi1``) and backward (``phi2``) envelope amplitudes."""

    phi1: complex
    phi2: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2], dtype=complex)


def kappa_of(E, m0):
    """Transverse momentum ``sqrt(E**2 - m0**2)``.

    Real and non-negative for ``|E| >= m0``; ``1j*sqrt(m0**2 - E**2)`` with a
    positive imaginary part inside the mass gap. Accepts scalars or arrays.
    """
    E = np.asarray(E, dtype=float)
    d = E * E - m0 * m0
    out = np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))
    if out.ndim == 0:
        return complex(out)
    return out

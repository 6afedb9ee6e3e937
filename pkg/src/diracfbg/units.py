"""Normalized <-> physical fibre units.

Length unit ``Z = 2 n0 / (k_B dn) = lambda_B / (pi dn)`` with
``k_B = 2 pi n0 / lambda_B``; time unit ``T = Z / v_g`` with ``v_g = c / n0``;
one unit of ``E`` is a (non-angular) frequency detuning ``1 / (2 pi T)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .core import DiracFBGError

__all__ = [
    "C_LIGHT",
    "PhysicalScales",
    "derive_scales",
    "detuning_to_frequency",
    "frequency_to_detuning",
    "length_to_physical",
]

C_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PhysicalScales:
    n0: float
    delta_n: float
    lambda_B: float
    Z: float
    T: float
    f_unit: float

    @property
    def k_B(self) -> float:
        return 2 * math.pi * self.n0 / self.lambda_B

    def as_report(self) -> dict:
        return {
            "n0": self.n0,
            "delta_n": self.delta_n,
            "lambda_B_nm": self.lambda_B * 1e9,
            "Z_mm": self.Z * 1e3,
            "T_ps": self.T * 1e12,
            "f_unit_GHz": self.f_unit * 1e-9,
        }


def derive_scales(n0: float, delta_n: float, lambda_B: float) -> PhysicalScales:
    """Characteristic scales for index ``n0``, modulation ``delta_n``, Bragg wavelength (m)."""
    for name, v in (("n0", n0), ("delta_n", delta_n), ("lambda_B", lambda_B)):
        if not (math.isfinite(v) and v > 0):
            raise DiracFBGError(f"{name} must be > 0, got {v}")
    if delta_n / n0 > 0.01:
        warnings.warn(f"delta_n/n0 = {delta_n / n0:.3g} is not small; coupled-mode theory assumes delta_n << n0")
    k_B = 2 * math.pi * n0 / lambda_B
    Z = 2 * n0 / (k_B * delta_n)
    T = Z * n0 / C_LIGHT
    return PhysicalScales(n0=n0, delta_n=delta_n, lambda_B=lambda_B, Z=Z, T=T, f_unit=1 / (2 * math.pi * T))


def detuning_to_frequency(E, scales: PhysicalScales):
    """Signed frequency detuning in Hz from the Bragg frequency."""
    return E * scales.f_unit


def frequency_to_detuning(f, scales: PhysicalScales):
    return f / scales.f_unit


def length_to_physical(x, scales: PhysicalScales):
    """Normalized length -> meters."""
    return x * scales.Z

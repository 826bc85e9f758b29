"""Polarization ratio estimation through a polarizing beam splitter with cross talk.

delta1 is the fraction of H light reflected into the V branch and delta2 the
fraction of V light transmitted into the H branch. Ratios are written in
terms of v0 = I_V/I_H, so absolute intensities never appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PbsParams:
    t_h: float
    r_v: float
    delta1: float = 0.0
    delta2: float = 0.0
    eta_t: float = 1.0
    eta_r: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.t_h <= 1.0 and 0.0 < self.r_v <= 1.0):
            raise DomainError("t_h and r_v must lie in (0, 1]")
        if not (0.0 <= self.delta1 < 1.0 and 0.0 <= self.delta2 < 1.0):
            raise DomainError("cross-talk coefficients must lie in [0, 1)")
        # small slack for energy-conserving parameters built as 1 - delta
        if self.t_h + self.delta1 > 1.0 + 1e-12 or self.r_v + self.delta2 > 1.0 + 1e-12:
            raise DomainError("t_h + delta1 and r_v + delta2 must not exceed 1")
        if not (self.eta_t > 0 and self.eta_r > 0):
            raise DomainError("converter coefficients must be positive")

    @classmethod
    def lossless(cls, delta1: float, delta2: float, eta_t: float = 1.0, eta_r: float = 1.0) -> "PbsParams":
        """Energy-conserving splitter: t_h = 1 - delta1, r_v = 1 - delta2."""
        return cls(1.0 - delta1, 1.0 - delta2, delta1, delta2, eta_t, eta_r)


@dataclass(frozen=True)
class PolarizationRatio:
    v0: float

    def __post_init__(self):
        if not (self.v0 > 0 and math.isfinite(self.v0)):
            raise DomainError(f"polarization ratio must be positive and finite, got {self.v0}")


def _check_v0(v0: float) -> None:
    if not v0 > 0:
        raise DomainError(f"v0 must be positive, got {v0}")


def measured_ratio(v0: float, pbs: PbsParams) -> float:
    """Reflected/transmitted detector signal ratio for incident ratio ``v0``."""
    _check_v0(v0)
    den = pbs.eta_t * (pbs.t_h + v0 * pbs.delta2)
    if den == 0:
        raise ZeroDivisionError("no light reaches the transmission detector")
    return pbs.eta_r * (pbs.delta1 + v0 * pbs.r_v) / den


def calibration_ratio(pbs: PbsParams) -> float:
    """Signal ratio for unpolarized light (equal H and V weights)."""
    return pbs.eta_r * (pbs.delta1 + pbs.r_v) / (pbs.eta_t * (pbs.t_h + pbs.delta2))


def calibrated_ratio(v0: float, pbs: PbsParams) -> float:
    """measured/calibration, written so the converter coefficients cancel exactly."""
    _check_v0(v0)
    return ((pbs.delta1 + v0 * pbs.r_v) / (pbs.t_h + v0 * pbs.delta2)) * (
        (pbs.t_h + pbs.delta2) / (pbs.delta1 + pbs.r_v)
    )


def error_ratio(v0: float, pbs: PbsParams) -> float:
    """Relative error |V_cal - v0|/v0 of the calibrated estimate."""
    return abs(calibrated_ratio(v0, pbs) - v0) / v0


def v0_from_angle(angle: float) -> PolarizationRatio:
    """V/H intensity ratio tan^2(angle) of light rotated from H by ``angle``."""
    if not 0.0 < angle < math.pi / 2:
        raise DomainError(f"angle must lie in (0, pi/2), got {angle}")
    return PolarizationRatio(math.tan(angle) ** 2)

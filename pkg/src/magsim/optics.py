"""Faraday rotation of a far-detuned probe by a transversely polarized vapor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError

CLASSICAL_ELECTRON_RADIUS = 2.8e-15  # m
SPEED_OF_LIGHT = 2.998e8  # m/s
RB87_D2_FREQ = 384.2304844685e12  # Hz


@dataclass(frozen=True)
class OpticalParams:
    """Probe and vapor parameters. ``atom_density_n`` is in m^-3."""

    path_length_l: float
    oscillator_strength_f: float
    atom_density_n: float
    probe_freq_nu: float
    resonance_freq_nu0: float
    fwhm_delta_nu: float
    classical_electron_radius_re: float = CLASSICAL_ELECTRON_RADIUS
    speed_of_light_c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in (
            "path_length_l",
            "atom_density_n",
            "probe_freq_nu",
            "resonance_freq_nu0",
            "fwhm_delta_nu",
            "classical_electron_radius_re",
            "speed_of_light_c",
        ):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value}")
        if not 0.0 < self.oscillator_strength_f <= 1.0:
            raise DomainError(f"oscillator_strength_f must lie in (0, 1], got {self.oscillator_strength_f}")

    @classmethod
    def from_cm3(cls, atom_density_cm3: float, **kwargs) -> "OpticalParams":
        return cls(atom_density_n=atom_density_cm3 * 1e6, **kwargs)

    @property
    def lineshape(self) -> float:
        return lorentzian_d(self.probe_freq_nu, self.resonance_freq_nu0, self.fwhm_delta_nu)

    @property
    def angle_per_px(self) -> float:
        """Rotation angle (rad) per unit of P_x."""
        return (
            0.25
            * self.path_length_l
            * self.classical_electron_radius_re
            * self.speed_of_light_c
            * self.oscillator_strength_f
            * self.atom_density_n
            * self.lineshape
        )


@dataclass(frozen=True)
class FaradaySeries:
    t: tuple
    theta: tuple

    def __len__(self):
        return len(self.t)

    def rows(self):
        return zip(self.t, self.theta)


def lorentzian_d(nu: float, nu0: float, delta_nu: float) -> float:
    """Dispersive Lorentzian (nu - nu0) / [(nu - nu0)^2 + (delta_nu/2)^2], in 1/Hz."""
    det = nu - nu0
    denom = det * det + 0.25 * delta_nu * delta_nu
    if denom == 0:
        raise ZeroDivisionError("lineshape undefined on resonance with zero linewidth")
    return det / denom


def faraday_angle(px: float, params: OpticalParams) -> float:
    if abs(px) > 1.0:
        raise DomainError(f"|px| must not exceed 1, got {px}")
    return params.angle_per_px * px


def faraday_series(px_series: Iterable[Sequence[float]], params: OpticalParams) -> FaradaySeries:
    """Apply :func:`faraday_angle` to every (t, px) sample."""
    ts, thetas = [], []
    last_t = -math.inf
    for i, (t, px) in enumerate(px_series):
        if not t > last_t:
            raise DomainError(f"sample {i}: times must be strictly increasing (t={t})")
        try:
            thetas.append(faraday_angle(px, params))
        except DomainError as exc:
            raise DomainError(f"sample {i}: {exc}") from exc
        ts.append(t)
        last_t = t
    if not ts:
        raise DomainError("px series is empty")
    return FaradaySeries(tuple(ts), tuple(thetas))

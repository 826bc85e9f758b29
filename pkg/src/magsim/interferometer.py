"""Path/polarization state of a probe photon in the Mach-Zehnder interferometer.

The vapor cell sits in arm 1 and rotates the polarization by exp(-i theta sigma_x);
arm 2 carries a phase shifter. Detecting only one exit port postselects the
path state (|1> + e^{i beta}|2>)/sqrt(2), which amplifies the apparent rotation.

Basis ordering for the four amplitudes is (1H, 1V, 2H, 2V).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import DarkPortError, DomainError

P_MIN = 1e-15
TWO_PI = 2.0 * math.pi
_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class PathPolarizationState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (4,):
            raise DomainError("a path/polarization state needs exactly 4 amplitudes")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def path(self, k: int) -> np.ndarray:
        """(H, V) amplitudes in arm ``k`` (1 or 2)."""
        return self.amplitudes[2 * (k - 1): 2 * k]


@dataclass(frozen=True)
class MziConfig:
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta < TWO_PI:
            raise DomainError(f"beta must lie in [0, 2pi), got {self.beta}")


@dataclass(frozen=True)
class PostselectionOutcome:
    p_f: float
    pol_state: np.ndarray  # normalized (H, V)
    pv_tilde: float
    theta_tilde: float
    eta: Optional[float]


def entangled_state(theta: float) -> PathPolarizationState:
    """exp(-i theta |1><1| sigma_x) applied to (|1> + |2>)|H>/sqrt(2)."""
    return PathPolarizationState(
        np.array([math.cos(theta), -1j * math.sin(theta), 1.0, 0.0]) * _SQRT_HALF
    )


def conventional_state(theta: float) -> np.ndarray:
    """exp(-i theta sigma_x)|H>: the single-pass rotation without interferometer."""
    return np.array([math.cos(theta), -1j * math.sin(theta)])


def postselection_bra(beta: float) -> np.ndarray:
    """Path amplitudes of |f> = (|1> + e^{i beta}|2>)/sqrt(2)."""
    return np.array([1.0, np.exp(1j * beta)]) * _SQRT_HALF


def project_path(state: PathPolarizationState, beta: float) -> np.ndarray:
    """Unnormalized polarization state <f|Psi> as (H, V) amplitudes."""
    f = postselection_bra(beta)
    return np.conj(f[0]) * state.path(1) + np.conj(f[1]) * state.path(2)


def postselection_probability(theta: float, beta: float) -> float:
    """(1 + cos(theta) cos(beta))/2, evaluated without cancellation near the dark port."""
    a = math.cos(0.5 * (theta + beta))
    b = math.cos(0.5 * (theta - beta))
    return 0.5 * (a * a + b * b)


def _checked_pf(theta: float, beta: float, p_min: float) -> float:
    p_f = postselection_probability(theta, beta)
    if p_f <= p_min:
        raise DarkPortError(f"p_f = {p_f:.3e} at theta={theta}, beta={beta} is below the floor {p_min:g}")
    return p_f


def pv_tilde(theta: float, beta: float, p_min: float = P_MIN) -> float:
    """V-population of the postselected photon, sin^2(theta) / (4 p_f)."""
    p_f = _checked_pf(theta, beta, p_min)
    s = math.sin(theta)
    # bounded by 1 analytically; clamp the last-ulp excess
    return min(s * s / (4.0 * p_f), 1.0)


def postselect(theta: float, beta: float, p_min: float = P_MIN) -> PostselectionOutcome:
    """Postselect the path state and summarize the surviving polarization.

    ``theta_tilde`` is the principal branch arcsin(sqrt(pv_tilde)) in [0, pi/2];
    ``eta`` is theta_tilde/theta and is None at theta == 0.
    """
    p_f = _checked_pf(theta, beta, p_min)
    # <f|Psi> = (e^{-i beta} + cos theta, -i sin theta)/2 with the real part
    # cos(beta) + cos(theta) written as a product to avoid cancellation
    re_h = 2.0 * math.cos(0.5 * (beta + theta)) * math.cos(0.5 * (beta - theta))
    scale = 2.0 * math.sqrt(p_f)
    pol = np.array([complex(re_h, -math.sin(beta)), complex(0.0, -math.sin(theta))]) / scale
    pv = pv_tilde(theta, beta, p_min)
    theta_t = math.asin(math.sqrt(pv))
    eta = theta_t / theta if theta != 0 else None
    return PostselectionOutcome(p_f=p_f, pol_state=pol, pv_tilde=pv, theta_tilde=theta_t, eta=eta)


def theta_tilde(theta: float, beta: float, p_min: float = P_MIN) -> float:
    p_f = _checked_pf(theta, beta, p_min)
    s = math.sin(theta)
    return math.asin(min(1.0, abs(s) / (2.0 * math.sqrt(p_f))))


def amplification_peak(beta: float) -> float:
    """Rotation angle in [0, pi/2] at which theta_tilde(theta, beta) is largest.

    Past this angle the amplified angle falls again (for cos(beta) < 0), so the
    map theta -> theta_tilde is one-to-one only on [0, amplification_peak(beta)].
    """
    cb = math.cos(beta)
    # stationary point of sin^2/(1 + cos*cb) in cos(theta): -cb / (1 + |sin beta|)
    c = -cb / (1.0 + abs(math.sin(beta)))
    return min(math.acos(min(max(c, -1.0), 1.0)), math.pi / 2)


def theta_from_theta_tilde(theta_t: float, beta: float) -> float:
    """Invert sin^2(theta_tilde) = sin^2(theta)/(4 p_f(theta)) on the rising branch.

    The returned theta lies in [0, amplification_peak(beta)].

    Solves cos(theta) from the quadratic c^2 + 2 s^2 cos(beta) c + 2 s^2 - 1 = 0
    (s = sin theta_tilde), then returns arcsin(2 sqrt(p_f) s) which keeps full
    relative precision at small angles.
    """
    s = math.sin(theta_t)
    s2 = s * s
    cb = math.cos(beta)
    disc = max(s2 * s2 * cb * cb - 2.0 * s2 + 1.0, 0.0)
    c = min(max(-s2 * cb + math.sqrt(disc), -1.0), 1.0)
    p_f = 0.5 * (1.0 + c * cb)
    return math.asin(min(1.0, 2.0 * math.sqrt(max(p_f, 0.0)) * s))


def small_angle_gain(beta: float) -> float:
    """Limit of theta_tilde/theta as theta -> 0: 1/(2 sqrt(p_f(0, beta)))."""
    return 1.0 / (2.0 * math.sqrt(postselection_probability(0.0, beta)))


def qfi_postselected(theta: float, beta: float) -> float:
    """QFI per postselected photon, (4 p_f - sin^2 theta) / (4 p_f^2)."""
    p_f = _checked_pf(theta, beta, 0.0)
    s = math.sin(theta)
    return max((4.0 * p_f - s * s) / (4.0 * p_f * p_f), 0.0)


def qfi_entangled(theta: float) -> float:
    return 2.0


def qfi_conventional(theta: float) -> float:
    return 4.0


def qfi_numeric(state_family: Callable[[float], np.ndarray], theta: float, h: float = 1e-5) -> float:
    """Pure-state QFI 4(<d psi|d psi> - |<psi|d psi>|^2) by central differences.

    Independent of the closed forms above; used as a cross-check only.
    """
    if not h > 0:
        raise DomainError("finite-difference step must be positive")
    psi = np.asarray(state_family(theta), dtype=complex).ravel()
    dpsi = (
        np.asarray(state_family(theta + h), dtype=complex).ravel()
        - np.asarray(state_family(theta - h), dtype=complex).ravel()
    ) / (2.0 * h)
    overlap = np.vdot(psi, dpsi)
    return float(4.0 * (np.vdot(dpsi, dpsi).real - abs(overlap) ** 2))


def postselected_family(beta: float) -> Callable[[float], np.ndarray]:
    """theta -> normalized postselected polarization state, built from amplitudes."""

    def family(theta: float) -> np.ndarray:
        raw = project_path(entangled_state(theta), beta)
        return raw / np.linalg.norm(raw)

    return family


def entangled_family(theta: float) -> np.ndarray:
    return entangled_state(theta).amplitudes


def amplification_curve(theta_grid: Iterable[float], beta: float, p_min: float = P_MIN):
    """[(theta, theta_tilde)] over ``theta_grid``; dark-port points get None."""
    out = []
    for theta in theta_grid:
        try:
            out.append((theta, postselect(theta, beta, p_min).theta_tilde))
        except DarkPortError:
            out.append((theta, None))
    return out

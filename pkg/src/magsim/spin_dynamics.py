"""Reduced Bloch equation for the alkali electron-spin polarization.

The polarization vector P = 2<S> obeys

    dP/dt = (1/q) [ gamma_e B(t) x P + R_op (e_z - P) - R_rel P ]

with B(t) = (0, B_y cos(2 pi nu t + phase), B_z). The nuclear slowing-down
factor q is either a constant or the I = 3/2 expression 2(3+P^2)/(1+P^2).

Units: fields in nT, rates in 1/s, gamma_e in rad/(s nT).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, IntegrationConfigError

#: 2 pi x 28 Hz/nT, the electron gyromagnetic ratio in rad/(s nT)
GAMMA_E_RB87 = 2.0 * math.pi * 28.0

MIN_STEPS_PER_PERIOD = 50
# classical RK4 is stable for real negative eigenvalues down to h*lambda ~ -2.785
_RK4_STABILITY = 2.5


@dataclass(frozen=True)
class BlochVector:
    px: float
    py: float
    pz: float

    def __iter__(self):
        yield self.px
        yield self.py
        yield self.pz

    def norm(self) -> float:
        return math.sqrt(self.px * self.px + self.py * self.py + self.pz * self.pz)

    def as_array(self) -> np.ndarray:
        return np.array([self.px, self.py, self.pz])


@dataclass(frozen=True)
class RateParams:
    gamma_e: float
    r_op: float
    r_rel: float

    def __post_init__(self):
        if not self.gamma_e > 0:
            raise DomainError(f"gamma_e must be positive, got {self.gamma_e}")
        if self.r_op < 0 or self.r_rel < 0:
            raise DomainError("r_op and r_rel must be non-negative")

    @property
    def total(self) -> float:
        return self.r_op + self.r_rel


@dataclass(frozen=True)
class FieldConfig:
    bz: float
    by_amp: float = 0.0
    by_freq: float = 0.0
    by_phase: float = 0.0

    def __post_init__(self):
        if self.by_freq < 0:
            raise DomainError(f"by_freq must be >= 0, got {self.by_freq}")

    def by(self, t: float) -> float:
        return self.by_amp * math.cos(2.0 * math.pi * self.by_freq * t + self.by_phase)


@dataclass(frozen=True)
class SlowingFactorMode:
    """Either a fixed q (``q`` set) or the polarization-dependent I = 3/2 form.

    Use :meth:`constant` / :meth:`polarization_dependent` to build one.
    """

    q: Optional[float] = None

    def __post_init__(self):
        if self.q is not None and not self.q > 0:
            raise DomainError(f"constant q must be positive, got {self.q}")

    @classmethod
    def constant(cls, q: float) -> "SlowingFactorMode":
        return cls(q=q)

    @classmethod
    def polarization_dependent(cls) -> "SlowingFactorMode":
        return cls(q=None)

    @property
    def is_constant(self) -> bool:
        return self.q is not None

    def evaluate(self, p: float) -> float:
        if self.q is not None:
            return self.q
        return q_factor(min(abs(p), 1.0))

    @property
    def q_min(self) -> float:
        return self.q if self.q is not None else 4.0

    @property
    def q_max(self) -> float:
        return self.q if self.q is not None else 6.0


@dataclass(frozen=True)
class SpinTemperatureDistribution:
    occupations: dict
    beta_st: float


@dataclass(frozen=True)
class LinearResponseSolution:
    pz0: float
    amp_factor_M: float
    phase_delay: float
    q: float

    def px_amplitude(self, by_amp: float) -> float:
        return self.amp_factor_M * self.pz0 * by_amp


@dataclass
class Trajectory:
    """Fixed-step solution sampled on every step, final time included."""

    t: np.ndarray
    px: np.ndarray
    py: np.ndarray
    pz: np.ndarray

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i):
        return float(self.t[i]), BlochVector(float(self.px[i]), float(self.py[i]), float(self.pz[i]))

    @property
    def final(self) -> BlochVector:
        return self[-1][1]

    def window(self, t_start: float) -> "Trajectory":
        keep = self.t >= t_start
        return Trajectory(self.t[keep], self.px[keep], self.py[keep], self.pz[keep])

    def rows(self):
        return zip(self.t.tolist(), self.px.tolist(), self.py.tolist(), self.pz.tolist())


def q_factor(p: float) -> float:
    """Nuclear slowing-down factor for I = 3/2 at polarization ``p``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"polarization must lie in [0, 1], got {p}")
    p2 = p * p
    return 2.0 * (3.0 + p2) / (1.0 + p2)


def steady_state_pz(rates: RateParams) -> float:
    total = rates.r_op + rates.r_rel
    if total == 0:
        raise ZeroDivisionError("r_op + r_rel must be positive for a steady state")
    return rates.r_op / total


def relaxation_time(rates: RateParams, q_mode: SlowingFactorMode) -> float:
    """Longest longitudinal relaxation time q/(R_op + R_rel) over the q range."""
    return q_mode.q_max / rates.total


def bloch_rhs(
    p: BlochVector,
    t: float,
    rates: RateParams,
    fields: FieldConfig,
    q_mode: SlowingFactorMode,
) -> BlochVector:
    dx, dy, dz = _rhs(p.px, p.py, p.pz, t, rates, fields, q_mode)
    return BlochVector(dx, dy, dz)


def _rhs(px, py, pz, t, rates, fields, q_mode):
    g = rates.gamma_e
    by = fields.by(t) if fields.by_amp else 0.0
    bz = fields.bz
    if q_mode.q is not None:
        inv_q = 1.0 / q_mode.q
    else:
        p2 = min(px * px + py * py + pz * pz, 1.0)
        inv_q = (1.0 + p2) / (2.0 * (3.0 + p2))
    gam = rates.r_op + rates.r_rel
    # B x P with B = (0, by, bz)
    dx = g * (by * pz - bz * py) - gam * px
    dy = g * (bz * px) - gam * py
    dz = g * (-by * px) + rates.r_op - gam * pz
    return dx * inv_q, dy * inv_q, dz * inv_q


def check_step(rates: RateParams, fields: FieldConfig, q_mode: SlowingFactorMode, dt: float) -> None:
    """Raise IntegrationConfigError unless ``dt`` resolves every timescale."""
    if not dt > 0:
        raise IntegrationConfigError(f"dt must be positive, got {dt}")
    limits = []
    omega = rates.gamma_e * abs(fields.bz) / q_mode.q_min
    if omega > 0:
        limits.append(("Larmor period", 2.0 * math.pi / omega))
    if fields.by_freq > 0:
        limits.append(("drive period", 1.0 / fields.by_freq))
    for name, period in limits:
        if dt > period / MIN_STEPS_PER_PERIOD:
            raise IntegrationConfigError(
                f"dt={dt:g} s gives fewer than {MIN_STEPS_PER_PERIOD} steps per {name} ({period:g} s)"
            )
    if rates.total * dt / q_mode.q_min > _RK4_STABILITY:
        raise IntegrationConfigError(f"dt={dt:g} s exceeds the RK4 stability limit for the relaxation rate")


def integrate_bloch(
    rates: RateParams,
    fields: FieldConfig,
    q_mode: SlowingFactorMode,
    p0: BlochVector = BlochVector(0.0, 0.0, 0.0),
    t_end: float = 1.0,
    dt: float = 1e-5,
) -> Trajectory:
    """Classical fixed-step RK4 from t=0 to ``t_end``.

    The last step is shortened if ``t_end`` is not a multiple of ``dt`` so the
    returned series always ends exactly at ``t_end``.
    """
    if not t_end > 0:
        raise IntegrationConfigError(f"t_end must be positive, got {t_end}")
    check_step(rates, fields, q_mode, dt)

    n_full = int(math.floor(t_end / dt + 1e-9))
    tail = t_end - n_full * dt
    if tail <= 1e-12 * dt:
        tail = 0.0
    n_total = n_full + (1 if tail > 0 else 0)

    ts = np.empty(n_total + 1)
    xs = np.empty(n_total + 1)
    ys = np.empty(n_total + 1)
    zs = np.empty(n_total + 1)

    x, y, z = p0.px, p0.py, p0.pz
    ts[0], xs[0], ys[0], zs[0] = 0.0, x, y, z
    f = _rhs
    for i in range(n_total):
        t = i * dt
        h = dt if i < n_full else tail
        h2 = 0.5 * h
        k1x, k1y, k1z = f(x, y, z, t, rates, fields, q_mode)
        k2x, k2y, k2z = f(x + h2 * k1x, y + h2 * k1y, z + h2 * k1z, t + h2, rates, fields, q_mode)
        k3x, k3y, k3z = f(x + h2 * k2x, y + h2 * k2y, z + h2 * k2z, t + h2, rates, fields, q_mode)
        k4x, k4y, k4z = f(x + h * k3x, y + h * k3y, z + h * k3z, t + h, rates, fields, q_mode)
        h6 = h / 6.0
        x += h6 * (k1x + 2.0 * (k2x + k3x) + k4x)
        y += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        z += h6 * (k1z + 2.0 * (k2z + k3z) + k4z)
        ts[i + 1] = t + h
        xs[i + 1], ys[i + 1], zs[i + 1] = x, y, z
    if tail > 0:
        ts[-1] = t_end
    return Trajectory(ts, xs, ys, zs)


def linear_response(
    rates: RateParams,
    fields: FieldConfig,
    q_mode: SlowingFactorMode,
) -> LinearResponseSolution:
    """Phasor solution of the Bloch equation linearized about (0, 0, P_z0).

    Terms quadratic in (P_x, P_y, B_y) are dropped, B_z is kept exactly and q
    is frozen at its value for P = P_z0. With B_y(t) = Re[b e^{i w t}] the
    transverse phasors satisfy

        (i w q + G) X = gamma (b P_z0 - B_z Y)
        (i w q + G) Y = gamma B_z X,          G = R_op + R_rel

    so P_x(t) = M P_z0 B_y cos(w t + phase + theta_y).
    """
    pz0 = steady_state_pz(rates)
    q = q_mode.evaluate(pz0)
    ratio = rates.r_op / (rates.gamma_e * fields.by_amp) if fields.by_amp else math.inf
    if ratio < 100:
        warnings.warn(
            f"r_op/(gamma_e*by_amp) = {ratio:.3g} < 100; the linear response is not reliable",
            RuntimeWarning,
            stacklevel=2,
        )
    w = 2.0 * math.pi * fields.by_freq
    s = complex(rates.total, w * q)
    wl = rates.gamma_e * fields.bz
    transfer = rates.gamma_e * s / (s * s + wl * wl)
    return LinearResponseSolution(
        pz0=pz0,
        amp_factor_M=abs(transfer),
        phase_delay=math.atan2(transfer.imag, transfer.real),
        q=q,
    )


def harmonic_amplitude(t: np.ndarray, x: np.ndarray, freq: float) -> tuple[float, float]:
    """Amplitude and phase of the ``freq`` component of uniformly sampled ``x``.

    Returns (A, phi) for x ~ A cos(2 pi freq t + phi). The record should span
    an integer number of periods for the projection to be leakage free.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    # drop the duplicated endpoint of a closed window
    n = len(t) - 1 if len(t) > 1 else len(t)
    ph = np.exp(-2j * np.pi * freq * t[:n])
    c = 2.0 * np.dot(x[:n], ph) / n
    return float(abs(c)), float(np.angle(c))


def spin_temperature_distribution(pz: float) -> SpinTemperatureDistribution:
    """Sublevel occupations rho(m_F) = exp(beta m_F)/Z for the F = 2 manifold."""
    if not -1.0 < pz < 1.0:
        raise DomainError(f"spin-temperature distribution needs |pz| < 1, got {pz}")
    beta = math.log((1.0 + pz) / (1.0 - pz))
    weights = {m: math.exp(beta * m) for m in (-2, -1, 0, 1, 2)}
    z = math.fsum(weights.values())
    return SpinTemperatureDistribution({m: w / z for m, w in weights.items()}, beta)

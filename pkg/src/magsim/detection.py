"""Photodetection of the postselected probe: counts, shot noise, DAQ ratio, saturation.

Detector 1 sees the H (transmitted) port and detector 2 the V (reflected)
port of the polarizing beam splitter. Counts are Poisson; saturation is a
hard clip per detector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import interferometer as mzi
from .errors import DarkPortError, DomainError, NoSignalError
from .rng import check_seed, substream


@dataclass(frozen=True)
class DetectorConfig:
    n_photons: float
    i_sat: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not self.n_photons > 0:
            raise DomainError(f"n_photons must be positive, got {self.n_photons}")
        if self.i_sat is not None and not self.i_sat > 0:
            raise DomainError(f"i_sat must be positive when given, got {self.i_sat}")
        check_seed(self.seed)


@dataclass(frozen=True)
class CountPair:
    """(H-detector, V-detector) counts; floats when holding expectations."""

    n1: float
    n2: float

    @property
    def total(self) -> float:
        return self.n1 + self.n2


@dataclass(frozen=True)
class DaqResult:
    ratio_R: float
    pv_est: float
    theta_est: float
    clamped: bool = False


@dataclass(frozen=True)
class SaturationRow:
    n_photons: float
    p_f: float
    theta_true: float
    rms_err_psa: float
    rms_err_conv: float
    trials: int
    seed: int


def daq_ratio(i_v: float, i_h: float) -> float:
    """(I_V - I_H)/(I_V + I_H)."""
    total = i_v + i_h
    if total == 0:
        raise NoSignalError("both detectors read zero")
    return (i_v - i_h) / total


def pv_from_ratio(r: float) -> float:
    return 0.5 * (r + 1.0)


def estimate(counts: CountPair) -> DaqResult:
    """Invert counts -> R -> P_V -> angle (principal branch).

    P_V estimates outside [0, 1] can only come from corrupted counts; they are
    clamped and flagged.
    """
    r = daq_ratio(counts.n2, counts.n1)
    pv = pv_from_ratio(r)
    clamped = not 0.0 <= pv <= 1.0
    pv = min(max(pv, 0.0), 1.0)
    return DaqResult(ratio_R=r, pv_est=pv, theta_est=math.asin(math.sqrt(pv)), clamped=clamped)


def expected_counts(n_photons: float, p_f: float, theta_tilde: float) -> CountPair:
    if not 0.0 <= p_f <= 1.0:
        raise DomainError(f"p_f must lie in [0, 1], got {p_f}")
    if not 0.0 <= theta_tilde <= math.pi / 2:
        raise DomainError(f"theta_tilde must lie in [0, pi/2], got {theta_tilde}")
    n = p_f * n_photons
    c = math.cos(theta_tilde)
    s = math.sin(theta_tilde)
    return CountPair(n * c * c, n * s * s)


def _poisson(gen: np.random.Generator, expected: CountPair) -> CountPair:
    if expected.n1 < 0 or expected.n2 < 0:
        raise DomainError("expected counts must be non-negative")
    n1, n2 = gen.poisson((expected.n1, expected.n2))
    return CountPair(int(n1), int(n2))


def sample_counts(expected: CountPair, seed: int) -> CountPair:
    """Independent Poisson draws with the given means, reproducible for ``seed``."""
    return _poisson(substream(seed), expected)


def sample_trials(expected: CountPair, seed: int, trials: int, key: Sequence[int] = ()) -> np.ndarray:
    """(trials, 2) array of Poisson counts; trial i uses substream (seed, *key, i)."""
    out = np.empty((trials, 2), dtype=np.int64)
    for i in range(trials):
        c = _poisson(substream(seed, *key, i), expected)
        out[i] = (c.n1, c.n2)
    return out


def saturate(counts: CountPair, i_sat: Optional[float]) -> CountPair:
    if i_sat is None:
        return counts
    if not i_sat > 0:
        raise DomainError(f"i_sat must be positive, got {i_sat}")
    return CountPair(min(counts.n1, i_sat), min(counts.n2, i_sat))


def delta_ratio(p_f: float, n_photons: float, theta_tilde: float) -> float:
    """Shot-noise error of R: sin(2 theta_tilde)/sqrt(p_f N)."""
    n = p_f * n_photons
    if n <= 0:
        raise DarkPortError("no photons survive postselection")
    return math.sin(2.0 * theta_tilde) / math.sqrt(n)


def shot_noise_delta_theta(p_f: float, n_photons: float) -> float:
    """Shot-noise error of the detected angle, 1/(2 sqrt(p_f N))."""
    n = p_f * n_photons
    if n <= 0:
        raise DarkPortError("no photons survive postselection")
    return 1.0 / (2.0 * math.sqrt(n))


def conventional_delta_theta(n_photons: float) -> float:
    """Conventional-measurement error scale 1/sqrt(N) used for the SNR comparison.

    A full Poisson propagation of the single-pass measurement gives 1/(2 sqrt(N));
    the comparison keeps the 1/sqrt(N) scale under which the postselected SNR
    matches the conventional one.
    """
    if not n_photons > 0:
        raise DomainError("n_photons must be positive")
    return 1.0 / math.sqrt(n_photons)


SMALL_ANGLE_LIMIT = 0.05


def snr_compare(theta: float, beta: float, n_photons: float) -> tuple[float, float]:
    """(SNR of the postselected scheme, SNR of the conventional scheme)."""
    if not 0.0 < theta < SMALL_ANGLE_LIMIT:
        raise DomainError(f"SNR comparison holds for 0 < theta < {SMALL_ANGLE_LIMIT}, got {theta}")
    out = mzi.postselect(theta, beta)
    snr_psa = out.theta_tilde / shot_noise_delta_theta(out.p_f, n_photons)
    snr_conv = theta / conventional_delta_theta(n_photons)
    return snr_psa, snr_conv


def _angle_or_zero(counts: CountPair) -> float:
    try:
        return estimate(counts).theta_est
    except NoSignalError:
        return 0.0


def run_conventional(theta: float, n_photons: float, i_sat: Optional[float], gen: np.random.Generator) -> float:
    """One trial of the single-pass measurement; returns the theta estimate."""
    c = math.cos(theta)
    s = math.sin(theta)
    counts = _poisson(gen, CountPair(n_photons * c * c, n_photons * s * s))
    return _angle_or_zero(saturate(counts, i_sat))


def run_postselected(
    theta: float, beta: float, n_photons: float, i_sat: Optional[float], gen: np.random.Generator
) -> float:
    """One trial of the interferometric scheme; returns the theta estimate."""
    out = mzi.postselect(theta, beta)
    counts = _poisson(gen, expected_counts(n_photons, out.p_f, out.theta_tilde))
    theta_t = _angle_or_zero(saturate(counts, i_sat))
    return mzi.theta_from_theta_tilde(theta_t, beta)


def saturation_point(
    theta: float,
    beta: float,
    n_photons: float,
    i_sat: Optional[float],
    trials: int,
    seed: int,
    index: int = 0,
) -> SaturationRow:
    """Both pipelines at one photon number; trial k draws from substream (seed, index, k)."""
    err_conv = np.empty(trials)
    err_psa = np.empty(trials)
    for k in range(trials):
        gen = substream(seed, index, k)
        err_conv[k] = run_conventional(theta, n_photons, i_sat, gen) - theta
        err_psa[k] = run_postselected(theta, beta, n_photons, i_sat, gen) - theta
    return SaturationRow(
        n_photons=n_photons,
        p_f=mzi.postselection_probability(theta, beta),
        theta_true=theta,
        rms_err_psa=float(np.sqrt(np.mean(err_psa**2))),
        rms_err_conv=float(np.sqrt(np.mean(err_conv**2))),
        trials=trials,
        seed=seed,
    )


def saturation_study(
    theta: float,
    beta: float,
    n_grid: Sequence[float],
    i_sat: Optional[float],
    trials: int,
    seed: int,
) -> list[SaturationRow]:
    """RMS theta error of the conventional and postselected pipelines per photon number.

    Grid point j uses substreams (seed, j, k); within a trial the conventional
    pipeline draws first. Trials with no detected photon estimate theta = 0.
    """
    if trials < 100:
        raise DomainError(f"saturation study needs at least 100 trials, got {trials}")
    check_seed(seed)
    return [saturation_point(theta, beta, n, i_sat, trials, seed, j) for j, n in enumerate(n_grid)]


def theta_tilde_spread(theta: float, beta: float, n_photons: float, trials: int, seed: int, index: int = 0):
    """Monte Carlo (std of R, std of the theta_tilde estimate) without saturation."""
    out = mzi.postselect(theta, beta)
    counts = sample_trials(expected_counts(n_photons, out.p_f, out.theta_tilde), seed, trials, key=(index,))
    n_h = counts[:, 0].astype(float)
    n_v = counts[:, 1].astype(float)
    total = n_h + n_v
    if np.any(total == 0):
        raise NoSignalError("a trial detected no photons; increase n_photons")
    r = (n_v - n_h) / total
    theta_t = np.arcsin(np.sqrt(np.clip(0.5 * (r + 1.0), 0.0, 1.0)))
    return float(np.std(r, ddof=1)), float(np.std(theta_t, ddof=1))


def beta_for_pf(p_f: float, theta: float = 0.0) -> float:
    """Phase beta in [pi/2, pi] giving postselection probability ``p_f`` at ``theta``."""
    c = (2.0 * p_f - 1.0) / math.cos(theta)
    if not -1.0 <= c <= 1.0:
        raise DomainError(f"p_f = {p_f} is not reachable at theta = {theta}")
    return math.acos(c)

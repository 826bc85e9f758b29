"""Run configuration: TOML (or JSON) files mapped onto validated dataclasses.

Loading is fail-closed: unknown keys, missing required keys and any violated
physical invariant raise :class:`ConfigError` before anything runs.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import spin_dynamics as sd
from .errors import ConfigError, DomainError
from .optics import OpticalParams
from .rng import SEED_MASK

PRESETS = ("fig2a", "fig2b", "fig3", "fig6", "snr", "saturation")


class _Section:
    """Pops typed keys out of one config table and rejects leftovers."""

    def __init__(self, data: Any, where: str):
        if not isinstance(data, dict):
            raise ConfigError(f"[{where}] must be a table")
        self.data = dict(data)
        self.where = where

    def _convert(self, key, value, kind):
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{self.where}.{key}: expected a number, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ConfigError(f"{self.where}.{key}: must be finite")
            return value
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{self.where}.{key}: expected an integer, got {value!r}")
            return value
        if kind is str:
            if not isinstance(value, str):
                raise ConfigError(f"{self.where}.{key}: expected a string, got {value!r}")
            return value
        if kind is list:
            if not isinstance(value, list):
                raise ConfigError(f"{self.where}.{key}: expected an array, got {value!r}")
            return value
        raise TypeError(kind)

    def req(self, key: str, kind=float):
        if key not in self.data:
            raise ConfigError(f"{self.where}.{key}: required field is missing")
        return self._convert(key, self.data.pop(key), kind)

    def opt(self, key: str, default, kind=float):
        if key not in self.data:
            return default
        return self._convert(key, self.data.pop(key), kind)

    def floats(self, key: str, default=None) -> Optional[tuple]:
        raw = self.opt(key, default, list) if default is not None else self.req(key, list)
        return tuple(self._convert(f"{key}[{i}]", v, float) for i, v in enumerate(raw))

    def done(self):
        if self.data:
            raise ConfigError(f"[{self.where}] unknown keys: {', '.join(sorted(self.data))}")


def _checked(where: str, build):
    try:
        return build()
    except DomainError as exc:
        raise ConfigError(f"[{where}] {exc}") from exc


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SpinSection:
    rates: sd.RateParams
    fields: sd.FieldConfig
    q_mode: sd.SlowingFactorMode
    p0: sd.BlochVector
    dt: float
    steps_per_drive_period: Optional[int]
    transient_multiplier: float
    record_periods: int
    output_stride: int


@dataclass(frozen=True)
class DetectorSection:
    n_photons: float
    i_sat: Optional[float]
    trials: int
    mc_trials: int
    theta: Optional[float]
    target_p_f: Optional[float]


@dataclass(frozen=True)
class PbsSection:
    pairs: tuple
    eta_t: float
    eta_r: float


@dataclass(frozen=True)
class RunConfig:
    seed: int
    spin: Optional[SpinSection] = None
    optics: Optional[OpticalParams] = None
    betas: Optional[tuple] = None
    detector: Optional[DetectorSection] = None
    pbs: Optional[PbsSection] = None
    sweep: dict = field(default_factory=dict)
    output_dir: Optional[str] = None
    config_hash: str = ""

    def axis(self, name: str) -> SweepAxis:
        if name not in self.sweep:
            raise ConfigError(f"sweep.{name}: required axis is missing")
        return self.sweep[name]


def _parse_spin(data) -> SpinSection:
    s = _Section(data, "spin")
    gamma = 2.0 * math.pi * s.req("gamma_e_hz_per_nt")
    rates = _checked("spin", lambda: sd.RateParams(gamma, s.req("r_op"), s.req("r_rel")))
    if rates.total <= 0:
        raise ConfigError("[spin] r_op + r_rel must be positive")
    fields = _checked(
        "spin",
        lambda: sd.FieldConfig(
            bz=s.req("bz_nt"),
            by_amp=s.opt("by_amp_nt", 0.0),
            by_freq=s.opt("by_freq_hz", 0.0),
            by_phase=s.opt("by_phase_rad", 0.0),
        ),
    )
    mode = s.opt("q_mode", "polarization", str)
    if mode == "polarization":
        q_mode = sd.SlowingFactorMode.polarization_dependent()
    elif mode == "constant":
        q_mode = _checked("spin", lambda: sd.SlowingFactorMode.constant(s.req("q")))
    else:
        raise ConfigError(f"spin.q_mode: expected 'polarization' or 'constant', got {mode!r}")
    p0 = s.floats("p0", [0.0, 0.0, 0.0])
    if len(p0) != 3:
        raise ConfigError("spin.p0: expected three components")
    if math.sqrt(sum(c * c for c in p0)) > 1.0:
        raise ConfigError("spin.p0: |P| must not exceed 1")
    spp = s.opt("steps_per_drive_period", None, int)
    dt = s.opt("dt_s", None)
    transient = s.opt("transient_multiplier", 5.0)
    periods = s.opt("record_periods", 4, int)
    stride = s.opt("output_stride", 1, int)
    s.done()
    if transient < 0 or periods < 1 or stride < 1:
        raise ConfigError("[spin] transient_multiplier >= 0, record_periods >= 1, output_stride >= 1 required")
    if (spp is None) == (dt is None):
        raise ConfigError("[spin] give exactly one of dt_s or steps_per_drive_period")
    if spp is not None:
        if fields.by_freq <= 0 or spp < 1:
            raise ConfigError("spin.steps_per_drive_period needs by_freq_hz > 0 and a positive count")
        dt = 1.0 / (fields.by_freq * spp)
    try:
        sd.check_step(rates, fields, q_mode, dt)
    except ConfigError as exc:
        raise ConfigError(f"[spin] {exc}") from exc
    return SpinSection(rates, fields, q_mode, sd.BlochVector(*p0), dt, spp, transient, periods, stride)


def _parse_optics(data) -> OpticalParams:
    s = _Section(data, "optics")
    nu0 = s.req("resonance_freq_hz")
    kwargs = dict(
        path_length_l=s.req("path_length_m"),
        oscillator_strength_f=s.req("oscillator_strength"),
        probe_freq_nu=nu0 + s.req("detuning_hz"),
        resonance_freq_nu0=nu0,
        fwhm_delta_nu=s.req("fwhm_hz"),
        classical_electron_radius_re=s.opt("classical_electron_radius_m", 2.8e-15),
        speed_of_light_c=s.opt("speed_of_light_m_s", 2.998e8),
    )
    density = s.req("atom_density_cm3")
    s.done()
    return _checked("optics", lambda: OpticalParams.from_cm3(density, **kwargs))


def _parse_mzi(data) -> tuple:
    s = _Section(data, "mzi")
    betas = tuple(b * math.pi for b in s.floats("beta_over_pi"))
    s.done()
    if not betas:
        raise ConfigError("mzi.beta_over_pi: at least one phase is required")
    for b in betas:
        if not 0.0 <= b < 2.0 * math.pi:
            raise ConfigError(f"mzi.beta_over_pi: {b / math.pi} is outside [0, 2)")
    return betas


def _parse_detector(data) -> DetectorSection:
    s = _Section(data, "detector")
    n = s.req("n_photons")
    i_sat = s.opt("i_sat", None)
    trials = s.opt("trials", 200, int)
    mc_trials = s.opt("mc_trials", 0, int)
    theta = s.opt("theta_rad", None)
    target = s.opt("target_p_f", None)
    s.done()
    if not n > 0:
        raise ConfigError("detector.n_photons: must be positive")
    if i_sat is not None and not i_sat > 0:
        raise ConfigError("detector.i_sat: must be positive (omit for no saturation)")
    if trials < 100:
        raise ConfigError("detector.trials: at least 100 trials are required")
    if mc_trials < 0:
        raise ConfigError("detector.mc_trials: must be non-negative")
    if target is not None and not 0.0 < target < 1.0:
        raise ConfigError("detector.target_p_f: must lie in (0, 1)")
    return DetectorSection(n, i_sat, trials, mc_trials, theta, target)


def _parse_pbs(data) -> PbsSection:
    from .pbs_crosstalk import PbsParams

    s = _Section(data, "pbs")
    raw = s.req("pairs", list)
    eta_t = s.opt("eta_t", 1.0)
    eta_r = s.opt("eta_r", 1.0)
    s.done()
    pairs = []
    for i, p in enumerate(raw):
        if not (isinstance(p, list) and len(p) == 2):
            raise ConfigError(f"pbs.pairs[{i}]: expected [delta1, delta2]")
        d1, d2 = (s._convert(f"pairs[{i}]", v, float) for v in p)
        _checked("pbs", lambda: PbsParams.lossless(d1, d2, eta_t, eta_r))
        pairs.append((d1, d2))
    if not pairs:
        raise ConfigError("pbs.pairs: at least one pair is required")
    return PbsSection(tuple(pairs), eta_t, eta_r)


def _parse_sweep(data) -> dict:
    if not isinstance(data, dict):
        raise ConfigError("[sweep] must be a table of axes")
    axes = {}
    for name in sorted(data):
        s = _Section(data[name], f"sweep.{name}")
        axis = SweepAxis(name, s.req("min"), s.req("max"), s.req("count", int), s.opt("scale", "linear", str))
        s.done()
        if axis.count < 2:
            raise ConfigError(f"sweep.{name}.count: at least 2 points are required")
        if axis.scale not in ("linear", "log"):
            raise ConfigError(f"sweep.{name}.scale: expected 'linear' or 'log'")
        if axis.max < axis.min:
            raise ConfigError(f"sweep.{name}: max is below min")
        if axis.scale == "log" and axis.min <= 0:
            raise ConfigError(f"sweep.{name}: log axes need min > 0")
        axes[name] = axis
    return axes


def config_hash(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def parse_config(raw: dict) -> RunConfig:
    top = _Section(raw, "top level")
    seed = top.opt("seed", 0, int)
    if not 0 <= seed <= SEED_MASK:
        raise ConfigError("seed: must fit in 64 unsigned bits")
    parsers = {
        "spin": _parse_spin,
        "optics": _parse_optics,
        "mzi": _parse_mzi,
        "detector": _parse_detector,
        "pbs": _parse_pbs,
        "sweep": _parse_sweep,
    }
    parts = {}
    for name, parse in parsers.items():
        if name in top.data:
            parts[name] = parse(top.data.pop(name))
    out_dir = None
    if "output" in top.data:
        o = _Section(top.data.pop("output"), "output")
        out_dir = o.opt("dir", None, str)
        o.done()
    top.done()
    return RunConfig(
        seed=seed,
        spin=parts.get("spin"),
        optics=parts.get("optics"),
        betas=parts.get("mzi"),
        detector=parts.get("detector"),
        pbs=parts.get("pbs"),
        sweep=parts.get("sweep", {}),
        output_dir=out_dir,
        config_hash=config_hash(raw),
    )


def parse_text(text: str, fmt: str = "toml") -> dict:
    try:
        if fmt == "json":
            raw = json.loads(text)
        else:
            raw = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table at top level")
    return raw


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("magsim").joinpath("presets", f"{name}.toml").read_text(encoding="utf-8")


def load_config(path) -> RunConfig:
    """Load a config file; a bare preset name (e.g. ``fig3``) loads the bundled preset."""
    p = Path(path)
    if not p.exists() and str(path) in PRESETS:
        return parse_config(parse_text(preset_text(str(path))))
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    fmt = "json" if p.suffix.lower() == ".json" else "toml"
    return parse_config(parse_text(text, fmt))

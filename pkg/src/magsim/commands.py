"""Figure-data and study commands. Each returns (tables, summary)."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import detection as det
from . import interferometer as mzi
from . import optics
from . import pbs_crosstalk as pbs
from . import spin_dynamics as sd
from .config import RunConfig
from .errors import ConfigError, DarkPortError
from .output import Table

CURVE_HEADER = ["theta_rad", "beta_rad", "p_f", "pv_tilde", "theta_tilde_rad", "eta", "qfi_ps", "rejected"]


def _require(config: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(config, name) is None:
            section = "mzi" if name == "betas" else name
            raise ConfigError(f"[{section}] section is required for this command")


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def curve_row(theta: float, beta: float) -> list:
    try:
        out = mzi.postselect(theta, beta)
    except DarkPortError:
        return [theta, beta, mzi.postselection_probability(theta, beta), None, None, None, None, True]
    return [
        theta,
        beta,
        out.p_f,
        out.pv_tilde,
        out.theta_tilde,
        out.eta,
        mzi.qfi_postselected(theta, beta),
        False,
    ]


def run_fig2a(config: RunConfig, workers: int = 1):
    _require(config, "betas")
    thetas = config.axis("theta").values()
    table = Table("fig2a", CURVE_HEADER + ["qfi_entangled", "qfi_conventional"])
    for beta in config.betas:
        for theta in thetas:
            t = float(theta)
            table.rows.append(curve_row(t, beta) + [mzi.qfi_entangled(t), mzi.qfi_conventional(t)])
    qmax = max((r[6] for r in table.rows if r[6] is not None), default=None)
    return [table], {"max_qfi_ps": qmax}


def run_fig2b(config: RunConfig, workers: int = 1):
    _require(config, "betas")
    thetas = config.axis("theta").values()
    table = Table("fig2b", CURVE_HEADER + ["theta_no_ps_rad"])
    for beta in config.betas:
        for theta in thetas:
            t = float(theta)
            table.rows.append(curve_row(t, beta) + [t])
    gains = {f"{b / math.pi:.6g}pi": mzi.small_angle_gain(b) for b in config.betas}
    return [table], {"small_angle_gain": gains}


def _fig3_window(config: RunConfig):
    spin = config.spin
    f = spin.fields.by_freq
    if f <= 0:
        raise ConfigError("spin.by_freq_hz must be positive for the drive-response command")
    t_relax = sd.relaxation_time(spin.rates, spin.q_mode)
    n_transient = math.ceil(spin.transient_multiplier * t_relax * f)
    t_start = n_transient / f
    t_end = (n_transient + spin.record_periods) / f
    traj = sd.integrate_bloch(spin.rates, spin.fields, spin.q_mode, spin.p0, t_end, spin.dt)
    start = int(np.searchsorted(traj.t, t_start - 0.5 * spin.dt))
    window = sd.Trajectory(traj.t[start:], traj.px[start:], traj.py[start:], traj.pz[start:])
    return window, t_start


def run_fig3(config: RunConfig, workers: int = 1):
    _require(config, "spin", "optics", "betas")
    spin = config.spin
    window, t_start = _fig3_window(config)
    f = spin.fields.by_freq
    amp, phase = sd.harmonic_amplitude(window.t, window.px, f)
    lr = sd.linear_response(spin.rates, spin.fields, spin.q_mode)

    idx = np.arange(0, len(window), spin.output_stride)
    ts = window.t[idx].tolist()
    px = window.px[idx].tolist()
    series = optics.faraday_series(zip(ts, px), config.optics)

    bloch = Table("fig3_bloch", ["t_s", "px", "py", "pz"])
    bloch.rows = [list(r) for r in zip(ts, px, window.py[idx].tolist(), window.pz[idx].tolist())]
    faraday = Table("fig3_faraday", ["t_s", "theta_rad"])
    faraday.rows = [list(r) for r in series.rows()]

    main = Table("fig3", ["beta_rad", "t_s", "theta_rad", "theta_tilde_rad", "eta"])
    min_eta = {}
    for beta in config.betas:
        etas = []
        for t, theta in series.rows():
            tt = math.copysign(mzi.theta_tilde(abs(theta), beta), theta)
            eta = tt / theta if theta != 0 else None
            if eta is not None:
                etas.append(eta)
            main.rows.append([beta, t, theta, tt, eta])
        min_eta[f"{beta / math.pi:.6g}pi"] = min(etas) if etas else None

    summary = {
        "t_window_start_s": t_start,
        "dt_s": spin.dt,
        "px_amplitude_ode": amp,
        "px_phase_ode_rad": phase,
        "px_amplitude_linear_response": lr.px_amplitude(spin.fields.by_amp),
        "amp_factor_M_per_nT": lr.amp_factor_M,
        "phase_delay_theta_y_rad": lr.phase_delay,
        "pz0": lr.pz0,
        "theta_per_px_rad": config.optics.angle_per_px,
        "min_eta": min_eta,
    }
    return [main, bloch, faraday], summary


def run_fig6(config: RunConfig, workers: int = 1):
    _require(config, "pbs")
    v0s = config.axis("v0").values()
    table = Table("fig6", ["v0", "delta1", "delta2", "t_h", "r_v", "v_meas", "v_cal", "v_tilde", "phi"])
    for d1, d2 in config.pbs.pairs:
        p = pbs.PbsParams.lossless(d1, d2, config.pbs.eta_t, config.pbs.eta_r)
        cal = pbs.calibration_ratio(p)
        for v0 in v0s:
            v = float(v0)
            table.rows.append(
                [v, d1, d2, p.t_h, p.r_v, pbs.measured_ratio(v, p), cal, pbs.calibrated_ratio(v, p), pbs.error_ratio(v, p)]
            )
    return [table], {}


def _snr_point(args, n_photons, mc_trials, seed):
    index, theta, beta = args
    out = mzi.postselect(theta, beta)
    snr_psa, snr_conv = det.snr_compare(theta, beta, n_photons)
    mc = None
    if mc_trials:
        mc = det.theta_tilde_spread(theta, beta, n_photons, mc_trials, seed, index)[1]
    return [
        theta,
        beta,
        n_photons,
        out.p_f,
        out.theta_tilde,
        snr_psa,
        snr_conv,
        snr_psa / snr_conv,
        det.shot_noise_delta_theta(out.p_f, n_photons),
        mc,
        mc_trials,
        seed,
    ]


def run_snr(config: RunConfig, workers: int = 1):
    _require(config, "betas", "detector")
    n = config.detector.n_photons
    points = []
    for beta in config.betas:
        for theta in config.axis("theta").values():
            points.append((len(points), float(theta), beta))
    fn = partial(_snr_point, n_photons=n, mc_trials=config.detector.mc_trials, seed=config.seed)
    table = Table(
        "snr",
        [
            "theta_rad",
            "beta_rad",
            "n_photons",
            "p_f",
            "theta_tilde_rad",
            "snr_psa",
            "snr_conv",
            "snr_ratio",
            "dtheta_tilde_formula_rad",
            "dtheta_tilde_mc_rad",
            "trials",
            "seed",
        ],
    )
    table.rows = _map(fn, points, workers)
    ratios = [r[7] for r in table.rows]
    return [table], {"snr_ratio_min": min(ratios), "snr_ratio_max": max(ratios)}


def saturation_beta(config: RunConfig) -> float:
    d = config.detector
    if d.target_p_f is not None:
        return det.beta_for_pf(d.target_p_f, d.theta)
    _require(config, "betas")
    return config.betas[0]


def _saturation_point(args, theta, beta, i_sat, trials, seed):
    index, n = args
    return det.saturation_point(theta, beta, n, i_sat, trials, seed, index)


def run_saturation(config: RunConfig, workers: int = 1):
    _require(config, "detector")
    d = config.detector
    if d.theta is None:
        raise ConfigError("detector.theta_rad: required field is missing")
    beta = saturation_beta(config)
    grid = [(j, float(n)) for j, n in enumerate(config.axis("n_photons").values())]
    fn = partial(_saturation_point, theta=d.theta, beta=beta, i_sat=d.i_sat, trials=d.trials, seed=config.seed)
    rows = _map(fn, grid, workers)
    table = Table(
        "saturation",
        ["n_photons", "p_f", "theta_true_rad", "rms_err_psa_rad", "rms_err_conv_rad", "trials", "seed"],
    )
    table.rows = [[r.n_photons, r.p_f, r.theta_true, r.rms_err_psa, r.rms_err_conv, r.trials, r.seed] for r in rows]
    return [table], {"beta_rad": beta, "i_sat": d.i_sat}


COMMANDS = {
    "fig2a": run_fig2a,
    "fig2b": run_fig2b,
    "fig3": run_fig3,
    "fig6": run_fig6,
    "snr": run_snr,
    "saturation": run_saturation,
}


def validate(command: str, config: RunConfig) -> None:
    """Check everything ``command`` needs from ``config`` without running it."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if command in ("fig2a", "fig2b"):
        _require(config, "betas")
        config.axis("theta")
    elif command == "fig3":
        _require(config, "spin", "optics", "betas")
        if config.spin.fields.by_freq <= 0:
            raise ConfigError("spin.by_freq_hz must be positive for the drive-response command")
    elif command == "fig6":
        _require(config, "pbs")
        if config.axis("v0").min <= 0:
            raise ConfigError("sweep.v0: ratios must be positive")
    elif command == "snr":
        _require(config, "betas", "detector")
        axis = config.axis("theta")
        if not (0 < axis.min and axis.max < det.SMALL_ANGLE_LIMIT):
            raise ConfigError(f"sweep.theta: SNR comparison needs 0 < theta < {det.SMALL_ANGLE_LIMIT}")
    elif command == "saturation":
        _require(config, "detector")
        config.axis("n_photons")
        if config.detector.theta is None:
            raise ConfigError("detector.theta_rad: required field is missing")
        try:
            saturation_beta(config)
        except ValueError as exc:
            raise ConfigError(f"[detector] {exc}") from exc

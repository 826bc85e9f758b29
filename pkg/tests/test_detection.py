import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magsim import detection as det
from magsim import interferometer as mzi
from magsim.errors import DarkPortError, DomainError, NoSignalError
from magsim.rng import substream

B997 = 0.997 * math.pi


class TestDaq:
    @pytest.mark.parametrize("i_v, i_h, r", [(1, 1, 0.0), (1, 0, 1.0), (0, 1, -1.0), (3, 1, 0.5)])
    def test_ratio(self, i_v, i_h, r):
        assert det.daq_ratio(i_v, i_h) == r

    def test_no_signal(self):
        with pytest.raises(NoSignalError):
            det.daq_ratio(0, 0)

    def test_estimate_recovers_angle(self):
        exp = det.expected_counts(1e6, 0.5, 0.1057)
        res = det.estimate(exp)
        assert res.theta_est == pytest.approx(0.1057, rel=1e-12)
        assert not res.clamped

    def test_estimate_clamps_corrupted_counts(self):
        res = det.estimate(det.CountPair(-1.0, 5.0))
        assert res.clamped and res.pv_est == 1.0 and res.theta_est == pytest.approx(math.pi / 2)

    @given(st.floats(0, math.pi / 2), st.floats(1.0, 1e12))
    def test_roundtrip_on_expectations(self, theta_t, n):
        res = det.estimate(det.expected_counts(n, 1.0, theta_t))
        assert math.sin(res.theta_est) ** 2 == pytest.approx(math.sin(theta_t) ** 2, abs=1e-12)


class TestExpectedCounts:
    def test_example(self):
        c = det.expected_counts(1e6, 0.5, 0.1057)
        assert c.n1 == pytest.approx(494434.53, abs=0.01)
        assert c.n2 == pytest.approx(5565.47, abs=0.01)
        assert c.total == pytest.approx(5e5, rel=1e-15)

    @pytest.mark.parametrize("p_f, tt", [(-0.1, 0.1), (1.1, 0.1), (0.5, -0.1), (0.5, 2.0)])
    def test_domain(self, p_f, tt):
        with pytest.raises(DomainError):
            det.expected_counts(1e6, p_f, tt)


class TestSampling:
    def test_deterministic(self):
        exp = det.CountPair(1e4, 50.0)
        assert det.sample_counts(exp, 7) == det.sample_counts(exp, 7)
        assert np.array_equal(det.sample_trials(exp, 7, 20), det.sample_trials(exp, 7, 20))

    def test_seed_changes_stream(self):
        exp = det.CountPair(1e6, 1e6)
        assert not np.array_equal(det.sample_trials(exp, 7, 20), det.sample_trials(exp, 8, 20))

    def test_trials_are_substreams(self):
        exp = det.CountPair(1e3, 10.0)
        draws = det.sample_trials(exp, 11, 5, key=(3,))
        n1, n2 = substream(11, 3, 4).poisson((1e3, 10.0))
        assert tuple(draws[4]) == (n1, n2)

    def test_poisson_moments(self):
        exp = det.CountPair(400.0, 3.0)
        draws = det.sample_trials(exp, 2024, 20000)
        for col, lam in ((0, 400.0), (1, 3.0)):
            x = draws[:, col]
            assert x.mean() == pytest.approx(lam, rel=0.02)
            assert x.var(ddof=1) == pytest.approx(lam, rel=0.05)

    def test_poisson_tail(self):
        # P(X = 0) for mean 3 is e^-3
        draws = det.sample_trials(det.CountPair(3.0, 3.0), 5, 20000)
        frac = np.mean(draws == 0)
        assert frac == pytest.approx(math.exp(-3), abs=4 * math.sqrt(math.exp(-3) / 40000))

    def test_negative_mean(self):
        with pytest.raises(DomainError):
            det.sample_counts(det.CountPair(-1.0, 1.0), 0)


class TestSaturate:
    def test_clip(self):
        assert det.saturate(det.CountPair(10, 3), 5) == det.CountPair(5, 3)

    def test_none_is_identity(self):
        c = det.CountPair(10**9, 3)
        assert det.saturate(c, None) is c

    def test_invalid(self):
        with pytest.raises(DomainError):
            det.saturate(det.CountPair(1, 1), 0.0)

    def test_clipping_biases_the_estimate(self):
        clipped = det.saturate(det.CountPair(1e6, 1e3), 1e5)
        assert det.estimate(clipped).theta_est > 3 * det.estimate(det.CountPair(1e6, 1e3)).theta_est


class TestShotNoise:
    def test_value(self):
        assert det.shot_noise_delta_theta(0.5, 1e6) == pytest.approx(7.0711e-4, rel=1e-4)

    def test_delta_ratio(self):
        assert det.delta_ratio(1e-3, 1e8, 0.1) == pytest.approx(math.sin(0.2) / math.sqrt(1e5), rel=1e-14)

    def test_dark(self):
        with pytest.raises(DarkPortError):
            det.shot_noise_delta_theta(0.0, 1e6)

    def test_conventional_scale(self):
        assert det.conventional_delta_theta(1e6) == 1e-3

    def test_ratio_spread_matches_formula(self):
        out = mzi.postselect(1e-3, 0.9 * math.pi)
        sd_r, sd_t = det.theta_tilde_spread(1e-3, 0.9 * math.pi, 1e8, 10_000, seed=99)
        assert sd_r == pytest.approx(det.delta_ratio(out.p_f, 1e8, out.theta_tilde), rel=0.05)
        assert sd_t == pytest.approx(det.shot_noise_delta_theta(out.p_f, 1e8), rel=0.05)


class TestSnr:
    def test_example(self):
        psa, conv = det.snr_compare(1e-3, B997, 1e10)
        assert conv == pytest.approx(100.0, rel=1e-14)
        assert psa / conv == pytest.approx(1.0, abs=0.005)

    def test_small_angle_value_is_one(self):
        psa, conv = det.snr_compare(1e-5, 0.5 * math.pi, 1e8)
        assert psa / conv == pytest.approx(1.0, rel=1e-8)

    @pytest.mark.parametrize("theta", [0.0, 0.05, 0.3, -1e-3])
    def test_domain(self, theta):
        with pytest.raises(DomainError):
            det.snr_compare(theta, B997, 1e10)


class TestSaturationStudy:
    def test_saturation_favours_postselection(self):
        beta = det.beta_for_pf(1e-3, 1e-4)
        row = det.saturation_point(1e-4, beta, 1e8, 1e5, 200, seed=20240101)
        assert row.p_f == pytest.approx(1e-3, rel=1e-9)
        assert row.rms_err_psa < row.rms_err_conv
        # the clipped conventional estimate is dominated by bias, not noise
        assert row.rms_err_conv > 10 * row.rms_err_psa

    def test_without_saturation_follows_fisher_information(self):
        # QFI 2 (postselected, after accounting for p_f) vs 4 (single pass):
        # RMS errors 1/sqrt(N) and 1/(2 sqrt(N))
        beta = det.beta_for_pf(1e-2, 1e-3)
        row = det.saturation_point(1e-3, beta, 1e8, None, 400, seed=3)
        n = 1e8
        assert row.rms_err_psa == pytest.approx(1 / math.sqrt(n), rel=0.15)
        assert row.rms_err_conv == pytest.approx(1 / (2 * math.sqrt(n)), rel=0.15)

    def test_reproducible(self):
        beta = det.beta_for_pf(1e-3, 1e-4)
        a = det.saturation_study(1e-4, beta, [1e6, 1e7], 1e5, 100, seed=5)
        b = det.saturation_study(1e-4, beta, [1e6, 1e7], 1e5, 100, seed=5)
        assert a == b

    def test_grid_points_independent_of_order(self):
        beta = det.beta_for_pf(1e-3, 1e-4)
        full = det.saturation_study(1e-4, beta, [1e6, 1e7], 1e5, 100, seed=5)
        single = det.saturation_point(1e-4, beta, 1e7, 1e5, 100, seed=5, index=1)
        assert full[1] == single

    def test_too_few_trials(self):
        with pytest.raises(DomainError, match="100"):
            det.saturation_study(1e-4, 3.0, [1e6], 1e5, 50, seed=1)


class TestBetaForPf:
    @given(st.floats(1e-6, 0.5), st.floats(0.0, 0.1))
    def test_inverse(self, p_f, theta):
        # the reachable range at theta starts at (1 - cos theta)/2
        p_f = max(p_f, 1.01 * (1 - math.cos(theta)) / 2)
        beta = det.beta_for_pf(p_f, theta)
        assert mzi.postselection_probability(theta, beta) == pytest.approx(p_f, rel=1e-6)

    def test_unreachable(self):
        with pytest.raises(DomainError):
            det.beta_for_pf(1e-9, 0.1)


class TestDetectorConfig:
    @pytest.mark.parametrize("kw", [{"n_photons": 0}, {"n_photons": 1e6, "i_sat": -1.0}, {"n_photons": 1e6, "seed": -1}])
    def test_invalid(self, kw):
        with pytest.raises((DomainError, ValueError, TypeError)):
            det.DetectorConfig(**kw)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magsim import pbs_crosstalk as pbs
from magsim.errors import DomainError

FIG6 = pbs.PbsParams(t_h=0.995, r_v=0.995, delta1=0.005, delta2=0.005)


class TestParams:
    def test_lossless(self):
        p = pbs.PbsParams.lossless(0.01, 0.02)
        assert (p.t_h, p.r_v) == (0.99, 0.98)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(t_h=0.0, r_v=1.0),
            dict(t_h=1.0, r_v=1.2),
            dict(t_h=0.99, r_v=0.99, delta1=0.02),
            dict(t_h=0.99, r_v=0.99, delta2=-0.01),
            dict(t_h=1.0, r_v=1.0, eta_t=0.0),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            pbs.PbsParams(**kw)

    def test_bad_v0(self):
        with pytest.raises(DomainError):
            pbs.measured_ratio(0.0, FIG6)
        with pytest.raises(DomainError):
            pbs.PolarizationRatio(math.inf)


class TestRatios:
    def test_ideal_splitter_is_exact(self):
        ideal = pbs.PbsParams(1.0, 1.0)
        for v0 in (1e-4, 0.3, 1.0, 7.0):
            assert pbs.measured_ratio(v0, ideal) == v0
            assert pbs.calibrated_ratio(v0, ideal) == v0
            assert pbs.error_ratio(v0, ideal) == 0.0

    def test_worked_example(self):
        # (0.005 + 0.01*0.995) / (0.995 + 0.01*0.005) = 0.01495/0.99505
        assert pbs.calibrated_ratio(0.01, FIG6) == pytest.approx(0.01495 / 0.99505, rel=1e-14)
        assert pbs.calibrated_ratio(0.01, FIG6) == pytest.approx(0.015024, abs=1e-5)
        assert pbs.error_ratio(0.01, FIG6) == pytest.approx(0.5024, abs=1e-3)

    def test_calibration_unpolarized(self):
        p = pbs.PbsParams(0.9, 0.8, 0.05, 0.1, eta_t=2.0, eta_r=3.0)
        assert pbs.calibration_ratio(p) == pytest.approx(pbs.measured_ratio(1.0, p), rel=1e-15)

    def test_small_v0_floor(self):
        v0 = 1e-12
        floor = FIG6.delta1 * (FIG6.t_h + FIG6.delta2) / (FIG6.t_h * (FIG6.delta1 + FIG6.r_v))
        assert pbs.calibrated_ratio(v0, FIG6) == pytest.approx(floor, rel=1e-9)

    def test_divergence(self):
        assert pbs.error_ratio(1e-6, FIG6) > 100 * pbs.error_ratio(1e-2, FIG6)

    def test_smaller_error_at_larger_v0(self):
        assert pbs.error_ratio(0.1, FIG6) < pbs.error_ratio(0.01, FIG6)

    @given(
        st.floats(1e-4, 1e2),
        st.floats(0.0, 0.05),
        st.floats(0.0, 0.05),
        st.floats(1e-3, 1e3),
        st.floats(1e-3, 1e3),
    )
    def test_converter_coefficients_cancel(self, v0, d1, d2, et, er):
        base = pbs.PbsParams.lossless(d1, d2)
        scaled = pbs.PbsParams.lossless(d1, d2, eta_t=et, eta_r=er)
        assert abs(pbs.calibrated_ratio(v0, scaled) - pbs.calibrated_ratio(v0, base)) <= 1e-12 * pbs.calibrated_ratio(v0, base)
        # the uncalibrated ratio does depend on them
        ratio = pbs.measured_ratio(v0, scaled) / pbs.measured_ratio(v0, base)
        assert ratio == pytest.approx(er / et, rel=1e-12)

    @pytest.mark.parametrize("d", [1e-3, 5e-3, 1e-2])
    def test_monotone_decrease(self, d):
        p = pbs.PbsParams.lossless(d, d)
        grid = np.geomspace(1e-4, 1.0, 500)
        phi = [pbs.error_ratio(v, p) for v in grid]
        assert all(b < a for a, b in zip(phi, phi[1:]))


class TestAngle:
    def test_45_degrees(self):
        assert pbs.v0_from_angle(math.pi / 4).v0 == pytest.approx(1.0, rel=1e-15)

    def test_small(self):
        assert pbs.v0_from_angle(0.01).v0 == pytest.approx(math.tan(0.01) ** 2, rel=1e-15)

    @pytest.mark.parametrize("a", [0.0, math.pi / 2, -0.1])
    def test_domain(self, a):
        with pytest.raises(DomainError):
            pbs.v0_from_angle(a)

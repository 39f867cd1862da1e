import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsecancel.distortion import (
    DistortionSpec,
    distort,
    hd_distortion,
    imd_distortion,
    make_frame,
)
from sparsecancel.errors import DegenerateInputError, InvalidArgumentError
from sparsecancel.signal import fir_filter, generate_block, measure_power


class TestSpec:
    def test_orders(self):
        assert DistortionSpec.hd(3).order == 3
        assert DistortionSpec.imd(2, -1).order == 3
        assert DistortionSpec.imd(-2, 3).exponents == (-2, 3)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(kind="HD", Q=1), dict(kind="IMD", p=0, q=1), dict(kind="IMD", p=2, q=0),
         dict(kind="HD", Q=3, c0=0), dict(kind="HD", Q=3, c0=np.inf), dict(kind="XX", Q=3)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            DistortionSpec(**kwargs)


class TestHarmonic:
    def test_impulse_channel_cube(self):
        s = generate_block(50, "gaussian", 1)
        out = hd_distortion(fir_filter(s, [1.0]), DistortionSpec.hd(3))
        np.testing.assert_allclose(out, s**3, rtol=1e-14)

    def test_zero_input(self):
        assert not np.any(hd_distortion(np.zeros(6), DistortionSpec.hd(3)))

    def test_hand_value(self):
        # (1+i)^2 = 2i, (1+i)^3 = 2i(1+i) = -2+2i; times c0=2 -> -4+4i
        out = hd_distortion([1 + 1j], DistortionSpec.hd(3, c0=2))
        assert out[0] == pytest.approx(-4 + 4j, abs=1e-15)

    def test_kind_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            hd_distortion([1.0], DistortionSpec.imd(2, -1))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31), alpha=st.floats(0.05, 20), Q=st.integers(2, 5))
    def test_homogeneous(self, seed, alpha, Q):
        x = generate_block(20, "gaussian", seed)
        spec = DistortionSpec.hd(Q)
        np.testing.assert_allclose(hd_distortion(alpha * x, spec), alpha**Q * hd_distortion(x, spec), rtol=1e-12)


class TestIntermod:
    def test_hand_value(self):
        # i^2 * conj(1+i) = -1 * (1-i) = -1+i
        out = imd_distortion([1j], [1 + 1j], DistortionSpec.imd(2, -1))
        assert out[0] == pytest.approx(-1 + 1j, abs=1e-15)

    def test_bilinear_with_unit_multiplier(self):
        x1 = generate_block(10, "gaussian", 4)
        out = imd_distortion(x1, np.ones(10), DistortionSpec.imd(1, 1, c0=0.5 - 2j))
        np.testing.assert_allclose(out, (0.5 - 2j) * x1, rtol=1e-15)

    def test_zero_input(self):
        x = generate_block(10, "gaussian", 4)
        spec = DistortionSpec.imd(2, -1)
        assert not np.any(imd_distortion(np.zeros(10), x, spec))
        assert not np.any(imd_distortion(x, np.zeros(10), spec))

    def test_negative_first_exponent_conjugates_first(self):
        x1 = generate_block(10, "gaussian", 5)
        x2 = generate_block(10, "gaussian", 6)
        out = imd_distortion(x1, x2, DistortionSpec.imd(-1, 2))
        np.testing.assert_allclose(out, np.conj(x1) * x2**2, rtol=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            imd_distortion(np.ones(3), np.ones(4), DistortionSpec.imd(2, -1))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31), alpha=st.floats(-20, 20).filter(lambda a: abs(a) > 0.05))
    def test_real_scaling_of_conjugated_source(self, seed, alpha):
        x1 = generate_block(20, "gaussian", seed)
        x2 = generate_block(20, "gaussian", seed + 1)
        spec = DistortionSpec.imd(2, -1)
        np.testing.assert_allclose(imd_distortion(x1, alpha * x2, spec), alpha * imd_distortion(x1, x2, spec), rtol=1e-12)

    def test_dispatch(self):
        x = generate_block(8, "gaussian", 1)
        np.testing.assert_array_equal(distort(DistortionSpec.hd(2), x), x**2)


class TestFrame:
    def distortion(self):
        return hd_distortion(generate_block(520, "gaussian", 3), DistortionSpec.hd(3))

    def test_levels(self):
        frame = make_frame(self.distortion(), -85.0, -95.0, 0.0, seed=9)
        assert measure_power(frame.p_true) == pytest.approx(-85.0, abs=1e-9)
        assert measure_power(frame.z) == pytest.approx(-85.0, abs=1e-9)
        assert measure_power(frame.y) == pytest.approx(-95.0, abs=1e-9)
        assert (frame.distortion_dbm, frame.P_s_dbm, frame.noise_dbm) == (-85.0, -95.0, -85.0)

    def test_bitwise_sum(self):
        frame = make_frame(self.distortion(), -85.0, -95.0, 0.0, seed=9)
        assert np.array_equal(frame.r, frame.p_true + frame.y + frame.z)
        assert frame.r.size == frame.p_true.size == frame.y.size == frame.z.size == 520

    def test_noiseless_and_no_dl(self):
        frame = make_frame(self.distortion(), -85.0, -np.inf, np.inf, seed=9)
        assert not np.any(frame.z)
        assert not np.any(frame.y)
        assert np.array_equal(frame.r, frame.p_true)

    def test_deterministic_and_independent_streams(self):
        a = make_frame(self.distortion(), -85.0, -95.0, 0.0, seed=9)
        b = make_frame(self.distortion(), -85.0, -95.0, 0.0, seed=9)
        assert np.array_equal(a.r, b.r)
        corr = abs(np.vdot(a.y, a.z)) / (np.linalg.norm(a.y) * np.linalg.norm(a.z))
        assert corr < 0.2

    def test_zero_distortion_rejected(self):
        with pytest.raises(DegenerateInputError):
            make_frame(np.zeros(10), -85.0, -95.0, 0.0, seed=1)

import numpy as np
import pytest

from sparsecancel.dictionary import build_dictionary
from sparsecancel.distortion import DistortionSpec, hd_distortion, make_frame
from sparsecancel.metrics import make_report, reconstruct, residual_distortion_power
from sparsecancel.signal import fir_filter, generate_block
from sparsecancel.solvers import lls_solve


@pytest.fixture
def hd_case():
    s = generate_block(520, "gaussian", 21)
    h = np.array([1.0, 0.5 - 0.3j, 0.1j, -0.05])
    p = hd_distortion(fir_filter(s, h), DistortionSpec.hd(3))
    D = build_dictionary("exact", DistortionSpec.hd(3), s, lengths=4)
    return s, p, D


def test_reconstruct_zero(hd_case):
    _, _, D = hd_case
    assert not np.any(reconstruct(D, np.zeros(D.J)))


def test_reconstruct_unit_vector_gives_raw_column(hd_case):
    s, _, D = hd_case
    j = 7
    e = np.zeros(D.J)
    e[j] = 1.0
    np.testing.assert_allclose(reconstruct(D, e), D.raw_columns()[:, j], rtol=1e-13)


def test_reconstruct_raw_matrix():
    A = np.arange(6, dtype=complex).reshape(3, 2)
    np.testing.assert_array_equal(reconstruct(A, [1, 2]), A @ [1, 2])


def test_full_lls_reconstructs_noiseless_distortion(hd_case):
    _, p, D = hd_case
    frame = make_frame(p, -85.0, -np.inf, np.inf, seed=1)
    p_hat = reconstruct(D, lls_solve(D, frame.r).v_hat)
    assert np.linalg.norm(frame.p_true - p_hat) <= 1e-6 * np.linalg.norm(frame.p_true)


class TestResidualPower:
    def frame(self, hd_case, seed=3, P_s=-95.0):
        return make_frame(hd_case[1], -85.0, P_s, 0.0, seed)

    def test_perfect(self, hd_case):
        f = self.frame(hd_case)
        assert residual_distortion_power(f, f.p_true) == -np.inf

    def test_no_estimate(self, hd_case):
        f = self.frame(hd_case)
        assert residual_distortion_power(f, np.zeros(520)) == pytest.approx(-85.0, abs=1e-9)

    def test_scalar_mismatch(self, hd_case):
        f = self.frame(hd_case)
        assert residual_distortion_power(f, 0.9 * f.p_true) == pytest.approx(-105.0, abs=1e-9)

    def test_invariant_to_dl_and_noise(self, hd_case):
        a = self.frame(hd_case, seed=3)
        b = self.frame(hd_case, seed=4, P_s=-60.0)
        assert np.array_equal(a.p_true, b.p_true)
        p_hat = 0.7 * a.p_true
        assert residual_distortion_power(a, p_hat) == residual_distortion_power(b, p_hat)


class TestReport:
    def test_default_levels(self, hd_case):
        f = make_frame(hd_case[1], -85.0, -95.0, 0.0, seed=5)
        rep = make_report(f, 0.5 * f.p_true, "sparse", 10)
        assert rep.inr_db == 0.0
        assert rep.isr_db == 10.0
        assert rep.original_distortion_dbm == pytest.approx(-85.0, abs=1e-9)
        assert rep.residual_distortion_dbm == pytest.approx(-85.0 + 20 * np.log10(0.5), abs=1e-9)
        assert rep.suppression_db + rep.residual_distortion_dbm == pytest.approx(rep.original_distortion_dbm, abs=1e-12)
        assert (rep.solver_id, rep.J_used) == ("sparse", 10)

    def test_noiseless_full_suppression(self, hd_case):
        _, p, D = hd_case
        f = make_frame(p, -85.0, -np.inf, np.inf, seed=1)
        rep = make_report(f, reconstruct(D, lls_solve(D, f.r).v_hat), "full", D.J)
        assert rep.suppression_db >= 100.0

import math

import numpy as np
import pytest
from scipy.special import lambertw

import closed_forms as cf
from errors import DomainError, NumericError
from omt import (
    coherent_envelope, default_bracket, lambert_w0, omt_coherent, omt_coherent_rescaled, omt_gamma,
    omt_numeric, omt_squeezed, squeezed_envelope,
)

W_MINUS_2_OVER_E2 = 1.5936 - 2


class TestLambert:

    def test_known_values(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(-math.exp(-1)) == pytest.approx(-1.0, abs=1e-12)
        assert lambert_w0(1.0) == pytest.approx(0.5671432904, abs=1e-10)
        assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-14)

    def test_residual(self):
        xs = np.concatenate([
            -math.exp(-1) + np.logspace(-12, -0.5, 40),
            np.linspace(-0.3, 3, 40),
            np.logspace(0.5, 6, 40),
        ])
        ws = lambert_w0(xs)
        residual = np.abs(ws * np.exp(ws) - xs)
        assert np.all(residual <= 1e-12 * np.maximum(1, np.abs(xs)))

    @pytest.mark.parametrize('x', [-0.3, -0.1, 0.5, 7.0, 1e4])
    def test_against_scipy(self, x):
        assert lambert_w0(x) == pytest.approx(lambertw(x).real, rel=1e-12)

    def test_array_in_array_out(self):
        out = lambert_w0(np.array([0.0, 1.0]))
        assert isinstance(out, np.ndarray)
        assert out.shape == (2,)

    def test_below_branch_point(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.5)


class TestCoherent:

    def test_cold_bath(self):
        assert omt_coherent(0.1, 0.0).tau_max == pytest.approx(20.0, rel=1e-12)

    def test_hot_bath(self):
        assert omt_coherent(1.0, 1e9).tau_max == pytest.approx(2 + W_MINUS_2_OVER_E2, abs=1e-4)

    def test_scaling_with_g(self):
        results = [omt_coherent(g, 3.0, alpha=2.0) for g in (0.2, 0.1, 0.05)]
        assert [r.tau_max * g for r, g in zip(results, (0.2, 0.1, 0.05))] == pytest.approx(
            [results[0].tau_max * 0.2] * 3, rel=1e-12
        )
        assert [r.i_max * g ** 2 for r, g in zip(results, (0.2, 0.1, 0.05))] == pytest.approx(
            [results[0].i_max * 0.04] * 3, rel=1e-12
        )

    def test_rescaled_is_earlier(self):
        for nbar in (0.0, 0.5, 5.0, 100.0):
            assert omt_coherent_rescaled(0.1, nbar).tau_max < omt_coherent(0.1, nbar).tau_max

    def test_rescaled_cold_bath(self):
        assert omt_coherent_rescaled(0.1, 0.0).tau_max == pytest.approx(10.0, rel=1e-12)

    def test_envelope_numeric(self):
        g, nbar = 0.1, 5.0
        closed = omt_coherent(g, nbar, alpha=1.5)
        numeric = omt_numeric(coherent_envelope(1.5, g, nbar), default_bracket(g))
        assert numeric.tau_max == pytest.approx(closed.tau_max, rel=1e-6)
        assert numeric.i_max == pytest.approx(closed.i_max, rel=1e-10)
        assert not numeric.at_boundary

    def test_rescaled_envelope_numeric(self):
        g, nbar = 0.1, 2.0
        closed = omt_coherent_rescaled(g, nbar)
        numeric = omt_numeric(coherent_envelope(1.0, g, nbar), default_bracket(g), rescaled=True)
        assert numeric.tau_max == pytest.approx(closed.tau_max, rel=1e-6)
        assert numeric.i_max == pytest.approx(closed.i_max, rel=1e-8)

    def test_full_curve_close_to_envelope_optimum(self):
        g, nbar = 0.1, 5.0
        closed = omt_coherent(g, nbar)

        def curve(tau):
            return cf.qfi_omega_coherent_term(1.0, g, nbar, tau)

        numeric = omt_numeric(curve, default_bracket(g))
        assert abs(closed.tau_max - numeric.tau_max) <= math.pi / 2
        assert curve(closed.tau_max) >= 0.98 * numeric.i_max


class TestSqueezed:

    def test_unit_g(self):
        assert omt_squeezed(1.0) == pytest.approx(1.5936, abs=1e-3)

    def test_small_g(self):
        assert omt_squeezed(0.1) == pytest.approx(15.936, abs=1e-2)

    def test_envelope_numeric(self):
        numeric = omt_numeric(squeezed_envelope(1.0, 0.1, 0.01), default_bracket(0.1))
        assert numeric.tau_max == pytest.approx(omt_squeezed(0.1), rel=1e-6)

    def test_non_positive_g(self):
        with pytest.raises(DomainError):
            omt_squeezed(0.0)


class TestGamma:

    def test_cold_thermal(self):
        assert omt_gamma('thermal', 0.1, 0.0) == pytest.approx(20.0)

    def test_displaced(self):
        assert omt_gamma('displaced', 0.1) == pytest.approx(20.0)
        assert omt_gamma('displaced-rescaled', 0.1) == pytest.approx(10.0)

    def test_thermal_numeric(self):
        g, n_th = 0.1, 10.0

        def curve(tau):
            return cf.qfi_gamma_thermal(n_th, g, 0.0, tau, g)

        numeric = omt_numeric(curve, default_bracket(g))
        assert numeric.tau_max == pytest.approx(omt_gamma('thermal', g, n_th), rel=1e-6)

    def test_displaced_numeric(self):
        g = 0.1

        def curve(tau):
            return cf.qfi_gamma_displaced_thermal(1.0, 1.0, g, 1.0, tau, g)

        numeric = omt_numeric(curve, default_bracket(g))
        assert numeric.tau_max == pytest.approx(omt_gamma('displaced', g), rel=1e-6)

    def test_unknown_case(self):
        with pytest.raises(DomainError):
            omt_gamma('squeezed', 0.1)


class TestOmtNumeric:

    def test_simple_curve(self):
        result = omt_numeric(lambda tau: tau ** 2 * math.exp(-tau), (0.0, 20.0))
        assert result.tau_max == pytest.approx(2.0, rel=1e-6)
        assert result.i_max == pytest.approx(4 / math.e ** 2, rel=1e-10)
        assert not result.at_boundary

    def test_rescaled(self):
        result = omt_numeric(lambda tau: tau ** 2 * math.exp(-tau), (0.01, 20.0), rescaled=True)
        assert result.tau_max == pytest.approx(1.0, rel=1e-6)
        assert result.rescaled

    def test_monotone_curve_hits_boundary(self):
        result = omt_numeric(lambda tau: tau, (0.0, 5.0))
        assert result.at_boundary
        assert result.tau_max == 5.0

    def test_non_finite_curve(self):
        with pytest.raises(NumericError):
            omt_numeric(lambda tau: math.nan, (0.0, 1.0))

    def test_bad_brackets(self):
        with pytest.raises(DomainError):
            omt_numeric(lambda tau: tau, (1.0, 1.0))
        with pytest.raises(DomainError):
            omt_numeric(lambda tau: tau, (0.0, 1.0), rescaled=True)

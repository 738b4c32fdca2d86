import math

import numpy as np
import pytest

import closed_forms as cf
from core import GaussianParams
from errors import DomainError, UnsupportedRegimeError
from omt import omt_coherent


def random_params(rng, n_th_max=2.0):
    return GaussianParams(
        alpha=rng.uniform(0, 2), psi=rng.uniform(-math.pi, math.pi),
        r=rng.uniform(0, 1), chi=rng.uniform(-math.pi, math.pi), n_th=rng.uniform(0, n_th_max),
    )


class TestUndamped:

    def test_thermal_quarter_period(self):
        value = cf.qfi_omega_undamped(GaussianParams(n_th=1.0), math.pi / 2)
        assert value == pytest.approx(3.6 + 2 * math.log(2) ** 2, rel=1e-12)
        assert value == pytest.approx(4.5609, abs=1e-4)

    def test_coherent_full_period(self):
        value = cf.qfi_omega_undamped(GaussianParams(alpha=1.0), 2 * math.pi)
        assert value == pytest.approx(16 * math.pi ** 2, rel=1e-12)

    @pytest.mark.parametrize('tau', [0.3, 1.0, 2.5, 7.0])
    def test_vacuum(self, tau):
        assert cf.qfi_omega_undamped(GaussianParams(), tau) == pytest.approx(2 * math.sin(tau) ** 2, rel=1e-12)

    def test_pure_with_frequency(self):
        assert cf.qfi_omega_pure(0.0, 0.0, 0.0, 0.0, 2.0, 0.6) == pytest.approx(
            2 * math.sin(1.2) ** 2 / 4, rel=1e-12
        )

    def test_pure_matches_general(self):
        for alpha in (0.0, 0.5, 1.5):
            for r in (0.0, 0.4, 1.0):
                for psi, chi in ((0.0, 0.0), (0.7, -1.2), (-2.0, 2.5)):
                    for tau in (0.5, 3.0, 12.0):
                        general = cf.qfi_omega_undamped(GaussianParams(alpha, psi, r, chi), tau)
                        pure = cf.qfi_omega_pure(alpha, psi, r, chi, 1.0, tau)
                        assert general == pytest.approx(pure, rel=1e-12, abs=1e-12)

    def test_thermal_matches_general(self):
        for n_th in (0.0, 0.3, 2.0, 10.0):
            for tau in (0.1, 1.7, 9.0):
                assert cf.qfi_omega_undamped(GaussianParams(n_th=n_th), tau) == pytest.approx(
                    cf.qfi_omega_thermal(n_th, tau), rel=1e-12
                )

    def test_thermal_limits(self):
        assert cf.qfi_omega_thermal(0.0, 1.1) == pytest.approx(2 * math.sin(1.1) ** 2)
        assert cf.qfi_omega_thermal(1e4, math.pi / 2) == pytest.approx(5.0, rel=1e-6)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            cf.qfi_omega_undamped(GaussianParams(), -1.0)


class TestLongterm:

    def test_ground(self):
        assert cf.qfi_omega_longterm(0.0) == pytest.approx(0.5)

    def test_hot(self):
        assert cf.qfi_omega_longterm(1e4) == pytest.approx(2.0, abs=1e-3)

    def test_one(self):
        assert cf.qfi_omega_longterm(1.0) == pytest.approx((4 * math.log(2) ** 2 + 1.8) / 2, rel=1e-12)

    def test_increasing(self):
        values = [cf.qfi_omega_longterm(n) for n in (0.0, 0.1, 1.0, 10.0, 100.0)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_damped_full_relaxes(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p = random_params(rng)
            nbar = rng.uniform(0, 3)
            value = cf.qfi_omega_damped_full(p, 0.1, nbar, 400.0).total
            assert value == pytest.approx(cf.qfi_omega_longterm(nbar), rel=1e-6)


class TestDampedFull:

    def test_zero_time(self):
        assert cf.qfi_omega_damped_full(GaussianParams(alpha=1.0), 0.1, 5.0, 0.0).total == pytest.approx(
            0.0, abs=1e-12
        )

    def test_continuous_in_g(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            p = random_params(rng)
            tau = rng.uniform(0, 15)
            assert cf.qfi_omega_damped_full(p, 1e-9, 1.0, tau).total == pytest.approx(
                cf.qfi_omega_undamped(p, tau), rel=1e-6, abs=1e-9
            )

    @pytest.mark.parametrize('tau', [0.0, 0.4, 3.3, 17.0])
    def test_ground_reduction(self, tau):
        assert cf.qfi_omega_damped_full(GaussianParams(), 0.1, 5.0, tau).total == pytest.approx(
            cf.qfi_omega_ground_state(0.1, 5.0, tau), rel=1e-12, abs=1e-12
        )

    @pytest.mark.parametrize('tau', [0.5, 6.0, 25.0])
    def test_coherent_reduction(self, tau):
        value = cf.qfi_omega_damped_full(GaussianParams(alpha=1.3, psi=0.4), 0.05, 2.0, tau).total
        assert value == pytest.approx(cf.qfi_omega_coherent(1.3, 0.05, 2.0, tau, psi=0.4), rel=1e-12)

    @pytest.mark.parametrize('r', [0.1, 0.8, 1.5])
    def test_squeezed_reduction(self, r):
        value = cf.qfi_omega_damped_full(GaussianParams(r=r), 0.1, 0.0, 4.0).total
        assert value == pytest.approx(cf.qfi_omega_squeezed(r, 0.1, 0.0, 4.0), rel=1e-10)

    def test_frequency_scaling(self):
        p = GaussianParams(alpha=0.5, r=0.3, n_th=0.4)
        base = cf.qfi_omega_damped_full(p, 0.1, 1.0, 2.0, hold_occupancy=True).total
        assert cf.qfi_omega_damped_full(p, 0.1, 1.0, 2.0, omega=3.0, hold_occupancy=True).total == pytest.approx(
            base / 9, rel=1e-10
        )

    def test_non_negative(self):
        rng = np.random.default_rng(9)
        for _ in range(500):
            b = cf.qfi_omega_damped_full(random_params(rng), rng.uniform(0, 1), rng.uniform(0, 5), rng.uniform(0, 30))
            assert b.term_cov >= 0
            assert b.term_purity >= 0
            assert b.term_disp >= -1e-12
            assert math.isfinite(b.total)


class TestGroundState:

    def test_zero_time(self):
        assert cf.qfi_omega_ground_state(0.1, 3.0, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_vectorized(self):
        taus = np.array([0.5, 1.0, 2.0])
        values = cf.qfi_omega_ground_state(0.1, 2.0, taus)
        assert values.shape == (3,)
        assert values[1] == pytest.approx(cf.qfi_omega_ground_state(0.1, 2.0, 1.0))

    def test_taylor(self):
        assert cf.qfi_omega_ground_state_taylor(0.1, 1e3, 5.0) == pytest.approx(
            cf.qfi_omega_ground_state(0.1, 1e3, 5.0), rel=1e-3
        )

    def test_maximum(self):
        best = cf.ground_state_maximum()
        assert best.value == pytest.approx(2.135, abs=5e-3)
        assert 0 < best.tau <= 2 * math.pi


class TestCoherent:

    @pytest.mark.parametrize('tau', [0.7, 2.0, 9.0])
    def test_undamped_term(self, tau):
        expected = 4 * (math.sin(tau) ** 2 + tau * math.sin(2 * tau) + tau ** 2)
        assert cf.qfi_omega_coherent_term(1.0, 0.0, 0.0, tau) == pytest.approx(expected, rel=1e-12)

    def test_no_displacement(self):
        assert cf.qfi_omega_coherent_term(0.0, 0.1, 1.0, 3.0) == 0.0

    def test_envelope_maximum(self):
        g, nbar, alpha = 0.1, 5.0, 2.0
        best = omt_coherent(g, nbar, alpha)
        tau = best.tau_max
        envelope = 4 * alpha ** 2 * tau ** 2 / ((2 * nbar + 1) * math.exp(g * tau) - 2 * nbar)
        assert envelope == pytest.approx(best.i_max, rel=1e-12)


class TestSqueezed:

    def test_zero_squeezing_is_ground_state(self):
        assert cf.qfi_omega_squeezed(0.0, 0.1, 0.0, 3.0) == pytest.approx(cf.qfi_omega_ground_state(0.1, 0.0, 3.0))

    def test_exact_needs_zero_temperature(self):
        with pytest.raises(UnsupportedRegimeError):
            cf.qfi_omega_squeezed(0.5, 0.1, 0.2, 3.0)

    def test_approx_zero_time(self):
        assert cf.qfi_omega_squeezed(2.0, 0.1, 0.01, 0.0, mode='approx') == 0.0

    def test_approx_close_to_exact_at_high_squeezing(self):
        approx = cf.qfi_omega_squeezed(2.5, 0.1, 0.01, 15.0, mode='approx')
        exact = cf.qfi_omega_squeezed(2.5, 0.1, 0.0, 15.0)
        assert approx == pytest.approx(exact, rel=0.1)

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            cf.qfi_omega_squeezed(1.0, 0.1, 0.0, 1.0, mode='rough')


class TestGamma:

    def test_thermal_at_bath_occupancy(self):
        assert cf.qfi_gamma_thermal(2.0, 0.1, 2.0, 5.0, 0.1) == 0.0
        assert cf.qfi_gamma_general(GaussianParams(n_th=2.0), 0.1, 2.0, 5.0, 0.1) == pytest.approx(0.0, abs=1e-14)

    def test_displaced_ground(self):
        value = cf.qfi_gamma_displaced_thermal(1.0, 0.0, 0.1, 0.0, 20.0, 0.1)
        assert 0.01 * value == pytest.approx(4 / math.e ** 2, rel=1e-12)
        assert 4 / math.e ** 2 == pytest.approx(0.5413, abs=1e-4)

    def test_independent_of_psi(self):
        values = [
            cf.qfi_gamma_general(GaussianParams(alpha=1.0, psi=psi, r=0.4, chi=0.3, n_th=0.5), 0.1, 1.0, 7.0, 0.1)
            for psi in np.linspace(-3, 3, 7)
        ]
        assert values == pytest.approx([values[0]] * 7, rel=1e-12)

    def test_squeezing_angle_pi_is_best(self):
        def value(chi):
            return cf.qfi_gamma_general(GaussianParams(alpha=1.0, r=0.5, chi=chi), 0.1, 0.5, 10.0, 0.1)
        best = value(cf.CHI_OPT_GAMMA)
        for chi in np.linspace(-3, 3, 13):
            assert value(chi) <= best + 1e-12

    def test_vanishes_at_long_times(self):
        p = GaussianParams(alpha=1.5, r=0.5, n_th=0.5)
        assert cf.qfi_gamma_general(p, 0.1, 1.0, 500.0, 0.1) < 1e-10

    def test_thermal_reduction(self):
        for n_th in (0.0, 0.5, 3.0):
            for tau in (0.5, 5.0, 30.0):
                assert cf.qfi_gamma_general(GaussianParams(n_th=n_th), 0.1, 1.0, tau, 0.1) == pytest.approx(
                    cf.qfi_gamma_thermal(n_th, 0.1, 1.0, tau, 0.1), rel=1e-10, abs=1e-12
                )

    def test_displaced_reduction(self):
        p = GaussianParams(alpha=1.2, psi=0.8, n_th=0.7)
        assert cf.qfi_gamma_general(p, 0.05, 2.0, 12.0, 0.05) == pytest.approx(
            cf.qfi_gamma_displaced_thermal(1.2, 0.7, 0.05, 2.0, 12.0, 0.05), rel=1e-10
        )

    def test_squeezed_reduction(self):
        p = GaussianParams(r=0.9, chi=0.4)
        assert cf.qfi_gamma_general(p, 0.1, 0.0, 6.0, 0.1) == pytest.approx(
            cf.qfi_gamma_squeezed(0.9, 0.1, 0.0, 6.0, 0.1), rel=1e-10
        )

    def test_squeezed_limits(self):
        assert cf.qfi_gamma_squeezed(0.0, 0.1, 0.0, 5.0, 0.1) == 0.0
        with pytest.raises(UnsupportedRegimeError):
            cf.qfi_gamma_squeezed(0.5, 0.1, 1.0, 5.0, 0.1)

    def test_needs_damping(self):
        with pytest.raises(DomainError):
            cf.qfi_gamma_general(GaussianParams(), 0.0, 0.0, 1.0, 0.0)

    def test_non_negative(self):
        rng = np.random.default_rng(10)
        for _ in range(500):
            g = rng.uniform(0.01, 1)
            value = cf.qfi_gamma_general(random_params(rng), g, rng.uniform(0, 5), rng.uniform(0, 30), g)
            assert value >= -1e-12
            assert math.isfinite(value)

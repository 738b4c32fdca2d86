"""
Closed-form QFI expressions for the damped oscillator

All omega-QFI functions take tau = omega*t and g = gamma/omega and return I (not omega^2 I);
multiply by omega^2 (or gamma^2) for the dimensionless curves.
Occupancies follow the bath temperature under d/domega unless stated otherwise.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from core import (
    GaussianParams, QfiBreakdown, occupancy_log_derivative, state_from_params,
)
from errors import DomainError, UnsupportedRegimeError
from qfi_engine import purity_term

# optimal squeezing angles: chi = 0 for omega with displacement, chi = pi for gamma
CHI_OPT_OMEGA = 0.0
CHI_OPT_GAMMA = math.pi


def _xlog(n):
    """n(1+n) ln(1+1/n) with the n -> 0 limit 0"""
    if n == 0:
        return 0.0
    return n * (1 + n) * math.log1p(1 / n)


def _check_nonneg(**values):
    for name, value in values.items():
        if value < 0:
            raise DomainError(f'{name} must be non-negative, got {value}')


@dataclass(frozen=True)
class DampedQfiAbbrevs:
    a1: float
    a2: float
    a3: float
    a1_tau: float
    a2_tau: float
    A1: float
    A2: float
    A3: float
    p_tau: float
    mixedness: float
    c_r: float
    s_r: float
    xi: float

    @property
    def a2a3(self):
        return 0.0 if self.a2 == 0 else self.a2 * self.a3

    @property
    def a2a3_tau(self):
        return 0.0 if self.a2_tau == 0 else self.a2_tau * self.a3

    @property
    def A2A3(self):
        return 0.0 if self.A2 == 0 else self.A2 * self.A3


def damped_abbrevs(p, g, nbar, tau):
    _check_nonneg(g=g, nbar=nbar, tau=tau)
    growth = math.expm1(g * tau)
    a1, A1 = 1 + 2 * nbar, 1 + 2 * p.n_th
    a2, A2 = 4 * nbar * (1 + nbar), 4 * p.n_th * (1 + p.n_th)
    a3 = math.log1p(1 / nbar) if nbar > 0 else math.inf
    A3 = math.log1p(1 / p.n_th) if p.n_th > 0 else math.inf
    c_r, s_r = math.cosh(2 * p.r), math.sinh(2 * p.r)
    a1_tau = growth * a1
    big_d = A1 ** 2 + a1_tau ** 2 + 2 * a1_tau * A1 * c_r
    p_tau = math.exp(g * tau) / math.sqrt(big_d)
    # 1 - P^2 = (D - e^{2 g tau}) / D with the numerator expanded into non-negative terms
    excess = (
        A2 + growth ** 2 * a2 + 4 * growth * (nbar + p.n_th + 2 * nbar * p.n_th)
        + 4 * growth * a1 * A1 * math.sinh(p.r) ** 2
    )
    return DampedQfiAbbrevs(
        a1=a1, a2=a2, a3=a3, a1_tau=a1_tau, a2_tau=growth * a2,
        A1=A1, A2=A2, A3=A3, p_tau=min(p_tau, 1.0), mixedness=excess / big_d,
        c_r=c_r, s_r=s_r, xi=p.xi,
    )


# --- undamped omega ---------------------------------------------------------

def omega_coefficients(n_th):
    """
    Returns C1, C2, C3 of the undamped omega-QFI
    """
    a1 = 1 + 2 * n_th
    c1 = a1 ** 2 / (1 + 2 * n_th * (1 + n_th))
    c2 = 1 / (c1 * a1)
    c3 = 0.0 if n_th == 0 else n_th * (1 + n_th) * math.log1p(1 / n_th) ** 2
    return c1, c2, c3


def qfi_omega_undamped(p, tau, omega=1.0):
    _check_nonneg(tau=tau)
    c1, c2, c3 = omega_coefficients(p.n_th)
    alpha2 = p.alpha ** 2
    ch2, sh2, sh4 = math.cosh(2 * p.r), math.sinh(2 * p.r), math.sinh(4 * p.r)
    xi = p.xi
    value = (
        c3
        + 2 * c1 * math.sin(tau) ** 2 * (
            sh2 ** 2 * math.cos(xi - tau) ** 2 + 1
            + 2 * c2 * alpha2 * (ch2 + math.cos(p.chi + 4 * p.psi - 2 * tau) * sh2)
        )
        + 2 * c1 * tau * math.sin(tau) * (
            4 * c2 * alpha2 * math.cos(2 * p.psi - tau) * ch2
            + math.cos(xi - tau) * (4 * c2 * alpha2 * sh2 + sh4)
        )
        + 2 * c1 * tau ** 2 * (2 * c2 * alpha2 * (ch2 + math.cos(p.chi) * sh2) + sh2 ** 2)
    )
    return value / omega ** 2


def qfi_omega_pure(alpha, psi, r, chi, omega, t):
    """Undamped omega-QFI of a pure Gaussian state, physical time t"""
    _check_nonneg(t=t)
    wt = omega * t
    xi = chi + 2 * psi
    ch2, sh2, sh4 = math.cosh(2 * r), math.sinh(2 * r), math.sinh(4 * r)
    a2 = alpha ** 2
    return (
        2 * t / omega * math.sin(wt) * (
            4 * a2 * math.cos(2 * psi - wt) * ch2 + math.cos(xi - wt) * (4 * a2 * sh2 + sh4)
        )
        + 2 / omega ** 2 * math.sin(wt) ** 2 * (
            sh2 ** 2 * math.cos(xi - wt) ** 2 + 1 + 2 * a2 * (ch2 + math.cos(chi + 4 * psi - 2 * wt) * sh2)
        )
        + 2 * t ** 2 * (2 * a2 * (ch2 + math.cos(chi) * sh2) + sh2 ** 2)
    )


def qfi_omega_thermal(n_th, tau, omega=1.0):
    _check_nonneg(n_th=n_th, tau=tau)
    c1, _, c3 = omega_coefficients(n_th)
    return (2 * c1 * math.sin(tau) ** 2 + c3) / omega ** 2


def qfi_omega_longterm(nbar, omega=1.0):
    """QFI of the thermal equilibrium state, independent of gamma"""
    _check_nonneg(nbar=nbar)
    c1, _, _ = omega_coefficients(nbar)
    log_part = 2 * _xlog(nbar) * math.log1p(1 / nbar) if nbar > 0 else 0.0
    return (log_part + c1) / (2 * omega ** 2)


# --- damped omega -----------------------------------------------------------

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def omega_moment_derivatives(p, g, nbar, tau, omega=1.0, hold_occupancy=False):
    """
    Gets state parameters, g, bath occupancy, tau
    Returns cov, d cov/d omega, mean, d mean/d omega of the frequency-jump scheme at omega0 = omega,
    from the exact moment solutions in frequency-scaled coordinates
    """
    t = tau / omega
    c, s = math.cos(tau), math.sin(tau)
    e_full, e_half = math.exp(-g * tau), math.exp(-g * tau / 2)
    a1 = 1 + 2 * nbar
    if hold_occupancy:
        da1 = d_a1_initial = 0.0
    else:
        da1 = 2 * occupancy_log_derivative(nbar, omega)
        d_a1_initial = 2 * occupancy_log_derivative(p.n_th, omega)

    initial = state_from_params(p, omega)
    sigma0 = np.array(initial.cov)
    dsigma0 = sigma0 * d_a1_initial / (1 + 2 * p.n_th)
    x0 = np.array(initial.mean)

    sw = math.sqrt(omega)
    lam, dlam = np.diag([sw, 1 / sw]), np.diag([1 / (2 * sw), -1 / (2 * omega * sw)])
    dinv, ddinv = np.diag([1 / sw, sw]), np.diag([-1 / (2 * omega * sw), 1 / (2 * sw)])
    rot = np.array([[c, s], [-s, c]])
    drot = t * rot @ _J

    st0 = lam @ sigma0 @ lam
    dst0 = dlam @ sigma0 @ lam + lam @ sigma0 @ dlam + lam @ dsigma0 @ lam
    b = a1 * -math.expm1(-g * tau) / 2
    db = da1 * -math.expm1(-g * tau) / 2
    st = e_full * rot @ st0 @ rot.T + b * np.eye(2)
    dst = e_full * (drot @ st0 @ rot.T + rot @ st0 @ drot.T + rot @ dst0 @ rot.T) + db * np.eye(2)
    cov = dinv @ st @ dinv
    dcov = ddinv @ st @ dinv + dinv @ dst @ dinv + dinv @ st @ ddinv

    xt0 = lam @ x0
    dxt0 = dlam @ x0
    mean = e_half * dinv @ rot @ xt0
    dmean = e_half * (ddinv @ rot @ xt0 + dinv @ drot @ xt0 + dinv @ rot @ dxt0)
    return cov, dcov, mean, dmean


def qfi_omega_damped_full(p, g, nbar, tau, omega=1.0, hold_occupancy=False):
    """
    Three-term omega-QFI of a general Gaussian state in a damped oscillator
    Covariance term from exact omega-derivatives of the moments, purity and displacement
    terms from the abbreviation forms
    """
    ab = damped_abbrevs(p, g, nbar, tau)
    pt = ab.p_tau

    cov, dcov, _, _ = omega_moment_derivatives(p, g, nbar, tau, omega, hold_occupancy)
    m = np.linalg.solve(cov, dcov)
    term_cov = float(np.trace(m @ m)) / (2 * (1 + pt ** 2))

    if hold_occupancy:
        a2a3_tau = A2A3 = 0.0
    else:
        a2a3_tau, A2A3 = ab.a2a3_tau, ab.A2A3
    bracket = (
        ab.A1 * A2A3 + ab.a1_tau * a2a3_tau
        + (ab.A1 * a2a3_tau + ab.a1_tau * A2A3) * ab.c_r
        - 2 * ab.a1_tau * ab.A1 * math.cos(ab.xi) * ab.s_r
    )
    dp = math.exp(-2 * g * tau) * pt ** 3 * bracket / (2 * omega)
    term_purity = purity_term(pt, dp, ab.mixedness)

    a1t, A1 = ab.a1_tau, ab.A1
    cr, sr = ab.c_r, ab.s_r
    xi = ab.xi
    term_disp = 4 * math.exp(-2 * g * tau) * p.alpha ** 2 * pt ** 2 / omega ** 2 * (
        (a1t + A1 * (cr + math.cos(p.chi) * sr)) * tau ** 2
        + (math.cos(tau - 2 * p.psi) * (a1t + A1 * cr) + A1 * math.cos(tau - xi) * sr) * 2 * tau * math.sin(tau)
        + (a1t + A1 * (cr + math.cos(2 * tau - xi - 2 * p.psi) * sr)) * math.sin(tau) ** 2
    )
    return QfiBreakdown(term_cov, term_purity, term_disp)


def qfi_omega_ground_state(g, nbar, tau, omega=1.0):
    """
    omega-QFI of an initial ground state; numpy arrays broadcast
    """
    g, nbar, tau = np.asarray(g, dtype=float), np.asarray(nbar, dtype=float), np.asarray(tau, dtype=float)
    growth = np.expm1(g * tau)
    a1 = 1 + 2 * nbar
    big_b = 1 + a1 * growth
    y = np.exp(g * tau)
    first = (1 + big_b ** 2 - 2 * big_b * np.cos(2 * tau)) / (big_b ** 2 + y ** 2)
    with np.errstate(divide='ignore', invalid='ignore'):
        log_term = np.where(nbar > 0, nbar * (1 + nbar) ** 2 * np.log1p(1 / np.where(nbar > 0, nbar, 1.0)) ** 2, 0.0)
    second = growth * log_term / (1 + growth * (1 + nbar))
    result = (first + second) / omega ** 2
    return float(result) if result.ndim == 0 else result


def qfi_omega_ground_state_taylor(g, nbar, tau, omega=1.0):
    """Large-n̄ expansion of the ground-state omega-QFI, error O(1/n̄^2)"""
    return 2 / omega ** 2 * (1 - math.cos(tau) ** 2 / (math.expm1(g * tau) * nbar))


@dataclass(frozen=True)
class GroundStateMaximum:
    value: float
    tau: float
    g: float
    nbar: float


def ground_state_maximum(omega=1.0, log_g=(-8.0, 0.0), log_nbar=(-2.0, 6.0)):
    """
    Maximizes the ground-state omega-QFI over tau in (0, 2pi], g and n̄
    Grid scan over (tau, log10 g, log10 n̄) followed by Nelder-Mead refinement
    """
    taus = np.linspace(2 * math.pi / 96, 2 * math.pi, 96)
    gs = np.linspace(*log_g, 41)
    ns = np.linspace(*log_nbar, 41)
    tt, gg, nn = np.meshgrid(taus, gs, ns, indexing='ij')
    values = qfi_omega_ground_state(10.0 ** gg, 10.0 ** nn, tt)
    start = np.unravel_index(np.argmax(values), values.shape)
    x0 = np.array([tt[start], gg[start], nn[start]])

    def objective(x):
        return -qfi_omega_ground_state(10.0 ** x[1], 10.0 ** x[2], x[0])

    res = minimize(
        objective, x0, method='Nelder-Mead',
        bounds=[(1e-6, 2 * math.pi), log_g, log_nbar],
        options={'xatol': 1e-10, 'fatol': 1e-13, 'maxiter': 20000},
    )
    best = res.x if -res.fun >= values[start] else x0
    value = max(-res.fun, float(values[start]))
    return GroundStateMaximum(value / omega ** 2, float(best[0]), float(10.0 ** best[1]), float(10.0 ** best[2]))


def qfi_omega_coherent_term(alpha, g, nbar, tau, omega=1.0, psi=0.0):
    """
    Displacement part I_alpha of the coherent-state omega-QFI
    """
    _check_nonneg(g=g, nbar=nbar, tau=tau)
    damping = (2 * nbar + 1) * math.exp(g * tau) - 2 * nbar
    return 4 * alpha ** 2 / omega ** 2 * (
        math.sin(tau) ** 2 + 2 * tau * math.sin(tau) * math.cos(tau - 2 * psi) + tau ** 2
    ) / damping


def qfi_omega_coherent(alpha, g, nbar, tau, omega=1.0, psi=0.0):
    return qfi_omega_ground_state(g, nbar, tau, omega) + qfi_omega_coherent_term(alpha, g, nbar, tau, omega, psi)


def qfi_omega_squeezed(r, g, nbar, tau, omega=1.0, mode='exact'):
    """
    omega-QFI of a squeezed vacuum
    mode 'exact' needs n̄ = 0; mode 'approx' is the high-squeezing, low-temperature form
    """
    _check_nonneg(r=r, g=g, nbar=nbar, tau=tau)
    if mode == 'approx':
        if tau == 0:
            return 0.0
        if g == 0:
            raise DomainError('approximate squeezed-state QFI needs g > 0')
        return math.exp(2 * r) * (2 * tau + math.sin(2 * tau)) ** 2 / (
            4 * omega ** 2 * math.expm1(g * tau) * (1 + 2 * nbar)
        )
    if mode != 'exact':
        raise DomainError(f'unknown mode {mode!r}')
    if nbar > 0:
        raise UnsupportedRegimeError('exact squeezed-state omega-QFI is only known for n̄ = 0')
    if r == 0:
        # pure family: the formula below is the r -> 0+ limit of mixed states
        return qfi_omega_ground_state(g, 0.0, tau, omega)
    y = math.exp(g * tau)
    shr2, chr2 = math.sinh(r) ** 2, math.cosh(r) ** 2
    ch2, sh2, ch4 = math.cosh(2 * r), math.sinh(2 * r), math.cosh(4 * r)
    denominator = 8 * omega ** 2 * (2 * y * shr2 + y ** 2 - ch2 + 1)
    numerator = (
        16 * tau * sh2 * math.sin(2 * tau) * (y + ch2 - 1)
        - 4 * (y - 1) * ch2 * (2 * math.cos(2 * tau) - 3)
        + 4 * y * (y - 1)
        + (8 * tau ** 2 + 1) * ch4
        - 8 * shr2 * chr2 * math.cos(4 * tau)
        - 8 * tau ** 2
        - 8 * math.cos(2 * tau)
        + 7
    )
    return numerator / denominator


# --- gamma ------------------------------------------------------------------

def qfi_gamma_breakdown(p, g, nbar, tau, gamma):
    """
    Three-term gamma-QFI of a general Gaussian state, independent of psi
    """
    if gamma <= 0 or g <= 0:
        raise DomainError(f'gamma and g must be positive, got {gamma}, {g}')
    ab = damped_abbrevs(p, g, nbar, tau)
    t = g * tau / gamma
    pt = ab.p_tau
    e2 = math.exp(-2 * g * tau)
    A1, a1, a1t = ab.A1, ab.a1, ab.a1_tau
    cr, sr = ab.c_r, ab.s_r

    big_d = A1 ** 2 + 2 * a1t * A1 * cr + a1t ** 2
    x, y_ = a1t + A1 * cr, A1 * sr
    z = a1 - A1 * cr
    term_cov = t ** 2 * ((x ** 2 + y_ ** 2) * (z ** 2 + y_ ** 2) + 4 * x * y_ ** 2 * z) / (big_d ** 2 * (1 + pt ** 2))

    # A1^2 + A1 (a1t - a1) C_r - a1 a1t regrouped around C_r - 1 = 2 sinh^2 r
    bracket = (A1 - a1) * (A1 + a1t) + 2 * math.sinh(p.r) ** 2 * A1 * (a1t - a1)
    dp = t * pt ** 3 * e2 * bracket
    term_purity = purity_term(pt, dp, ab.mixedness)

    term_disp = t ** 2 * p.alpha ** 2 * pt ** 2 * e2 * (a1t + A1 * (cr - math.cos(p.chi) * sr))
    return QfiBreakdown(term_cov, term_purity, term_disp)


def qfi_gamma_general(p, g, nbar, tau, gamma):
    return qfi_gamma_breakdown(p, g, nbar, tau, gamma).total


def qfi_gamma_thermal(n_th, g, nbar, tau, gamma):
    _check_nonneg(n_th=n_th, g=g, nbar=nbar, tau=tau)
    numerator = (nbar - n_th) ** 2 * g ** 2 * tau ** 2
    if numerator == 0:
        return 0.0
    growth = math.expm1(g * tau)
    return numerator / (gamma ** 2 * (growth * nbar + n_th) * ((growth + 1) * (1 + nbar) + n_th - nbar))


def qfi_gamma_displaced_thermal(alpha, n_th, g, nbar, tau, gamma):
    return qfi_gamma_thermal(n_th, g, nbar, tau, gamma) + alpha ** 2 * g ** 2 * tau ** 2 / (
        gamma ** 2 * (2 * n_th - 2 * nbar + math.exp(g * tau) * (1 + 2 * nbar))
    )


def qfi_gamma_squeezed(r, g, nbar, tau, gamma):
    _check_nonneg(r=r, g=g, tau=tau)
    if nbar > 0:
        raise UnsupportedRegimeError('squeezed-state gamma-QFI closed form is only known for n̄ = 0')
    if r == 0 or tau == 0:
        return 0.0
    growth = math.expm1(g * tau)
    y2 = math.exp(2 * g * tau)
    shr2 = math.sinh(r) ** 2
    return (y2 - 2 * growth) * g ** 2 * tau ** 2 * shr2 / (gamma ** 2 * growth * (2 * growth * shr2 + y2))


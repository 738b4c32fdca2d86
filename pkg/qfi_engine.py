import math
from dataclasses import replace

import numpy as np

from core import (
    BathParams, QfiBreakdown, StateDerivative,
    fidelity, fidelity_to_qfi, rescale_occupancy, state_from_params,
)
from dynamics import propagate, purity_excess
from errors import DomainError, PureStateBoundaryError

DEFAULT_STEP = 1e-5
PURE_TOL = 1e-9
DP_TOL = 1e-12


def purity_term(p, dp, mixedness=None):
    """
    2 dP^2 / (1 - P^4), defined as 0 on the pure-state boundary when dP vanishes
    mixedness is 1 - P^2 evaluated without cancellation; with it the term stays finite arbitrarily close to P = 1
    """
    deficit = abs(1 - p) if mixedness is None else mixedness / (1 + p)
    if deficit <= PURE_TOL and abs(dp) < DP_TOL:
        return 0.0
    if mixedness is None:
        mixedness = 0.0 if deficit <= PURE_TOL else 1 - p * p
    if mixedness <= 0:
        raise PureStateBoundaryError(
            f'purity term is singular at P = {p!r} with dP = {dp!r}; use the pure-state closed form'
        )
    return 2 * dp ** 2 / (mixedness * (1 + p * p))


def qfi_from_moments(s, ds, p, dp, mixedness=None):
    """
    Gets state, its parameter derivative, purity, purity derivative and optionally 1 - P^2
    Returns the covariance, purity and displacement terms of the Gaussian QFI
    """
    if not 0 < p <= 1 + 1e-12:
        raise DomainError(f'purity must lie in (0, 1], got {p}')
    sigma_inv = np.linalg.inv(s.cov)
    m = sigma_inv @ np.asarray(ds.cov, dtype=float)
    term_cov = float(np.trace(m @ m)) / (2 * (1 + p ** 2))
    dmean = np.asarray(ds.mean, dtype=float)
    term_disp = float(dmean @ sigma_inv @ dmean)
    return QfiBreakdown(term_cov, purity_term(p, dp, mixedness), term_disp)


def qfi_via_fidelity(family, theta, eps=1e-4):
    """
    QFI from the curvature of the fidelity, -2 [F(theta, theta+eps) - 2 + F(theta, theta-eps)] / eps^2
    """
    if eps <= 0:
        raise DomainError(f'eps must be positive, got {eps}')
    center = family(theta)
    return fidelity_to_qfi(fidelity(center, family(theta + eps)), fidelity(center, family(theta - eps)), eps)


def basis_jump_squeeze(omega0, omega):
    """
    Squeezing s = -atanh(y1), y1 = (omega0 - omega)/(omega0 + omega),
    equivalent to a sudden change of the oscillator frequency omega0 -> omega
    """
    if omega0 <= 0 or omega <= 0:
        raise DomainError(f'frequencies must be positive, got {omega0}, {omega}')
    return -math.atanh((omega0 - omega) / (omega0 + omega))


def scheme_state(p, omega0, omega, bath, t, basis_jump=True):
    """
    Frequency-jump scheme: state prepared at omega0, evolved at omega in a bath at omega
    With basis_jump=False the state is prepared at omega instead (fixed-basis variant)
    """
    if not math.isclose(bath.omega, omega, rel_tol=1e-15, abs_tol=0.0):
        raise DomainError(f'bath frequency {bath.omega} differs from evolution frequency {omega}')
    initial = state_from_params(p, omega0 if basis_jump else omega)
    return propagate(initial, bath, t)


def scheme_excess(p, omega_prep, bath, t):
    """
    Gets state parameters, preparation frequency, bath and time
    Returns 4 det Sigma(t) - 1 of the prepared-then-evolved state, with the initial trace excess
    in the bath frame taken from the parameters instead of the rounded covariance entries
    """
    a1 = 1 + 2 * p.n_th
    shift = (bath.omega - omega_prep) / omega_prep
    ratio = 1 + shift
    c_r, cs = math.cosh(2 * p.r), math.cos(p.xi) * math.sinh(2 * p.r)
    spread = (
        2 * p.n_th + 2 * a1 * math.sinh(p.r) ** 2
        + a1 / 2 * shift / ratio * (c_r * shift + cs * (2 + shift))
    )
    initial = state_from_params(p, omega_prep)
    return purity_excess(initial, bath, t, 4 * p.n_th * (1 + p.n_th), max(spread, 0.0))


def _derivative(family, theta, h):
    plus, minus = family(theta + h), family(theta - h)
    return StateDerivative(
        (plus.mean - minus.mean) / (2 * h),
        (plus.cov - minus.cov) / (2 * h),
    )


def _slope(f, theta, h):
    return (f(theta + h) - f(theta - h)) / (2 * h)


def _family_qfi(family, excess, theta, h, richardson):
    """
    Gets a state family, its purity excess 4 det Sigma - 1, parameter value, step and the Richardson flag
    Returns the QFI breakdown with moment derivatives from central differences
    """
    center = family(theta)
    ds = _derivative(family, theta, h)
    d_excess = _slope(excess, theta, h)
    if richardson:
        ds_half = _derivative(family, theta, h / 2)
        ds = StateDerivative(
            (4 * ds_half.mean - ds.mean) / 3,
            (4 * ds_half.cov - ds.cov) / 3,
        )
        d_excess = (4 * _slope(excess, theta, h / 2) - d_excess) / 3
    delta = excess(theta)
    p = 1 / math.sqrt(1 + delta)
    # a pure centre is a maximum of P, so dP is exactly 0 there
    dp = 0.0 if delta == 0 else -0.5 * p ** 3 * d_excess
    return qfi_from_moments(center, ds, p, dp, delta / (1 + delta))


def _omega_setup(p, omega0, g, nbar, hold_occupancy, basis_jump):
    gamma = g * omega0

    def setup(omega):
        if hold_occupancy:
            params, nb = p, nbar
        else:
            params = replace(p, n_th=rescale_occupancy(p.n_th, omega0, omega))
            nb = rescale_occupancy(nbar, omega0, omega)
        bath = BathParams(omega=omega, gamma=gamma, nbar=nb)
        return params, (omega0 if basis_jump else omega), bath

    return setup


def omega_family(p, omega0, g, nbar, t, hold_occupancy=False, basis_jump=True):
    """
    Returns omega -> scheme state
    gamma = g*omega0 is held fixed; occupancies follow the bath temperature unless hold_occupancy
    """
    setup = _omega_setup(p, omega0, g, nbar, hold_occupancy, basis_jump)

    def family(omega):
        params, _, bath = setup(omega)
        return scheme_state(params, omega0, omega, bath, t, basis_jump=basis_jump)

    return family


def omega_excess(p, omega0, g, nbar, t, hold_occupancy=False, basis_jump=True):
    """Returns omega -> 4 det Sigma - 1 of the scheme state"""
    setup = _omega_setup(p, omega0, g, nbar, hold_occupancy, basis_jump)

    def excess(omega):
        params, omega_prep, bath = setup(omega)
        return scheme_excess(params, omega_prep, bath, t)

    return excess


def qfi_omega_numeric(p, omega0=1.0, g=0.0, nbar=0.0, t=0.0, step=DEFAULT_STEP,
                      hold_occupancy=False, richardson=False, basis_jump=True):
    """
    Gets initial state parameters, reference frequency, g = gamma/omega0, bath occupancy at omega0,
    time and relative step
    Returns the omega-QFI at omega = omega0 from central differences of the scheme moments
    """
    if step <= 0:
        raise DomainError(f'step must be positive, got {step}')
    if g < 0 or nbar < 0:
        raise DomainError(f'g and nbar must be non-negative, got {g}, {nbar}')
    family = omega_family(p, omega0, g, nbar, t, hold_occupancy, basis_jump)
    excess = omega_excess(p, omega0, g, nbar, t, hold_occupancy, basis_jump)
    return _family_qfi(family, excess, omega0, step * omega0, richardson)


def gamma_family(p, bath, t):
    initial = state_from_params(p, bath.omega)

    def family(gamma):
        return propagate(initial, replace(bath, gamma=gamma), t)

    return family


def qfi_gamma_numeric(p, bath, t, step=DEFAULT_STEP, richardson=False):
    """
    Gamma-QFI from central differences in gamma of the propagated moments
    """
    if step <= 0:
        raise DomainError(f'step must be positive, got {step}')
    if bath.gamma <= 0:
        raise DomainError('gamma-QFI needs gamma > 0 for a central difference')
    family = gamma_family(p, bath, t)

    def excess(gamma):
        return scheme_excess(p, bath.omega, replace(bath, gamma=gamma), t)

    return _family_qfi(family, excess, bath.gamma, step * bath.gamma, richardson)

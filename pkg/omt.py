import math
from dataclasses import dataclass

import numpy as np

from errors import DomainError, NumericError

INV_E = math.exp(-1)
GOLDEN = (1 + math.sqrt(5)) / 2
GRID_POINTS = 2048


@dataclass(frozen=True)
class OmtResult:
    tau_max: float
    i_max: float
    rescaled: bool = False
    at_boundary: bool = False


def lambert_w0(x):
    """
    Principal branch of the Lambert W function, W e^W = x, for x >= -1/e
    Halley iteration seeded by the branch-point series near -1/e and by log x - log log x for large x
    Accepts scalars and arrays
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -INV_E - 1e-15) or np.any(np.isnan(x)):
        raise DomainError('lambert_w0 is defined for x >= -1/e')
    x = np.maximum(x, -INV_E)

    p = np.sqrt(np.maximum(2 * (math.e * x + 1), 0.0))
    branch_seed = -1 + p - p ** 2 / 3 + 11 / 72 * p ** 3
    mid_seed = 0.75 * np.log1p(np.maximum(x, -0.25))
    large_seed = np.log(np.maximum(x, math.e)) - np.log(np.log(np.maximum(x, math.e)))
    w = np.where(x < -0.25, branch_seed, np.where(x < 3 * math.e, mid_seed, large_seed))

    active = (x + INV_E) > 0
    for _ in range(50):
        if not np.any(active):
            break
        ew = np.exp(w)
        f = w * ew - x
        wp1 = np.where(active, w + 1, 1.0)
        denom = ew * wp1 - (w + 2) * f / (2 * wp1)
        step = np.where(active & (denom != 0), f / np.where(denom != 0, denom, 1.0), 0.0)
        w = w - step
        active = active & (np.abs(step) > 1e-15 * (1 + np.abs(w)))

    w = np.where(x + INV_E <= 0, -1.0, w)
    return float(w) if w.ndim == 0 else w


def _check_g(g):
    if g <= 0:
        raise DomainError(f'g must be positive, got {g}')


def omt_coherent(g, nbar, alpha=1.0, omega=1.0):
    """
    Optimal measurement time and maximal QFI of the displacement part of a coherent state
    W/z = e^{-W} keeps the n̄ -> 0 limit finite
    """
    _check_g(g)
    if nbar < 0:
        raise DomainError(f'nbar must be non-negative, got {nbar}')
    w = lambert_w0(-4 * nbar / (math.e ** 2 * (1 + 2 * nbar)))
    tau_max = (2 + w) / g
    i_max = 2 * alpha ** 2 / (g ** 2 * omega ** 2) * math.exp(-w) * 4 / (math.e ** 2 * (1 + 2 * nbar)) * (2 + w)
    return OmtResult(tau_max, i_max)


def omt_coherent_rescaled(g, nbar, alpha=1.0, omega=1.0):
    """
    Same with time as a resource: maximizes I/t, i_max is the QFI per unit time
    """
    _check_g(g)
    if nbar < 0:
        raise DomainError(f'nbar must be non-negative, got {nbar}')
    w = lambert_w0(-2 * nbar / (math.e * (1 + 2 * nbar)))
    tau_max = (1 + w) / g
    i_max = 2 * alpha ** 2 / (g * omega) * math.exp(-w) * 2 / (math.e * (1 + 2 * nbar))
    return OmtResult(tau_max, i_max, rescaled=True)


def omt_squeezed(g):
    _check_g(g)
    return (2 + lambert_w0(-2 / math.e ** 2)) / g


def omt_gamma(case, g, n_th=0.0):
    """
    Gets case ('thermal', 'displaced', 'displaced-rescaled'), g and initial occupancy
    Returns optimal tau for gamma estimation (thermal case stated for n̄ = 0)
    """
    _check_g(g)
    if case == 'thermal':
        if n_th < 0:
            raise DomainError(f'n_th must be non-negative, got {n_th}')
        return (2 + lambert_w0(2 * n_th * math.exp(-2))) / g
    if case == 'displaced':
        return 2 / g
    if case == 'displaced-rescaled':
        return 1 / g
    raise DomainError(f'unknown gamma OMT case {case!r}')


def default_bracket(g):
    _check_g(g)
    return 1e-3 / g, 20 / g


def coherent_envelope(alpha, g, nbar, omega=1.0):
    """I_alpha without its sin-oscillations"""
    def curve(tau):
        return 4 * alpha ** 2 * tau ** 2 / (omega ** 2 * ((2 * nbar + 1) * math.exp(g * tau) - 2 * nbar))
    return curve


def squeezed_envelope(r, g, nbar, omega=1.0):
    """Approximate squeezed-state QFI without its sin(2 tau) term"""
    def curve(tau):
        return math.exp(2 * r) * tau ** 2 / (omega ** 2 * math.expm1(g * tau) * (1 + 2 * nbar))
    return curve


def _golden_section_max(f, a, b, tol):
    c = b - (b - a) / GOLDEN
    d = a + (b - a) / GOLDEN
    fc, fd = f(c), f(d)
    while abs(b - a) > tol * max(abs(c), abs(d), 1e-300):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - (b - a) / GOLDEN
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) / GOLDEN
            fd = f(d)
    return (a + b) / 2


def omt_numeric(curve, bracket, rescaled=False, points=GRID_POINTS, rtol=1e-8):
    """
    Gets curve tau -> value, bracket (tau_lo, tau_hi)
    Returns OmtResult from a grid scan refined by golden-section search
    With rescaled the maximized quantity is curve(tau)/tau
    """
    lo, hi = bracket
    if not lo < hi:
        raise DomainError(f'empty bracket {bracket}')
    if rescaled and lo <= 0:
        raise DomainError('rescaled search needs tau_lo > 0')

    def target(tau):
        value = curve(tau)
        if not math.isfinite(value):
            raise NumericError(f'curve is not finite at tau={tau}: {value}')
        return value / tau if rescaled else value

    grid = np.linspace(lo, hi, points)
    values = np.array([target(tau) for tau in grid])
    best = int(np.argmax(values))
    if best in (0, points - 1):
        return OmtResult(float(grid[best]), float(values[best]), rescaled, at_boundary=True)

    tau_star = _golden_section_max(target, grid[best - 1], grid[best + 1], rtol)
    return OmtResult(float(tau_star), float(target(tau_star)), rescaled)

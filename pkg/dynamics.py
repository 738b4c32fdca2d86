import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from core import PhaseSpaceState
from errors import DomainError, NoSteadyStateError


@dataclass(frozen=True)
class MomentGenerators:
    """
    Drift matrices of the moment equations
    d<X>/dt = G <X>,  dS/dt = K S + S_inh  with S = (s_qq, s_pp, s_pq)
    """
    g_matrix: np.ndarray
    k_matrix: np.ndarray
    s_inh: np.ndarray


def moment_generators(bath):
    w, gam, a1 = bath.omega, bath.gamma, 1 + 2 * bath.nbar
    g_matrix = np.array([
        [-gam / 2, 1.0],
        [-w ** 2, -gam / 2],
    ])
    k_matrix = np.array([
        [-gam, 0.0, 2.0],
        [0.0, -gam, -2 * w ** 2],
        [-w ** 2, 1.0, -gam],
    ])
    s_inh = gam * a1 / 2 * np.array([1 / w, w, 0.0])
    return MomentGenerators(g_matrix, k_matrix, s_inh)


def state_to_svec(s):
    return np.array([s.sigma_qq, s.sigma_pp, s.sigma_pq])


def svec_to_cov(svec):
    return np.array([[svec[0], svec[2]], [svec[2], svec[1]]])


def _check_time(t):
    if t < 0:
        raise DomainError(f'time must be non-negative, got {t}')


def propagate(s, bath, t):
    """
    Gets state, bath and time
    Returns the exact solution of the moment equations at t
    """
    _check_time(t)
    if t == 0:
        return s
    w = bath.omega
    c, sn, s2 = math.cos(w * t), math.sin(w * t), math.sin(2 * w * t)
    e_half = math.exp(-bath.gamma * t / 2)
    e_full = e_half * e_half
    q0, p0 = s.mean
    s_qq, s_pp, s_pq = s.sigma_qq, s.sigma_pp, s.sigma_pq
    # bath part (1+2n̄)(1-e^{-gamma t})/2
    b = (1 + 2 * bath.nbar) * -math.expm1(-bath.gamma * t) / 2

    mean = (
        e_half * (c * q0 + sn * p0 / w),
        e_half * (c * p0 - w * sn * q0),
    )
    new_qq = b / w + e_full * (c * c * s_qq + sn * sn * s_pp / w ** 2 + s2 * s_pq / w)
    new_pp = w * b + e_full * (c * c * s_pp + w ** 2 * sn * sn * s_qq - w * s2 * s_pq)
    new_pq = e_full * (math.cos(2 * w * t) * s_pq + sn * c / w * (s_pp - w ** 2 * s_qq))
    return PhaseSpaceState(mean, [[new_qq, new_pq], [new_pq, new_pp]])


def propagate_numeric(s, bath, t):
    """
    Same evolution through exp(G t) and exp(K t)
    K^-1 (exp(K t) - I) S_inh is read off the augmented exponential expm([[K, S_inh], [0, 0]] t),
    which stays defined when K is singular (gamma = 0)
    """
    _check_time(t)
    gen = moment_generators(bath)
    mean = expm(gen.g_matrix * t) @ s.mean

    augmented = np.zeros((4, 4))
    augmented[:3, :3] = gen.k_matrix
    augmented[:3, 3] = gen.s_inh
    flow = expm(augmented * t)
    svec = flow[:3, :3] @ state_to_svec(s) + flow[:3, 3]
    return PhaseSpaceState(mean, svec_to_cov(svec))


def purity_excess(s, bath, t, initial_excess=None, spread=None):
    """
    Gets initial state, bath, time and optionally 4 det Sigma - 1 and the trace excess of the initial state
    Returns 4 det Sigma(t) - 1 as a sum of non-negative terms, accurate near the pure-state boundary
    where 1 - 4 det Sigma(t) from the propagated entries is lost to cancellation
    """
    _check_time(t)
    if initial_excess is None:
        initial_excess = max(4 * s.det - 1, 0.0)
    if spread is None:
        # excess of tr(Sigma) over the vacuum in frequency-scaled coordinates
        w = bath.omega
        spread = max(w * s.sigma_qq + s.sigma_pp / w - 1, 0.0)
    u = -math.expm1(-bath.gamma * t)
    keep = math.exp(-bath.gamma * t)
    n = bath.nbar
    return (
        keep ** 2 * initial_excess
        + 2 * u * keep * (spread + 2 * n * (1 + spread))
        + 4 * n * (1 + n) * u ** 2
    )


def steady_state(bath):
    if bath.gamma <= 0:
        raise NoSteadyStateError('undamped oscillator has no steady state')
    a1 = 1 + 2 * bath.nbar
    return PhaseSpaceState((0.0, 0.0), [[a1 / (2 * bath.omega), 0.0], [0.0, a1 * bath.omega / 2]])

import math
from dataclasses import dataclass, field

import numpy as np

from errors import DomainError, InvalidStateError, NumericError

# CODATA 2018
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J/K

HEISENBERG_RTOL = 1e-10
FIDELITY_EXP_FLOOR = -700.0


def wrap_angle(angle):
    """
    Gets angle in radians
    Returns the same angle in (-pi, pi]
    """
    wrapped = math.pi - math.fmod(math.pi - float(angle), 2 * math.pi)
    if wrapped > math.pi:
        wrapped -= 2 * math.pi
    elif wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


def occupancy_from_x(x):
    """Bose-Einstein occupancy 1/(e^x - 1) for x = hbar*omega/(k_B*T)"""
    if x <= 0:
        raise DomainError(f'x must be positive, got {x}')
    return math.exp(-x) / -math.expm1(-x)


def thermal_occupancy(omega, temperature):
    """
    Gets angular frequency (rad/s) and temperature (K)
    Returns mean thermal photon number n̄
    """
    if omega <= 0 or temperature <= 0:
        raise DomainError(f'omega and temperature must be positive, got {omega}, {temperature}')
    return occupancy_from_x(HBAR * omega / (K_B * temperature))


def rescale_occupancy(nbar0, omega0, omega):
    """
    Occupancy at omega of a bath at the temperature where the occupancy at omega0 is nbar0
    """
    if nbar0 < 0:
        raise DomainError(f'occupancy must be non-negative, got {nbar0}')
    if nbar0 == 0:
        return 0.0
    return occupancy_from_x(math.log1p(1 / nbar0) * omega / omega0)


def occupancy_log_derivative(nbar, omega):
    """
    d n̄/d omega at fixed temperature, -n̄(1+n̄)ln(1+1/n̄)/omega, with the n̄ -> 0 limit 0
    """
    if nbar == 0:
        return 0.0
    return -nbar * (1 + nbar) * math.log1p(1 / nbar) / omega


@dataclass(frozen=True)
class GaussianParams:
    alpha: float = 0.0
    psi: float = 0.0
    r: float = 0.0
    chi: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise DomainError(f'squeezing r must be non-negative, got {self.r}')
        if self.n_th < 0:
            raise DomainError(f'n_th must be non-negative, got {self.n_th}')
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'r', float(self.r))
        object.__setattr__(self, 'n_th', float(self.n_th))
        object.__setattr__(self, 'psi', wrap_angle(self.psi))
        object.__setattr__(self, 'chi', wrap_angle(self.chi))

    @property
    def xi(self):
        return self.chi + 2 * self.psi


@dataclass(frozen=True)
class BathParams:
    omega: float
    gamma: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise DomainError(f'omega must be positive, got {self.omega}')
        if self.gamma < 0 or self.nbar < 0:
            raise DomainError(f'gamma and nbar must be non-negative, got {self.gamma}, {self.nbar}')

    @classmethod
    def from_dimensionless(cls, g, nbar, omega=1.0):
        return cls(omega=omega, gamma=g * omega, nbar=nbar)

    @property
    def g(self):
        return self.gamma / self.omega


class PhaseSpaceState:
    """
    First moments (<q>, <p>) and symmetric covariance matrix in units hbar = M = 1
    Arrays are copied and frozen on construction
    """

    def __init__(self, mean, cov, check=True):
        mean = np.array(mean, dtype=float).reshape(2)
        cov = np.array(cov, dtype=float).reshape(2, 2)
        if check:
            self._validate(mean, cov)
        mean.setflags(write=False)
        cov.setflags(write=False)
        self.mean = mean
        self.cov = cov

    @staticmethod
    def _validate(mean, cov):
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidStateError('moments must be finite')
        scale = max(abs(cov[0, 1]), abs(cov[1, 0]), 1e-300)
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * scale:
            raise InvalidStateError(f'covariance not symmetric: {cov[0, 1]} != {cov[1, 0]}')
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        if cov[0, 0] <= 0 or det <= 0:
            raise InvalidStateError(f'covariance not positive definite (det {det})')
        if det < 0.25 * (1 - HEISENBERG_RTOL):
            raise InvalidStateError(f'covariance violates the Heisenberg bound: det {det} < 1/4')

    @property
    def sigma_qq(self):
        return self.cov[0, 0]

    @property
    def sigma_pp(self):
        return self.cov[1, 1]

    @property
    def sigma_pq(self):
        return self.cov[0, 1]

    @property
    def det(self):
        return self.cov[0, 0] * self.cov[1, 1] - self.cov[0, 1] * self.cov[1, 0]

    def __repr__(self):
        return f'PhaseSpaceState(mean={self.mean.tolist()}, cov={self.cov.tolist()})'


@dataclass(frozen=True)
class StateDerivative:
    """Elementwise parameter derivative of a PhaseSpaceState"""
    mean: np.ndarray
    cov: np.ndarray

    @classmethod
    def zero(cls):
        return cls(np.zeros(2), np.zeros((2, 2)))


@dataclass(frozen=True)
class QfiBreakdown:
    term_cov: float
    term_purity: float
    term_disp: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'total', self.term_cov + self.term_purity + self.term_disp)

    def scaled(self, factor):
        return QfiBreakdown(self.term_cov * factor, self.term_purity * factor, self.term_disp * factor)

    def as_dict(self):
        return {
            'total': self.total,
            'term_cov': self.term_cov,
            'term_purity': self.term_purity,
            'term_disp': self.term_disp,
        }


def state_from_params(p, omega0=1.0):
    """
    Gets GaussianParams + reference frequency
    Returns moments of R(psi) D(alpha) S(r e^{i chi}) nu(N_th) at omega0
    """
    if omega0 <= 0:
        raise DomainError(f'omega0 must be positive, got {omega0}')
    a1 = 1 + 2 * p.n_th
    c_r, s_r = math.cosh(2 * p.r), math.sinh(2 * p.r)
    xi = p.xi
    mean = (
        p.alpha * math.sqrt(2 / omega0) * math.cos(p.psi),
        p.alpha * math.sqrt(2 * omega0) * math.sin(p.psi),
    )
    s_qq = a1 / (2 * omega0) * (c_r + math.cos(xi) * s_r)
    s_pp = omega0 * a1 / 2 * (c_r - math.cos(xi) * s_r)
    s_pq = a1 / 2 * math.sin(xi) * s_r
    return PhaseSpaceState(mean, [[s_qq, s_pq], [s_pq, s_pp]])


def thermal_state(n_th, omega0=1.0):
    return state_from_params(GaussianParams(n_th=n_th), omega0)


def purity(s):
    """P = 1/(2 sqrt(det Sigma))"""
    det = s.det
    if not det > 0:
        raise InvalidStateError(f'non-positive covariance determinant {det}')
    return 1 / (2 * math.sqrt(det))


def fidelity(s1, s2):
    """
    Uhlmann fidelity of two single-mode Gaussian states
    exp(-dX^T (S1+S2)^-1 dX / 2) / (sqrt(D + d) - sqrt(d)),
    D = det(S1+S2), d = 4 (det S1 - 1/4)(det S2 - 1/4)
    """
    total = s1.cov + s2.cov
    big_delta = total[0, 0] * total[1, 1] - total[0, 1] * total[1, 0]
    if not big_delta > 0:
        raise NumericError(f'singular covariance sum (det {big_delta})')
    dx = s2.mean - s1.mean
    exponent = -0.5 * float(dx @ np.linalg.solve(total, dx))
    if exponent < FIDELITY_EXP_FLOOR:
        return 0.0
    small_delta = max(4 * (s1.det - 0.25) * (s2.det - 0.25), 0.0)
    # 1/(sqrt(D+d) - sqrt(d)) rewritten without cancellation
    prefactor = (math.sqrt(big_delta + small_delta) + math.sqrt(small_delta)) / big_delta
    return min(math.exp(exponent) * prefactor, 1.0)


def coherent_state(alpha, psi=0.0, omega0=1.0):
    return state_from_params(GaussianParams(alpha=alpha, psi=psi), omega0)


def squeezed_vacuum_state(r, chi=0.0, omega0=1.0):
    return state_from_params(GaussianParams(r=r, chi=chi), omega0)


def fidelity_to_qfi(f_plus, f_minus, eps):
    """
    Gets fidelities of the central state with its neighbours at theta +- eps
    Returns the QFI read off the fidelity curvature
    """
    if eps <= 0:
        raise DomainError(f'eps must be positive, got {eps}')
    return -2 * (f_plus - 2 + f_minus) / eps ** 2

"""
Brute-force truncated Fock-space engine
Gaussian states as density matrices, Lindblad evolution, Uhlmann fidelity and SLD QFI
"""
import math
from dataclasses import replace

import numpy as np
from scipy.linalg import eigh, eigvalsh, expm

from core import BathParams, PhaseSpaceState, rescale_occupancy
from errors import DomainError, InvalidStateError, StepSizeError, TruncationError

DEFAULT_DIM = 60
MAX_DIM = 320
TAIL_TOL = 1e-10
STABILITY_BOUND = 0.1
SLD_CUTOFF = 1e-12


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


class FockDensityMatrix:
    """
    Truncated Fock-basis density matrix
    """

    def __init__(self, data, check=True):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvalidStateError(f'density matrix must be square, got shape {data.shape}')
        data = (data + data.conj().T) / 2
        if check:
            self._validate(data)
        data.setflags(write=False)
        self.data = data

    @property
    def dim(self):
        return self.data.shape[0]

    @staticmethod
    def _validate(data):
        trace = np.trace(data).real
        if abs(trace - 1) > 1e-8:
            raise InvalidStateError(f'trace {trace} differs from 1')
        lowest = eigvalsh(data)[0]
        if lowest < -1e-10:
            raise InvalidStateError(f'negative eigenvalue {lowest}')

    def populations(self):
        return self.data.diagonal().real.copy()

    def purity(self):
        return float(np.vdot(self.data, self.data).real)


def _work_dim(dim):
    return dim + max(40, dim // 2)


def _gaussian_matrix(p, work):
    a = annihilation(work)
    ad = a.T
    nvec = np.arange(work)
    if p.n_th > 0:
        weights = np.exp(nvec * math.log(p.n_th / (1 + p.n_th))) / (1 + p.n_th)
    else:
        weights = (nvec == 0).astype(float)
    nu = np.diag(weights).astype(complex)

    z = p.r * np.exp(1j * p.chi)
    squeeze = expm(0.5 * (z * ad @ ad - np.conj(z) * a @ a))
    displace = expm(p.alpha * (ad - a))
    rotate = np.diag(np.exp(1j * p.psi * nvec))
    u = rotate @ displace @ squeeze
    return u @ nu @ u.conj().T


def build_gaussian_fock(p, dim=None):
    """
    Gets GaussianParams and truncation size
    Returns R D S nu S^+ D^+ R^+ truncated to dim
    With dim=None the truncation starts at DEFAULT_DIM and doubles up to MAX_DIM
    """
    dims = [dim] if dim is not None else _escalation()
    for size in dims:
        rho = _gaussian_matrix(p, _work_dim(size))
        block = rho[:size, :size]
        tail = 1 - np.trace(block).real
        if tail < TAIL_TOL:
            return FockDensityMatrix(block)
    last = dims[-1]
    raise TruncationError(
        f'tail population {tail:.3e} exceeds {TAIL_TOL:g} at dim={last}',
        suggested_dim=min(2 * last, MAX_DIM) if last < MAX_DIM else None,
    )


def _escalation():
    dims, size = [], DEFAULT_DIM
    while size < MAX_DIM:
        dims.append(size)
        size *= 2
    dims.append(MAX_DIM)
    return dims


def _dissipator(rho, gamma, nbar, sq_down, n_low, n_up):
    """
    gamma(n̄+1) D[a] rho + gamma n̄ D[a^+] rho using the shift structure of a
    n_low = diag(a^+ a), n_up = diag(a a^+) of the truncated operators
    """
    out = np.zeros_like(rho)
    if gamma == 0:
        return out
    # a rho a^+
    jump_down = np.zeros_like(rho)
    jump_down[:-1, :-1] = sq_down[:, None] * rho[1:, 1:] * sq_down[None, :]
    out += gamma * (nbar + 1) * (jump_down - 0.5 * (n_low[:, None] * rho + rho * n_low[None, :]))
    if nbar > 0:
        jump_up = np.zeros_like(rho)
        jump_up[1:, 1:] = sq_down[:, None] * rho[:-1, :-1] * sq_down[None, :]
        out += gamma * nbar * (jump_up - 0.5 * (n_up[:, None] * rho + rho * n_up[None, :]))
    return out


def stable_dt(bath, dim):
    rate = max(bath.omega, bath.gamma * (bath.nbar + 1) * dim)
    return STABILITY_BOUND / 2 / rate


def lindblad_evolve(rho, bath, t, dt=None):
    """
    Gets density matrix, bath, time, RK4 step
    Returns rho(t) under the rotating-wave master equation
    The dissipator commutes with the free rotation, so RK4 integrates it in the interaction picture
    and the rotation e^{-i omega n t} is applied exactly
    """
    if t < 0:
        raise DomainError(f'time must be non-negative, got {t}')
    dim = rho.dim
    if dt is None:
        dt = stable_dt(bath, dim)
    if dt <= 0 or dt * max(bath.omega, bath.gamma * (bath.nbar + 1) * dim) >= STABILITY_BOUND:
        raise StepSizeError(f'dt={dt} violates the RK4 stability bound for dim={dim}')

    levels = np.arange(dim, dtype=float)
    sq_down = np.sqrt(levels[1:])
    n_low = levels
    n_up = np.append(levels[1:], 0.0)

    state = np.array(rho.data)
    steps = int(math.ceil(t / dt)) if t > 0 else 0
    if bath.gamma > 0 and steps:
        h = t / steps

        def rhs(x):
            return _dissipator(x, bath.gamma, bath.nbar, sq_down, n_low, n_up)

        for _ in range(steps):
            k1 = rhs(state)
            k2 = rhs(state + h / 2 * k1)
            k3 = rhs(state + h / 2 * k2)
            k4 = rhs(state + h * k3)
            state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    phase = np.exp(-1j * bath.omega * t * levels)
    state = phase[:, None] * state * phase.conj()[None, :]
    return FockDensityMatrix(state, check=False)


def fock_moments(rho, omega=1.0):
    """
    Returns <q>, <p> and the symmetrized covariance of rho for the oscillator of frequency omega
    """
    a = annihilation(rho.dim)
    q = (a + a.T) / math.sqrt(2 * omega)
    p = 1j * math.sqrt(omega / 2) * (a.T - a)
    data = rho.data

    def expect(op):
        return np.trace(data @ op).real

    mq, mp = expect(q), expect(p)
    s_qq = expect(q @ q) - mq ** 2
    s_pp = expect(p @ p) - mp ** 2
    s_pq = expect((q @ p + p @ q) / 2) - mq * mp
    return PhaseSpaceState((mq, mp), [[s_qq, s_pq], [s_pq, s_pp]])


def _sqrt_psd(data):
    vals, vecs = eigh(data)
    if vals[0] < -1e-10:
        raise InvalidStateError(f'negative eigenvalue {vals[0]}')
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity_fock(r1, r2):
    """{tr sqrt(sqrt(rho1) rho2 sqrt(rho1))}^2"""
    root = _sqrt_psd(r1.data)
    inner = root @ r2.data @ root
    mu = np.clip(eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
    return min(float(np.sum(np.sqrt(mu)) ** 2), 1.0)


def qfi_sld(rho, drho):
    """
    Gets density matrix and its parameter derivative
    Returns 2 sum |<i|drho|j>|^2 / (l_i + l_j) over eigenpairs above the cutoff
    """
    d = np.asarray(getattr(drho, 'data', drho), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(d))))
    if np.max(np.abs(d - d.conj().T)) > 1e-8 * scale:
        raise DomainError('derivative of the density matrix is not Hermitian')
    if abs(np.trace(d)) > 1e-8 * scale:
        raise DomainError('derivative of the density matrix is not traceless')
    vals, vecs = eigh(rho.data)
    d_eig = vecs.conj().T @ d @ vecs
    sums = vals[:, None] + vals[None, :]
    mask = sums > SLD_CUTOFF * vals.max()
    return float(2 * np.sum(np.abs(d_eig[mask]) ** 2 / sums[mask]))


def basis_overlap(m, n, omega, omega0):
    """
    <m|n> between number states of frequencies omega (bra) and omega0 (ket)
    l runs over integers of the parity of m and n
    """
    if m < 0 or n < 0:
        raise DomainError(f'levels must be non-negative, got {m}, {n}')
    if omega <= 0 or omega0 <= 0:
        raise DomainError(f'frequencies must be positive, got {omega}, {omega0}')
    if (m + n) % 2:
        return 0.0
    y1 = (omega0 - omega) / (omega0 + omega)
    y2 = 2 * math.sqrt(omega * omega0) / (omega + omega0)
    log_pre = 0.5 * (math.log(y2) + math.lgamma(m + 1) + math.lgamma(n + 1) - (m + n) * math.log(2))
    total = 0.0
    for l in range(m % 2, min(m, n) + 1, 2):
        k = (m + n - 2 * l) // 2
        if y1 == 0 and k > 0:
            continue
        log_term = (
            l * math.log(2 * y2) - math.lgamma(l + 1)
            + (k * math.log(abs(y1)) if k else 0.0)
            - math.lgamma((n - l) // 2 + 1) - math.lgamma((m - l) // 2 + 1)
        )
        sign = (-1) ** ((m - l) // 2) * (1 if y1 >= 0 or k % 2 == 0 else -1)
        total += sign * math.exp(log_pre + log_term)
    return total


def overlap_matrix(dim, omega, omega0):
    matrix = np.zeros((dim, dim))
    for m in range(dim):
        for n in range(m % 2, dim, 2):
            matrix[m, n] = basis_overlap(m, n, omega, omega0)
    return matrix


def squeeze_matrix(dim, s):
    """Truncated matrix of exp[(s/2)(a^+2 - a^2)] computed in a padded space"""
    work = 4 * dim + 40
    a = annihilation(work)
    return expm(0.5 * s * (a.T @ a.T - a @ a))[:dim, :dim]


def local_generator_qfi(p, omega, t, dim=DEFAULT_DIM):
    """
    4 Var[K] of the local generator K = t(n + 1/2) + sin(omega t)/(2 omega) (e^{-i omega t} a^2 + e^{i omega t} a^+2)
    for a pure initial state
    """
    if p.n_th > 0:
        raise DomainError('local generator QFI needs a pure initial state (n_th = 0)')
    work = _work_dim(dim)
    a = annihilation(work)
    ad = a.T
    z = p.r * np.exp(1j * p.chi)
    vacuum = np.zeros(work, dtype=complex)
    vacuum[0] = 1.0
    psi = expm(0.5 * (z * ad @ ad - np.conj(z) * a @ a)) @ vacuum
    psi = expm(p.alpha * (ad - a)) @ psi
    psi = np.exp(1j * p.psi * np.arange(work)) * psi
    if np.sum(np.abs(psi[dim:]) ** 2) > TAIL_TOL:
        raise TruncationError(f'state not contained in dim={dim}', suggested_dim=min(2 * dim, MAX_DIM))

    wt = omega * t
    generator = t * (ad @ a + 0.5 * np.eye(work)) + math.sin(wt) / (2 * omega) * (
        np.exp(-1j * wt) * a @ a + np.exp(1j * wt) * ad @ ad
    )
    k_psi = generator @ psi
    mean = np.vdot(psi, k_psi).real
    return 4 * (np.vdot(k_psi, k_psi).real - mean ** 2)


def _central_drho(family, theta, h):
    plus, minus = family(theta + h), family(theta - h)
    return (plus.data - minus.data) / (2 * h)


def oracle_qfi_omega(p, g, nbar, tau, omega0=1.0, dim=None, step=1e-5, hold_occupancy=False):
    """
    SLD QFI for omega through the frequency-jump scheme in Fock space
    The state is prepared in the omega0 basis, rotated into the omega basis with the overlap matrix,
    evolved there and rotated back
    The truncation is the one build_gaussian_fock accepts for the initial state
    """
    dim = build_gaussian_fock(p, dim).dim
    gamma = g * omega0
    t = tau / omega0
    centre_bath = BathParams(omega0, gamma, nbar)
    dt = stable_dt(replace(centre_bath, nbar=nbar * 1.01 + 1e-3), dim)

    def family(omega):
        if hold_occupancy:
            params, nb = p, nbar
        else:
            params = replace(p, n_th=rescale_occupancy(p.n_th, omega0, omega))
            nb = rescale_occupancy(nbar, omega0, omega)
        # tail is checked once on the centre state
        rho0 = FockDensityMatrix(_gaussian_matrix(params, _work_dim(dim))[:dim, :dim], check=False)
        bath = BathParams(omega, gamma, nb)
        if omega == omega0:
            return lindblad_evolve(rho0, bath, t, dt)
        overlap = overlap_matrix(dim, omega, omega0)
        in_omega = FockDensityMatrix(overlap @ rho0.data @ overlap.T, check=False)
        evolved = lindblad_evolve(in_omega, bath, t, dt)
        return FockDensityMatrix(overlap.T @ evolved.data @ overlap, check=False)

    centre = family(omega0)
    return qfi_sld(centre, _central_drho(family, omega0, step * omega0))


def oracle_qfi_gamma(p, bath, tau, dim=None, step=1e-5):
    """SLD QFI for gamma of the evolved Fock-space state"""
    if bath.gamma <= 0:
        raise DomainError('gamma-QFI needs gamma > 0 for a central difference')
    t = tau / bath.omega
    rho0 = build_gaussian_fock(p, dim)
    dim = rho0.dim
    dt = stable_dt(replace(bath, gamma=bath.gamma * (1 + 2 * step)), dim)

    def family(gamma):
        return lindblad_evolve(rho0, replace(bath, gamma=gamma), t, dt)

    return qfi_sld(family(bath.gamma), _central_drho(family, bath.gamma, step * bath.gamma))

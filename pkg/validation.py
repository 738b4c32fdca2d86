"""
Cross-validation suites behind the validate command
Each suite returns a list of rows: case, value_a, value_b, rel_error, tolerance, passed
"""
import math
import sys

import numpy as np

import closed_forms as cf
from core import BathParams, GaussianParams
from errors import DomainError, TruncationError
from fock_oracle import (
    basis_overlap, oracle_qfi_gamma, oracle_qfi_omega, squeeze_matrix,
)
from qfi_engine import basis_jump_squeeze, qfi_gamma_numeric, qfi_omega_numeric

SCOPES = ('gaussian-vs-fock', 'closed-vs-numeric', 'reductions')

TOL_FOCK = 1e-3
TOL_NUMERIC = 1e-6
TOL_REDUCTION = 1e-12
TOL_CONTINUITY = 1e-6
TOL_LEMMA = 1e-8


def make_row(case, value_a, value_b, tolerance, floor=1e-9):
    """
    Relative error |a - b| / max(|a|, |b|, floor)
    """
    value_a, value_b = float(value_a), float(value_b)
    scale = max(abs(value_a), abs(value_b), floor)
    rel_error = abs(value_a - value_b) / scale
    return {
        'case': case,
        'value_a': value_a,
        'value_b': value_b,
        'rel_error': rel_error,
        'tolerance': tolerance,
        'passed': bool(rel_error <= tolerance),
    }


def random_params(rng, alpha_max=2.0, r_max=1.0, n_th_max=3.0):
    return GaussianParams(
        alpha=rng.uniform(0, alpha_max),
        psi=rng.uniform(-math.pi, math.pi),
        r=rng.uniform(0, r_max),
        chi=rng.uniform(-math.pi, math.pi),
        n_th=rng.uniform(0, n_th_max),
    )


def reductions(seed=0, points=20):
    """
    Special-case closed forms against their general parents
    Values of order one and below are compared absolutely
    """
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(points):
        p = random_params(rng)
        g = rng.uniform(0.01, 0.3)
        nbar = rng.uniform(0, 3)
        tau = rng.uniform(0, 20)
        gamma = g

        pure = GaussianParams(p.alpha, p.psi, p.r, p.chi, 0.0)
        rows.append(make_row(
            f'undamped-vs-pure[{k}]',
            cf.qfi_omega_undamped(pure, tau),
            cf.qfi_omega_pure(p.alpha, p.psi, p.r, p.chi, 1.0, tau),
            TOL_REDUCTION, floor=1.0,
        ))
        rows.append(make_row(
            f'undamped-vs-thermal[{k}]',
            cf.qfi_omega_undamped(GaussianParams(n_th=p.n_th), tau),
            cf.qfi_omega_thermal(p.n_th, tau),
            TOL_REDUCTION, floor=1.0,
        ))
        rows.append(make_row(
            f'damped-vs-ground[{k}]',
            cf.qfi_omega_damped_full(GaussianParams(), g, nbar, tau).total,
            cf.qfi_omega_ground_state(g, nbar, tau),
            TOL_REDUCTION, floor=1.0,
        ))
        coherent = GaussianParams(alpha=p.alpha, psi=p.psi)
        rows.append(make_row(
            f'damped-vs-coherent[{k}]',
            cf.qfi_omega_damped_full(coherent, g, nbar, tau).total,
            cf.qfi_omega_coherent(p.alpha, g, nbar, tau, psi=p.psi),
            TOL_REDUCTION, floor=1.0,
        ))
        squeezed = GaussianParams(r=max(p.r, 0.05))
        rows.append(make_row(
            f'damped-vs-squeezed[{k}]',
            cf.qfi_omega_damped_full(squeezed, g, 0.0, tau).total,
            cf.qfi_omega_squeezed(squeezed.r, g, 0.0, tau),
            TOL_REDUCTION, floor=1.0,
        ))
        rows.append(make_row(
            f'gamma-general-vs-thermal[{k}]',
            cf.qfi_gamma_general(GaussianParams(n_th=p.n_th), g, nbar, tau, gamma),
            cf.qfi_gamma_thermal(p.n_th, g, nbar, tau, gamma),
            TOL_REDUCTION, floor=1.0,
        ))
        displaced = GaussianParams(alpha=p.alpha, psi=p.psi, n_th=p.n_th)
        rows.append(make_row(
            f'gamma-general-vs-displaced[{k}]',
            cf.qfi_gamma_general(displaced, g, nbar, tau, gamma),
            cf.qfi_gamma_displaced_thermal(p.alpha, p.n_th, g, nbar, tau, gamma),
            TOL_REDUCTION, floor=1.0,
        ))
        rows.append(make_row(
            f'gamma-general-vs-squeezed[{k}]',
            cf.qfi_gamma_general(GaussianParams(r=p.r, chi=p.chi), g, 0.0, tau, gamma),
            cf.qfi_gamma_squeezed(p.r, g, 0.0, tau, gamma),
            TOL_REDUCTION, floor=1.0,
        ))
        rows.append(make_row(
            f'g-continuity[{k}]',
            cf.qfi_omega_damped_full(p, 1e-9, nbar, tau).total,
            cf.qfi_omega_undamped(p, tau),
            TOL_CONTINUITY,
        ))
    return rows


def closed_vs_numeric(seed=0, points=200, step=1e-5):
    """
    Closed forms against central differences of the propagated moments
    """
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(points):
        p = random_params(rng)
        g = rng.uniform(0, 0.3)
        nbar = rng.uniform(0, 3)
        tau = rng.uniform(0, 20)
        rows.append(make_row(
            f'omega[{k}]',
            qfi_omega_numeric(p, 1.0, g, nbar, tau, step=step).total,
            cf.qfi_omega_damped_full(p, g, nbar, tau).total,
            TOL_NUMERIC,
        ))
        if g > 0 and tau > 0:
            rows.append(make_row(
                f'gamma[{k}]',
                qfi_gamma_numeric(p, BathParams(1.0, g, nbar), tau, step=step).total,
                cf.qfi_gamma_general(p, g, nbar, tau, g),
                TOL_NUMERIC,
            ))
    return rows


def gaussian_vs_fock(seed=0, points=20, dim=None):
    """
    SLD QFI of truncated Fock-space evolution against the Gaussian scheme,
    plus the overlap-matrix / squeeze-operator identity
    """
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(points):
        p = random_params(rng, alpha_max=1.0, r_max=0.5, n_th_max=1.0)
        g = rng.uniform(0.02, 0.2)
        nbar = rng.uniform(0, 1)
        tau = rng.uniform(0.5, 5)
        if k % 2 == 0:
            rows.append(make_row(
                f'omega[{k}]',
                _escalating(oracle_qfi_omega, dim, p, g, nbar, tau),
                qfi_omega_numeric(p, 1.0, g, nbar, tau).total,
                TOL_FOCK,
            ))
        else:
            bath = BathParams(1.0, g, nbar)
            rows.append(make_row(
                f'gamma[{k}]',
                _escalating(oracle_qfi_gamma, dim, p, bath, tau),
                qfi_gamma_numeric(p, bath, tau).total,
                TOL_FOCK,
            ))

    for ratio in (0.5, 0.9, 1.1, 2.0):
        rows.append(make_row(
            f'overlap-vs-squeeze[{ratio:g}]',
            overlap_lemma_error(ratio),
            0.0,
            TOL_LEMMA, floor=1.0,
        ))
    return rows


def _escalating(oracle, dim, *args):
    """Runs the oracle at dim, once more at the suggested dim if the truncation is too small"""
    try:
        return oracle(*args, dim=dim)
    except TruncationError as e:
        if dim is None or e.suggested_dim is None:
            raise
        print(f'fock truncation {dim} too small, retrying at {e.suggested_dim}', file=sys.stderr)
        return oracle(*args, dim=e.suggested_dim)


def overlap_lemma_error(ratio, size=31):
    """
    Largest entry of |R - S(s)| for levels below size, omega = ratio * omega0
    """
    s = basis_jump_squeeze(1.0, ratio)
    squeeze = squeeze_matrix(size, s)
    worst = 0.0
    for m in range(size):
        for n in range(size):
            worst = max(worst, abs(basis_overlap(m, n, ratio, 1.0) - squeeze[m, n]))
    return worst


SUITES = {
    'gaussian-vs-fock': gaussian_vs_fock,
    'closed-vs-numeric': closed_vs_numeric,
    'reductions': reductions,
}


def run_scope(scope, seed=0, dim=None):
    if scope == 'all':
        rows = []
        for name in SCOPES:
            rows.extend(run_scope(name, seed, dim))
        return rows
    if scope not in SUITES:
        raise DomainError(f'unknown scope {scope!r}, choose from {SCOPES + ("all",)}')
    if scope == 'gaussian-vs-fock':
        rows = gaussian_vs_fock(seed, dim=dim)
    else:
        rows = SUITES[scope](seed)
    for row in rows:
        row['case'] = f'{scope}:{row["case"]}'
    return rows

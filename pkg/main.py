import argparse
import math
import os
import sys
import time
from multiprocessing import Pool

from dotenv import load_dotenv

import closed_forms as cf
import omt
from core import BathParams, GaussianParams, thermal_occupancy
from errors import DomainError, QfiError
from qfi_engine import DEFAULT_STEP, qfi_gamma_numeric, qfi_omega_numeric
from sensing import PRESETS, ResonatorSpec, get_preset, in_mass_units, sensitivity
from utils import parse_angle, parse_grid, parse_length, rows_to_df, split_list, write_table
from validation import SCOPES, run_scope

load_dotenv()

G_WARN = 0.5

QFI_COLUMNS = ['tau', 't', 'engine', 'scaled_qfi', 'qfi', 'term_cov', 'term_purity', 'term_disp']
OMT_COLUMNS = ['case', 'tau_closed', 'tau_numeric', 'value_closed', 'value_numeric', 'discrepancy', 'at_boundary']
VALIDATE_COLUMNS = ['case', 'value_a', 'value_b', 'rel_error', 'tolerance', 'passed']


def env_settings():
    """
    Gets settings from environment (.env is loaded on import)
    Returns dict with threads, fd_step, fock_dim
    """
    threads = os.getenv('GQFI_THREADS')
    fock_dim = os.getenv('GQFI_FOCK_DIM')
    return {
        'threads': int(threads) if threads else (os.cpu_count() or 1),
        'fd_step': float(os.getenv('GQFI_FD_STEP') or DEFAULT_STEP),
        'fock_dim': int(fock_dim) if fock_dim else None,
    }


def say(args, text):
    if not args.quiet:
        print(text, file=sys.stderr)


# --- qfi --------------------------------------------------------------------

def qfi_rows(job):
    """
    Gets job dict with subject, engine list, state/bath parameters and a chunk of tau values
    Returns list of rows, tau order kept
    """
    p = GaussianParams(**job['params'])
    omega, g, nbar = job['omega'], job['g'], job['nbar']
    rows = []
    for tau in job['taus']:
        t = tau / omega
        for engine in job['engines']:
            if job['subject'] == 'omega':
                if engine == 'closed':
                    breakdown = cf.qfi_omega_damped_full(p, g, nbar, tau, omega, job['hold_occupancy'])
                else:
                    breakdown = qfi_omega_numeric(
                        p, omega, g, nbar, t, step=job['step'], hold_occupancy=job['hold_occupancy'],
                    )
                scale = omega ** 2
            else:
                gamma = g * omega
                if engine == 'closed':
                    breakdown = cf.qfi_gamma_breakdown(p, g, nbar, tau, gamma)
                else:
                    breakdown = qfi_gamma_numeric(p, BathParams(omega, gamma, nbar), t, step=job['step'])
                scale = gamma ** 2
            rows.append({
                'tau': float(tau),
                't': float(t),
                'engine': engine,
                'scaled_qfi': breakdown.total * scale,
                'qfi': breakdown.total,
                **breakdown.as_dict(),
            })
    return [{k: row[k] for k in QFI_COLUMNS} for row in rows]


def run_jobs(jobs, threads, worker):
    if threads <= 1 or len(jobs) <= 1:
        results = [worker(job) for job in jobs]
    else:
        with Pool(processes=threads) as pool:
            results = pool.map(worker, jobs)
    return [row for chunk in results for row in chunk]


def cmd_qfi(args, settings):
    if args.physical:
        omega = args.omega
        g = args.gamma_rate / omega
        nbar = thermal_occupancy(omega, args.temperature) if args.temperature else args.nbar
        taus = omega * parse_grid(args.time)
    else:
        omega, g, nbar = args.omega, args.g, args.nbar
        taus = parse_grid(args.tau)
    if omega <= 0:
        raise DomainError(f'omega must be positive, got {omega}')
    if g < 0:
        raise DomainError(f'g must be non-negative, got {g}')
    if args.subject == 'gamma' and g == 0:
        raise DomainError('gamma-QFI needs g > 0')
    if g > G_WARN:
        print(f'warning: g = {g:g} > {G_WARN}, the weak-coupling master equation is outside its validity',
              file=sys.stderr)

    chi = args.chi
    if chi is None:
        chi = cf.CHI_OPT_OMEGA if args.subject == 'omega' else cf.CHI_OPT_GAMMA
    params = {'alpha': args.alpha, 'psi': args.psi, 'r': args.r, 'chi': chi, 'n_th': args.nth}
    GaussianParams(**params)
    engines = ['closed', 'numeric'] if args.engine == 'both' else [args.engine]
    threads = args.threads or settings['threads']
    chunks = [chunk for chunk in split_list(list(taus), max(1, min(threads, len(taus)))) if chunk]
    jobs = [{
        'subject': args.subject, 'engines': engines, 'params': params,
        'omega': omega, 'g': g, 'nbar': nbar, 'taus': chunk,
        'step': args.step or settings['fd_step'], 'hold_occupancy': args.hold_occupancy,
    } for chunk in chunks]

    say(args, f'qfi {args.subject}: {len(taus)} points, engines {engines}, {len(jobs)} worker chunks')
    start = time.time()
    rows = run_jobs(jobs, threads, qfi_rows)
    say(args, f'done in {time.time() - start:.2f} s')
    return rows_to_df(rows, QFI_COLUMNS)


# --- omt --------------------------------------------------------------------

OMT_CASES = (
    'coherent', 'coherent-rescaled', 'squeezed',
    'gamma-thermal', 'gamma-displaced', 'gamma-displaced-rescaled',
)


def omt_row(case, args):
    g, nbar, omega = args.g, args.nbar, args.omega
    gamma = g * omega
    rescaled = case in ('coherent-rescaled', 'gamma-displaced-rescaled')

    if case in ('coherent', 'coherent-rescaled'):
        def curve(tau):
            return cf.qfi_omega_coherent_term(args.alpha, g, nbar, tau, omega)
        solver = omt.omt_coherent_rescaled if rescaled else omt.omt_coherent
        closed = solver(g, nbar, alpha=args.alpha, omega=omega)
        # rescaled i_max is per unit t, the numeric column is per unit tau
        tau_closed = closed.tau_max
        value_closed = closed.i_max / omega if rescaled else closed.i_max
    else:
        if case == 'squeezed':
            def curve(tau):
                return cf.qfi_omega_squeezed(args.r, g, nbar, tau, omega, mode='approx')
            tau_closed = omt.omt_squeezed(g)
        elif case == 'gamma-thermal':
            def curve(tau):
                return cf.qfi_gamma_thermal(args.nth, g, nbar, tau, gamma)
            # closed form only stated for a zero-temperature bath
            tau_closed = omt.omt_gamma('thermal', g, args.nth) if nbar == 0 else math.nan
        else:
            def curve(tau):
                return cf.qfi_gamma_displaced_thermal(args.alpha, nbar, g, nbar, tau, gamma)
            tau_closed = omt.omt_gamma('displaced-rescaled' if rescaled else 'displaced', g)
        if math.isnan(tau_closed):
            value_closed = math.nan
        else:
            value_closed = curve(tau_closed) / tau_closed if rescaled else curve(tau_closed)

    numeric = omt.omt_numeric(curve, omt.default_bracket(g), rescaled=rescaled)
    discrepancy = abs(tau_closed - numeric.tau_max) / numeric.tau_max if not math.isnan(tau_closed) else math.nan
    return {
        'case': case,
        'tau_closed': tau_closed,
        'tau_numeric': numeric.tau_max,
        'value_closed': value_closed,
        'value_numeric': numeric.i_max,
        'discrepancy': discrepancy,
        'at_boundary': numeric.at_boundary,
    }


def cmd_omt(args, settings):
    if args.g > G_WARN:
        print(f'warning: g = {args.g:g} > {G_WARN}, the weak-coupling master equation is outside its validity',
              file=sys.stderr)
    cases = OMT_CASES if args.case == 'all' else (args.case,)
    say(args, f'omt: {", ".join(cases)}')
    return rows_to_df([omt_row(case, args) for case in cases], OMT_COLUMNS)


# --- sense ------------------------------------------------------------------

def build_spec(args):
    if args.preset:
        base = get_preset(args.preset)
        fields = {
            'mass': base.mass, 'omega': base.omega, 'temperature': base.temperature,
            'quality': base.quality, 'amplitude': base.amplitude, 'alpha': base.alpha,
        }
    else:
        missing = [name for name in ('mass', 'omega', 'temperature', 'quality') if getattr(args, name) is None]
        if missing:
            raise DomainError(f'without --preset these are required: {", ".join("--" + m for m in missing)}')
        fields = {'amplitude': None, 'alpha': None}
    for name in ('mass', 'omega', 'temperature', 'quality'):
        if getattr(args, name) is not None:
            fields[name] = getattr(args, name)
    if args.amplitude is not None:
        fields['amplitude'], fields['alpha'] = parse_length(args.amplitude), None
    if args.alpha is not None:
        fields['alpha'] = args.alpha
    return ResonatorSpec(shots=args.shots, q_convention=args.q_convention, **fields)


def cmd_sense(args, settings):
    spec = build_spec(args)
    report = sensitivity(spec)
    row = {'preset': args.preset or 'custom', **report.as_dict()}
    for unit, value in in_mass_units(report.delta_m).items():
        row[f'delta_m_{unit}'] = value
    for unit, value in in_mass_units(report.sens).items():
        row[f'sens_{unit}'] = value
    say(args, f'delta M = {row["delta_m_m_p"]:.3g} m_p, t_max = {report.t_max:.3g} s, '
              f'sensitivity = {row["sens_m_e"]:.3g} m_e/sqrt(Hz)')
    return rows_to_df([row])


# --- validate ---------------------------------------------------------------

def cmd_validate(args, settings):
    dim = args.dim or settings['fock_dim']
    say(args, f'validate {args.scope} (seed {args.seed})')
    start = time.time()
    rows = run_scope(args.scope, seed=args.seed, dim=dim)
    failed = sum(not row['passed'] for row in rows)
    say(args, f'{len(rows) - failed}/{len(rows)} cases passed in {time.time() - start:.1f} s')
    return rows_to_df(rows, VALIDATE_COLUMNS)


# --- parser -----------------------------------------------------------------

def add_output_flags(parser):
    parser.add_argument('--format', choices=('csv', 'jsonl'), default='csv')
    parser.add_argument('--output', default=None, help='file path, stdout when omitted')
    parser.add_argument('--quiet', action='store_true', help='suppress status lines on stderr')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='gaussian-qfi',
        description='QFI and optimal measurement times for a damped oscillator in Gaussian states',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    qfi = sub.add_parser('qfi', help='QFI along a time grid')
    qfi.add_argument('subject', choices=('omega', 'gamma'))
    qfi.add_argument('--alpha', type=float, default=0.0)
    qfi.add_argument('--psi', type=parse_angle, default=0.0)
    qfi.add_argument('--r', type=float, default=0.0)
    qfi.add_argument('--chi', type=parse_angle, default=None, help='default: best angle for the subject, 0 or pi')
    qfi.add_argument('--nth', type=float, default=0.0)
    qfi.add_argument('--g', type=float, default=0.0, help='gamma/omega')
    qfi.add_argument('--nbar', type=float, default=0.0)
    qfi.add_argument('--omega', type=float, default=1.0)
    qfi.add_argument('--tau', default='0:20:201', help='lo:hi:n in omega*t')
    qfi.add_argument('--engine', choices=('closed', 'numeric', 'both'), default='closed')
    qfi.add_argument('--step', type=float, default=None, help='relative finite-difference step')
    qfi.add_argument('--hold-occupancy', action='store_true', help='keep n_th and n̄ fixed under d/domega')
    qfi.add_argument('--threads', type=int, default=None)
    phys = qfi.add_argument_group('physical units')
    phys.add_argument('--physical', action='store_true', help='SI inputs: --omega rad/s, --gamma-rate, --time')
    phys.add_argument('--gamma-rate', type=float, default=0.0, help='damping rate in 1/s')
    phys.add_argument('--temperature', type=float, default=None, help='bath temperature in K')
    phys.add_argument('--time', default=None, help='lo:hi:n in seconds')
    add_output_flags(qfi)

    om = sub.add_parser('omt', help='optimal measurement times, closed form next to numeric')
    om.add_argument('case', choices=OMT_CASES + ('all',))
    om.add_argument('--g', type=float, required=True)
    om.add_argument('--nbar', type=float, default=0.0)
    om.add_argument('--alpha', type=float, default=1.0)
    om.add_argument('--r', type=float, default=1.0)
    om.add_argument('--nth', type=float, default=0.0)
    om.add_argument('--omega', type=float, default=1.0)
    add_output_flags(om)

    sense = sub.add_parser('sense', help='mass sensitivity of a driven resonator')
    sense.add_argument('--preset', choices=sorted(PRESETS), default=None)
    sense.add_argument('--mass', type=float, default=None, help='kg')
    sense.add_argument('--omega', type=float, default=None, help='rad/s')
    sense.add_argument('--temperature', type=float, default=None, help='K')
    sense.add_argument('--quality', type=float, default=None)
    sense.add_argument('--amplitude', default=None, help='drive amplitude like 10nm')
    sense.add_argument('--alpha', type=float, default=None)
    sense.add_argument('--shots', type=int, default=1)
    sense.add_argument('--q-convention', choices=('full', 'half'), default='full')
    add_output_flags(sense)

    val = sub.add_parser('validate', help='cross-validation suites')
    val.add_argument('--scope', choices=SCOPES + ('all',), default='all')
    val.add_argument('--seed', type=int, default=0)
    val.add_argument('--dim', type=int, default=None, help='starting Fock truncation')
    add_output_flags(val)
    return parser


COMMANDS = {
    'qfi': cmd_qfi,
    'omt': cmd_omt,
    'sense': cmd_sense,
    'validate': cmd_validate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == 'qfi' and args.physical and not args.time:
        parser.error('--physical needs --time lo:hi:n in seconds')
    settings = env_settings()
    try:
        df = COMMANDS[args.command](args, settings)
        write_table(df, args.format, args.output)
    except QfiError as e:
        print(f'error: {e}', file=sys.stderr)
        return 2
    if args.command == 'validate' and not df['passed'].all():
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())

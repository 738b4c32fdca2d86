"""
Mass sensitivity of a coherently driven nanomechanical resonator
limited by the frequency QFI at the optimal measurement time
"""
import math
from dataclasses import asdict, dataclass

from core import HBAR, thermal_occupancy
from errors import DomainError
from omt import omt_coherent

# CODATA 2018, kg
PROTON_MASS = 1.67262192369e-27
ELECTRON_MASS = 9.1093837015e-31
ATOMIC_MASS_UNIT = 1.66053906660e-27

MASS_UNITS = {
    'm_p': PROTON_MASS,
    'm_e': ELECTRON_MASS,
    'u': ATOMIC_MASS_UNIT,
}

Q_CONVENTIONS = ('full', 'half')


@dataclass(frozen=True)
class ResonatorSpec:
    """
    mass kg, omega rad/s, temperature K, quality factor Q
    Drive is given either as a displacement amplitude in metres or as alpha directly
    q_convention 'full' maps g = 1/Q, 'half' maps g = 1/(2Q)
    """
    mass: float
    omega: float
    temperature: float
    quality: float
    amplitude: float | None = None
    alpha: float | None = None
    shots: int = 1
    q_convention: str = 'full'

    def __post_init__(self):
        for name in ('mass', 'omega', 'temperature', 'quality'):
            if not getattr(self, name) > 0:
                raise DomainError(f'{name} must be positive, got {getattr(self, name)}')
        if self.amplitude is not None and not self.amplitude > 0:
            raise DomainError(f'amplitude must be positive, got {self.amplitude}')
        if self.alpha is not None and not self.alpha > 0:
            raise DomainError(f'alpha must be positive, got {self.alpha}')
        if self.shots < 1:
            raise DomainError(f'shots must be >= 1, got {self.shots}')
        if self.q_convention not in Q_CONVENTIONS:
            raise DomainError(f'q_convention must be one of {Q_CONVENTIONS}, got {self.q_convention!r}')

    @property
    def g(self):
        return 1 / self.quality if self.q_convention == 'full' else 1 / (2 * self.quality)


@dataclass(frozen=True)
class SensitivityReport:
    nbar: float
    alpha: float
    g: float
    tau_max: float
    t_max: float
    i_max: float
    delta_m: float
    sens: float

    def as_dict(self):
        return asdict(self)


def alpha_from_amplitude(x_amp, mass, omega):
    """
    Gets displacement amplitude (m), mass (kg), angular frequency (rad/s)
    Returns coherent amplitude alpha = x / sqrt(2 hbar / (M omega))
    """
    if x_amp <= 0 or mass <= 0 or omega <= 0:
        raise DomainError(f'amplitude, mass and omega must be positive, got {x_amp}, {mass}, {omega}')
    return x_amp / math.sqrt(2 * HBAR / (mass * omega))


def delta_m_min(spec, i_max, shots=None):
    """
    Smallest resolvable mass change 2M / (omega sqrt(m I_max)) in kg
    i_max in s^2
    """
    shots = spec.shots if shots is None else shots
    if i_max <= 0:
        raise DomainError(f'i_max must be positive, got {i_max}')
    if shots < 1:
        raise DomainError(f'shots must be >= 1, got {shots}')
    return 2 * spec.mass / (spec.omega * math.sqrt(shots * i_max))


def drive_alpha(spec):
    if spec.alpha is not None:
        return spec.alpha
    if spec.amplitude is None:
        raise DomainError(
            'resonator drive is unknown: pass an amplitude (e.g. 10nm) or alpha; '
            'no default drive is assumed for this resonator'
        )
    return alpha_from_amplitude(spec.amplitude, spec.mass, spec.omega)


def sensitivity(spec):
    """
    Gets ResonatorSpec
    Returns SensitivityReport: thermal occupancy, alpha, coherent OMT, delta M and delta M sqrt(t_max)
    """
    nbar = thermal_occupancy(spec.omega, spec.temperature)
    alpha = drive_alpha(spec)
    result = omt_coherent(spec.g, nbar, alpha=alpha, omega=spec.omega)
    t_max = result.tau_max / spec.omega
    delta_m = delta_m_min(spec, result.i_max)
    return SensitivityReport(
        nbar=nbar,
        alpha=alpha,
        g=spec.g,
        tau_max=result.tau_max,
        t_max=t_max,
        i_max=result.i_max,
        delta_m=delta_m,
        sens=delta_m * math.sqrt(t_max),
    )


def in_mass_units(kg):
    return {unit: kg / value for unit, value in MASS_UNITS.items()}


PRESETS = {
    # silicon carbide nanoresonator, zeptogram regime
    'chaste2012': ResonatorSpec(
        mass=3e-22, omega=2 * math.pi * 1.865e9, temperature=4.0, quality=1e3, amplitude=10e-9,
    ),
    # carbon nanotube at room temperature; drive amplitude has to be supplied
    'jensen2008': ResonatorSpec(
        mass=1e-21, omega=2 * math.pi * 328.5e6, temperature=300.0, quality=1e3,
    ),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f'unknown preset {name!r}, choose from {sorted(PRESETS)}') from None

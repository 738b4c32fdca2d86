import math
from dataclasses import replace

import pytest

from core import HBAR
from errors import DomainError
from sensing import (
    ELECTRON_MASS, PROTON_MASS, ResonatorSpec, alpha_from_amplitude, delta_m_min, drive_alpha,
    get_preset, in_mass_units, sensitivity,
)

CHASTE = get_preset('chaste2012')
JENSEN = get_preset('jensen2008')


class TestAlpha:

    def test_unit_amplitude(self):
        mass, omega = 2.0e-21, 3.0e8
        x_amp = math.sqrt(2 * HBAR / (mass * omega))
        assert alpha_from_amplitude(x_amp, mass, omega) == pytest.approx(1.0, rel=1e-12)

    def test_silicon_carbide_drive(self):
        assert drive_alpha(CHASTE) == pytest.approx(1291, rel=1e-2)

    def test_scales_with_mass(self):
        assert alpha_from_amplitude(1e-8, 4e-21, 1e9) == pytest.approx(
            2 * alpha_from_amplitude(1e-8, 1e-21, 1e9), rel=1e-12
        )

    def test_explicit_alpha_wins(self):
        assert drive_alpha(replace(JENSEN, alpha=50.0)) == 50.0

    def test_non_positive(self):
        with pytest.raises(DomainError):
            alpha_from_amplitude(0.0, 1e-21, 1e9)


class TestDeltaM:

    def test_mass_at_unit_information(self):
        spec = ResonatorSpec(mass=1e-21, omega=2.0, temperature=1.0, quality=100.0, alpha=1.0)
        assert delta_m_min(spec, 4 / spec.omega ** 2) == pytest.approx(spec.mass, rel=1e-12)

    def test_repetitions(self):
        spec = ResonatorSpec(mass=1e-21, omega=2.0, temperature=1.0, quality=100.0, alpha=1.0)
        assert delta_m_min(spec, 1.0, shots=100) == pytest.approx(delta_m_min(spec, 1.0) / 10, rel=1e-12)

    def test_bad_information(self):
        with pytest.raises(DomainError):
            delta_m_min(CHASTE, 0.0)


class TestSensitivity:

    def test_silicon_carbide(self):
        report = sensitivity(CHASTE)
        assert report.nbar == pytest.approx(44.3, rel=5e-3)
        assert 0.5 < report.t_max / 270e-9 < 2
        assert 0.5 < report.delta_m / PROTON_MASS < 2
        assert 0.5 < report.sens / (0.8 * ELECTRON_MASS) < 2

    def test_silicon_carbide_half_convention(self):
        report = sensitivity(replace(CHASTE, q_convention='half'))
        assert report.g == pytest.approx(5e-4)
        assert report.t_max == pytest.approx(270e-9, rel=0.02)
        assert report.delta_m / PROTON_MASS == pytest.approx(0.82, rel=0.02)
        assert report.sens / ELECTRON_MASS == pytest.approx(0.8, rel=0.03)

    def test_nanotube_needs_drive(self):
        with pytest.raises(DomainError, match='amplitude'):
            sensitivity(JENSEN)

    def test_nanotube_with_drive(self):
        # no sensitivity bound: the published 74 m_p and 1.5 us give 0.09 u/sqrt(Hz), not the quoted 0.8
        report = sensitivity(replace(JENSEN, amplitude=10e-9))
        assert 0.5 < report.delta_m / (74 * PROTON_MASS) < 2
        half = sensitivity(replace(JENSEN, amplitude=10e-9, q_convention='half'))
        assert half.delta_m / PROTON_MASS == pytest.approx(74, rel=0.02)
        assert half.t_max == pytest.approx(1.5e-6, rel=0.05)

    def test_sens_definition(self):
        report = sensitivity(CHASTE)
        assert report.sens == pytest.approx(report.delta_m * math.sqrt(report.t_max), rel=1e-12)
        assert report.t_max == pytest.approx(report.tau_max / CHASTE.omega, rel=1e-12)

    def test_better_with_drive_and_quality(self):
        base = sensitivity(CHASTE).delta_m
        assert sensitivity(replace(CHASTE, amplitude=20e-9)).delta_m < base
        assert sensitivity(replace(CHASTE, quality=1e4)).delta_m < base

    def test_as_dict(self):
        row = sensitivity(CHASTE).as_dict()
        assert set(row) == {'nbar', 'alpha', 'g', 'tau_max', 't_max', 'i_max', 'delta_m', 'sens'}


class TestResonatorSpec:

    @pytest.mark.parametrize('field, value', [
        ('mass', 0.0), ('omega', -1.0), ('temperature', 0.0), ('quality', 0.0),
        ('amplitude', -1e-9), ('shots', 0), ('q_convention', 'double'),
    ])
    def test_validation(self, field, value):
        with pytest.raises(DomainError):
            replace(CHASTE, **{field: value})

    def test_unknown_preset(self):
        with pytest.raises(DomainError):
            get_preset('nobody2000')

    def test_mass_units(self):
        units = in_mass_units(PROTON_MASS)
        assert units['m_p'] == pytest.approx(1.0)
        assert units['m_e'] == pytest.approx(1836.15267, rel=1e-8)

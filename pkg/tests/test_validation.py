import pytest

from errors import DomainError
from validation import (
    closed_vs_numeric, gaussian_vs_fock, make_row, overlap_lemma_error, reductions, run_scope,
)


class TestMakeRow:

    def test_relative(self):
        row = make_row('x', 1.0, 1.1, 0.1)
        assert row['rel_error'] == pytest.approx(0.1 / 1.1)
        assert row['passed']

    def test_floor(self):
        row = make_row('x', 1e-13, 0.0, 1e-12, floor=1.0)
        assert row['rel_error'] == pytest.approx(1e-13)
        assert row['passed']

    def test_fails(self):
        assert not make_row('x', 1.0, 2.0, 1e-6)['passed']


class TestSuites:

    def test_reductions(self):
        rows = reductions(seed=1, points=5)
        assert len(rows) == 45
        failed = [row for row in rows if not row['passed']]
        assert failed == []

    def test_closed_vs_numeric(self):
        rows = closed_vs_numeric(seed=1, points=20)
        failed = [row for row in rows if not row['passed']]
        assert failed == []

    def test_overlap_lemma(self):
        assert overlap_lemma_error(2.0) < 1e-8

    @pytest.mark.slow
    def test_gaussian_vs_fock(self):
        rows = gaussian_vs_fock(seed=1, points=2, dim=60)
        assert len(rows) == 6
        failed = [row for row in rows if not row['passed']]
        assert failed == []


class TestRunScope:

    def test_prefix(self):
        rows = run_scope('reductions', seed=2)
        assert all(row['case'].startswith('reductions:') for row in rows)

    def test_unknown(self):
        with pytest.raises(DomainError):
            run_scope('everything')

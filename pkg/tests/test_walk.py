"""
Tests for the two-site walk: Gaussian integers, the G/F recursion,
exact measures and closed-form eigenvectors
"""

import logging
from fractions import Fraction

import numpy as np
import pytest

from qproc.exceptions import PreconditionError
from qproc.process import QProcess
from qproc.unitary import InitialState
from qproc.walk import (
    I,
    GaussianInt,
    gf_closed_form,
    gf_sequence,
    walk_eigenvectors,
    walk_measure_exact,
    walk_table,
)


class TestGaussianInt:

    def test_arithmetic(self):
        assert GaussianInt(1, 2) * GaussianInt(3, -1) == GaussianInt(5, 5)
        assert (1 + I) ** 4 == -4
        assert I * I == -1
        assert GaussianInt(2, 3) - 2 == 3 * I
        assert -GaussianInt(1, -1) == GaussianInt(-1, 1)

    def test_norm_and_conjugate(self):
        z = GaussianInt(3, -4)
        assert z.norm() == 25
        assert z * z.conj() == 25
        assert complex(z) == 3 - 4j
        assert str(z) == "3-4i"

    def test_power_edge_cases(self):
        assert GaussianInt(7, 7) ** 0 == 1
        with pytest.raises(ValueError):
            I ** -1

    def test_hashable(self):
        assert len({GaussianInt(1, 1), GaussianInt(1, 1), GaussianInt(1, -1)}) == 2
        assert GaussianInt(2, 0) != "2"


class TestRecursion:

    def test_first_values(self):
        pairs = gf_sequence(3)
        assert [g for g, _ in pairs] == [0, I, 2 * I, 2 * I]
        assert [f for _, f in pairs] == [1, 1, 0, -2]

    def test_closed_form_matches_recursion(self):
        for t, pair in enumerate(gf_sequence(40)):
            assert gf_closed_form(t) == pair

    def test_period_four_scaling(self):
        for t in range(20):
            g, f = gf_closed_form(t + 4)
            g0, f0 = gf_closed_form(t)
            assert g == -4 * g0
            assert f == -4 * f0

    def test_measures_are_probabilities(self):
        for t in range(30):
            mu_e, mu_g = walk_measure_exact(t)
            assert mu_e + mu_g == 1

    def test_measure_values(self):
        expected_e = [0, Fraction(1, 2), 1, Fraction(1, 2), 0, Fraction(1, 2), 1, Fraction(1, 2), 0]
        assert [walk_measure_exact(t)[0] for t in range(9)] == expected_e
        assert [walk_measure_exact(t)[1] for t in range(4)] == [1, Fraction(1, 2), 0, Fraction(1, 2)]

    def test_negative_inputs(self):
        with pytest.raises(ValueError):
            gf_sequence(-1)
        with pytest.raises(ValueError):
            gf_closed_form(-2)


class TestWalkTable:

    def test_exact_matches_direct(self, walk_process):
        table = walk_table(walk_process, 12, direct_cap=10)
        assert table.exact
        assert len(table.rows) == 13
        assert table.max_difference <= 1e-12
        assert table.rows[10].direct_mu_e is not None
        assert table.rows[11].direct_mu_e is None
        assert table.rows[2].mu_e == 1
        assert table.rows[2].nu_e == Fraction(1, 2)

    def test_direct_values_through_sixteen(self, walk_process):
        table = walk_table(walk_process, 16, direct_cap=16)
        assert all(row.direct_mu_e is not None for row in table.rows)
        assert table.max_difference <= 1e-12
        for row in table.rows:
            mu_e, mu_g = walk_measure_exact(row.t)
            assert row.direct_mu_e == pytest.approx(float(mu_e), abs=1e-12)
            assert row.direct_mu_g == pytest.approx(float(mu_g), abs=1e-12)
            assert row.direct_mu_e + row.direct_mu_g == pytest.approx(1.0, abs=1e-12)

    def test_classical_column_at_time_zero(self, walk_process, free_walk_process):
        assert walk_table(walk_process, 0).rows[0].nu_e == 0
        assert walk_table(free_walk_process, 0).rows[0].nu_e == Fraction(1, 2)

    def test_free_walk_matches(self, free_walk_process):
        assert walk_table(free_walk_process, 6).max_difference <= 1e-12

    def test_other_initial_state(self, walk_system, caplog):
        process = QProcess(walk_system, InitialState.basis(2, 1))
        with caplog.at_level(logging.WARNING, logger="qproc.walk"):
            table = walk_table(process, 4)
        assert not table.exact
        assert all(row.mu_e is None for row in table.rows)
        assert table.max_difference is None
        assert table.rows[2].direct_mu_e == pytest.approx(0.0, abs=1e-12)
        assert "exact columns skipped" in caplog.text

    def test_needs_two_sites(self, random_process):
        with pytest.raises(PreconditionError):
            walk_table(random_process, 3)

    def test_to_dict(self, walk_process):
        data = walk_table(walk_process, 2).to_dict()
        assert data["exact"] is True
        assert len(data["rows"]) == 3
        assert data["rows"][1]["direct_mu_E"] == pytest.approx(0.5)


class TestEigenvectors:

    @pytest.mark.parametrize("n", range(1, 8))
    def test_unit_and_orthogonal(self, n):
        even, odd = walk_eigenvectors(n)
        assert np.linalg.norm(even) == pytest.approx(1.0)
        assert np.linalg.norm(odd) == pytest.approx(1.0)
        assert np.vdot(even, odd) == 0

    def test_small_case(self):
        even, odd = walk_eigenvectors(1)
        np.testing.assert_allclose(even, [1, 0])
        np.testing.assert_allclose(odd, [0, 1j])

    def test_rank_zero(self):
        with pytest.raises(PreconditionError):
            walk_eigenvectors(0)

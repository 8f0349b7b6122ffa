"""
Tests for decoherence states, q-measures and the exact spectrum
"""

import numpy as np
import pytest
from scipy import linalg

from qproc.core.config import QProcConfig
from qproc.decoherence import (
    build_decoherence,
    class_functional,
    decoherence_functional,
    dense_matrix,
    gram_matrix,
    position_distribution,
    q_measure,
    q_measure_spectral,
    spectrum,
    weighted_q_measure,
)
from qproc.exceptions import BudgetExceededError, NormalizationError, RankMismatchError
from qproc.models.path import CylinderEvent
from qproc.pathspace import position_event
from qproc.unitary import InitialState, random_state, random_system
from qproc.walk import walk_eigenvectors


def random_event(rng, m, n, density=0.4):
    mask = rng.random(m ** (n + 1)) < density
    return CylinderEvent.from_mask(m, n, mask)


class TestWalkMeasures:

    @pytest.mark.parametrize("n,mu_e,mu_g", [(1, 0.5, 0.5), (2, 1.0, 0.0), (3, 0.5, 0.5), (4, 0.0, 1.0)])
    def test_position_measures(self, walk_process, n, mu_e, mu_g):
        state = walk_process.state(n)
        assert q_measure(state, position_event(2, n, n, 1, 0)) == pytest.approx(mu_e, abs=1e-12)
        assert q_measure(state, position_event(2, n, n, 0, 0)) == pytest.approx(mu_g, abs=1e-12)

    def test_full_space_has_measure_one(self, walk_process):
        for n in range(6):
            state = walk_process.state(n)
            assert state.trace == pytest.approx(1.0, abs=1e-12)
            assert q_measure(state, CylinderEvent.full(2, n, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_empty_event(self, walk_process):
        assert q_measure(walk_process.state(3), CylinderEvent.empty(2, 3)) == 0.0

    def test_interference_breaks_additivity(self, walk_process):
        state = walk_process.state(2)
        a = CylinderEvent.from_indices(2, 2, [0])
        b = CylinderEvent.from_indices(2, 2, [2])
        assert q_measure(state, a) == pytest.approx(0.25)
        assert q_measure(state, b) == pytest.approx(0.25)
        assert q_measure(state, a.union(b)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("fixed", [None, 0])
    def test_state_at_normalization_edge(self, walk_system, fixed):
        psi = InitialState(np.array([1 + 9e-13, 0]), 1e-12)
        for n in range(4):
            state = build_decoherence(walk_system, psi, n, fixed_initial_site=fixed)
            assert state.trace == pytest.approx(abs(psi.psi[0]) ** 2, abs=1e-12)

    def test_fixed_site_needs_basis_state(self, walk_system):
        psi = InitialState(np.array([0.6, 0.8]))
        with pytest.raises(NormalizationError):
            build_decoherence(walk_system, psi, 2, fixed_initial_site=0)

    def test_rank_mismatch(self, walk_process):
        with pytest.raises(RankMismatchError):
            q_measure(walk_process.state(2), CylinderEvent.empty(2, 3))


class TestFunctional:

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_matches_class_operators(self, random_process, rng, n):
        state = random_process.state(n)
        for _ in range(5):
            a, b = random_event(rng, 3, n), random_event(rng, 3, n)
            expected = class_functional(random_process.system, random_process.psi, a, b)
            assert decoherence_functional(state, a, b) == pytest.approx(expected, abs=1e-12)

    def test_hermitian(self, random_process, rng):
        state = random_process.state(3)
        a, b = random_event(rng, 3, 3), random_event(rng, 3, 3)
        forward = decoherence_functional(state, a, b)
        backward = decoherence_functional(state, b, a)
        assert forward == pytest.approx(np.conj(backward), abs=1e-14)

    def test_additive_in_first_argument(self, random_process, rng):
        state = random_process.state(3)
        for _ in range(20):
            labels = rng.integers(0, 3, 3 ** 4)
            a = CylinderEvent.from_mask(3, 3, labels == 0)
            b = CylinderEvent.from_mask(3, 3, labels == 1)
            c = random_event(rng, 3, 3)
            joint = decoherence_functional(state, a.union(b), c)
            split = decoherence_functional(state, a, c) + decoherence_functional(state, b, c)
            assert joint == pytest.approx(split, abs=1e-12)

    def test_gram_matrix_is_positive(self, random_process, rng):
        state = random_process.state(3)
        events = [random_event(rng, 3, 3) for _ in range(6)]
        gram = gram_matrix(state, events)
        np.testing.assert_allclose(gram, gram.conj().T, atol=1e-14)
        assert linalg.eigvalsh(gram).min() > -1e-12
        for i, event in enumerate(events):
            assert gram[i, i].real == pytest.approx(q_measure(state, event), abs=1e-12)

    def test_position_distribution(self, stepped_process):
        state = stepped_process.state(4)
        evolved = stepped_process.system.evolve(stepped_process.psi, 4)
        np.testing.assert_allclose(position_distribution(state), np.abs(evolved) ** 2, atol=1e-12)

    def test_position_distribution_random_draws(self):
        rng = np.random.default_rng(101)
        for _ in range(100):
            m, n = int(rng.integers(2, 4)), int(rng.integers(0, 6))
            system, psi = random_system(m, max(n, 1), rng), random_state(m, rng)
            state = build_decoherence(system, psi, n)
            evolved = system.evolve(psi, n)
            np.testing.assert_allclose(position_distribution(state), np.abs(evolved) ** 2, atol=1e-10)

    def test_weighted_measure_of_indicator(self, random_process, rng):
        state = random_process.state(3)
        event = random_event(rng, 3, 3)
        weights = event.mask().astype(float)
        assert weighted_q_measure(state, weights) == pytest.approx(q_measure(state, event), abs=1e-12)
        with pytest.raises(RankMismatchError):
            weighted_q_measure(state, np.ones(5))


class TestSpectrum:

    @pytest.mark.parametrize("n", range(1, 8))
    def test_walk_eigenvalues(self, walk_process, n):
        decomposition = spectrum(walk_process.state(n))
        np.testing.assert_allclose(decomposition.eigenvalues, [0.5, 0.5], atol=1e-12)
        assert len(decomposition.eigenpairs) == 2

    def test_rank_zero_is_diagonal(self, random_process):
        decomposition = spectrum(random_process.state(0))
        np.testing.assert_allclose(decomposition.eigenvalues, np.abs(random_process.psi.psi) ** 2, atol=1e-14)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_eigenvalues_sum_to_one(self, stepped_process, n):
        assert spectrum(stepped_process.state(n)).eigenvalue_sum == pytest.approx(1.0, abs=1e-10)

    def test_absent_pairs(self, walk_process):
        decomposition = spectrum(walk_process.state(0))
        assert decomposition.eigenvalues.tolist() == [1.0, 0.0]
        assert decomposition.pair(1) is None
        assert decomposition.pair(0).support.tolist() == [0]

    def test_matches_dense_solver(self, random_process):
        state = random_process.state(3)
        dense = dense_matrix(state)
        decomposition = spectrum(state)
        expected = np.sort(linalg.eigvalsh(dense))[::-1][:3]
        np.testing.assert_allclose(np.sort(decomposition.eigenvalues)[::-1], expected, atol=1e-12)
        for pair in decomposition.eigenpairs:
            v = pair.dense(state.space_size)
            np.testing.assert_allclose(dense @ v, pair.eigenvalue * v, atol=1e-12)
            assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_matches_dense_solver_random_draws(self):
        rng = np.random.default_rng(202)
        for _ in range(50):
            m, n = int(rng.integers(2, 4)), int(rng.integers(0, 4))
            state = build_decoherence(random_system(m, max(n, 1), rng), random_state(m, rng), n)
            dense = dense_matrix(state)
            decomposition = spectrum(state)
            values = linalg.eigvalsh(dense)[::-1]
            np.testing.assert_allclose(np.sort(decomposition.eigenvalues)[::-1], values[:m], atol=1e-9)
            np.testing.assert_allclose(values[m:], 0.0, atol=1e-9)
            assert decomposition.eigenvalue_sum == pytest.approx(1.0, abs=1e-10)
            for pair in decomposition.eigenpairs:
                v = pair.dense(state.space_size)
                np.testing.assert_allclose(dense @ v, pair.eigenvalue * v, atol=1e-9)

    def test_phase_convention(self, random_process):
        for pair in spectrum(random_process.state(2)).eigenpairs:
            lead = pair.vector[np.flatnonzero(np.abs(pair.vector) > 1e-9 * np.abs(pair.vector).max())[0]]
            assert lead.imag == pytest.approx(0.0, abs=1e-14)
            assert lead.real > 0

    def test_spectral_measure(self, random_process, rng):
        state = random_process.state(3)
        decomposition = spectrum(state)
        for _ in range(5):
            event = random_event(rng, 3, 3)
            assert q_measure_spectral(state, event, decomposition) == pytest.approx(q_measure(state, event), abs=1e-12)

    def test_three_way_agreement(self, random_process, stepped_process, free_walk_process):
        rng = np.random.default_rng(131)
        for process, n in ((random_process, 3), (stepped_process, 2), (free_walk_process, 5)):
            state = process.state(n)
            decomposition = spectrum(state)
            for _ in range(200):
                event = random_event(rng, process.m, n, density=rng.random())
                direct = q_measure(state, event)
                assert q_measure_spectral(state, event, decomposition) == pytest.approx(direct, abs=1e-10)
                via_operators = class_functional(process.system, process.psi, event, event)
                assert via_operators.real == pytest.approx(direct, abs=1e-10)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_walk_closed_form_eigenvectors(self, walk_process, n):
        decomposition = spectrum(walk_process.state(n))
        for pair, expected in zip(decomposition.eigenpairs, walk_eigenvectors(n)):
            overlap = np.vdot(expected, pair.dense(2 ** n))
            assert abs(overlap) == pytest.approx(1.0, abs=1e-12)

    def test_dense_cap(self, walk_process):
        with pytest.raises(BudgetExceededError):
            dense_matrix(walk_process.state(6), QProcConfig(dense_cap=64))

"""
Tests for QProcess: local expectations, suitability sweeps, consistency
and the grade-2 sum rule
"""

import logging

import numpy as np
import pytest

from qproc.core.config import QProcConfig
from qproc.exceptions import BudgetExceededError, DisjointnessError, RankMismatchError
from qproc.families import (
    ComplementOfCountableFamily,
    CountableFamily,
    CylinderFamily,
    FirstVisitFamily,
    NeverVisitsSiteFamily,
    PositionFamily,
    SingletonFamily,
    VisitsSiteFamily,
)
from qproc.models.path import CylinderEvent, NPath
from qproc.models.reports import Verdict
from qproc.pathspace import position_event
from qproc.process import QProcess
from qproc.unitary import InitialState


def disjoint_events(rng, m, n, parts=3):
    """Random partition of part of Omega_n into ``parts`` disjoint events"""
    labels = rng.integers(0, parts + 1, m ** (n + 1))
    return [CylinderEvent.from_mask(m, n, labels == k) for k in range(parts)]


class TestLocalExpectations:

    def test_position_family_on_walk(self, walk_process):
        family = PositionFamily(2, 2, 1)
        assert walk_process.local_expectation(family, 0) == pytest.approx(0.25)
        assert walk_process.local_expectation(family, 1) == pytest.approx(0.25)
        for t in range(2, 7):
            assert walk_process.local_expectation(family, t) == pytest.approx(1.0, abs=1e-12)

    def test_cylinder_family_is_constant_from_native_rank(self, random_process, rng):
        event = CylinderEvent.from_mask(3, 2, rng.random(27) < 0.5)
        family = CylinderFamily(event)
        expected = random_process.q_measure(event)
        for t in range(2, 6):
            assert random_process.local_expectation(family, t) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("family,expected", [
        (VisitsSiteFamily(2, 1), 1.0),
        (NeverVisitsSiteFamily(2, 1), 0.0),
        (SingletonFamily(NPath((0, 1), 2)), 0.0),
        (ComplementOfCountableFamily(CountableFamily(2, [NPath((0,), 2), NPath((0, 1), 2)])), 1.0),
    ])
    def test_null_and_conull_families(self, walk_process, family, expected):
        for t in (0, 3, 6):
            assert walk_process.local_expectation(family, t) == pytest.approx(expected, abs=1e-12)

    def test_site_count_mismatch(self, walk_process):
        with pytest.raises(RankMismatchError):
            walk_process.local_expectation(PositionFamily(3, 1, 0), 2)

    def test_budget(self, walk_system):
        process = QProcess(walk_system, InitialState.basis(2, 0), fixed_initial_site=0,
                           config=QProcConfig(enumeration_cap=16))
        assert process.max_rank() == 4
        with pytest.raises(BudgetExceededError):
            process.local_expectation(VisitsSiteFamily(2, 0), 5)

    def test_max_rank_respects_horizon(self, stepped_process):
        assert stepped_process.max_rank() == 8

    def test_parallel_states_match(self, random_process, rng):
        config = QProcConfig(workers=4, parallel_threshold=1)
        parallel = QProcess(random_process.system, random_process.psi, config=config)
        event = CylinderEvent.from_mask(3, 4, rng.random(243) < 0.3)
        assert parallel.q_measure(event) == pytest.approx(random_process.q_measure(event), abs=1e-14)


class TestSuitability:

    def test_position_family_is_suitable(self, walk_process):
        report = walk_process.evaluate_suitability(PositionFamily(2, 2, 1))
        assert report.verdict == Verdict.SUITABLE
        assert report.suitable
        assert report.limit == pytest.approx(1.0, abs=1e-12)
        assert report.ranks[0] == 0
        assert report.trailing_spread <= report.tol

    def test_first_visit_limit(self, walk_process):
        report = walk_process.evaluate_suitability(FirstVisitFamily(2, 1, 1), t_max=6)
        assert report.suitable
        assert report.values[0] == pytest.approx(0.25)
        assert report.limit == pytest.approx(0.5, abs=1e-12)

    def test_window_covers_native_rank(self, walk_process):
        report = walk_process.evaluate_suitability(PositionFamily(2, 6, 0), t_max=2, window=3)
        assert report.ranks[-1] == 8

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_cylinder_values_stable_from_native_rank(self, random_process, rng, n):
        for _ in range(10):
            event = CylinderEvent.from_mask(3, n, rng.random(3 ** (n + 1)) < 0.5)
            report = random_process.evaluate_suitability(CylinderFamily(event), t_max=n + 3)
            assert report.verdict == Verdict.SUITABLE
            stable = report.values[n:]
            assert max(stable) - min(stable) <= 1e-12
            assert report.limit == pytest.approx(random_process.q_measure(event), abs=1e-12)

    def test_constant_sweep(self, walk_process):
        report = walk_process.sweep("constant", lambda t: 0.5, t_max=5)
        assert report.verdict == Verdict.SUITABLE
        assert report.limit == 0.5
        assert report.ranks == list(range(6))

    def test_growing_sweep(self, walk_process):
        report = walk_process.sweep("growing", lambda t: float(t), t_max=6)
        assert report.verdict == Verdict.NOT_CONVERGED
        assert report.limit is None
        assert report.truncated_at is None

    def test_slowly_converging_sweep(self, walk_process):
        report = walk_process.sweep("harmonic", lambda t: 1.0 / (t + 1), t_max=8, tol=1e-3)
        assert report.verdict == Verdict.NOT_CONVERGED
        loose = walk_process.sweep("harmonic", lambda t: 1.0 / (t + 1), t_max=8, tol=0.1)
        assert loose.verdict == Verdict.SUITABLE

    def test_budget_exhausted(self, walk_system, caplog):
        process = QProcess(walk_system, InitialState.basis(2, 0), fixed_initial_site=0,
                           config=QProcConfig(enumeration_cap=16))
        with caplog.at_level(logging.WARNING, logger="qproc.process"):
            report = process.sweep("growing", lambda t: float(t), t_max=10)
        assert report.verdict == Verdict.BUDGET_EXHAUSTED
        assert report.truncated_at == 5
        assert report.ranks == [0, 1, 2, 3, 4]
        assert "enumeration budget" in caplog.text

    def test_truncated_but_converged(self, walk_system):
        process = QProcess(walk_system, InitialState.basis(2, 0), fixed_initial_site=0,
                           config=QProcConfig(enumeration_cap=16))
        report = process.sweep("constant", lambda t: 1.0, t_max=10)
        assert report.verdict == Verdict.SUITABLE
        assert report.truncated_at == 5

    def test_window_too_small(self, walk_process):
        with pytest.raises(ValueError):
            walk_process.sweep("x", lambda t: 0.0, window=1)

    def test_report_dict(self, walk_process):
        data = walk_process.evaluate_suitability(PositionFamily(2, 1, 0), t_max=4).to_dict()
        assert data["verdict"] == "suitable"
        assert data["family"] == "position(t=1, site=0)"
        assert len(data["values"]) == len(data["ranks"])


class TestConsistency:

    @pytest.mark.parametrize("t", range(0, 7))
    def test_walk_exhaustive(self, walk_process, t):
        report = walk_process.verify_consistency(t)
        assert report.exhaustive
        assert report.max_residual <= 1e-12
        assert report.passed

    def test_free_walk(self, free_walk_process):
        report = free_walk_process.verify_consistency(4)
        assert report.pairs_checked == 32 * 32
        assert report.passed

    def test_random_sampled(self, random_process):
        report = random_process.verify_consistency(7, samples=500, seed=3)
        assert not report.exhaustive
        assert report.pairs_checked == 500
        assert report.max_residual <= 1e-10

    def test_stepped(self, stepped_process):
        for t in range(0, 6):
            assert stepped_process.verify_consistency(t).passed

    def test_marginal_sums_match_coarse_measure(self, random_process, rng):
        coarse = CylinderEvent.from_mask(3, 2, rng.random(27) < 0.5)
        assert random_process.q_measure(coarse.extend(2)) == pytest.approx(
            random_process.q_measure(coarse), abs=1e-12)


class TestGradeTwo:

    def test_disjoint_cylinders(self, random_process, rng):
        for n in (1, 3):
            a, b, c = disjoint_events(rng, 3, n)
            assert random_process.grade2_check(a, b, c) <= 1e-12

    def test_random_triples_across_processes(self, random_process, stepped_process, free_walk_process):
        rng = np.random.default_rng(83)
        configurations = [(random_process, n) for n in (1, 2, 3)] + \
                         [(stepped_process, n) for n in (1, 2, 3)] + \
                         [(free_walk_process, n) for n in (1, 3, 5)]
        checked = 0
        while checked < 500:
            process, n = configurations[checked % len(configurations)]
            a, b, c = disjoint_events(rng, process.m, n)
            assert process.grade2_check(a, b, c) <= 1e-10
            checked += 1

    def test_walk_position_events(self, free_walk_process):
        a, b = position_event(2, 2, 2, 0), position_event(2, 2, 2, 1)
        c = CylinderEvent.empty(2, 2)
        assert free_walk_process.grade2_check(a, b, c) <= 1e-12

    def test_families(self, random_process):
        families = [PositionFamily(3, 2, site) for site in range(3)]
        assert random_process.grade2_check(*families) <= 1e-12
        assert random_process.grade2_check(*families, t=4) <= 1e-12

    def test_mixed_inputs(self, random_process, rng):
        a, b, _ = disjoint_events(rng, 3, 2)
        c = NeverVisitsSiteFamily(3, 0)
        assert random_process.grade2_check(a, b, c, t=3) <= 1e-12

    def test_overlap(self, walk_process):
        a = CylinderEvent.from_indices(2, 2, [0, 1])
        b = CylinderEvent.from_indices(2, 2, [1, 2])
        with pytest.raises(DisjointnessError):
            walk_process.grade2_check(a, b, CylinderEvent.empty(2, 2))

    def test_rank_mismatch(self, walk_process):
        with pytest.raises(RankMismatchError):
            walk_process.grade2_check(CylinderEvent.empty(2, 2), CylinderEvent.empty(2, 3),
                                      CylinderEvent.empty(2, 2))

    def test_not_additive_but_grade_two(self, free_walk_process):
        a = CylinderEvent.from_indices(2, 2, [0])
        b = CylinderEvent.from_indices(2, 2, [2])
        c = CylinderEvent.from_indices(2, 2, [5])
        mu = free_walk_process.q_measure
        assert abs(mu(a.union(b)) - mu(a) - mu(b)) > 1e-3
        assert free_walk_process.grade2_check(a, b, c) <= 1e-12
        assert np.isfinite(mu(a.union(b).union(c)))

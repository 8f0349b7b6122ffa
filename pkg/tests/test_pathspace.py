"""
Tests for path indexing, enumeration, cylinder events and flip counts
"""

from fractions import Fraction

import numpy as np
import pytest

from qproc.core.config import QProcConfig
from qproc.exceptions import BudgetExceededError, PreconditionError
from qproc.families import FirstVisitFamily
from qproc.models.path import CylinderEvent, NPath, PathIndex, decode_index, encode_path
from qproc.pathspace import (
    avoids_event,
    enumerate_paths,
    first_visit_event,
    flip_count,
    flip_count_recursion,
    flip_count_reflection,
    flip_count_vector,
    index_range,
    path_count,
    path_measure,
    position_event,
    singleton_event,
)


def first_visit_probability(m, t, site=0):
    """nu(B_t) from the exact site distribution of paths still clear of ``site``"""
    clear = [Fraction(1, m)] * m
    for _ in range(t):
        total = sum(c for s, c in enumerate(clear) if s != site)
        clear = [total / m] * m
    return clear[site]


class TestIndexing:

    def test_encode_most_significant_first(self):
        assert encode_path((1, 0, 1), 2) == 5
        assert encode_path((2, 1), 3) == 7

    @pytest.mark.parametrize("m,n", [(2, 0), (2, 4), (3, 3), (5, 2)])
    def test_decode_inverts_encode(self, m, n):
        for value in range(m ** (n + 1)):
            assert encode_path(decode_index(value, m, n), m) == value

    def test_path_index_round_trip(self):
        path = NPath((0, 2, 1), 3)
        index = PathIndex.of(path)
        assert index.value == 7
        assert index.to_path() == path

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            PathIndex(8, 2, 2)
        with pytest.raises(ValueError):
            NPath.from_index(-1, 2, 2)

    def test_path_rejects_bad_sites(self):
        with pytest.raises(ValueError):
            NPath((0, 2), 2)

    def test_prefix_and_extend(self):
        path = NPath((0, 1, 1, 0), 2)
        assert path.rank == 3
        assert path.prefix(1) == NPath((0, 1), 2)
        assert path.prefix(1).extend(1) == NPath((0, 1, 1), 2)
        assert str(path) == "0110"


class TestEnumeration:

    def test_counts(self):
        assert path_count(2, 3) == 16
        assert path_count(2, 3, fixed_initial_site=1) == 8
        assert index_range(3, 2, fixed_initial_site=2) == (18, 27)

    def test_enumeration_order(self):
        paths = enumerate_paths(2, 2)
        assert len(paths) == 8
        assert paths[0].sites == (0, 0, 0)
        assert paths[5].sites == (1, 0, 1)
        assert [p.index for p in paths] == list(range(8))

    def test_fixed_initial_site_block(self):
        paths = enumerate_paths(3, 2, fixed_initial_site=1)
        assert len(paths) == 9
        assert all(p.initial_site == 1 for p in paths)
        assert paths[0].index == 9

    def test_budget(self):
        with pytest.raises(BudgetExceededError) as excinfo:
            enumerate_paths(2, 30, QProcConfig(enumeration_cap=1000))
        assert excinfo.value.cap == 1000
        assert excinfo.value.n == 30

    def test_path_measure(self):
        assert path_measure(2, 3) == Fraction(1, 16)
        assert path_measure(2, 3, fixed_initial_site=0) == Fraction(1, 8)


class TestCylinderEvents:

    def test_position_event(self):
        event = position_event(2, 2, 2, 1)
        np.testing.assert_array_equal(event.indices(), [1, 3, 5, 7])
        restricted = position_event(2, 2, 2, 1, fixed_initial_site=0)
        np.testing.assert_array_equal(restricted.indices(), [1, 3])

    def test_first_visit_event(self):
        event = first_visit_event(2, 3, 1)
        assert event.paths() == [NPath((0, 0, 0, 1), 2)]
        assert event.classical_measure() == Fraction(1, 16)

    def test_first_visit_viewed_deeper(self):
        event = first_visit_event(2, 1, 1, n=3)
        assert len(event) == 4
        assert event == first_visit_event(2, 1, 1).extend(2)

    @pytest.mark.parametrize("m", range(2, 6))
    def test_first_visit_measure(self, m):
        for t in range(11):
            expected = Fraction((m - 1) ** t, m ** (t + 1))
            assert first_visit_probability(m, t) == expected
            assert FirstVisitFamily(m, 0, t).classical_measure() == expected
            if m ** (t + 1) <= 2 ** 20:
                assert first_visit_event(m, t, 0).classical_measure() == expected

    def test_fixed_site_budget_covers_block_only(self):
        config = QProcConfig(enumeration_cap=16)
        event = position_event(2, 4, 4, 1, fixed_initial_site=0, config=config)
        assert len(event) == 8
        with pytest.raises(BudgetExceededError):
            position_event(2, 4, 4, 1, config=config)

    def test_avoids_event(self):
        event = avoids_event(3, 2, 0)
        assert len(event) == 8
        assert event.classical_measure() == Fraction(2, 3) ** 3

    def test_algebra(self):
        a = CylinderEvent.from_indices(2, 2, [0, 1, 2])
        b = CylinderEvent.from_indices(2, 2, [2, 3])
        np.testing.assert_array_equal(a.union(b).indices(), [0, 1, 2, 3])
        np.testing.assert_array_equal(a.intersection(b).indices(), [2])
        np.testing.assert_array_equal(a.difference(b).indices(), [0, 1])
        np.testing.assert_array_equal(a.complement().indices(), [3, 4, 5, 6, 7])
        np.testing.assert_array_equal(a.complement(fixed_initial_site=0).indices(), [3])
        assert not a.is_disjoint(b)
        assert a.difference(b).is_disjoint(b)

    def test_incompatible_events(self):
        with pytest.raises(ValueError):
            CylinderEvent.from_indices(2, 2, [0]).union(CylinderEvent.from_indices(2, 3, [0]))

    def test_extend_keeps_classical_measure(self):
        event = CylinderEvent.from_paths([NPath((0, 1), 2)])
        deeper = event.extend(2)
        np.testing.assert_array_equal(event.extend(1).indices(), [2, 3])
        assert len(deeper) == 4
        assert deeper.classical_measure() == event.classical_measure() == Fraction(1, 4)

    def test_membership(self):
        event = singleton_event(NPath((1, 0, 1), 2))
        assert NPath((1, 0, 1), 2) in event
        assert 4 not in event
        assert 99 not in event

    def test_large_events_use_bitmaps(self):
        full = CylinderEvent.full(2, 16)
        assert full.is_bitmap
        assert len(full) == 2 ** 17
        assert full.classical_measure() == 1
        half = CylinderEvent.full(2, 16, fixed_initial_site=1)
        assert half.classical_measure(fixed_initial_site=1) == 1
        assert half.classical_measure() == Fraction(1, 2)

    def test_empty_event(self):
        event = CylinderEvent.empty(3, 2)
        assert len(event) == 0
        assert event.classical_measure() == 0


class TestFlipCounts:

    def test_known_vector(self):
        np.testing.assert_array_equal(flip_count_vector(3), [0, 1, 2, 1, 2, 3, 2, 1])

    @pytest.mark.parametrize("n", range(0, 13))
    def test_recursion_matches_brute_force(self, n):
        np.testing.assert_array_equal(flip_count_recursion(n), flip_count_vector(n))

    @pytest.mark.parametrize("n", range(1, 13))
    def test_reflection_identity(self, n):
        for j in range(2 ** n):
            lhs, rhs = flip_count_reflection(n, j)
            assert lhs == rhs

    def test_reflection_needs_two_sites(self):
        with pytest.raises(PreconditionError):
            flip_count_reflection(2, 0, m=3)

    def test_flip_count(self):
        assert flip_count(NPath((0, 1, 1, 0, 0), 2)) == 2
        assert flip_count(NPath((2,), 3)) == 0

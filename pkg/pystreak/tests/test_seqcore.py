"""
Tests for binary sequences, streak selection sets and the streak estimators
"""
import itertools
from fractions import Fraction

import numpy as np
import pytest

from pystreak.errors import InputFormatError, UndefinedStatisticError
from pystreak.seqcore import (
    BinarySequence,
    StreakCounts,
    batch_counts,
    batch_differences,
    batch_proportions,
    estimates,
    four_way_counts,
    pooled_estimates,
    select_streak_windows,
    streak_counts,
)


def seq(text):
    return BinarySequence.parse(text)


def all_sequences(n):
    return [BinarySequence(bits) for bits in itertools.product((0, 1), repeat=n)]


def test_windows_after_one_head():
    windows = select_streak_windows(seq("HHT"), 1)
    assert windows.after_hits == {2, 3}
    assert windows.after_misses == set()


def test_windows_after_one_tail():
    windows = select_streak_windows(seq("TTT"), 1)
    assert windows.after_hits == set()
    assert windows.after_misses == {2, 3}


def test_windows_include_longer_streaks():
    windows = select_streak_windows(seq("HHHT"), 2)
    assert windows.after_hits == {3, 4}
    assert windows.after_misses == set()


def test_streak_counts():
    assert streak_counts(seq("HHT"), 1) == (1, 1)
    assert streak_counts(seq("111"), 1) == (0, 2)
    assert streak_counts(seq("HHHT"), 2) == (1, 1)


def test_four_way_counts_order():
    counts = four_way_counts(seq("HTTHH"), 1)
    # after misses: positions 3 (T) and 4 (H); after hits: positions 2 (T) and 5 (H)
    assert counts == StreakCounts(m0_0=1, m1_0=1, m0_1=1, m1_1=1)
    assert counts.as_tuple() == (1, 1, 1, 1)


def test_estimates_from_three_flip_table():
    assert estimates(seq("HHT"), 1).p_after_hits.value == Fraction(1, 2)
    assert estimates(seq("THT"), 1).p_after_hits.value == 0


def test_estimates_difference():
    est = estimates(seq("HTH"), 1)
    assert est.p_after_hits.value == 0
    assert est.q_after_misses.value == 0
    assert est.difference == -1
    assert est.p_after_misses.value == 1


def test_undefined_components_are_none():
    est = estimates(seq("HHT"), 1)
    assert est.q_after_misses is None
    assert est.difference is None
    est = estimates(seq("000"), 1)
    assert est.p_after_hits is None


def test_require_difference_names_empty_set():
    with pytest.raises(UndefinedStatisticError) as info:
        estimates(seq("HHT"), 1).require_difference()
    assert info.value.empty_set == "after_misses"


def test_proportion_times_opportunities_is_success_count():
    for s in all_sequences(7):
        est = estimates(s, 2)
        if est.p_after_hits is not None:
            p = est.p_after_hits
            assert p.value * p.trials == est.counts.m1_1


def test_complement_swaps_hit_and_miss_statistics():
    """Flipping every bit swaps P and Q and leaves the difference unchanged"""
    for s in all_sequences(6):
        for k in (1, 2, 3):
            est, flipped = estimates(s, k), estimates(s.complement(), k)
            assert (est.p_after_hits is None) == (flipped.q_after_misses is None)
            if est.p_after_hits is not None:
                assert est.p_after_hits.value == flipped.q_after_misses.value
            assert est.difference == flipped.difference


def test_pooled_estimates_weight_by_opportunities():
    a, b = seq("HHHH"), seq("HTHT")
    pooled = pooled_estimates([a, b], 1)
    assert pooled.counts == four_way_counts(a, 1) + four_way_counts(b, 1)
    # 3/3 and 0/2 pool to 3/5, not the mean 1/2
    assert pooled.p_after_hits.value == Fraction(3, 5)


def test_batch_counts_match_scalar_counts():
    sequences = all_sequences(8)
    matrix = np.array([s.outcomes for s in sequences], dtype=np.uint8)
    for k in (1, 2, 3):
        counts = batch_counts(matrix, k)
        for row, s in zip(counts, sequences):
            assert tuple(int(v) for v in row) == four_way_counts(s, k).as_tuple()


def test_batch_statistics_are_nan_when_undefined():
    counts = batch_counts(np.array([[1, 1, 0], [1, 0, 1]]), 1)
    diffs = batch_differences(counts)
    props = batch_proportions(counts)
    assert np.isnan(diffs[0])
    assert diffs[1] == -1.0
    assert props[0] == 0.5


class TestParsing:
    """Test sequence construction and parsing"""

    def test_parse_symbol_sets(self):
        """Test that 0/1, H/T and X/O spellings agree and separators are ignored"""
        expected = BinarySequence((1, 1, 0))
        assert seq("110") == expected
        assert seq("HHT") == expected
        assert seq("X, X, O") == expected
        assert str(expected) == "110"
        assert expected.to_letters() == "HHT"

    def test_parse_rejects_unknown_symbol(self):
        """Test that an unknown symbol raises an input error"""
        with pytest.raises(InputFormatError):
            seq("HAT")

    def test_parse_rejects_empty(self):
        """Test that an empty string raises an input error"""
        with pytest.raises(InputFormatError):
            seq(" , ")

    def test_invalid_outcome_value(self):
        """Test that values other than 0 and 1 are rejected"""
        with pytest.raises(ValueError):
            BinarySequence((0, 2))

    def test_empty_sequence(self):
        """Test that a sequence needs at least one trial"""
        with pytest.raises(ValueError):
            BinarySequence(())

    def test_streak_length_out_of_range(self):
        """Test that k must satisfy 1 <= k <= n-1"""
        with pytest.raises(ValueError):
            select_streak_windows(seq("HHT"), 0)
        with pytest.raises(ValueError):
            select_streak_windows(seq("HHT"), 3)
        with pytest.raises(ValueError):
            batch_counts(np.zeros((2, 3)), 3)

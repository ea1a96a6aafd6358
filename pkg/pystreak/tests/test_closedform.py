"""
Tests for the single-streak closed forms and the sampling-without-replacement benchmark
"""
import itertools
from fractions import Fraction

import pytest

from pystreak.closedform import (
    conditional_expected_proportion_k1,
    expected_difference_k1,
    expected_proportion_k1,
    swor_conditional,
    swor_curve,
    swor_expected,
)
from pystreak.errors import UndefinedStatisticError
from pystreak.exactdist import expected_difference, expected_proportion
from pystreak.seqcore import BinarySequence, estimates

P_GRID = [i / 20 for i in range(1, 20)]


def test_conditional_expected_proportion_k1():
    assert conditional_expected_proportion_k1(3, 2) == Fraction(1, 2)
    assert conditional_expected_proportion_k1(3, 3) == 1


def test_conditional_expected_proportion_k1_matches_arrangements():
    n, n1 = 5, 3
    values = []
    for bits in itertools.product((0, 1), repeat=n):
        if sum(bits) == n1:
            prop = estimates(BinarySequence(bits), 1).p_after_hits
            if prop is not None:
                values.append(prop.value)
    assert sum(values) / len(values) == conditional_expected_proportion_k1(n, n1)


def test_three_flip_closed_form():
    assert expected_proportion_k1(3, Fraction(1, 2)) == Fraction(5, 12)


def test_closed_form_below_p():
    for n in (3, 10, 50, 200):
        for p in P_GRID:
            assert expected_proportion_k1(n, p) < p


def test_closed_form_matches_recursion():
    assert abs(expected_proportion_k1(100, 0.5) - expected_proportion(100, 1, 0.5)) <= 1e-12


def test_expected_difference_k1():
    assert expected_difference_k1(3) == Fraction(-1, 2)
    assert expected_difference_k1(101) == Fraction(-1, 100)
    for p in (0.2, 0.5, 0.8):
        assert abs(expected_difference(10, 1, p) - float(expected_difference_k1(10))) <= 1e-12


def test_swor_single_streak_is_lemma_average():
    n, p = 8, Fraction(2, 5)
    from math import comb

    weights = {n1: comb(n, n1) * p**n1 * (1 - p) ** (n - n1) for n1 in range(1, n + 1)}
    expected = sum(Fraction(n1 - 1, n - 1) * w for n1, w in weights.items()) / sum(weights.values())
    assert swor_expected(n, 1, p) == expected
    assert swor_expected(n, 1, float(p)) == pytest.approx(float(expected), abs=1e-12)


def test_swor_conditional():
    assert swor_conditional(10, 3, 5) == Fraction(2, 7)


def test_streak_bias_exceeds_swor_bias_for_longer_streaks():
    for k, shortest in ((2, 10), (3, 13)):
        for n in range(shortest, 101):
            swor = swor_expected(n, k, 0.5)
            assert expected_proportion(n, k, 0.5) < swor < 0.5


def test_swor_bias_is_larger_for_short_sequences():
    assert expected_proportion(9, 2, 0.5) > swor_expected(9, 2, 0.5)
    assert expected_proportion(12, 3, 0.5) > swor_expected(12, 3, 0.5)
    assert expected_proportion(10, 3, 0.5) == pytest.approx(0.3526, abs=1e-4)
    assert swor_expected(10, 3, 0.5) == pytest.approx(0.3123, abs=1e-4)


def test_swor_curve_columns():
    frame = swor_curve(range(2, 21), [1, 3], 0.5)
    assert list(frame.columns) == [
        "n", "k", "p", "swor", "expected_proportion", "swor_bias", "streak_bias",
    ]
    assert len(frame) == 19 + 17


class TestEdgeCases:
    """Test invalid inputs for the closed forms"""

    def test_degenerate_swor(self):
        """Test that n must exceed k"""
        with pytest.raises(ValueError):
            swor_expected(3, 3, 0.5)

    def test_short_sequences(self):
        """Test the minimal lengths of the theorem formulas"""
        with pytest.raises(ValueError):
            conditional_expected_proportion_k1(1, 1)
        with pytest.raises(ValueError):
            expected_proportion_k1(2, 0.5)
        with pytest.raises(ValueError):
            expected_difference_k1(2)

    def test_no_successes(self):
        """Test that zero successes leaves nothing to condition on"""
        with pytest.raises(UndefinedStatisticError):
            conditional_expected_proportion_k1(5, 0)

    def test_probability_out_of_range(self):
        """Test that p must lie strictly between 0 and 1"""
        with pytest.raises(ValueError):
            expected_proportion_k1(10, 1.0)

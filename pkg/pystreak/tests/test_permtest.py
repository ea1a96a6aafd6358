"""
Tests for the exact, Monte-Carlo and pooled permutation tests
"""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from pystreak.config import Settings
from pystreak.dgpsim import DgpSpec, simulate_batch
from pystreak.errors import DegenerateError, UndefinedStatisticError
from pystreak.exactdist import build_conditional_distribution
from pystreak.permtest import (
    critical_values,
    exact_test,
    family_size,
    mc_test,
    pooled_stratified_test,
)
from pystreak.seqcore import BinarySequence, estimates

SEQ20 = BinarySequence.parse("HHHTHHTTHTHHHTTHTHHH")


def seq(text):
    return BinarySequence.parse(text)


def test_exact_three_flips():
    result = exact_test(seq("THH"), 1)
    assert result.observed_statistic == 0.0
    assert result.p_exact == Fraction(1, 2)
    assert result.method == "exact"
    assert (result.n, result.n1, result.k) == (3, 2, 1)


def test_exact_minimum_of_support():
    assert exact_test(seq("HTH"), 1).p_value == 1.0


def test_exact_alternatives():
    assert exact_test(seq("THH"), 1, alternative="less").p_exact == 1
    assert exact_test(seq("THH"), 1, alternative="two-sided").p_exact == 1
    assert exact_test(seq("HTH"), 1, alternative="less").p_exact == Fraction(1, 2)


def test_exact_undefined_statistic():
    with pytest.raises(UndefinedStatisticError) as info:
        exact_test(seq("HHT"), 1)
    assert info.value.empty_set == "after_misses"


@pytest.mark.parametrize("k", [1, 2])
def test_exact_test_is_valid(k):
    """Under exchangeability P(p <= alpha) <= alpha for every success count"""
    n = 9
    for n1 in range(1, n):
        pvalues = []
        for positions in itertools.combinations(range(n), n1):
            s = BinarySequence(tuple(1 if i in positions else 0 for i in range(n)))
            if estimates(s, k).difference is not None:
                pvalues.append(exact_test(s, k).p_exact)
        for alpha in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)):
            assert sum(1 for p in pvalues if p <= alpha) <= alpha * len(pvalues)


def test_mc_agrees_with_exact():
    exact = exact_test(SEQ20, 2).p_value
    reps = 20_000
    result = mc_test(SEQ20, 2, replications=reps, seed=7)
    se = math.sqrt(exact * (1 - exact) / reps)
    assert abs(result.p_value - exact) <= 3 * se + 2 / reps
    assert result.method == "monte-carlo"
    assert result.replications == reps


def test_mc_is_deterministic():
    first = mc_test(SEQ20, 2, replications=2000, seed=3)
    second = mc_test(SEQ20, 2, replications=2000, seed=3)
    assert first == second


def test_mc_does_not_depend_on_workers(mocker):
    mocker.patch("pystreak.permtest.get_settings", return_value=Settings(chunk_size=500))
    serial = mc_test(SEQ20, 1, replications=1500, seed=11, workers=1)
    pooled = mc_test(SEQ20, 1, replications=1500, seed=11, workers=2)
    assert serial.p_value == pooled.p_value


def test_mc_reports_discarded_permutations():
    result = mc_test(seq("HHTHTTTT"), 2, replications=2000, seed=0)
    assert 0 < result.discarded < 2000
    assert 0 < result.p_value <= 1


def test_mc_constant_sequence():
    with pytest.raises(DegenerateError):
        mc_test(seq("HHHHHH"), 1, replications=100)


class TestCriticalValues:
    """Test the critical-value family"""

    def test_tail_at_most_alpha(self):
        """Test that every per-count tail respects alpha"""
        family = critical_values(10, 1, alpha=0.05)
        assert set(family.entries) == set(range(11))
        for entry in family.entries.values():
            assert entry.tail <= Fraction(1, 20)
            assert entry.arrangements == math.comb(10, entry.n1)
        assert not family.entries[0].testable
        assert not family.entries[10].testable

    def test_family_size_at_most_alpha(self):
        """Test that the unconditional rejection rate stays below alpha"""
        family = critical_values(12, 1, alpha=0.05)
        assert family_size(family, Fraction(1, 2)) <= Fraction(1, 20)
        assert family_size(family, 0.5) <= 0.05 + 1e-12

    def test_family_keeps_few_distributions_cached(self):
        """Test that building a family does not keep every distribution alive"""
        build_conditional_distribution.cache_clear()
        critical_values(20, 2)
        assert build_conditional_distribution.cache_info().currsize <= 8

    def test_alpha_one_gives_support_minimum(self):
        """Test that alpha=1 puts every critical value at the bottom of the support"""
        family = critical_values(8, 1, alpha=1.0)
        for n1, entry in family.entries.items():
            if entry.defined:
                seqs = [
                    BinarySequence(tuple(1 if i in pos else 0 for i in range(8)))
                    for pos in itertools.combinations(range(8), n1)
                ]
                values = [estimates(s, 1).difference for s in seqs]
                assert entry.value == min(v for v in values if v is not None)

    def test_rejection_matches_exact_test(self):
        """Test that the family rejects exactly when the exact p-value is at most alpha"""
        family = critical_values(9, 1, alpha=0.05)
        for bits in itertools.product((0, 1), repeat=9):
            s = BinarySequence(bits)
            if estimates(s, 1).difference is None:
                assert not family.rejects(s)
                continue
            assert family.rejects(s) == (exact_test(s, 1).p_exact <= 0.05)

    def test_invalid_alpha(self):
        """Test that alpha must lie in (0, 1]"""
        with pytest.raises(ValueError):
            critical_values(8, 1, alpha=0.0)
        with pytest.raises(ValueError):
            critical_values(8, 1, alpha=1.5)


class TestPooled:
    """Test the stratified pooled test"""

    def test_excludes_undefined_players(self):
        """Test that players without a defined difference are listed and skipped"""
        sequences = [SEQ20, seq("HHHHHHHHHH"), seq("HTTHHTHTTHHTHTTTHHTH")]
        result = pooled_stratified_test(sequences, 1, replications=500, seed=1, ids=["a", "b", "c"])
        assert result.players == 2
        assert result.excluded == ("b",)
        assert 0 < result.p_value <= 1

    def test_deterministic(self):
        """Test that a fixed seed reproduces the result"""
        sequences = [SEQ20, seq("HTTHHTHTTHHTHTTTHHTH")]
        first = pooled_stratified_test(sequences, 1, replications=300, seed=5)
        second = pooled_stratified_test(sequences, 1, replications=300, seed=5)
        assert first == second

    def test_no_defined_player(self):
        """Test that a study without any defined player is degenerate"""
        with pytest.raises(DegenerateError):
            pooled_stratified_test([seq("HHHH"), seq("TTTT")], 1, replications=10)

    def test_ids_length_mismatch(self):
        """Test that ids must match the sequences"""
        with pytest.raises(ValueError):
            pooled_stratified_test([SEQ20], 1, replications=10, ids=["a", "b"])


@pytest.mark.slow
def test_pooled_pvalues_uniform_under_null():
    rng = np.random.default_rng(2024)
    pvalues = []
    for study in range(300):
        players = [BinarySequence.of(rng.integers(0, 2, size=30)) for _ in range(5)]
        result = pooled_stratified_test(players, 1, replications=199, seed=study)
        pvalues.append(result.p_value)
    assert stats.kstest(pvalues, "uniform").pvalue > 0.01


@pytest.mark.slow
def test_pooled_test_detects_positive_feedback():
    spec = DgpSpec.positive_feedback(0.5, 0.2, k=2)
    studies = 200
    rejections = 0
    for study in range(studies):
        x = simulate_batch(spec, 50, 25, np.random.default_rng([7, study]))
        players = [BinarySequence.of(row) for row in x]
        result = pooled_stratified_test(players, 2, replications=199, seed=study)
        rejections += result.p_value <= 0.05
    assert rejections / studies > 0.5


@pytest.mark.slow
def test_mc_agrees_with_exact_at_large_replications():
    s = BinarySequence.parse("HHTHHHTTHTHHTTTHHHHTHTTHHHTHTT")
    exact = exact_test(s, 3).p_value
    result = mc_test(s, 3, replications=100_000, seed=1)
    assert abs(result.p_value - exact) <= 3 * math.sqrt(exact * (1 - exact) / 100_000) + 1e-4

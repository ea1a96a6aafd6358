"""
Tests for the player and study reanalysis on the embedded dataset and on user files
"""
import io
import math

import numpy as np
import pytest
from scipy import stats

from pystreak.dgpsim import DgpSpec, simulate_sequence
from pystreak.errors import DegenerateError, InputFormatError, UndefinedStatisticError
from pystreak.exactdist import expected_difference
from pystreak.reanalysis import (
    PlayerSummary,
    adjust_external,
    bias_adjust,
    load_gvt,
    player_se,
    player_table,
    pooled_simple,
    read_sequences,
    read_summaries,
    recover_hits,
    study_tests,
    summarize_sequence,
)
from pystreak.seqcore import BinarySequence


PRINTED = [
    ("M1", 0.06, 0.14), ("M2", -0.43, -0.33), ("M3", -0.07, 0.02), ("M4", -0.13, -0.03),
    ("M5", -0.42, -0.33), ("M6", 0.40, 0.48), ("M7", 0.36, 0.47), ("M8", 0.07, 0.24),
    ("M9", 0.48, 0.56), ("M10", 0.00, 0.09), ("M11", 0.05, 0.14), ("M12", 0.02, 0.10),
    ("M13", 0.10, 0.19), ("M14", 0.10, 0.19), ("F1", -0.33, -0.25), ("F2", -0.03, 0.07),
    ("F3", 0.14, 0.23), ("F4", 0.07, 0.17), ("F5", -0.02, 0.08), ("F6", -0.26, -0.18),
    ("F7", 0.30, 0.39), ("F8", 0.07, 0.15), ("F9", 0.04, 0.12), ("F10", 0.40, 0.48),
    ("F11", -0.12, -0.04),
]


@pytest.fixture(scope="module")
def gvt():
    return load_gvt()


def by_name(summaries, name):
    return next(s for s in summaries if s.player == name)


def summary(**overrides):
    fields = dict(
        player="A", group="g", n_shots=100, p_overall=0.5,
        m_hits=20, hits_after_hits=12, m_misses=20, hits_after_misses=8,
    )
    fields.update(overrides)
    return PlayerSummary(**fields)


def test_recover_hits():
    assert recover_hits(0.83, 30) == (25, False)
    assert recover_hits(0.35, 20) == (7, False)
    assert recover_hits(0.5, 0) == (0, False)


def test_recover_hits_flags_ambiguous_rate():
    count, ambiguous = recover_hits(0.54, 11)
    assert count == 6
    assert ambiguous


def test_load_gvt(gvt):
    assert len(gvt) == 26
    assert sum(1 for s in gvt if s.group == "males") == 14
    assert all(s.k == 3 for s in gvt)
    m9 = by_name(gvt, "M9")
    assert (m9.hits_after_hits, m9.m_hits) == (25, 30)
    assert (m9.hits_after_misses, m9.m_misses) == (7, 20)
    assert m9.gvt_diff == pytest.approx(25 / 30 - 7 / 20)


def test_gvt_player_without_streaks_of_hits(gvt):
    f12 = by_name(gvt, "F12")
    assert f12.m_hits == 0
    assert f12.p_after_hits is None
    assert f12.gvt_diff is None


def test_gvt_column_means(gvt):
    assert sum(s.p_overall for s in gvt) / 26 == pytest.approx(0.47, abs=0.005)
    after_hits = [s.p_after_hits for s in gvt if s.p_after_hits is not None]
    after_misses = [s.p_after_misses for s in gvt]
    assert sum(after_hits) / len(after_hits) == pytest.approx(0.49, abs=0.005)
    assert sum(after_misses) / len(after_misses) == pytest.approx(0.45, abs=0.005)


def test_gvt_ambiguous_recoveries(gvt):
    assert by_name(gvt, "F6").ambiguous == ("after_misses",)
    assert by_name(gvt, "F11").ambiguous == ("after_hits",)
    assert sum(1 for s in gvt if s.ambiguous) == 2


@pytest.mark.parametrize("player,raw,adjusted", PRINTED, ids=[row[0] for row in PRINTED])
def test_bias_adjusted_players(gvt, player, raw, adjusted):
    row = by_name(gvt, player)
    result = bias_adjust(row)
    assert result.defined
    assert row.gvt_diff == pytest.approx(raw, abs=0.011)
    assert result.adjusted_diff == pytest.approx(adjusted, abs=0.011)
    assert result.null_expected_diff < 0


def test_bias_adjust_uses_bernoulli_expectation(gvt):
    m1 = by_name(gvt, "M1")
    result = bias_adjust(m1)
    null = float(expected_difference(100, 3, 0.54))
    assert result.null_expected_diff == pytest.approx(null, abs=1e-12)
    assert result.adjusted_diff == pytest.approx(m1.gvt_diff - null, abs=1e-12)


def test_bias_adjust_undefined_player(gvt):
    result = bias_adjust(by_name(gvt, "F12"))
    assert not result.defined
    assert result.adjusted_diff is None
    assert result.z is None


def test_study_tests(gvt):
    result = study_tests(gvt)
    assert result.players == 26
    assert result.included == 25
    assert result.excluded == ("F12",)
    assert result.mean_raw_diff == pytest.approx(0.034, abs=0.002)
    assert result.raw_p == pytest.approx(0.49, abs=0.02)
    assert result.mean_adjusted_diff == pytest.approx(0.126, abs=0.004)
    assert result.study_se == pytest.approx(0.047, abs=0.002)
    assert result.adjusted_p < 0.01
    assert result.positive_count == 19
    assert result.sign_p < 0.01
    assert result.significant_count == 5
    assert result.significant_p < 0.01
    assert result.design_target_mean > result.mean_raw_diff


def test_study_frame(gvt):
    frame = study_tests(gvt).to_frame()
    assert list(frame.columns) == ["statistic", "value"]
    values = dict(zip(frame["statistic"], frame["value"]))
    assert values["included"] == 25
    assert values["positive_count"] == 19


def test_study_tests_category_convention(gvt):
    overall = study_tests(gvt)
    category = study_tests(gvt, convention="category")
    assert category.convention == "category"
    assert category.mean_adjusted_diff == pytest.approx(overall.mean_adjusted_diff)
    assert category.study_se != overall.study_se


def test_player_table(gvt):
    table = player_table(gvt)
    assert len(table) == 26
    assert table["defined"].sum() == 25
    assert list(table.columns)[:4] == ["player", "group", "n", "p"]


def test_pooled_simple(gvt):
    pooled = pooled_simple(gvt)
    assert pooled.estimate == pytest.approx(0.169, abs=0.01)
    assert pooled.se == pytest.approx(0.037, abs=0.003)
    assert pooled.category_shots == 713
    assert pooled.total_shots == 2515
    assert pooled.ambiguous == ("F6:after_misses", "F11:after_hits")


def test_adjust_external():
    assert adjust_external(0.52, 0.54, 40, 0.5) == pytest.approx(0.18, abs=0.01)
    assert adjust_external(0.56, 0.65, 40, 0.5) == pytest.approx(0.11, abs=0.01)
    null = float(expected_difference(40, 3, 0.5))
    assert adjust_external(0.5 + null, 0.5, 40, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_player_se():
    assert player_se(summary()) == pytest.approx(math.sqrt(2 * 0.25 / 20))
    category = player_se(summary(), convention="category")
    assert category == pytest.approx(math.sqrt(0.6 * 0.4 / 20 + 0.4 * 0.6 / 20))


def test_player_se_empty_category():
    with pytest.raises(UndefinedStatisticError) as info:
        player_se(summary(m_hits=0, hits_after_hits=0))
    assert info.value.empty_set == "after_hits"


def test_summarize_sequence():
    s = summarize_sequence(BinarySequence.parse("HHTHT"), 1, player="x")
    assert (s.n_shots, s.p_overall) == (5, 0.6)
    assert (s.hits_after_hits, s.m_hits) == (1, 3)
    assert (s.hits_after_misses, s.m_misses) == (1, 1)
    assert s.gvt_diff == pytest.approx(1 / 3 - 1)


def test_read_summaries_from_file(temp_path):
    with open(temp_path, "w") as f:
        f.write("player,group,n,p,ph,mh,pm,mm\n")
        f.write("A,g,50,0.5,0.60,10,0.40,10\n")
        f.write("B,g,50,0.4,,0,0.35,20\n")
    rows = read_summaries(temp_path)
    assert [r.player for r in rows] == ["A", "B"]
    assert rows[0].hits_after_hits == 6
    assert rows[1].gvt_diff is None


def test_read_sequences():
    source = io.StringIO("player,outcomes\na,HHTH\nb,0110\nc,XOOX\n")
    rows = read_sequences(source)
    assert [name for name, _ in rows] == ["a", "b", "c"]
    assert rows[1][1] == BinarySequence((0, 1, 1, 0))


class TestEdgeCases:
    """Test malformed input and parameter mismatches"""

    def test_missing_column(self):
        """Test that a summary table without its header columns is rejected"""
        with pytest.raises(InputFormatError):
            read_summaries(io.StringIO("player,n,p\nA,10,0.5\n"))

    def test_bad_number(self):
        """Test that a non-numeric shot count is rejected"""
        with pytest.raises(InputFormatError):
            read_summaries(io.StringIO("player,group,n,p,ph,mh,pm,mm\nA,g,ten,0.5,0.5,4,0.5,4\n"))

    def test_counts_exceed_shots(self):
        """Test that more category shots than total shots is rejected"""
        with pytest.raises(InputFormatError):
            read_summaries(io.StringIO("player,group,n,p,ph,mh,pm,mm\nA,g,10,0.5,0.5,40,0.5,4\n"))

    def test_bad_outcomes(self):
        """Test that an unknown outcome symbol is rejected"""
        with pytest.raises(InputFormatError):
            read_sequences(io.StringIO("player,outcomes\na,HHZ\n"))

    def test_missing_file(self):
        """Test that a missing file is an input error"""
        with pytest.raises(InputFormatError):
            read_summaries("no_such_summary_file.csv")

    def test_streak_length_mismatch(self, gvt):
        """Test that summary counts are only valid for their own streak length"""
        with pytest.raises(ValueError):
            bias_adjust(by_name(gvt, "M1"), k=4)
        with pytest.raises(ValueError):
            study_tests(gvt, k=2)

    def test_streak_too_long_for_shot_count(self):
        """Test that the error names the real shot count"""
        short = summary(n_shots=4, m_hits=1, hits_after_hits=1, m_misses=1, hits_after_misses=0)
        with pytest.raises(ValueError, match=r"n=4\)"):
            bias_adjust(short)

    def test_too_few_players(self, gvt):
        """Test that a study needs two players with a defined difference"""
        with pytest.raises(DegenerateError):
            study_tests([by_name(gvt, "M1"), by_name(gvt, "F12")])

    def test_unknown_convention(self):
        """Test that the variance convention is checked"""
        with pytest.raises(ValueError):
            player_se(summary(), convention="pooled")


@pytest.mark.slow
def test_adjusted_mean_test_is_calibrated_for_bernoulli_players(gvt):
    rates = [s.p_overall for s in gvt if s.gvt_diff is not None]
    rng = np.random.default_rng(11)
    pvalues = []
    for _ in range(500):
        players = [
            summarize_sequence(simulate_sequence(DgpSpec.bernoulli(p), 100, rng), 3, player=str(i))
            for i, p in enumerate(rates)
        ]
        pvalues.append(study_tests(players).adjusted_p)
    assert stats.kstest(pvalues, "uniform").pvalue > 0.01

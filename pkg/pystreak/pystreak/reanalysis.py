"""Player-level and study-level reanalysis of shooting data with the streak bias removed.

Players are described by :class:`PlayerSummary`, either read from a summary
table (one row per player with the overall hit rate and the hit rates after
``k`` hits and after ``k`` misses) or computed from raw shot sequences.

The embedded dataset is the classic 26-player shooting experiment at
``k = 3``. It prints category hit rates rounded to two decimals; the integer
hit counts are recovered as ``floor(rate * shots + 1/2)`` and every difference is
computed from those counts. A count is flagged ambiguous when the printed
rate does not pin down a single integer.
"""

from __future__ import annotations

import hashlib
import io
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Literal, TextIO

import pandas as pd
from scipy import stats

from .errors import DegenerateError, InputFormatError, ParameterError, UndefinedStatisticError
from .exactdist import expected_difference
from .io import read_table
from .seqcore import BinarySequence, estimates

logger = logging.getLogger(__name__)

Convention = Literal["overall", "category"]
CONVENTIONS: tuple[str, ...] = ("overall", "category")

SUMMARY_COLUMNS = ("player", "group", "n", "p", "ph", "mh", "pm", "mm")
SEQUENCE_COLUMNS = ("player", "outcomes")

GVT_K = 3
GVT_RESOURCE = "gvt_table2.csv"
GVT_SHA256 = "5049ed37316c378dde26dc890ed513e893304342db99eb0f548669124dd47a52"

_PRINTED_DIGITS = 2
_ONE_SIDED_05 = stats.norm.isf(0.05)


@lru_cache(maxsize=4096)
def _null_difference(n: int, k: int, p: float) -> float:
    """Expected difference of a Bernoulli shooter, memoized per ``(n, k, p)``."""
    return float(expected_difference(n, k, p))


def recover_hits(rate: float, shots: int, digits: int = _PRINTED_DIGITS) -> tuple[int, bool]:
    """Integer hit count behind a rate printed to ``digits`` decimals.

    Returns ``(floor(rate * shots + 1/2), ambiguous)``; ``ambiguous`` is True when
    zero or several integers round back to the printed rate.
    """
    if shots == 0:
        return 0, False
    half_step = 0.5 * 10.0**-digits + 1e-9
    candidates = [h for h in range(shots + 1) if abs(h / shots - rate) <= half_step]
    return math.floor(rate * shots + 0.5), len(candidates) != 1


@dataclass(frozen=True)
class PlayerSummary:
    """One player's shooting record.

    ``hits_after_hits`` and ``hits_after_misses`` are the integer hit counts on
    the ``m_hits`` shots after ``k`` hits and the ``m_misses`` shots after
    ``k`` misses. ``ambiguous`` names the categories whose counts were
    recovered from a rounded rate without a unique answer.
    """

    player: str
    group: str
    n_shots: int
    p_overall: float
    m_hits: int
    hits_after_hits: int
    m_misses: int
    hits_after_misses: int
    k: int = GVT_K
    ambiguous: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n_shots < 1:
            raise ParameterError(f"{self.player}: n must be positive, got {self.n_shots}")
        if not 0 <= self.p_overall <= 1:
            raise ParameterError(f"{self.player}: p must lie in [0, 1], got {self.p_overall}")
        for name, hits, shots in (
            ("after hits", self.hits_after_hits, self.m_hits),
            ("after misses", self.hits_after_misses, self.m_misses),
        ):
            if not 0 <= shots <= self.n_shots:
                raise ParameterError(
                    f"{self.player}: {shots} shots {name} exceeds n={self.n_shots}"
                )
            if not 0 <= hits <= shots:
                raise ParameterError(f"{self.player}: {hits} hits {name} out of {shots} shots")

    @property
    def p_after_hits(self) -> float | None:
        return self.hits_after_hits / self.m_hits if self.m_hits else None

    @property
    def p_after_misses(self) -> float | None:
        return self.hits_after_misses / self.m_misses if self.m_misses else None

    @property
    def gvt_diff(self) -> float | None:
        """Hit rate after ``k`` hits minus hit rate after ``k`` misses; None if either is empty."""
        if self.p_after_hits is None or self.p_after_misses is None:
            return None
        return self.p_after_hits - self.p_after_misses


@dataclass(frozen=True)
class AdjustedResult:
    player: str
    null_expected_diff: float
    adjusted_diff: float | None
    se: float | None
    defined: bool

    @property
    def z(self) -> float | None:
        if self.adjusted_diff is None or not self.se:
            return None
        return self.adjusted_diff / self.se


@dataclass(frozen=True)
class StudyResult:
    """Aggregate tests over the players with a defined difference.

    ``raw_p`` is the two-sided one-sample t-test on raw differences.
    ``adjusted_p`` is the one-sided normal test of the mean adjusted
    difference against ``study_se``. ``sign_p`` and ``significant_p`` are
    one-sided binomial tests of the positive count (rate 1/2) and of the
    count of individually significant players (rate .05).
    ``design_target_*`` repeat the raw t-test after removing the bias of a
    50% shooter; ``adjusted_t*`` is a one-sided t-test on the adjusted
    differences.
    """

    k: int
    players: int
    included: int
    excluded: tuple[str, ...]
    mean_raw_diff: float
    raw_t: float
    raw_p: float
    mean_adjusted_diff: float
    study_se: float
    adjusted_z: float
    adjusted_p: float
    positive_count: int
    sign_p: float
    significant_count: int
    significant_p: float
    design_target_mean: float
    design_target_t: float
    design_target_p: float
    adjusted_t: float
    adjusted_t_p: float
    convention: str = "overall"

    def to_frame(self) -> pd.DataFrame:
        rows = [
            ("players", self.players),
            ("included", self.included),
            ("mean_raw_diff", self.mean_raw_diff),
            ("raw_t", self.raw_t),
            ("raw_p", self.raw_p),
            ("mean_adjusted_diff", self.mean_adjusted_diff),
            ("study_se", self.study_se),
            ("adjusted_z", self.adjusted_z),
            ("adjusted_p", self.adjusted_p),
            ("positive_count", self.positive_count),
            ("sign_p", self.sign_p),
            ("significant_count", self.significant_count),
            ("significant_p", self.significant_p),
            ("design_target_mean", self.design_target_mean),
            ("design_target_t", self.design_target_t),
            ("design_target_p", self.design_target_p),
            ("adjusted_t", self.adjusted_t),
            ("adjusted_t_p", self.adjusted_t_p),
        ]
        return pd.DataFrame(
            {"statistic": [r[0] for r in rows], "value": [float(r[1]) for r in rows]}
        )


@dataclass(frozen=True)
class PooledEstimate:
    """Difference of pooled hit rates after ``k`` hits and after ``k`` misses."""

    estimate: float
    se: float
    hits_after_hits: int
    shots_after_hits: int
    hits_after_misses: int
    shots_after_misses: int
    total_shots: int
    ambiguous: tuple[str, ...] = ()

    @property
    def category_shots(self) -> int:
        return self.shots_after_hits + self.shots_after_misses


def _field(row: pd.Series, column: str, kind: type, source: object) -> int | float:
    raw = str(row[column]).strip()
    try:
        return kind(raw)  # type: ignore[no-any-return]
    except ValueError:
        raise InputFormatError(f"{source}: player {row['player']!r} has {column}={raw!r}") from None


def _summary_from_row(row: pd.Series, k: int, source: object) -> PlayerSummary:
    n = int(_field(row, "n", int, source))
    mh = int(_field(row, "mh", int, source))
    mm = int(_field(row, "mm", int, source))
    ambiguous = []
    hits = []
    for name, rate_col, shots in (("after_hits", "ph", mh), ("after_misses", "pm", mm)):
        if shots == 0:
            hits.append(0)
            continue
        count, unclear = recover_hits(float(_field(row, rate_col, float, source)), shots)
        hits.append(count)
        if unclear:
            ambiguous.append(name)
    try:
        return PlayerSummary(
            player=str(row["player"]).strip(),
            group=str(row["group"]).strip(),
            n_shots=n,
            p_overall=float(_field(row, "p", float, source)),
            m_hits=mh,
            hits_after_hits=hits[0],
            m_misses=mm,
            hits_after_misses=hits[1],
            k=k,
            ambiguous=tuple(ambiguous),
        )
    except ParameterError as exc:
        raise InputFormatError(f"{source}: {exc}") from exc


def read_summaries(source: str | Path | TextIO, k: int = GVT_K) -> list[PlayerSummary]:
    """Read a summary table with header ``player,group,n,p,ph,mh,pm,mm``.

    ``ph`` (``pm``) may be empty when ``mh`` (``mm``) is zero.
    """
    frame = read_table(source, SUMMARY_COLUMNS)
    summaries = [_summary_from_row(row, k, source) for _, row in frame.iterrows()]
    for summary in summaries:
        if summary.ambiguous:
            logger.warning(
                "%s: hit count %s not uniquely determined by the printed rate",
                summary.player,
                " and ".join(summary.ambiguous),
            )
    return summaries


def read_sequences(source: str | Path | TextIO) -> list[tuple[str, BinarySequence]]:
    """Read raw shot sequences with header ``player,outcomes``.

    Outcomes may be written with ``0/1``, ``H/T`` or ``X/O``.
    """
    frame = read_table(source, SEQUENCE_COLUMNS)
    rows = []
    for _, row in frame.iterrows():
        player = str(row["player"]).strip()
        try:
            rows.append((player, BinarySequence.parse(str(row["outcomes"]))))
        except InputFormatError as exc:
            raise InputFormatError(f"{source}: player {player!r}: {exc}") from exc
    if not rows:
        raise InputFormatError(f"{source}: no sequences")
    return rows


def load_gvt() -> list[PlayerSummary]:
    """The embedded 26-player dataset (``k = 3``), checked against its recorded checksum."""
    raw = resources.files("pystreak").joinpath("data", GVT_RESOURCE).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != GVT_SHA256:
        raise InputFormatError(f"embedded {GVT_RESOURCE} is corrupted (sha256 {digest})")
    return read_summaries(io.StringIO(raw.decode("utf-8")), k=GVT_K)


def summarize_sequence(
    seq: BinarySequence, k: int, player: str = "", group: str = ""
) -> PlayerSummary:
    est = estimates(seq, k)
    counts = est.counts
    return PlayerSummary(
        player=player,
        group=group,
        n_shots=seq.n,
        p_overall=seq.n_successes / seq.n,
        m_hits=counts.after_hits,
        hits_after_hits=counts.m1_1,
        m_misses=counts.after_misses,
        hits_after_misses=counts.m1_0,
        k=k,
    )


def player_se(summary: PlayerSummary, convention: Convention = "overall") -> float:
    """Standard error of a player's difference, with the categories as independent binomials.

    ``convention="overall"`` uses the player's overall hit rate for both
    category variances; ``"category"`` uses each category's own rate.
    """
    if convention not in CONVENTIONS:
        raise ParameterError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    if summary.m_hits == 0 or summary.m_misses == 0:
        empty = "after_hits" if summary.m_hits == 0 else "after_misses"
        raise UndefinedStatisticError(f"{summary.player}: no shots {empty}", empty_set=empty)
    if convention == "overall":
        v_hits = v_misses = summary.p_overall * (1 - summary.p_overall)
    else:
        assert summary.p_after_hits is not None and summary.p_after_misses is not None
        v_hits = summary.p_after_hits * (1 - summary.p_after_hits)
        v_misses = summary.p_after_misses * (1 - summary.p_after_misses)
    return math.sqrt(v_hits / summary.m_hits + v_misses / summary.m_misses)


def bias_adjust(
    summary: PlayerSummary, k: int | None = None, convention: Convention = "overall"
) -> AdjustedResult:
    """Subtract the expected difference of a Bernoulli shooter with the player's overall rate."""
    k = summary.k if k is None else k
    if k != summary.k:
        raise ParameterError(f"{summary.player}: summary counts are for k={summary.k}, not k={k}")
    if not 0 < summary.p_overall < 1:
        raise ParameterError(f"{summary.player}: p must satisfy 0 < p < 1, got {summary.p_overall}")
    if not 1 <= k <= summary.n_shots - 2:
        raise ParameterError(
            f"{summary.player}: k must satisfy 1 <= k <= n-2 (n={summary.n_shots}), got k={k}"
        )
    null = _null_difference(summary.n_shots, k, summary.p_overall)
    diff = summary.gvt_diff
    if diff is None:
        return AdjustedResult(summary.player, null, None, None, defined=False)
    se = player_se(summary, convention)
    return AdjustedResult(summary.player, null, diff - null, se, defined=True)


def _checked(value: float, test: str) -> float:
    if math.isnan(value):
        raise DegenerateError(f"{test} is undefined for these players (zero variance)")
    return float(value)


def study_tests(
    summaries: Sequence[PlayerSummary], k: int | None = None, convention: Convention = "overall"
) -> StudyResult:
    """Run the study-level tests on every player whose difference is defined."""
    pairs = [(s, bias_adjust(s, k, convention)) for s in summaries]
    included = [(s, a) for s, a in pairs if a.defined]
    excluded = tuple(s.player for s, a in pairs if not a.defined)
    if excluded:
        logger.info(
            "excluded %d player(s) with an undefined difference: %s",
            len(excluded),
            ", ".join(excluded),
        )
    if len(included) < 2:
        raise DegenerateError(
            f"study tests need at least 2 players with a defined difference, got {len(included)}"
        )
    k = included[0][0].k
    count = len(included)
    raw: list[float] = []
    adjusted: list[float] = []
    for s, a in included:
        assert s.gvt_diff is not None and a.adjusted_diff is not None
        raw.append(s.gvt_diff)
        adjusted.append(a.adjusted_diff)

    raw_test = stats.ttest_1samp(raw, 0.0)
    study_se = math.sqrt(sum(a.se**2 for _, a in included if a.se is not None)) / count
    if study_se == 0:
        raise DegenerateError("adjusted mean test is undefined: study standard error is zero")
    mean_adjusted = sum(adjusted) / count
    z = mean_adjusted / study_se

    positive = sum(1 for v in adjusted if v > 0)
    significant = sum(1 for _, a in included if a.z is not None and a.z > _ONE_SIDED_05)

    # design target: the bias of a 50% shooter
    shifted = [
        d - _null_difference(s.n_shots, k, 0.5) for (s, _), d in zip(included, raw)
    ]
    target_test = stats.ttest_1samp(shifted, 0.0, alternative="greater")
    adjusted_test = stats.ttest_1samp(adjusted, 0.0, alternative="greater")

    return StudyResult(
        k=k,
        players=len(summaries),
        included=count,
        excluded=excluded,
        mean_raw_diff=sum(raw) / count,
        raw_t=_checked(raw_test.statistic, "raw paired t-test"),
        raw_p=_checked(raw_test.pvalue, "raw paired t-test"),
        mean_adjusted_diff=mean_adjusted,
        study_se=study_se,
        adjusted_z=z,
        adjusted_p=float(stats.norm.sf(z)),
        positive_count=positive,
        sign_p=float(stats.binomtest(positive, count, 0.5, alternative="greater").pvalue),
        significant_count=significant,
        significant_p=float(
            stats.binomtest(significant, count, 0.05, alternative="greater").pvalue
        ),
        design_target_mean=sum(shifted) / count,
        design_target_t=_checked(target_test.statistic, "design-target t-test"),
        design_target_p=_checked(target_test.pvalue, "design-target t-test"),
        adjusted_t=_checked(adjusted_test.statistic, "adjusted t-test"),
        adjusted_t_p=_checked(adjusted_test.pvalue, "adjusted t-test"),
        convention=convention,
    )


def pooled_simple(summaries: Iterable[PlayerSummary], k: int | None = None) -> PooledEstimate:
    """Pool all shots after ``k`` hits and after ``k`` misses into one difference of rates.

    The standard error is that of a difference of two independent binomial proportions.
    """
    players = list(summaries)
    if not players:
        raise ParameterError("pooled_simple needs at least one player")
    for summary in players:
        if k is not None and summary.k != k:
            raise ParameterError(
                f"{summary.player}: summary counts are for k={summary.k}, not k={k}"
            )
    hh = sum(s.hits_after_hits for s in players)
    mh = sum(s.m_hits for s in players)
    hm = sum(s.hits_after_misses for s in players)
    mm = sum(s.m_misses for s in players)
    if mh == 0 or mm == 0:
        empty = "after_hits" if mh == 0 else "after_misses"
        raise UndefinedStatisticError(f"pooled difference has no shots {empty}", empty_set=empty)
    ambiguous = tuple(f"{s.player}:{name}" for s in players for name in s.ambiguous)
    if ambiguous:
        logger.warning("pooled counts include %d ambiguous recoveries", len(ambiguous))
    p1, p0 = hh / mh, hm / mm
    return PooledEstimate(
        estimate=p1 - p0,
        se=math.sqrt(p1 * (1 - p1) / mh + p0 * (1 - p0) / mm),
        hits_after_hits=hh,
        shots_after_hits=mh,
        hits_after_misses=hm,
        shots_after_misses=mm,
        total_shots=sum(s.n_shots for s in players),
        ambiguous=ambiguous,
    )


def adjust_external(
    p_after_hits: float, p_after_misses: float, n: int, p: float, k: int = GVT_K
) -> float:
    """Bias-adjust a difference of hit rates reported elsewhere for ``n``-shot sequences."""
    for name, value in (("p_after_hits", p_after_hits), ("p_after_misses", p_after_misses)):
        if not 0 <= value <= 1:
            raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return (p_after_hits - p_after_misses) - float(expected_difference(n, k, p))


def player_table(
    summaries: Sequence[PlayerSummary], k: int | None = None, convention: Convention = "overall"
) -> pd.DataFrame:
    rows = []
    for summary in summaries:
        adjusted = bias_adjust(summary, k, convention)
        rows.append(
            {
                "player": summary.player,
                "group": summary.group,
                "n": summary.n_shots,
                "p": summary.p_overall,
                "p_after_hits": summary.p_after_hits,
                "m_hits": summary.m_hits,
                "p_after_misses": summary.p_after_misses,
                "m_misses": summary.m_misses,
                "gvt_diff": summary.gvt_diff,
                "null_expected_diff": adjusted.null_expected_diff,
                "adjusted_diff": adjusted.adjusted_diff,
                "se": adjusted.se,
                "z": adjusted.z,
                "defined": adjusted.defined,
            }
        )
    return pd.DataFrame(rows)

"""Brute-force enumeration of every binary sequence of a given length.

Used as ground truth for the recursions in :mod:`pystreak.exactdist` and for
the small betting examples. Sequences are indexed ``0 .. 2**n - 1`` with the
first trial in the most significant bit; index ranges are enumerated in
chunks and their integer tallies summed, so results do not depend on how the
range is partitioned.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, partial
from types import MappingProxyType

import numpy as np
import pandas as pd

from .config import get_settings
from .errors import CapacityError, ParameterError
from .exactdist import STATISTICS, CountDistribution, Probability, Statistic, Weight
from .parallel import parallel_map
from .seqcore import (
    BinarySequence,
    batch_counts,
    check_streak_length,
    estimates,
    select_streak_windows,
)

logger = logging.getLogger(__name__)

_CHUNK = 1 << 16
TABULATE_CAP = 16

# (m0_0, m1_0, m0_1, m1_1, n1) -> number of sequences
Tally = Mapping[tuple[int, int, int, int, int], int]


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a full enumeration.

    ``expectation`` is None when the statistic is undefined for every sequence.
    """

    expectation: Probability | None
    distribution: CountDistribution
    enumerated: int
    defined: int


@dataclass(frozen=True)
class LotteryResult:
    ev: float
    win_probability: Fraction
    resolve_probability: Fraction
    wins: int
    losses: int
    price: float
    win_payout: float

    @property
    def net(self) -> float:
        return self.ev - self.price


@dataclass(frozen=True)
class ReversalResult:
    """Expected per-sequence success rate of predicting a reversal after a streak.

    ``hit_streak_rate`` predicts a miss after ``k`` hits only;
    ``both_streaks_rate`` also predicts a hit after ``k`` misses.
    """

    hit_streak_rate: Probability
    both_streaks_rate: Probability


def _check_size(n: int, cap: int | None = None) -> None:
    limit = get_settings().oracle_cap if cap is None else cap
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParameterError(f"n must be an integer, got {n!r}")
    if n > limit:
        raise CapacityError(f"enumeration is capped at n={limit} (2**{limit} sequences), got n={n}")


def _chunk_tally(bounds: tuple[int, int], n: int, k: int) -> dict[tuple[int, ...], int]:
    start, stop = bounds
    index = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    matrix = ((index[:, np.newaxis] >> shifts) & 1).astype(np.uint8)
    stacked = np.column_stack([batch_counts(matrix, k), matrix.sum(axis=1, dtype=np.int64)])
    keys, freq = np.unique(stacked, axis=0, return_counts=True)
    return {tuple(int(v) for v in row): int(c) for row, c in zip(keys, freq)}


@lru_cache(maxsize=32)
def tally(n: int, k: int) -> Tally:
    """Number of sequences for every four-way count key and success total."""
    _check_size(n)
    check_streak_length(n, k)
    total = 2**n
    bounds = [(start, min(start + _CHUNK, total)) for start in range(0, total, _CHUNK)]
    merged: Counter[tuple[int, ...]] = Counter()
    for part in parallel_map(partial(_chunk_tally, n=n, k=k), bounds):
        merged.update(part)
    logger.debug("enumerated %d sequences (n=%d, k=%d) into %d keys", total, n, k, len(merged))
    return MappingProxyType(dict(merged))  # type: ignore[arg-type]


def _sequence_weight(count: int, n: int, n1: int, p: Probability | None) -> Weight:
    if p is None:
        return count
    return count * p**n1 * (1 - p) ** (n - n1)


def enumerate_sequences(
    n: int,
    k: int,
    p: Probability | None = 0.5,
    statistic: Statistic = "proportion",
    conditional_n1: int | None = None,
) -> OracleResult:
    """Visit all ``2**n`` sequences (or the ``C(n, n1)`` arrangements of ``n1`` successes).

    With ``conditional_n1`` set, or ``p=None``, weights are sequence counts;
    otherwise each sequence has probability ``p**n1 * (1-p)**(n-n1)``.
    """
    if statistic not in STATISTICS:
        raise ParameterError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    check_streak_length(n, k)
    _check_size(n)
    if conditional_n1 is not None:
        if not 0 <= conditional_n1 <= n:
            raise ParameterError(f"n1 must satisfy 0 <= n1 <= n (n={n}), got {conditional_n1}")
        p = None
    elif p is not None and not 0 < p < 1:
        raise ParameterError(f"p must satisfy 0 < p < 1, got {p}")

    entries: dict[tuple[int, ...], Weight] = {}
    sequences: dict[tuple[int, ...], int] = {}
    for (m0_0, m1_0, m0_1, m1_1, n1), count in tally(n, k).items():
        if conditional_n1 is not None and n1 != conditional_n1:
            continue
        key = (m0_1, m1_1) if statistic == "proportion" else (m0_0, m1_0, m0_1, m1_1)
        entries[key] = entries.get(key, 0) + _sequence_weight(count, n, n1, p)
        sequences[key] = sequences.get(key, 0) + count

    dist = CountDistribution(
        entries=MappingProxyType(entries),
        n=n,
        k=k,
        statistic=statistic,
        weight_kind="count" if p is None else "probability",
        p=p,
        n1=conditional_n1,
    )
    defined = sum(c for key, c in sequences.items() if dist.statistic_value(key) is not None)
    enumerated = 2**n if conditional_n1 is None else math.comb(n, conditional_n1)
    return OracleResult(
        expectation=dist.expectation() if defined else None,
        distribution=dist,
        enumerated=enumerated,
        defined=defined,
    )


def lottery_ev(
    n: int = 4, k: int = 1, price: float = 5.0, win_payout: float = 10.0
) -> LotteryResult:
    """Expected payout of a ticket that wins when heads follow heads more than half the time.

    A fair coin is flipped ``n`` times; the ticket wins if the proportion of
    heads after ``k`` heads exceeds 1/2, loses below 1/2, and is redrawn when
    the proportion is exactly 1/2 or undefined.
    """
    wins = losses = 0
    for (_, _, m0_1, m1_1, _), count in tally(n, k).items():
        if m0_1 + m1_1 == 0:
            continue
        if m1_1 > m0_1:
            wins += count
        elif m1_1 < m0_1:
            losses += count
    resolved = wins + losses
    win_probability = Fraction(wins, resolved) if resolved else Fraction(0)
    return LotteryResult(
        ev=float(win_payout * win_probability),
        win_probability=win_probability,
        resolve_probability=Fraction(resolved, 2**n),
        wins=wins,
        losses=losses,
        price=price,
        win_payout=win_payout,
    )


def reversal_predictor_rate(n: int, k: int, p: Probability = 0.5) -> ReversalResult:
    """Per-sequence success rate of betting on a reversal after every streak of ``k``.

    Each sequence's rate is its share of correct predictions; rates are
    averaged over sequences with at least one prediction.
    """
    if not 0 < p < 1:
        raise ParameterError(f"p must satisfy 0 < p < 1, got {p}")
    sums: dict[str, list[Weight]] = {"hit": [0, 0], "both": [0, 0]}
    for (m0_0, m1_0, m0_1, m1_1, n1), count in tally(n, k).items():
        weight = _sequence_weight(count, n, n1, p)
        if m0_1 + m1_1:
            sums["hit"][0] += Fraction(m0_1, m0_1 + m1_1) * weight
            sums["hit"][1] += weight
        predicted = m0_0 + m1_0 + m0_1 + m1_1
        if predicted:
            sums["both"][0] += Fraction(m0_1 + m1_0, predicted) * weight
            sums["both"][1] += weight

    def rate(name: str) -> Probability:
        num, den = sums[name]
        value = num / den
        return value if isinstance(p, Fraction) else float(value)

    return ReversalResult(hit_streak_rate=rate("hit"), both_streaks_rate=rate("both"))


def tabulate(n: int, k: int = 1) -> pd.DataFrame:
    """One row per sequence: outcomes, selected trials and their success proportion.

    Rows run from all tails to all heads; ``probability`` is for a fair coin.
    """
    _check_size(n, cap=min(TABULATE_CAP, get_settings().oracle_cap))
    check_streak_length(n, k)
    rows = []
    for index in range(2**n):
        seq = BinarySequence(tuple((index >> (n - 1 - i)) & 1 for i in range(n)))
        windows = select_streak_windows(seq, k)
        est = estimates(seq, k)
        prop = est.p_after_hits
        rows.append(
            {
                "sequence": seq.to_letters(),
                "selected": ",".join(str(i) for i in sorted(windows.after_hits)),
                "proportion": float(prop) if prop is not None else np.nan,
                "proportion_exact": str(prop.value) if prop is not None else "",
                "difference": float(est.difference) if est.difference is not None else np.nan,
                "probability": 1.0 / 2**n,
            }
        )
    return pd.DataFrame(rows)


"""Binary sequences, streak selection sets and the streak-conditional estimators.

Trial positions reported to callers are 1-based. A trial follows a streak of
``k`` successes when the ``k`` trials immediately before it are all successes;
longer streaks qualify too (no maximality requirement).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from .errors import InputFormatError, ParameterError, UndefinedStatisticError

_SYMBOLS = {"1": 1, "0": 0, "H": 1, "T": 0, "h": 1, "t": 0, "X": 1, "x": 1, "O": 0, "o": 0}


@dataclass(frozen=True)
class BinarySequence:
    """An ordered list of trial outcomes, 1 for success (hit) and 0 for failure (miss)."""

    outcomes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.outcomes) < 1:
            raise ParameterError("a sequence needs at least one trial")
        for position, value in enumerate(self.outcomes, start=1):
            if value not in (0, 1) or isinstance(value, bool):
                raise ParameterError(f"trial {position} is {value!r}, expected 0 or 1")

    @classmethod
    def of(cls, outcomes: Iterable[int]) -> BinarySequence:
        return cls(tuple(int(v) for v in outcomes))

    @classmethod
    def parse(cls, text: str) -> BinarySequence:
        """Parse ``"110"``, ``"HHT"`` or ``"1,1,0"`` (separators and whitespace are ignored)."""
        cleaned = [c for c in text if not c.isspace() and c not in ",;|"]
        try:
            values = tuple(_SYMBOLS[c] for c in cleaned)
        except KeyError as exc:
            raise InputFormatError(
                f"unexpected symbol {exc.args[0]!r} in sequence {text!r}"
            ) from None
        if not values:
            raise InputFormatError("empty sequence")
        return cls(values)

    @property
    def n(self) -> int:
        return len(self.outcomes)

    @property
    def n_successes(self) -> int:
        return sum(self.outcomes)

    def complement(self) -> BinarySequence:
        return BinarySequence(tuple(1 - v for v in self.outcomes))

    def to_array(self) -> npt.NDArray[np.uint8]:
        return np.asarray(self.outcomes, dtype=np.uint8)

    def to_letters(self) -> str:
        return "".join("H" if v else "T" for v in self.outcomes)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __str__(self) -> str:
        return "".join(str(v) for v in self.outcomes)


@dataclass(frozen=True)
class StreakWindows:
    """1-based positions of the trials that follow ``k`` hits and ``k`` misses."""

    k: int
    after_hits: frozenset[int]
    after_misses: frozenset[int]


@dataclass(frozen=True)
class Proportion:
    """An exact proportion carried as ``successes`` out of ``trials`` (trials > 0)."""

    successes: int
    trials: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.successes, self.trials)

    def __float__(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class StreakCounts:
    """Outcome counts on the selected trials, in the order ``(m0_0, m1_0, m0_1, m1_1)``.

    ``m{v}_{s}`` counts outcome ``v`` on trials that follow a streak of ``s``
    (0 for misses, 1 for hits).
    """

    m0_0: int
    m1_0: int
    m0_1: int
    m1_1: int

    @property
    def after_hits(self) -> int:
        return self.m0_1 + self.m1_1

    @property
    def after_misses(self) -> int:
        return self.m0_0 + self.m1_0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.m0_0, self.m1_0, self.m0_1, self.m1_1)

    def __add__(self, other: StreakCounts) -> StreakCounts:
        return StreakCounts(
            self.m0_0 + other.m0_0,
            self.m1_0 + other.m1_0,
            self.m0_1 + other.m0_1,
            self.m1_1 + other.m1_1,
        )


@dataclass(frozen=True)
class StreakEstimates:
    """Realized streak statistics of one sequence (or of pooled counts).

    ``p_after_hits`` is the success proportion after ``k`` hits, ``q_after_misses``
    the failure proportion after ``k`` misses and ``difference`` is
    ``p_after_hits - (1 - q_after_misses)``. Each is None when undefined.
    """

    k: int
    counts: StreakCounts
    p_after_hits: Proportion | None
    q_after_misses: Proportion | None
    difference: Fraction | None

    @property
    def p_after_misses(self) -> Proportion | None:
        """Success proportion after ``k`` misses, i.e. ``1 - q_after_misses``."""
        if self.q_after_misses is None:
            return None
        return Proportion(self.counts.m1_0, self.counts.after_misses)

    def require_difference(self) -> Fraction:
        """Return the difference or raise naming the empty selection set."""
        if self.difference is not None:
            return self.difference
        sets = (("after_hits", self.p_after_hits), ("after_misses", self.q_after_misses))
        empty = [name for name, prop in sets if prop is None]
        raise UndefinedStatisticError(
            f"difference is undefined for k={self.k}: no trials {' or '.join(empty)}",
            empty_set=",".join(empty),
        )


def check_streak_length(n: int, k: int) -> None:
    """Require ``1 <= k <= n - 1``."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ParameterError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must satisfy 1 <= k <= n-1 (n={n}), got k={k}")


def select_streak_windows(seq: BinarySequence, k: int) -> StreakWindows:
    check_streak_length(seq.n, k)
    x = seq.outcomes
    after_hits = set()
    after_misses = set()
    for i in range(k, seq.n):
        window = x[i - k : i]
        if all(window):
            after_hits.add(i + 1)
        elif not any(window):
            after_misses.add(i + 1)
    return StreakWindows(
        k=k, after_hits=frozenset(after_hits), after_misses=frozenset(after_misses)
    )


def four_way_counts(seq: BinarySequence, k: int) -> StreakCounts:
    """Counts ``(m0_0, m1_0, m0_1, m1_1)`` of outcomes following ``k`` misses and ``k`` hits."""
    windows = select_streak_windows(seq, k)
    x = seq.outcomes
    m1_1 = sum(x[i - 1] for i in windows.after_hits)
    m1_0 = sum(x[i - 1] for i in windows.after_misses)
    return StreakCounts(
        m0_0=len(windows.after_misses) - m1_0,
        m1_0=m1_0,
        m0_1=len(windows.after_hits) - m1_1,
        m1_1=m1_1,
    )


def streak_counts(seq: BinarySequence, k: int) -> tuple[int, int]:
    """Failures and successes ``(m0, m1)`` on the trials that follow ``k`` hits."""
    counts = four_way_counts(seq, k)
    return (counts.m0_1, counts.m1_1)


def difference_from_counts(counts: StreakCounts) -> Fraction | None:
    if counts.after_hits == 0 or counts.after_misses == 0:
        return None
    return Fraction(counts.m1_1, counts.after_hits) - Fraction(counts.m1_0, counts.after_misses)


def estimates_from_counts(counts: StreakCounts, k: int) -> StreakEstimates:
    p_hat = Proportion(counts.m1_1, counts.after_hits) if counts.after_hits else None
    q_hat = Proportion(counts.m0_0, counts.after_misses) if counts.after_misses else None
    return StreakEstimates(
        k=k,
        counts=counts,
        p_after_hits=p_hat,
        q_after_misses=q_hat,
        difference=difference_from_counts(counts),
    )


def estimates(seq: BinarySequence, k: int) -> StreakEstimates:
    return estimates_from_counts(four_way_counts(seq, k), k)


def pooled_estimates(sequences: Sequence[BinarySequence], k: int) -> StreakEstimates:
    """Estimates from counts summed over several sequences.

    The pooled proportion weights each sequence by its number of selected
    trials, unlike the average of per-sequence proportions.
    """
    if not sequences:
        raise ParameterError("pooled_estimates needs at least one sequence")
    total = StreakCounts(0, 0, 0, 0)
    for seq in sequences:
        total = total + four_way_counts(seq, k)
    return estimates_from_counts(total, k)


def batch_counts(matrix: npt.ArrayLike, k: int) -> npt.NDArray[np.int64]:
    """Four-way counts for every row of a 0/1 matrix.

    Returns an ``(rows, 4)`` integer array with columns ``m0_0, m1_0, m0_1, m1_1``.
    """
    x = np.asarray(matrix, dtype=np.int32)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    rows, n = x.shape
    check_streak_length(n, k)
    cum = np.zeros((rows, n + 1), dtype=np.int32)
    np.cumsum(x, axis=1, out=cum[:, 1:])
    window = cum[:, k:n] - cum[:, : n - k]
    target = x[:, k:].astype(bool)
    after_hits = window == k
    after_misses = window == 0
    out = np.empty((rows, 4), dtype=np.int64)
    out[:, 0] = np.count_nonzero(after_misses & ~target, axis=1)
    out[:, 1] = np.count_nonzero(after_misses & target, axis=1)
    out[:, 2] = np.count_nonzero(after_hits & ~target, axis=1)
    out[:, 3] = np.count_nonzero(after_hits & target, axis=1)
    return out


def batch_differences(counts: npt.NDArray[np.int64]) -> npt.NDArray[np.float64]:
    """Row-wise difference statistic from :func:`batch_counts` output; NaN where undefined."""
    after_misses = counts[:, 0] + counts[:, 1]
    after_hits = counts[:, 2] + counts[:, 3]
    defined = (after_hits > 0) & (after_misses > 0)
    out = np.full(counts.shape[0], np.nan)
    out[defined] = (
        counts[defined, 3] / after_hits[defined] - counts[defined, 1] / after_misses[defined]
    )
    return out


def batch_proportions(counts: npt.NDArray[np.int64]) -> npt.NDArray[np.float64]:
    """Row-wise success proportion after ``k`` hits; NaN where undefined."""
    after_hits = counts[:, 2] + counts[:, 3]
    out = np.full(counts.shape[0], np.nan)
    defined = after_hits > 0
    out[defined] = counts[defined, 3] / after_hits[defined]
    return out

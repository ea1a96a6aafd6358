"""Permutation tests of the hypothesis that a shooter's outcomes are exchangeable.

Under the null every arrangement of a sequence's successes is equally likely,
so the difference statistic is compared with its distribution over
rearrangements. The exact test reads that distribution off
:func:`~pystreak.exactdist.build_conditional_distribution`; the Monte-Carlo
test samples uniform shuffles.

Shuffles come from ``numpy.random.default_rng([seed, chunk])`` (PCG64), one
substream per fixed-size chunk of replications, so results depend only on the
seed and never on the number of workers.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from typing import Literal, TypeVar

import numpy as np
import numpy.typing as npt
from scipy import stats

from .config import get_settings
from .errors import DegenerateError, ParameterError, UndefinedStatisticError
from .exactdist import build_conditional_distribution
from .parallel import chunk_sizes, parallel_map
from .seqcore import BinarySequence, batch_counts, batch_differences, check_streak_length, estimates

logger = logging.getLogger(__name__)

Alternative = Literal["greater", "less", "two-sided"]
ALTERNATIVES: tuple[str, ...] = ("greater", "less", "two-sided")

_TIE_TOLERANCE = 1e-12
_MAX_REDRAWS = 1000

P = TypeVar("P", Fraction, float)


@dataclass(frozen=True)
class PermutationTestResult:
    """Outcome of a permutation test.

    For the exact test ``p_exact`` holds the p-value as a Fraction. For
    Monte-Carlo tests ``replications`` counts the shuffles drawn and
    ``discarded`` those whose statistic was undefined.
    """

    observed_statistic: float
    p_value: float
    method: Literal["exact", "monte-carlo"]
    alternative: str
    n: int
    n1: int
    k: int
    replications: int | None = None
    seed: int | None = None
    discarded: int = 0
    p_exact: Fraction | None = None
    players: int = 1
    excluded: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class CriticalValue:
    """Critical value for one success count.

    ``value`` is None when no threshold keeps the tail at or below alpha.
    ``tail`` is the rejection probability among arrangements with a defined
    statistic; ``rejecting`` and ``arrangements`` count sequences.
    """

    n1: int
    value: Fraction | None
    tail: Fraction
    rejecting: int
    defined: int
    arrangements: int

    @property
    def testable(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class CriticalValueFamily:
    alpha: float
    n: int
    k: int
    entries: dict[int, CriticalValue]

    def critical_value(self, n1: int) -> Fraction | None:
        return self.entries[n1].value

    def rejects(self, seq: BinarySequence) -> bool:
        """Whether the one-sided test rejects ``seq``; never when its statistic is undefined."""
        entry = self.entries[seq.n_successes]
        diff = estimates(seq, self.k).difference
        return entry.value is not None and diff is not None and diff >= entry.value


def _check_alternative(alternative: str) -> None:
    if alternative not in ALTERNATIVES:
        raise ParameterError(f"alternative must be one of {ALTERNATIVES}, got {alternative!r}")


def _tail(greater: P, less: P, alternative: str) -> P:
    if alternative == "greater":
        return greater
    if alternative == "less":
        return less
    # doubled smaller tail, capped at 1
    return min(type(greater)(1), 2 * min(greater, less))


def exact_test(
    seq: BinarySequence, k: int, alternative: Alternative = "greater"
) -> PermutationTestResult:
    """Exact p-value over all rearrangements of ``seq`` with a defined statistic.

    The two-sided p-value doubles the smaller one-sided p-value, capped at 1.
    """
    _check_alternative(alternative)
    observed = estimates(seq, k).require_difference()
    dist = build_conditional_distribution(seq.n, k, seq.n_successes)
    support = dist.statistic_distribution()
    total = sum(support.values())
    greater = Fraction(sum(w for v, w in support.items() if v >= observed), total)
    less = Fraction(sum(w for v, w in support.items() if v <= observed), total)
    p = _tail(greater, less, alternative)
    return PermutationTestResult(
        observed_statistic=float(observed),
        p_value=float(p),
        method="exact",
        alternative=alternative,
        n=seq.n,
        n1=seq.n_successes,
        k=k,
        p_exact=Fraction(p),
    )


def _shuffle_differences(
    x: npt.NDArray[np.uint8], k: int, size: int, rng: np.random.Generator
) -> npt.NDArray[np.float64]:
    shuffled = rng.permuted(np.tile(x, (size, 1)), axis=1)
    return batch_differences(batch_counts(shuffled, k))


def _mc_chunk(
    index: int, x: npt.NDArray[np.uint8], k: int, observed: float, seed: int, sizes: list[int]
) -> tuple[int, int, int]:
    rng = np.random.default_rng([seed, index])
    diffs = _shuffle_differences(x, k, sizes[index], rng)
    defined = diffs[~np.isnan(diffs)]
    return (
        int(defined.size),
        int(np.count_nonzero(defined >= observed - _TIE_TOLERANCE)),
        int(np.count_nonzero(defined <= observed + _TIE_TOLERANCE)),
    )


def mc_test(
    seq: BinarySequence,
    k: int,
    replications: int = 10_000,
    seed: int = 0,
    alternative: Alternative = "greater",
    workers: int | None = None,
) -> PermutationTestResult:
    """Monte-Carlo permutation test with add-one smoothing, ``(r + 1) / (m + 1)``.

    ``m`` counts shuffles with a defined statistic; the rest are discarded
    and reported.
    """
    _check_alternative(alternative)
    if replications < 1:
        raise ParameterError(f"replications must be at least 1, got {replications}")
    check_streak_length(seq.n, k)
    if seq.n_successes in (0, seq.n):
        raise DegenerateError(
            "every permutation of a constant sequence leaves a selection set empty"
        )
    observed = estimates(seq, k).require_difference()
    sizes = chunk_sizes(replications, get_settings().chunk_size)
    task = partial(
        _mc_chunk, x=seq.to_array(), k=k, observed=float(observed), seed=seed, sizes=sizes
    )
    results = parallel_map(task, range(len(sizes)), workers)
    defined = sum(r[0] for r in results)
    if defined == 0:
        raise DegenerateError(f"all {replications} permutations have an undefined statistic")
    greater = (sum(r[1] for r in results) + 1) / (defined + 1)
    less = (sum(r[2] for r in results) + 1) / (defined + 1)
    p = _tail(greater, less, alternative)
    discarded = replications - defined
    if discarded:
        logger.info(
            "discarded %d of %d permutations with an undefined statistic", discarded, replications
        )
    return PermutationTestResult(
        observed_statistic=float(observed),
        p_value=float(p),
        method="monte-carlo",
        alternative=alternative,
        n=seq.n,
        n1=seq.n_successes,
        k=k,
        replications=replications,
        seed=seed,
        discarded=discarded,
    )


def _critical_value(n1: int, n: int, k: int, alpha: float) -> CriticalValue:
    arrangements = math.comb(n, n1)
    support = build_conditional_distribution(n, k, n1).statistic_distribution()
    defined = sum(support.values())
    value: Fraction | None = None
    tail = 0
    for v, w in sorted(support.items(), reverse=True):
        if Fraction(tail + w, defined) > alpha:
            break
        tail += w
        value = v
    return CriticalValue(
        n1=n1,
        value=value,
        tail=Fraction(tail, defined) if defined else Fraction(0),
        rejecting=tail,
        defined=defined,
        arrangements=arrangements,
    )


def critical_values(
    n: int, k: int, alpha: float = 0.05, workers: int | None = None
) -> CriticalValueFamily:
    """Smallest ``c`` per success count with ``P(D >= c | n1) <= alpha``.

    ``alpha`` may be 1, which makes every critical value the minimum of the support.
    """
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must satisfy 0 < alpha <= 1, got {alpha}")
    entries = parallel_map(partial(_critical_value, n=n, k=k, alpha=alpha), range(n + 1), workers)
    return CriticalValueFamily(alpha=alpha, n=n, k=k, entries={e.n1: e for e in entries})


def family_size(family: CriticalValueFamily, p: float | Fraction = 0.5) -> float | Fraction:
    """Unconditional rejection probability of the family for Bernoulli(``p``) trials.

    Sequences with an undefined statistic never reject. Exact when ``p`` is a Fraction.
    """
    if not 0 < p < 1:
        raise ParameterError(f"p must satisfy 0 < p < 1, got {p}")
    n = family.n
    if isinstance(p, Fraction):
        exact = Fraction(0)
        for e in family.entries.values():
            mass = math.comb(n, e.n1) * p**e.n1 * (1 - p) ** (n - e.n1)
            exact += Fraction(e.rejecting, e.arrangements) * mass
        return exact
    pmf = stats.binom.pmf(np.arange(n + 1), n, float(p))
    return float(sum(pmf[e.n1] * e.rejecting / e.arrangements for e in family.entries.values()))


@lru_cache(maxsize=1024)
def _conditional_moments(n: int, k: int, n1: int) -> tuple[float, float] | None:
    try:
        return build_conditional_distribution(n, k, n1).moments()
    except UndefinedStatisticError:
        return None


def _player_null(seq: BinarySequence, k: int) -> tuple[float, float] | None:
    return _conditional_moments(seq.n, k, seq.n_successes)


def _pooled_chunk(
    index: int,
    arrays: list[npt.NDArray[np.uint8]],
    means: list[float],
    sds: list[float],
    k: int,
    seed: int,
    sizes: list[int],
) -> npt.NDArray[np.float64]:
    rng = np.random.default_rng([seed, index])
    size = sizes[index]
    z = np.empty((size, len(arrays)))
    for j, x in enumerate(arrays):
        diffs = _shuffle_differences(x, k, size, rng)
        missing = np.flatnonzero(np.isnan(diffs))
        redraws = 0
        while missing.size:
            if redraws == _MAX_REDRAWS:
                raise DegenerateError(
                    f"player {j} kept drawing permutations with an undefined statistic"
                )
            diffs[missing] = _shuffle_differences(x, k, missing.size, rng)
            missing = np.flatnonzero(np.isnan(diffs))
            redraws += 1
        z[:, j] = (diffs - means[j]) / sds[j]
    return z.mean(axis=1)


def pooled_stratified_test(
    sequences: Sequence[BinarySequence],
    k: int,
    replications: int = 10_000,
    seed: int = 0,
    alternative: Alternative = "greater",
    ids: Sequence[str] | None = None,
    workers: int | None = None,
) -> PermutationTestResult:
    """Test the mean standardized difference across players, shuffling within each player.

    Each player's difference is standardized by the exact mean and standard
    deviation of its rearrangement distribution. Players whose statistic is
    undefined, or whose null standard deviation is 0, are left out and
    listed in ``excluded``. A shuffle with an undefined statistic is redrawn.
    """
    _check_alternative(alternative)
    if replications < 1:
        raise ParameterError(f"replications must be at least 1, got {replications}")
    labels = list(ids) if ids is not None else [str(i + 1) for i in range(len(sequences))]
    if len(labels) != len(sequences):
        raise ParameterError("ids and sequences must have the same length")

    arrays, means, sds, observed, excluded = [], [], [], [], []
    for label, seq in zip(labels, sequences):
        diff = estimates(seq, k).difference
        null = _player_null(seq, k) if diff is not None else None
        if diff is None or null is None or null[1] <= 0:
            excluded.append(label)
            continue
        arrays.append(seq.to_array())
        means.append(null[0])
        sds.append(null[1])
        observed.append((float(diff) - null[0]) / null[1])
    if excluded:
        logger.warning(
            "excluded %d player(s) from the pooled test: %s", len(excluded), ", ".join(excluded)
        )
    if not arrays:
        raise DegenerateError("no player has a defined statistic with positive null spread")

    statistic = float(np.mean(observed))
    sizes = chunk_sizes(replications, get_settings().chunk_size)
    task = partial(_pooled_chunk, arrays=arrays, means=means, sds=sds, k=k, seed=seed, sizes=sizes)
    null_stats = np.concatenate(parallel_map(task, range(len(sizes)), workers))
    greater = (np.count_nonzero(null_stats >= statistic - _TIE_TOLERANCE) + 1) / (replications + 1)
    less = (np.count_nonzero(null_stats <= statistic + _TIE_TOLERANCE) + 1) / (replications + 1)
    p = _tail(float(greater), float(less), alternative)
    return PermutationTestResult(
        observed_statistic=statistic,
        p_value=float(p),
        method="monte-carlo",
        alternative=alternative,
        n=sum(a.size for a in arrays),
        n1=int(sum(int(a.sum()) for a in arrays)),
        k=k,
        replications=replications,
        seed=seed,
        players=len(arrays),
        excluded=tuple(excluded),
    )

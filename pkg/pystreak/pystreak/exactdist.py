"""Exact distributions of streak-follower counts and the expectations derived from them.

The distributions are built with a backward recursion over the number of
remaining trials ``r``: ``D(state, r)`` maps a count key to the weight of all
length-``r`` continuations reaching it from ``state``. Only layer ``r - 1`` is
kept while layer ``r`` is built. Count keys are packed into a single integer
(``_BITS`` bits per component) so that moving along a transition is one
integer addition.

Three weight modes are supported:

* ``p`` a float: probability weights in double precision,
* ``p`` a :class:`~fractions.Fraction`: exact rational probability weights,
* ``p`` None: integer sequence counts (every sequence has weight 1).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from types import MappingProxyType
from typing import Literal, Union

import numpy as np
import pandas as pd

from .errors import ParameterError, StreakError, UndefinedStatisticError
from .io import render_table
from .parallel import parallel_map
from .seqcore import StreakCounts, difference_from_counts

logger = logging.getLogger(__name__)

Weight = Union[int, float, Fraction]
Probability = Union[float, Fraction]
Statistic = Literal["proportion", "difference"]
Method = Literal["moments", "dictionary"]

STATISTICS: tuple[str, ...] = ("proportion", "difference")
METHODS: tuple[str, ...] = ("moments", "dictionary")

_BITS = 24
_MASK = (1 << _BITS) - 1
_SUCCESS_SLOT = 4 * _BITS
_TOLERANCE = 1e-12

PROPORTION_COLUMNS = ("m0", "m1")
DIFFERENCE_COLUMNS = ("m0_0", "m1_0", "m0_1", "m1_1")


def _inc(slot: int) -> int:
    return 1 << (slot * _BITS)


# ----------------------------------------------------------------------------
# Count distributions
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CountDistribution:
    """Exact joint distribution of streak-follower counts.

    Keys are ``(m0, m1)`` for the proportion after ``k`` hits, or
    ``(m0_0, m1_0, m0_1, m1_1)`` for the difference between the proportions
    after ``k`` hits and after ``k`` misses.
    """

    entries: Mapping[tuple[int, ...], Weight]
    n: int
    k: int
    statistic: Statistic
    weight_kind: Literal["probability", "count"]
    p: Probability | None = None
    n1: int | None = None
    _values: dict[tuple[int, ...], Fraction | None] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.entries)

    def items(self) -> Iterable[tuple[tuple[int, ...], Weight]]:
        return self.entries.items()

    @property
    def columns(self) -> tuple[str, ...]:
        return PROPORTION_COLUMNS if self.statistic == "proportion" else DIFFERENCE_COLUMNS

    def total(self) -> Weight:
        if self.weight_kind == "probability" and not isinstance(self.p, Fraction):
            return math.fsum(float(w) for w in self.entries.values())
        return sum(self.entries.values())

    def expected_total(self) -> int:
        """Number of sequences the count weights should add up to."""
        if self.n1 is not None:
            return math.comb(self.n, self.n1)
        return 2**self.n

    def is_normalized(self, tolerance: float = _TOLERANCE) -> bool:
        if any(w <= 0 for w in self.entries.values()):
            return False
        total = self.total()
        if self.weight_kind == "count":
            return total == self.expected_total()
        if isinstance(total, Fraction):
            return total == 1
        return abs(float(total) - 1.0) <= tolerance

    def statistic_value(self, key: tuple[int, ...]) -> Fraction | None:
        """Value of the statistic for sequences with count ``key`` (None when undefined)."""
        cached = self._values.get(key, False)
        if cached is not False:
            return cached  # type: ignore[return-value]
        if self.statistic == "proportion":
            m0, m1 = key
            value = Fraction(m1, m0 + m1) if m0 + m1 else None
        else:
            value = difference_from_counts(StreakCounts(*key))
        self._values[key] = value
        return value

    def defined_items(self) -> Iterator[tuple[Fraction, Weight]]:
        for key, weight in self.entries.items():
            value = self.statistic_value(key)
            if value is not None:
                yield value, weight

    def defined_weight(self) -> Weight:
        weights = [w for _, w in self.defined_items()]
        if self.weight_kind == "probability" and not isinstance(self.p, Fraction):
            return math.fsum(float(w) for w in weights)
        return sum(weights)

    def statistic_distribution(self) -> dict[Fraction, Weight]:
        """Weight of each distinct exact statistic value, over defined sequences, ascending."""
        out: dict[Fraction, Weight] = {}
        for value, weight in self.defined_items():
            out[value] = out.get(value, 0) + weight
        return dict(sorted(out.items()))

    def expectation(self) -> Probability:
        """Mean of the statistic conditional on it being defined.

        Exact (a Fraction) for count weights and rational probabilities.
        """
        pairs = list(self.defined_items())
        if not pairs:
            raise UndefinedStatisticError(
                f"the {self.statistic} statistic is undefined for every sequence "
                f"(n={self.n}, k={self.k})",
                empty_set=(
                    "after_hits" if self.statistic == "proportion" else "after_hits,after_misses"
                ),
            )
        if self.weight_kind == "probability" and not isinstance(self.p, Fraction):
            num = math.fsum(float(v) * float(w) for v, w in pairs)
            den = math.fsum(float(w) for _, w in pairs)
            return num / den
        num_exact = sum((v * w for v, w in pairs), Fraction(0))
        den_exact = sum(w for _, w in pairs)
        return num_exact / den_exact

    def moments(self) -> tuple[float, float]:
        """Mean and standard deviation of the statistic over defined sequences."""
        pairs = [(float(v), float(w)) for v, w in self.defined_items()]
        if not pairs:
            raise UndefinedStatisticError(
                f"the {self.statistic} statistic is undefined for every sequence"
            )
        values = np.array([v for v, _ in pairs])
        weights = np.array([w for _, w in pairs])
        weights = weights / weights.sum()
        mean = float(np.dot(values, weights))
        var = float(np.dot((values - mean) ** 2, weights))
        return mean, math.sqrt(max(var, 0.0))

    def proportion_marginal(self) -> CountDistribution:
        """Collapse a difference distribution onto the ``(m0, m1)`` counts after hits."""
        if self.statistic == "proportion":
            return self
        out: dict[tuple[int, ...], Weight] = {}
        for (_, _, m0_1, m1_1), weight in self.entries.items():
            key = (m0_1, m1_1)
            out[key] = out.get(key, 0) + weight
        return CountDistribution(
            entries=MappingProxyType(out),
            n=self.n,
            k=self.k,
            statistic="proportion",
            weight_kind=self.weight_kind,
            p=self.p,
            n1=self.n1,
        )

    def meta(self) -> dict[str, object]:
        meta: dict[str, object] = {
            "n": self.n,
            "k": self.k,
            "statistic": self.statistic,
            "weight_kind": self.weight_kind,
        }
        if self.p is not None:
            meta["p"] = str(self.p) if isinstance(self.p, Fraction) else float(self.p)
        if self.n1 is not None:
            meta["n1"] = self.n1
        return meta

    def to_frame(self) -> pd.DataFrame:
        """One row per key, columns ``key components..., weight``, keys in ascending order."""
        keys = sorted(self.entries)
        frame = pd.DataFrame(keys, columns=list(self.columns))
        weights = [self.entries[key] for key in keys]
        if self.weight_kind == "count":
            frame["weight"] = [int(w) for w in weights]
        elif isinstance(self.p, Fraction):
            frame["weight"] = [str(w) for w in weights]
        else:
            frame["weight"] = np.array(weights, dtype=float)
        return frame

    def to_json(self, precision: int = 15) -> str:
        return render_table(self.to_frame(), fmt="json", meta=self.meta(), precision=precision)


def null_moments(dist: CountDistribution) -> tuple[float, float]:
    """Mean and standard deviation of the statistic under ``dist``, over defined sequences."""
    return dist.moments()


# ----------------------------------------------------------------------------
# Recursion
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class _Transition:
    miss_next: int
    miss_inc: int
    hit_next: int
    hit_inc: int
    min_hits: int = 0
    min_misses: int = 0
    start_only: bool = False


def _proportion_table(k: int) -> list[_Transition]:
    # state l = length of the current run of hits, capped at k
    table = [_Transition(0, 0, l + 1, 0, min_hits=l) for l in range(k)]
    table.append(_Transition(0, _inc(0), k, _inc(1), min_hits=k))
    return table


def _difference_table(k: int) -> list[_Transition]:
    # state 0: no trial yet; 1..k: run of j misses; k+1..2k: run of j hits
    miss1, hit1 = 1, k + 1
    table = [_Transition(miss1, 0, hit1, 0, start_only=True)]
    for j in range(1, k + 1):
        if j < k:
            table.append(_Transition(j + 1, 0, hit1, 0, min_misses=j))
        else:
            table.append(_Transition(k, _inc(0), hit1, _inc(1), min_misses=k))
    for j in range(1, k + 1):
        if j < k:
            table.append(_Transition(miss1, 0, k + j + 1, 0, min_hits=j))
        else:
            table.append(_Transition(miss1, _inc(2), 2 * k, _inc(3), min_hits=k))
    return table


def _accumulate(
    out: dict[int, Weight], source: Mapping[int, Weight], inc: int, factor: Weight | None
) -> None:
    get = out.get
    if factor is None:
        for key, weight in source.items():
            key += inc
            out[key] = get(key, 0) + weight
    else:
        for key, weight in source.items():
            key += inc
            out[key] = get(key, 0) + weight * factor


def _recurse(
    table: list[_Transition],
    n: int,
    p: Weight | None,
    q: Weight | None,
    one: Weight,
    n1: int | None = None,
) -> dict[int, Weight]:
    """Run the layer recursion and return ``D(0, n)`` as packed key -> weight."""
    conditional = n1 is not None
    success = _inc(4) if conditional else 0
    layer: list[dict[int, Weight]] = [{0: one} for _ in table]
    for r in range(1, n + 1):
        prefix = n - r
        states = range(len(table)) if r < n else range(1)
        current: list[dict[int, Weight]] = [{} for _ in table]
        for s in states:
            t = table[s]
            if prefix < t.min_hits + t.min_misses or (t.start_only and prefix > 0):
                continue
            out: dict[int, Weight] = {}
            _accumulate(out, layer[t.miss_next], t.miss_inc, q)
            _accumulate(out, layer[t.hit_next], t.hit_inc + success, p)
            if conditional:
                assert n1 is not None
                lo = n1 - prefix + t.min_misses
                hi = n1 - t.min_hits
                out = {key: w for key, w in out.items() if lo <= key >> _SUCCESS_SLOT <= hi}
            current[s] = out
        layer = current
        if r % 25 == 0 or r == n:
            logger.debug("layer %d/%d: %d keys", r, n, sum(len(d) for d in layer))
    return layer[0]


def _unpack(packed: Mapping[int, Weight], width: int) -> dict[tuple[int, ...], Weight]:
    out: dict[tuple[int, ...], Weight] = {}
    for key, weight in packed.items():
        if weight == 0:
            continue
        unpacked = tuple((key >> (i * _BITS)) & _MASK for i in range(width))
        out[unpacked] = out.get(unpacked, 0) + weight
    return out


def _weights(p: Probability | None) -> tuple[Weight | None, Weight | None, Weight]:
    if p is None:
        return None, None, 1
    if isinstance(p, Fraction):
        return p, 1 - p, Fraction(1)
    return float(p), 1.0 - float(p), 1.0


def _check_probability(p: object, allow_none: bool = True) -> None:
    if p is None and allow_none:
        return
    if isinstance(p, bool) or not isinstance(p, (int, float, Fraction, np.floating)):
        raise ParameterError(f"p must be a probability, got {p!r}")
    if not 0 < p < 1:
        raise ParameterError(f"p must satisfy 0 < p < 1, got {p}")


def _check_integer(name: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    return int(value)


def check_parameters(n: int, k: int, statistic: str = "proportion") -> None:
    """Validate ``(n, k)`` for the given statistic."""
    n = _check_integer("n", n)
    k = _check_integer("k", k)
    if statistic not in STATISTICS:
        raise ParameterError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    if statistic == "proportion":
        if n < 2:
            raise ParameterError(f"n must be at least 2, got {n}")
        if not 1 <= k <= n - 1:
            raise ParameterError(f"k must satisfy 1 <= k <= n-1 (n={n}), got k={k}")
    else:
        if n < 3:
            raise ParameterError(f"n must be at least 3 for the difference, got {n}")
        if not 1 <= k <= n - 2:
            raise ParameterError(f"k must satisfy 1 <= k <= n-2 (n={n}), got k={k}")


def _finish(dist: CountDistribution) -> CountDistribution:
    if not dist.is_normalized():
        raise StreakError(f"distribution for {dist.meta()} failed its normalization check")
    return dist


def build_proportion_distribution(
    n: int, k: int, p: Probability | None = None
) -> CountDistribution:
    """Distribution of ``(m0, m1)``, the outcomes on trials following ``k`` hits.

    With ``p=None`` the weights are sequence counts summing to ``2**n``.
    """
    check_parameters(n, k, "proportion")
    _check_probability(p)
    p_w, q_w, one = _weights(p)
    packed = _recurse(_proportion_table(k), n, p_w, q_w, one)
    return _finish(
        CountDistribution(
            entries=MappingProxyType(_unpack(packed, 2)),
            n=n,
            k=k,
            statistic="proportion",
            weight_kind="count" if p is None else "probability",
            p=p,
        )
    )


def build_difference_distribution(
    n: int, k: int, p: Probability | None = None
) -> CountDistribution:
    """Distribution of ``(m0_0, m1_0, m0_1, m1_1)`` after ``k`` misses and after ``k`` hits."""
    check_parameters(n, k, "difference")
    _check_probability(p)
    p_w, q_w, one = _weights(p)
    packed = _recurse(_difference_table(k), n, p_w, q_w, one)
    return _finish(
        CountDistribution(
            entries=MappingProxyType(_unpack(packed, 4)),
            n=n,
            k=k,
            statistic="difference",
            weight_kind="count" if p is None else "probability",
            p=p,
        )
    )


@lru_cache(maxsize=8)
def build_conditional_distribution(n: int, k: int, n1: int) -> CountDistribution:
    """Distribution of the four-way counts over the ``C(n, n1)`` arrangements of ``n1`` successes.

    Weights are integer sequence counts; every arrangement is equally likely.
    """
    check_parameters(n, k, "difference")
    n1 = _check_integer("n1", n1)
    if not 0 <= n1 <= n:
        raise ParameterError(f"n1 must satisfy 0 <= n1 <= n (n={n}), got {n1}")
    logger.debug("building conditional distribution n=%d k=%d n1=%d", n, k, n1)
    packed = _recurse(_difference_table(k), n, None, None, 1, n1=n1)
    return _finish(
        CountDistribution(
            entries=MappingProxyType(_unpack(packed, 4)),
            n=n,
            k=k,
            statistic="difference",
            weight_kind="count",
            n1=n1,
        )
    )


def conditional_expected_proportion(n: int, k: int, n1: int) -> Fraction:
    """Mean proportion after ``k`` hits over the arrangements of ``n1`` successes that define it."""
    result = build_conditional_distribution(n, k, n1).proportion_marginal().expectation()
    return Fraction(result)


# ----------------------------------------------------------------------------
# First-moment recursions
# ----------------------------------------------------------------------------


def _proportion_moments(n: int, k: int, p: float) -> float:
    """Forward recursion over (run of hits, selected count) carrying P and E[m1; .]."""
    q = 1.0 - p
    prob = np.zeros((k + 1, n + 1))
    mass = np.zeros((k + 1, n + 1))
    prob[0, 0] = 1.0
    for t in range(n):
        w = t + 2  # selected count after this trial is at most t + 1
        new_prob = np.zeros_like(prob)
        new_mass = np.zeros_like(mass)
        new_prob[0, :w] = q * prob[:k, :w].sum(axis=0)
        new_mass[0, :w] = q * mass[:k, :w].sum(axis=0)
        new_prob[1 : k + 1, :w] += p * prob[:k, :w]
        new_mass[1 : k + 1, :w] += p * mass[:k, :w]
        new_prob[0, 1:w] += q * prob[k, : w - 1]
        new_mass[0, 1:w] += q * mass[k, : w - 1]
        new_prob[k, 1:w] += p * prob[k, : w - 1]
        new_mass[k, 1:w] += p * (mass[k, : w - 1] + prob[k, : w - 1])
        prob, mass = new_prob, new_mass
    selected = np.arange(1, n + 1)
    den = prob[:, 1:].sum()
    if den <= 0:
        raise UndefinedStatisticError(
            "no sequence selects a trial after k hits", empty_set="after_hits"
        )
    return float((mass[:, 1:].sum(axis=0) / selected).sum() / den)


def _difference_moments(n: int, k: int, p: float) -> float:
    """Forward recursion over (streak state, M0, M1) carrying P, E[m1_0; .] and E[m1_1; .]."""
    q = 1.0 - p
    size = 2 * k + 1
    miss_k, hit1, hit_k = k, k + 1, 2 * k
    prob = np.zeros((size, n + 1, n + 1))
    mass0 = np.zeros_like(prob)
    mass1 = np.zeros_like(prob)
    prob[0, 0, 0] = 1.0
    for _ in range(n):
        new = [np.zeros_like(prob) for _ in range(3)]
        cur = (prob, mass0, mass1)
        for arr, src in zip(new, cur):
            # start
            arr[1] += q * src[0]
            arr[hit1] += p * src[0]
            # runs of misses shorter than k
            arr[2 : k + 1] += q * src[1:k]
            arr[hit1] += p * src[1:k].sum(axis=0)
            # runs of hits shorter than k
            arr[k + 2 : 2 * k + 1] += p * src[k + 1 : 2 * k]
            arr[1] += q * src[k + 1 : 2 * k].sum(axis=0)
            # k misses: this trial is selected, M0 + 1
            arr[miss_k, 1:, :] += q * src[miss_k, :-1, :]
            arr[hit1, 1:, :] += p * src[miss_k, :-1, :]
            # k hits: this trial is selected, M1 + 1
            arr[hit_k, :, 1:] += p * src[hit_k, :, :-1]
            arr[1, :, 1:] += q * src[hit_k, :, :-1]
        new[1][hit1, 1:, :] += p * prob[miss_k, :-1, :]
        new[2][hit_k, :, 1:] += p * prob[hit_k, :, :-1]
        prob, mass0, mass1 = new
    m0 = np.arange(1, n + 1)[:, np.newaxis]
    m1 = np.arange(1, n + 1)[np.newaxis, :]
    den = prob[:, 1:, 1:].sum()
    if den <= 0:
        raise UndefinedStatisticError(
            f"no sequence of length {n} has trials after {k} hits and after {k} misses",
            empty_set="after_hits,after_misses",
        )
    num = (mass1[:, 1:, 1:].sum(axis=0) / m1 - mass0[:, 1:, 1:].sum(axis=0) / m0).sum()
    return float(num / den)


# ----------------------------------------------------------------------------
# Expectations and curves
# ----------------------------------------------------------------------------


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ParameterError(f"method must be one of {METHODS}, got {method!r}")


def expected_proportion(n: int, k: int, p: Probability, method: Method = "moments") -> Probability:
    """Expected success proportion after ``k`` hits, given at least one such trial.

    A Fraction ``p`` is evaluated exactly on the full distribution and returns a Fraction.
    """
    check_parameters(n, k, "proportion")
    _check_probability(p, allow_none=False)
    _check_method(method)
    if isinstance(p, Fraction) or method == "dictionary":
        return build_proportion_distribution(n, k, p).expectation()
    return _proportion_moments(n, k, float(p))


def expected_difference(n: int, k: int, p: Probability, method: Method = "moments") -> Probability:
    """Expected proportion after ``k`` hits minus proportion after ``k`` misses, where defined."""
    check_parameters(n, k, "difference")
    _check_probability(p, allow_none=False)
    _check_method(method)
    if isinstance(p, Fraction) or method == "dictionary":
        return build_difference_distribution(n, k, p).expectation()
    return _difference_moments(n, k, float(p))


def min_trials(k: int, statistic: Statistic) -> int:
    """Shortest sequence for which the statistic can be defined."""
    return k + 1 if statistic == "proportion" else 2 * k + 1


def curve_points(
    n_range: Iterable[int], k_set: Iterable[int], p_set: Iterable[Probability]
) -> list[tuple[int, int, Probability]]:
    """Every grid point ``(n, k, p)``, ordered by ``k``, then ``p``, then ``n``."""
    ns = list(n_range)
    ks = list(k_set)
    ps = list(p_set)
    for k in ks:
        _check_integer("k", k)
        if k < 1:
            raise ParameterError(f"k must be at least 1, got {k}")
    for p in ps:
        _check_probability(p, allow_none=False)
    return [(n, k, p) for k in ks for p in ps for n in ns]


def _curve_point(
    point: tuple[int, int, Probability], statistic: Statistic, method: Method
) -> float:
    n, k, p = point
    if n < min_trials(k, statistic):
        return math.nan
    func = expected_proportion if statistic == "proportion" else expected_difference
    return float(func(n, k, p, method=method))


def bias_curve(
    n_range: Iterable[int],
    k_set: Iterable[int],
    p_set: Iterable[Probability],
    statistic: Statistic = "proportion",
    method: Method = "moments",
    workers: int | None = None,
) -> pd.DataFrame:
    """Expected statistic on a grid, one row per ``(n, k, p)``.

    ``bias`` is ``expected - p`` for the proportion and ``expected`` for the
    difference (whose unbiased value is 0). Lengths too short for the statistic
    to exist keep their row with ``defined`` False and NaN values.
    """
    if statistic not in STATISTICS:
        raise ParameterError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    points = curve_points(n_range, k_set, p_set)
    task = partial(_curve_point, statistic=statistic, method=method)
    values = parallel_map(task, points, workers)
    frame = pd.DataFrame(points, columns=["n", "k", "p"])
    frame["p"] = frame["p"].astype(float)
    frame["statistic"] = statistic
    frame["expected"] = values
    frame["bias"] = frame["expected"] - (frame["p"] if statistic == "proportion" else 0.0)
    frame["defined"] = frame["expected"].notna()
    undefined = int((~frame["defined"]).sum())
    if undefined:
        logger.info(
            "%d of %d grid points are too short for the %s", undefined, len(frame), statistic
        )
    return frame


# ----------------------------------------------------------------------------
# Histograms
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class HistogramSpec:
    """Binning of statistic values; values are grouped to ``value_rounding_digits`` first."""

    bin_width: float
    value_rounding_digits: int = 6
    grouping: Literal["round", "truncate"] = "round"

    def __post_init__(self) -> None:
        if not self.bin_width > 0:
            raise ParameterError(f"bin_width must be positive, got {self.bin_width}")
        if self.value_rounding_digits < 1:
            raise ParameterError(
                f"value_rounding_digits must be at least 1, got {self.value_rounding_digits}"
            )
        if self.grouping not in ("round", "truncate"):
            raise ParameterError(f"grouping must be 'round' or 'truncate', got {self.grouping!r}")


def group_value(value: Fraction, digits: int, grouping: str = "round") -> Fraction:
    """Round half-to-even (or truncate toward zero) to ``digits`` decimals, exactly."""
    if grouping == "truncate":
        scale = 10**digits
        return Fraction(math.trunc(value * scale), scale)
    return Fraction(round(value, digits))


def support_size(dist: CountDistribution, digits: int = 6, grouping: str = "round") -> int:
    """Number of distinct statistic values after grouping."""
    return len({group_value(v, digits, grouping) for v in dist.statistic_distribution()})


def distribution_to_histogram(
    dist: CountDistribution, spec: HistogramSpec
) -> list[tuple[float, float]]:
    """``(bin lower edge, mass)`` pairs, ascending; masses sum to 1 over defined sequences.

    Bins are closed on the right: a bin with lower edge ``e`` holds values in
    ``(e, e + bin_width]``, so a value of exactly 0 counts toward ``(-bin_width, 0]``.
    """
    width = Fraction(str(spec.bin_width))
    bins: dict[Fraction, Weight] = {}
    for value, weight in dist.statistic_distribution().items():
        grouped = group_value(value, spec.value_rounding_digits, spec.grouping)
        edge = (math.ceil(grouped / width) - 1) * width
        bins[edge] = bins.get(edge, 0) + weight
    total = sum(bins.values())
    if not bins:
        return []
    return [(float(edge), float(mass / total)) for edge, mass in sorted(bins.items())]

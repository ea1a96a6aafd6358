"""Closed forms for ``k = 1`` and the sampling-without-replacement benchmark."""

from __future__ import annotations

import math
from collections.abc import Iterable
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy import stats

from .errors import ParameterError, UndefinedStatisticError
from .exactdist import Probability, expected_proportion


def _check_p(p: Probability) -> None:
    if isinstance(p, bool) or not 0 < p < 1:
        raise ParameterError(f"p must satisfy 0 < p < 1, got {p}")


def conditional_expected_proportion_k1(n: int, n1: int) -> Fraction:
    """Mean proportion of successes after a success, over arrangements of ``n1`` successes.

    Conditions on the event that some success is followed by a trial; the
    mean is ``(n1 - 1) / (n - 1)``.
    """
    if n <= 1:
        raise ParameterError(f"n must be greater than 1, got {n}")
    if not 0 <= n1 <= n:
        raise ParameterError(f"n1 must satisfy 0 <= n1 <= n (n={n}), got {n1}")
    if n1 == 0:
        raise UndefinedStatisticError(
            "no success to condition on when n1=0", empty_set="after_hits"
        )
    return Fraction(n1 - 1, n - 1)


def expected_proportion_k1(n: int, p: Probability) -> Probability:
    """Expected proportion of successes after a success for ``n`` Bernoulli(``p``) trials.

    Exact when ``p`` is a Fraction.
    """
    if n <= 2:
        raise ParameterError(f"n must be greater than 2, got {n}")
    _check_p(p)
    q = 1 - p
    ratio = Fraction(n, n - 1) if isinstance(p, Fraction) else n / (n - 1)
    return (p - (1 - q**n) / n) * ratio / (1 - q ** (n - 1))


def expected_difference_k1(n: int) -> Fraction:
    """Expected difference after one hit versus one miss: ``-1/(n-1)`` for every ``p``."""
    if n <= 2:
        raise ParameterError(f"n must be greater than 2, got {n}")
    return Fraction(-1, n - 1)


def swor_conditional(n: int, k: int, n1: int) -> Fraction:
    """Success rate left after removing ``k`` successes from ``n1`` out of ``n``."""
    if not n > k >= 1:
        raise ParameterError(f"need n > k >= 1, got n={n}, k={k}")
    if not k <= n1 <= n:
        raise ParameterError(f"n1 must satisfy k <= n1 <= n, got {n1}")
    return Fraction(n1 - k, n - k)


def swor_expected(n: int, k: int, p: Probability) -> Probability:
    """``E[(N1 - k)/(n - k) | N1 >= k]`` with ``N1 ~ Binomial(n, p)``.

    Only the event ``N1 >= k`` is conditioned on, which differs from the
    event that some trial follows ``k`` hits.
    """
    if not n > k >= 1:
        raise ParameterError(f"need n > k >= 1, got n={n}, k={k}")
    _check_p(p)
    if isinstance(p, Fraction):
        q = 1 - p
        pmf = [math.comb(n, j) * p**j * q ** (n - j) for j in range(k, n + 1)]
        num = sum((Fraction(j - k, n - k) * w for j, w in zip(range(k, n + 1), pmf)), Fraction(0))
        return num / sum(pmf)
    support = np.arange(k, n + 1)
    pmf = stats.binom.pmf(support, n, float(p))
    return float(np.dot((support - k) / (n - k), pmf) / stats.binom.sf(k - 1, n, float(p)))


def swor_curve(n_range: Iterable[int], k_set: Iterable[int], p: float = 0.5) -> pd.DataFrame:
    """Rows ``(n, k, p, swor, expected_proportion)`` with the bias of each relative to ``p``."""
    ns = list(n_range)
    rows = []
    for k in k_set:
        for n in ns:
            if n <= k:
                continue
            swor = swor_expected(n, k, p)
            streak = expected_proportion(n, k, p)
            rows.append((n, k, float(p), float(swor), float(streak)))
    frame = pd.DataFrame(rows, columns=["n", "k", "p", "swor", "expected_proportion"])
    frame["swor_bias"] = frame["swor"] - frame["p"]
    frame["streak_bias"] = frame["expected_proportion"] - frame["p"]
    return frame

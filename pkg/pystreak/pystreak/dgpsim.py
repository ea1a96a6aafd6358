"""Simulated hot-hand data-generating processes and the bias of the difference statistic.

Four processes are available:

* ``bernoulli``: i.i.d. trials with success probability ``p``;
* ``regime_shift``: a hidden two-state Markov chain (normal/hot) started from its
  stationary distribution; the hot state adds ``d`` to the success probability;
* ``positive_feedback``: ``+d/2`` after ``k`` straight hits and ``-d/2`` after
  ``k`` straight misses;
* ``positive_feedback_hits``: ``+d`` after ``k`` straight hits only.

Streaks are "at least ``k``": a run of five hits keeps the shifted probability
active. Feedback processes start with no active streak.

Replications are generated in fixed-size chunks, chunk ``i`` drawing from
``numpy.random.default_rng([seed, i])``, so a run is reproducible from its
seed regardless of worker count.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import partial
from typing import Literal

import numpy as np
import numpy.typing as npt
import pandas as pd

from .config import get_settings
from .errors import DegenerateError, ParameterError
from .exactdist import expected_difference
from .parallel import chunk_sizes, parallel_map
from .seqcore import BinarySequence, batch_counts, batch_differences, check_streak_length

logger = logging.getLogger(__name__)

Variant = Literal["bernoulli", "regime_shift", "positive_feedback", "positive_feedback_hits"]
VARIANTS: tuple[str, ...] = (
    "bernoulli",
    "regime_shift",
    "positive_feedback",
    "positive_feedback_hits",
)

_EDGE = 1e-6


def _open_unit(name: str, value: float) -> None:
    if not 0 < value < 1:
        raise ParameterError(f"{name} must lie in (0, 1), got {value:.6g}")


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of one data-generating process.

    ``p`` is the Bernoulli probability, the normal-state probability
    ``p_n`` of the regime shift, or the base probability of a feedback
    process.
    """

    variant: Variant
    p: float
    d: float = 0.0
    pi_h: float | None = None
    q_hh: float | None = None
    k: int = 3

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ParameterError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "bernoulli":
            _open_unit("p", self.p)
            if self.d != 0:
                raise ParameterError("a Bernoulli process has no shift d")
        elif self.variant == "regime_shift":
            if self.pi_h is None or self.q_hh is None:
                raise ParameterError("regime_shift needs pi_h and q_hh")
            _open_unit("p_n", self.p)
            _open_unit("p_h = p_n + d", self.p + self.d)
            _open_unit("pi_h", self.pi_h)
            _open_unit("q_hh", self.q_hh)
            if self.q_nh > 1:
                raise ParameterError(
                    f"q_nh = pi_h(1 - q_hh)/(1 - pi_h) must be at most 1, got {self.q_nh:.6g}"
                )
        else:
            if self.k < 1:
                raise ParameterError(f"k must be at least 1, got {self.k}")
            _open_unit("p_base", self.p)
            _open_unit("p_base + shift after hits", self.p + self.up)
            _open_unit("p_base - shift after misses", self.p - self.down)

    @classmethod
    def bernoulli(cls, p: float) -> DgpSpec:
        return cls("bernoulli", p)

    @classmethod
    def regime_shift(cls, p_n: float, d: float, pi_h: float, q_hh: float) -> DgpSpec:
        return cls("regime_shift", p_n, d, pi_h=pi_h, q_hh=q_hh)

    @classmethod
    def positive_feedback(cls, p_base: float, d: float, k: int = 3) -> DgpSpec:
        return cls("positive_feedback", p_base, d, k=k)

    @classmethod
    def positive_feedback_hits(cls, p_base: float, d: float, k: int = 3) -> DgpSpec:
        return cls("positive_feedback_hits", p_base, d, k=k)

    @property
    def true_d(self) -> float:
        return self.d

    @property
    def p_h(self) -> float:
        return self.p + self.d

    @property
    def q_hn(self) -> float:
        assert self.q_hh is not None
        return 1.0 - self.q_hh

    @property
    def q_nh(self) -> float:
        assert self.pi_h is not None and self.q_hh is not None
        return self.pi_h * (1.0 - self.q_hh) / (1.0 - self.pi_h)

    @property
    def up(self) -> float:
        return self.d / 2 if self.variant == "positive_feedback" else self.d

    @property
    def down(self) -> float:
        return self.d / 2 if self.variant == "positive_feedback" else 0.0

    def expected_rate(self) -> float | None:
        """Long-run success rate where it has a closed form (None for feedback processes)."""
        if self.variant == "bernoulli":
            return self.p
        if self.variant == "regime_shift":
            assert self.pi_h is not None
            return self.p + self.pi_h * self.d
        return None


@dataclass(frozen=True)
class BiasEstimate:
    """Mean difference statistic over replications, and its bias relative to the true shift."""

    mean_diff: float
    true_d: float
    bias: float
    mc_se: float
    replications: int
    defined_count: int


@dataclass(frozen=True)
class BiasGap:
    """Bias of one process minus the bias of a reference, on common random numbers.

    ``paired_count`` counts the replications where the difference is defined
    under both processes; ``se`` is the standard error of the paired mean.
    """

    gap: float
    se: float
    replications: int
    paired_count: int


def _rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def simulate_batch(
    spec: DgpSpec,
    n: int,
    size: int,
    rng: np.random.Generator | int | None = None,
    return_states: bool = False,
) -> npt.NDArray[np.uint8] | tuple[npt.NDArray[np.uint8], npt.NDArray[np.bool_]]:
    """Simulate ``size`` sequences of ``n`` trials as a ``(size, n)`` 0/1 array.

    With ``return_states`` the hidden hot-state indicator is returned as well
    (all False except for the regime shift).
    """
    if n < 1 or size < 1:
        raise ParameterError(f"n and size must be positive, got n={n}, size={size}")
    gen = _rng(rng)
    u = gen.random((size, n))
    states = np.zeros((size, n), dtype=bool)
    if spec.variant == "bernoulli":
        x = (u < spec.p).astype(np.uint8)
    elif spec.variant == "regime_shift":
        assert spec.pi_h is not None and spec.q_hh is not None
        v = gen.random((size, n))
        hot = gen.random(size) < spec.pi_h
        x = np.empty((size, n), dtype=np.uint8)
        for t in range(n):
            states[:, t] = hot
            x[:, t] = u[:, t] < np.where(hot, spec.p_h, spec.p)
            hot = np.where(hot, v[:, t] < spec.q_hh, v[:, t] < spec.q_nh)
    else:
        x = np.empty((size, n), dtype=np.uint8)
        hits = np.zeros(size, dtype=np.int64)
        misses = np.zeros(size, dtype=np.int64)
        for t in range(n):
            prob = (
                spec.p
                + np.where(hits >= spec.k, spec.up, 0.0)
                - np.where(misses >= spec.k, spec.down, 0.0)
            )
            outcome = u[:, t] < prob
            x[:, t] = outcome
            hits = np.where(outcome, hits + 1, 0)
            misses = np.where(outcome, 0, misses + 1)
    if return_states:
        return x, states
    return x


def simulate_sequence(
    spec: DgpSpec, n: int, rng: np.random.Generator | int | None = None
) -> BinarySequence:
    x = simulate_batch(spec, n, 1, rng)
    assert isinstance(x, np.ndarray)
    return BinarySequence(tuple(int(v) for v in x[0]))


def _bias_chunk(
    index: int, spec: DgpSpec, n: int, k: int, seed: int, sizes: list[int]
) -> npt.NDArray[np.float64]:
    x = simulate_batch(spec, n, sizes[index], np.random.default_rng([seed, index]))
    assert isinstance(x, np.ndarray)
    diffs = batch_differences(batch_counts(x, k))
    return diffs[~np.isnan(diffs)]


def _gap_chunk(
    index: int, spec: DgpSpec, reference: DgpSpec, n: int, k: int, seed: int, sizes: list[int]
) -> npt.NDArray[np.float64]:
    diffs = []
    for process in (spec, reference):
        x = simulate_batch(process, n, sizes[index], np.random.default_rng([seed, index]))
        assert isinstance(x, np.ndarray)
        diffs.append(batch_differences(batch_counts(x, k)))
    paired = diffs[0] - diffs[1]
    return paired[~np.isnan(paired)]


def bias_gap(
    spec: DgpSpec,
    reference: DgpSpec,
    n: int,
    k: int,
    replications: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> BiasGap:
    """Paired estimate of ``bias(spec) - bias(reference)``.

    Both processes read the same uniform draws for the trial outcomes, which
    pairs replication ``i`` of one with replication ``i`` of the other.
    """
    check_streak_length(n, k)
    if replications < 2:
        raise ParameterError(f"replications must be at least 2, got {replications}")
    sizes = chunk_sizes(replications, get_settings().chunk_size)
    task = partial(_gap_chunk, spec=spec, reference=reference, n=n, k=k, seed=seed, sizes=sizes)
    paired = np.concatenate(parallel_map(task, range(len(sizes)), workers))
    if paired.size < 2:
        raise DegenerateError(
            f"the difference is defined under both processes in {paired.size} of "
            f"{replications} replications"
        )
    gap = float(paired.mean()) - (spec.true_d - reference.true_d)
    return BiasGap(
        gap=gap,
        se=float(paired.std(ddof=1) / math.sqrt(paired.size)),
        replications=replications,
        paired_count=int(paired.size),
    )


def estimate_bias(
    spec: DgpSpec,
    n: int,
    k: int,
    replications: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> BiasEstimate:
    """Mean difference statistic over simulated sequences minus the true shift ``d``.

    Replications with an undefined statistic are dropped and counted.
    """
    check_streak_length(n, k)
    if replications < 1:
        raise ParameterError(f"replications must be at least 1, got {replications}")
    sizes = chunk_sizes(replications, get_settings().chunk_size)
    task = partial(_bias_chunk, spec=spec, n=n, k=k, seed=seed, sizes=sizes)
    diffs = np.concatenate(parallel_map(task, range(len(sizes)), workers))
    if diffs.size == 0:
        raise DegenerateError(f"the difference is undefined in all {replications} replications")
    mean = float(diffs.mean())
    se = float(diffs.std(ddof=1) / math.sqrt(diffs.size)) if diffs.size > 1 else 0.0
    logger.debug(
        "%s n=%d k=%d: mean diff %.6f over %d defined", spec.variant, n, k, mean, diffs.size
    )
    return BiasEstimate(
        mean_diff=mean,
        true_d=spec.true_d,
        bias=mean - spec.true_d,
        mc_se=se,
        replications=replications,
        defined_count=int(diffs.size),
    )


def long_run_rate(spec: DgpSpec, n: int, replications: int = 2000, seed: int = 0) -> float:
    """Simulated overall success rate of ``n``-trial sequences."""
    x = simulate_batch(spec, n, replications, np.random.default_rng([seed, 0]))
    assert isinstance(x, np.ndarray)
    return float(x.mean())


def _feedback_bounds(variant: str, d: float) -> tuple[float, float]:
    if variant == "positive_feedback":
        return abs(d) / 2 + _EDGE, 1 - abs(d) / 2 - _EDGE
    return max(0.0, -d) + _EDGE, min(1.0, 1.0 - d) - _EDGE


def calibrate_base_rate(
    variant: Variant,
    fg: float,
    d: float,
    n: int = 100,
    k: int = 3,
    replications: int = 2000,
    seed: int = 0,
    tolerance: float | None = None,
) -> float:
    """Base probability of a feedback process whose simulated long-run rate matches ``fg``.

    Bisection on common random numbers; stops once the simulated rate is
    within ``tolerance`` of ``fg``.
    """
    if variant not in ("positive_feedback", "positive_feedback_hits"):
        raise ParameterError(f"only feedback processes need calibration, got {variant!r}")
    _open_unit("fg", fg)
    tol = get_settings().calibration_tolerance if tolerance is None else tolerance
    lo, hi = _feedback_bounds(variant, d)
    if lo >= hi:
        raise ParameterError(f"no base probability keeps shifted probabilities in (0, 1) for d={d}")

    def rate(base: float) -> float:
        return long_run_rate(DgpSpec(variant, base, d, k=k), n, replications, seed)

    if not rate(lo) - tol <= fg <= rate(hi) + tol:
        raise ParameterError(f"fg={fg} is not attainable by {variant} with d={d}")
    mid = (lo + hi) / 2
    for _ in range(60):
        mid = (lo + hi) / 2
        current = rate(mid)
        if abs(current - fg) <= tol:
            break
        if current < fg:
            lo = mid
        else:
            hi = mid
    logger.debug("calibrated %s fg=%.3f d=%.3f: base %.6f", variant, fg, d, mid)
    return mid


def _surface_point(
    point: tuple[float, float],
    variant: Variant,
    n: int,
    k: int,
    replications: int,
    seed: int,
    pi_h_grid: Sequence[float],
    q_hh_grid: Sequence[float],
    calibration_replications: int,
) -> dict[str, float | int | str]:
    fg, d = point
    if variant == "regime_shift":
        estimates = [
            estimate_bias(
                DgpSpec.regime_shift(fg - pi_h * d, d, pi_h, q_hh),
                n,
                k,
                replications,
                seed,
                workers=1,
            )
            for pi_h in pi_h_grid
            for q_hh in q_hh_grid
        ]
    else:
        if variant == "bernoulli":
            spec = DgpSpec.bernoulli(fg)
        else:
            base = calibrate_base_rate(variant, fg, d, n, k, calibration_replications, seed)
            spec = DgpSpec(variant, base, d, k=k)
        estimates = [estimate_bias(spec, n, k, replications, seed, workers=1)]
    count = len(estimates)
    return {
        "variant": variant,
        "fg": fg,
        "d": d,
        "mean_diff": sum(e.mean_diff for e in estimates) / count,
        "bias": sum(e.bias for e in estimates) / count,
        "mc_se": math.sqrt(sum(e.mc_se**2 for e in estimates)) / count,
        "bernoulli_bias": float(expected_difference(n, k, fg)),
        "replications": sum(e.replications for e in estimates),
        "defined": sum(e.defined_count for e in estimates),
    }


def bias_surface(
    variant: Variant,
    fg_grid: Iterable[float],
    d_set: Iterable[float],
    n: int = 100,
    k: int = 3,
    replications: int = 10_000,
    seed: int = 0,
    pi_h_grid: Sequence[float] | None = None,
    q_hh_grid: Sequence[float] | None = None,
    calibration_replications: int = 2000,
    workers: int | None = None,
) -> pd.DataFrame:
    """Bias of the difference statistic over a grid of expected success rates and shifts.

    Regime-shift points average over the ``pi_h x q_hh`` nuisance grid with
    ``p_n = fg - pi_h * d``; feedback points calibrate the base probability
    so the long-run rate equals ``fg``. The Bernoulli process has no shift,
    so its rows use ``d = 0``. ``bernoulli_bias`` is the exact Bernoulli
    expectation at the same rate.
    """
    if variant not in VARIANTS:
        raise ParameterError(f"variant must be one of {VARIANTS}, got {variant!r}")
    settings = get_settings()
    fgs = list(fg_grid)
    ds = [0.0] if variant == "bernoulli" else list(d_set)
    points = [(fg, d) for d in ds for fg in fgs]
    task = partial(
        _surface_point,
        variant=variant,
        n=n,
        k=k,
        replications=replications,
        seed=seed,
        pi_h_grid=tuple(settings.pi_h_grid if pi_h_grid is None else pi_h_grid),
        q_hh_grid=tuple(settings.q_hh_grid if q_hh_grid is None else q_hh_grid),
        calibration_replications=calibration_replications,
    )
    return pd.DataFrame(parallel_map(task, points, workers))

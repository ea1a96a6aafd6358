"""Command-line interface: every computation writes one table to a file or standard output.

Exit status is 0 on success, 2 for usage errors, and the ``exit_code`` of the
:class:`~pystreak.errors.StreakError` subclass otherwise.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from fractions import Fraction
from typing import Any

import numpy as np
import pandas as pd

from . import __version__
from .closedform import swor_curve
from .dgpsim import VARIANTS, DgpSpec, bias_surface, calibrate_base_rate, estimate_bias
from .errors import ParameterError, StreakError
from .exactdist import (
    METHODS,
    STATISTICS,
    HistogramSpec,
    Probability,
    bias_curve,
    build_conditional_distribution,
    build_difference_distribution,
    build_proportion_distribution,
    conditional_expected_proportion,
    distribution_to_histogram,
    expected_difference,
    expected_proportion,
    support_size,
)
from .io import FORMATS, write_table
from .logs import setup_logging, verbosity_to_level
from .oracle import enumerate_sequences, lottery_ev, reversal_predictor_rate, tabulate
from .permtest import (
    ALTERNATIVES,
    critical_values,
    exact_test,
    family_size,
    mc_test,
    pooled_stratified_test,
)
from .reanalysis import (
    CONVENTIONS,
    PlayerSummary,
    load_gvt,
    player_table,
    pooled_simple,
    read_sequences,
    read_summaries,
    study_tests,
    summarize_sequence,
)
from .seqcore import BinarySequence, estimates, pooled_estimates

logger = logging.getLogger(__name__)

Table = tuple[pd.DataFrame, dict[str, Any]]


def _probability(text: str) -> Probability:
    """``0.5`` parses as a float, ``1/2`` as an exact Fraction."""
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}") from None


def _number(value: Probability | None) -> float | str | None:
    if isinstance(value, Fraction):
        return str(value)
    return value


def _optional(value: object) -> float:
    return float(value) if value is not None else np.nan  # type: ignore[arg-type]


def _sequences(args: argparse.Namespace) -> list[tuple[str, BinarySequence]]:
    if args.sequence is not None:
        return [("1", BinarySequence.parse(args.sequence))]
    if args.input is None:
        raise ParameterError("give --input or --sequence")
    return read_sequences(args.input)


# ----------------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------------


def _cmd_expect(args: argparse.Namespace) -> Table:
    value: Probability
    if args.conditional_n1 is not None:
        if args.stat != "proportion":
            raise ParameterError("--conditional-n1 applies to --stat proportion only")
        value = conditional_expected_proportion(args.n, args.k, args.conditional_n1)
    elif args.stat == "proportion":
        value = expected_proportion(args.n, args.k, args.p, method=args.method)
    else:
        value = expected_difference(args.n, args.k, args.p, method=args.method)
    row = {
        "n": args.n,
        "k": args.k,
        "p": float(args.p) if args.conditional_n1 is None else np.nan,
        "n1": args.conditional_n1 if args.conditional_n1 is not None else np.nan,
        "statistic": args.stat,
        "expected": float(value),
        "exact": str(value) if isinstance(value, Fraction) else "",
    }
    meta = {
        "n": args.n,
        "k": args.k,
        "p": _number(args.p),
        "statistic": args.stat,
        "method": args.method,
    }
    return pd.DataFrame([row]), meta


def _cmd_curve(args: argparse.Namespace) -> Table:
    ns = range(args.n_min, args.n_max + 1, args.n_step)
    frame = bias_curve(
        ns, args.k, args.p, statistic=args.stat, method=args.method, workers=args.workers
    )
    meta = {
        "n_min": args.n_min,
        "n_max": args.n_max,
        "k": args.k,
        "p": [_number(p) for p in args.p],
    }
    return frame, meta


def _cmd_dist(args: argparse.Namespace) -> Table:
    if args.conditional_n1 is not None:
        dist = build_conditional_distribution(args.n, args.k, args.conditional_n1)
        if args.stat == "proportion":
            dist = dist.proportion_marginal()
    elif args.stat == "proportion":
        dist = build_proportion_distribution(args.n, args.k, args.p)
    else:
        dist = build_difference_distribution(args.n, args.k, args.p)
    meta = dist.meta()
    meta["support_size"] = support_size(dist, args.digits, args.grouping)
    if args.hist_bin is None:
        return dist.to_frame(), meta
    spec = HistogramSpec(args.hist_bin, args.digits, args.grouping)
    frame = pd.DataFrame(distribution_to_histogram(dist, spec), columns=["bin", "mass"])
    meta["bin_width"] = args.hist_bin
    return frame, meta


def _cmd_estimate(args: argparse.Namespace) -> Table:
    sequences = _sequences(args)
    rows = []
    named = [(player, estimates(seq, args.k), seq) for player, seq in sequences]
    if args.pooled:
        named.append(("pooled", pooled_estimates([s for _, s in sequences], args.k), None))
    for player, est, seq in named:
        rows.append(
            {
                "player": player,
                "n": seq.n if seq is not None else sum(s.n for _, s in sequences),
                "m0_0": est.counts.m0_0,
                "m1_0": est.counts.m1_0,
                "m0_1": est.counts.m0_1,
                "m1_1": est.counts.m1_1,
                "p_after_hits": _optional(est.p_after_hits),
                "q_after_misses": _optional(est.q_after_misses),
                "difference": _optional(est.difference),
            }
        )
    return pd.DataFrame(rows), {"k": args.k, "sequences": len(sequences)}


def _cmd_permtest(args: argparse.Namespace) -> Table:
    if args.critical_values:
        if args.n is None:
            raise ParameterError("--critical-values needs --n")
        family = critical_values(args.n, args.k, alpha=args.alpha, workers=args.workers)
        frame = pd.DataFrame(
            [
                {
                    "n1": e.n1,
                    "critical_value": _optional(e.value),
                    "tail": float(e.tail),
                    "rejecting": e.rejecting,
                    "defined": e.defined,
                    "arrangements": e.arrangements,
                }
                for e in family.entries.values()
            ]
        )
        size = float(family_size(family, 0.5))
        meta = {"n": args.n, "k": args.k, "alpha": args.alpha, "size": size}
        return frame, meta

    sequences = _sequences(args)
    if args.pooled:
        results = [
            (
                "pooled",
                pooled_stratified_test(
                    [s for _, s in sequences],
                    args.k,
                    replications=args.reps,
                    seed=args.seed,
                    alternative=args.alternative,
                    ids=[p for p, _ in sequences],
                    workers=args.workers,
                ),
            )
        ]
    elif args.method == "exact":
        results = [(p, exact_test(s, args.k, alternative=args.alternative)) for p, s in sequences]
    else:
        results = [
            (p, mc_test(s, args.k, args.reps, args.seed, args.alternative, args.workers))
            for p, s in sequences
        ]
    frame = pd.DataFrame(
        [
            {
                "player": player,
                "observed": r.observed_statistic,
                "p_value": r.p_value,
                "method": r.method,
                "alternative": r.alternative,
                "n": r.n,
                "n1": r.n1,
                "replications": r.replications if r.replications is not None else np.nan,
                "discarded": r.discarded,
                "players": r.players,
                "excluded": ";".join(r.excluded),
            }
            for player, r in results
        ]
    )
    meta = {"k": args.k, "method": "pooled" if args.pooled else args.method, "seed": args.seed}
    return frame, meta


def _dgp_spec(args: argparse.Namespace) -> DgpSpec:
    if args.dgp == "bernoulli":
        return DgpSpec("bernoulli", args.fg, args.d)
    if args.dgp == "regime_shift":
        return DgpSpec.regime_shift(args.fg - args.pi_h * args.d, args.d, args.pi_h, args.q_hh)
    base = calibrate_base_rate(args.dgp, args.fg, args.d, args.trials, args.k, seed=args.seed)
    return DgpSpec(args.dgp, base, args.d, k=args.k)


def _cmd_simulate(args: argparse.Namespace) -> Table:
    meta = {
        "dgp": args.dgp,
        "n": args.trials,
        "k": args.k,
        "replications": args.reps,
        "seed": args.seed,
    }
    if args.surface:
        frame = bias_surface(
            args.dgp,
            args.fg_grid,
            args.d_set,
            n=args.trials,
            k=args.k,
            replications=args.reps,
            seed=args.seed,
            workers=args.workers,
        )
        return frame, meta
    spec = _dgp_spec(args)
    est = estimate_bias(spec, args.trials, args.k, args.reps, args.seed, args.workers)
    row = {
        "dgp": args.dgp,
        "fg": args.fg,
        "d": est.true_d,
        "p": spec.p,
        "mean_diff": est.mean_diff,
        "bias": est.bias,
        "mc_se": est.mc_se,
        "replications": est.replications,
        "defined": est.defined_count,
    }
    return pd.DataFrame([row]), meta


def _cmd_reanalyze(args: argparse.Namespace) -> Table:
    summaries: list[PlayerSummary]
    if args.gvt:
        summaries = load_gvt()
        source = "gvt"
    elif args.summaries is not None:
        summaries = read_summaries(args.summaries, k=args.k)
        source = str(args.summaries)
    else:
        summaries = [summarize_sequence(s, args.k, player=p) for p, s in read_sequences(args.input)]
        source = str(args.input)
    meta = {"source": source, "k": args.k, "convention": args.convention, "report": args.report}
    if args.report == "players":
        return player_table(summaries, args.k, args.convention), meta
    if args.report == "pooled":
        pooled = pooled_simple(summaries, args.k)
        row = {
            "estimate": pooled.estimate,
            "se": pooled.se,
            "hits_after_hits": pooled.hits_after_hits,
            "shots_after_hits": pooled.shots_after_hits,
            "hits_after_misses": pooled.hits_after_misses,
            "shots_after_misses": pooled.shots_after_misses,
            "category_shots": pooled.category_shots,
            "total_shots": pooled.total_shots,
            "ambiguous": ";".join(pooled.ambiguous),
        }
        return pd.DataFrame([row]), meta
    result = study_tests(summaries, args.k, args.convention)
    meta["excluded"] = list(result.excluded)
    return result.to_frame(), meta


def _cmd_oracle(args: argparse.Namespace) -> Table:
    meta: dict[str, Any] = {"n": args.n, "k": args.k}
    if args.lottery:
        lot = lottery_ev(args.n, args.k, price=args.price, win_payout=args.payout)
        row = {
            "ev": lot.ev,
            "price": lot.price,
            "net": lot.net,
            "win_probability": float(lot.win_probability),
            "resolve_probability": float(lot.resolve_probability),
            "wins": lot.wins,
            "losses": lot.losses,
        }
        return pd.DataFrame([row]), meta
    if args.reversal:
        rev = reversal_predictor_rate(args.n, args.k, args.p)
        row = {
            "hit_streak_rate": float(rev.hit_streak_rate),
            "both_streaks_rate": float(rev.both_streaks_rate),
        }
        return pd.DataFrame([row]), meta
    if args.tabulate:
        return tabulate(args.n, args.k), meta
    result = enumerate_sequences(args.n, args.k, args.p, args.stat, args.conditional_n1)
    row = {
        "n": args.n,
        "k": args.k,
        "statistic": args.stat,
        "expectation": _optional(result.expectation),
        "exact": str(result.expectation) if isinstance(result.expectation, Fraction) else "",
        "enumerated": result.enumerated,
        "defined": result.defined,
    }
    return pd.DataFrame([row]), meta


def _cmd_swor(args: argparse.Namespace) -> Table:
    frame = swor_curve(range(args.n_min, args.n_max + 1, args.n_step), args.k, args.p)
    return frame, {"n_min": args.n_min, "n_max": args.n_max, "k": args.k, "p": args.p}


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="log INFO (-v) or DEBUG (-vv)"
    )
    common.add_argument(
        "--workers", type=int, default=None, help="worker processes for grid computations"
    )
    common.add_argument(
        "-o", "--output", default=None, help="output file (default: standard output)"
    )
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--precision", type=int, default=None, help="decimal digits in the output")
    return common


def _input_group(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--input", help="CSV with header player,outcomes")
    group.add_argument("--sequence", help="a single sequence such as 1101 or HHTH")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="pystreak", description="Streak selection bias toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(
        name: str, handler: Callable[[argparse.Namespace], Table], help_text: str
    ) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("expect", _cmd_expect, "expected proportion or difference for one (n, k, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--stat", choices=STATISTICS, default="proportion")
    p.add_argument("--method", choices=METHODS, default="moments")
    p.add_argument("--conditional-n1", type=int, default=None)

    p = add("curve", _cmd_curve, "expected statistic over a grid of sequence lengths")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--p", type=_probability, nargs="+", default=[0.5])
    p.add_argument("--stat", choices=STATISTICS, default="proportion")
    p.add_argument("--method", choices=METHODS, default="moments")

    p = add("dist", _cmd_dist, "full count distribution, or a histogram of the statistic")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=_probability, default=None, help="omit for sequence counts")
    p.add_argument("--stat", choices=STATISTICS, default="proportion")
    p.add_argument("--conditional-n1", type=int, default=None)
    p.add_argument("--hist-bin", type=float, default=None)
    p.add_argument(
        "--digits", type=int, default=6, help="grouping digits for support size and histogram"
    )
    p.add_argument("--grouping", choices=("round", "truncate"), default="round")

    p = add("estimate", _cmd_estimate, "streak statistics of observed sequences")
    _input_group(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--pooled", action="store_true", help="append a row for the pooled counts")

    p = add("permtest", _cmd_permtest, "permutation tests of the difference statistic")
    _input_group(p, required=False)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alternative", choices=ALTERNATIVES, default="greater")
    p.add_argument("--pooled", action="store_true", help="stratified test across all sequences")
    p.add_argument(
        "--critical-values", action="store_true", help="critical value per success count"
    )
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.05)

    p = add(
        "simulate", _cmd_simulate, "bias of the difference statistic under a simulated process"
    )
    p.add_argument("--dgp", choices=VARIANTS, default="bernoulli")
    p.add_argument("--fg", type=float, default=0.5, help="expected overall success rate")
    p.add_argument("--d", type=float, default=0.0, help="probability shift")
    p.add_argument("--pi-h", type=float, default=0.1)
    p.add_argument("--q-hh", type=float, default=0.9)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--surface", action="store_true")
    p.add_argument("--fg-grid", type=float, nargs="+", default=[0.40, 0.45, 0.50, 0.55, 0.60])
    p.add_argument("--d-set", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])

    p = add("reanalyze", _cmd_reanalyze, "bias-adjusted reanalysis of a shooting study")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gvt", action="store_true", help="the embedded 26-player dataset")
    group.add_argument("--input", help="CSV with header player,outcomes")
    group.add_argument("--summaries", help="CSV with header player,group,n,p,ph,mh,pm,mm")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--convention", choices=CONVENTIONS, default="overall")
    p.add_argument("--report", choices=("study", "players", "pooled"), default="study")

    p = add("oracle", _cmd_oracle, "brute-force enumeration of all sequences")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--stat", choices=STATISTICS, default="proportion")
    p.add_argument("--conditional-n1", type=int, default=None)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--lottery", action="store_true")
    mode.add_argument("--reversal", action="store_true")
    mode.add_argument("--tabulate", action="store_true")
    p.add_argument("--price", type=float, default=5.0)
    p.add_argument("--payout", type=float, default=10.0)

    p = add("swor", _cmd_swor, "sampling-without-replacement benchmark against the streak bias")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--p", type=float, default=0.5)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        setup_logging(verbosity_to_level(args.verbose))
        frame, meta = args.handler(args)
        meta = {"command": args.command, **meta}
        write_table(frame, args.output, fmt=args.format, meta=meta, precision=args.precision)
    except StreakError as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"pystreak {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0

"""Exact streak selection bias, permutation tests and bias-adjusted hot-hand reanalysis."""

import logging

from .errors import (
    CapacityError,
    DegenerateError,
    InputFormatError,
    ParameterError,
    StreakError,
    UndefinedStatisticError,
)
from .exactdist import (
    CountDistribution,
    build_conditional_distribution,
    build_difference_distribution,
    build_proportion_distribution,
    expected_difference,
    expected_proportion,
)
from .seqcore import BinarySequence, StreakCounts, StreakEstimates, estimates, four_way_counts

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "BinarySequence",
    "CapacityError",
    "CountDistribution",
    "DegenerateError",
    "InputFormatError",
    "ParameterError",
    "StreakCounts",
    "StreakError",
    "StreakEstimates",
    "UndefinedStatisticError",
    "__version__",
    "build_conditional_distribution",
    "build_difference_distribution",
    "build_proportion_distribution",
    "estimates",
    "expected_difference",
    "expected_proportion",
    "four_way_counts",
]

"""Exception hierarchy shared by every pystreak module."""

from __future__ import annotations


class StreakError(Exception):
    """Base class for all errors raised by pystreak."""

    exit_code = 1


class ParameterError(StreakError, ValueError):
    """An argument is outside the range an operation accepts."""

    exit_code = 3


class InputFormatError(StreakError, ValueError):
    """A data file or sequence string could not be parsed."""

    exit_code = 4


class CapacityError(StreakError):
    """A brute-force computation was requested beyond its size cap."""

    exit_code = 5


class UndefinedStatisticError(StreakError):
    """A streak statistic is undefined because a selection set is empty."""

    exit_code = 6

    def __init__(self, message: str, empty_set: str | None = None) -> None:
        super().__init__(message)
        self.empty_set = empty_set


class DegenerateError(StreakError):
    """No replication, permutation or player yields a defined statistic."""

    exit_code = 6
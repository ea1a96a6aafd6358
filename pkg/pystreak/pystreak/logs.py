"""Opt-in logging setup. The library itself only emits records."""

from __future__ import annotations

import logging

from .config import get_settings

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def verbosity_to_level(verbose: int) -> int | None:
    """Map a repeated ``-v`` count to a logging level (None keeps the default)."""
    if verbose <= 0:
        return None
    return logging.INFO if verbose == 1 else logging.DEBUG


def setup_logging(level: int | str | None = None) -> None:
    """Attach a stderr handler to the ``pystreak`` logger.

    Calling it twice replaces the handler rather than duplicating output.
    """
    if level is None:
        level = get_settings().log_level
    logger = logging.getLogger("pystreak")
    for handler in list(logger.handlers):
        if getattr(handler, "_pystreak", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(_FORMAT))
    handler._pystreak = True  # type: ignore[attr-defined]
    logger.addHandler(handler)
    logger.setLevel(level)

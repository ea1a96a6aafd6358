"""Runtime settings, with defaults overridable from the environment."""

from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .errors import ParameterError

WORKERS_ENV = "PYSTREAK_WORKERS"
LOG_LEVEL_ENV = "PYSTREAK_LOG_LEVEL"

_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


@dataclass(frozen=True)
class Settings:
    """Library-wide defaults.

    Attributes:
        precision: Decimal digits used when writing floats to text output.
        oracle_cap: Largest sequence length the brute-force oracle accepts.
        chunk_size: Replications per seeded substream in Monte-Carlo code.
        workers: Default number of worker processes for grid computations.
        log_level: Level used by :func:`pystreak.logs.setup_logging` when none is given.
        pi_h_grid: Stationary hot-state probabilities averaged over in regime-shift surfaces.
        q_hh_grid: Hot-state persistence probabilities averaged over in regime-shift surfaces.
        calibration_tolerance: Bisection tolerance when matching a feedback DGP's long-run mean.
    """

    precision: int = 6
    oracle_cap: int = 24
    chunk_size: int = 10_000
    workers: int = 1
    log_level: str = "WARNING"
    pi_h_grid: tuple[float, ...] = field(default=(0.05, 0.10, 0.15, 0.20))
    q_hh_grid: tuple[float, ...] = field(default=(0.82, 0.86, 0.90, 0.94, 0.98))
    calibration_tolerance: float = 0.002

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> Settings:
        """Build settings from ``PYSTREAK_WORKERS`` and ``PYSTREAK_LOG_LEVEL``."""
        env = os.environ if environ is None else environ
        settings = cls()
        raw_workers = env.get(WORKERS_ENV)
        if raw_workers:
            try:
                workers = int(raw_workers)
            except ValueError as exc:
                raise ParameterError(
                    f"{WORKERS_ENV} must be an integer, got {raw_workers!r}"
                ) from exc
            if workers < 1:
                raise ParameterError(f"{WORKERS_ENV} must be at least 1, got {workers}")
            settings = replace(settings, workers=workers)
        raw_level = env.get(LOG_LEVEL_ENV)
        if raw_level:
            level = raw_level.upper()
            if level not in _LOG_LEVELS:
                raise ParameterError(
                    f"{LOG_LEVEL_ENV} must be one of {_LOG_LEVELS}, got {raw_level!r}"
                )
            settings = replace(settings, log_level=level)
        return settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings, read from the environment once."""
    return Settings.from_env()

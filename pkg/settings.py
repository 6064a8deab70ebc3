#!/usr/bin/env python3
"""Runtime configuration read from the environment and an optional .env file."""

import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

from errors import ConfigurationError

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    """Defaults shared by the command line and the verification dashboard."""
    output_dir: str = "heatkernel_output"
    t0: float = 1.0
    tolerance: float = 1e-12
    log_level: str = "WARNING"


def _float_setting(name, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{name}={raw!r} is not a number")
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {raw!r}")
    return value


def load_settings(dotenv_path=None):
    """Build Settings from HEATKERNEL_* variables (a .env file is read first)."""
    load_dotenv(dotenv_path=dotenv_path, override=False)

    log_level = os.getenv("HEATKERNEL_LOG_LEVEL", Settings.log_level).upper()
    if log_level not in LOG_LEVELS:
        raise ConfigurationError(
            f"HEATKERNEL_LOG_LEVEL={log_level!r} is not one of {', '.join(LOG_LEVELS)}"
        )

    return Settings(
        output_dir=os.getenv("HEATKERNEL_OUTPUT_DIR", Settings.output_dir),
        t0=_float_setting("HEATKERNEL_T0", Settings.t0),
        tolerance=_float_setting("HEATKERNEL_TOLERANCE", Settings.tolerance),
        log_level=log_level,
    )


@lru_cache(maxsize=1)
def get_settings():
    """Process-wide settings, loaded once."""
    return load_settings()

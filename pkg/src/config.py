# file: config.py

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    residual_tol: float
    relator_tol: float
    holonomy_tol: float
    newton_max_iters: int
    max_placement_attempts: int
    log_level: str


_settings: Optional[Settings] = None


def _read_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}.")
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {raw!r}.")
    return value


def _read_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}.")
    if value < 1:
        raise ValueError(f"{name} must be at least 1, got {raw!r}.")
    return value


def _initialize_settings():
    """
    Reads the environment (and .env if present) into the settings singleton.
    Runs only once, when first needed.
    """
    global _settings

    if _settings is not None:
        return

    load_dotenv()
    log_level = (os.getenv("HYPGLUING_LOG_LEVEL") or "INFO").strip().upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ValueError(f"HYPGLUING_LOG_LEVEL is not a logging level: {log_level!r}.")

    _settings = Settings(
        residual_tol=_read_float("HYPGLUING_RESIDUAL_TOL", 1e-9),
        relator_tol=_read_float("HYPGLUING_RELATOR_TOL", 1e-8),
        holonomy_tol=_read_float("HYPGLUING_HOLONOMY_TOL", 1e-6),
        newton_max_iters=_read_int("HYPGLUING_NEWTON_MAX_ITERS", 50),
        max_placement_attempts=_read_int("HYPGLUING_MAX_PLACEMENT_ATTEMPTS", 64),
        log_level=log_level,
    )


def get_settings() -> Settings:
    """Returns the settings singleton, initializing if necessary."""
    _initialize_settings()
    return _settings


def reset_settings() -> None:
    """Drops the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None

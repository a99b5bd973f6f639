from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

from network.errors import ConfigError

load_dotenv()

# ─── Defaults ───

DEFAULT_MAX_PROFILES = 1_000_000
DEFAULT_MAX_STRATEGIES = 1_000_000
DEFAULT_CDS_MAX_ROUNDS = 10_000
DEFAULT_JOBS = 1
DEFAULT_LOG_LEVEL = "WARNING"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    max_profiles: int = DEFAULT_MAX_PROFILES
    max_strategies: int = DEFAULT_MAX_STRATEGIES
    cds_max_rounds: int = DEFAULT_CDS_MAX_ROUNDS
    jobs: int = DEFAULT_JOBS
    log_level: str = DEFAULT_LOG_LEVEL


def load_settings() -> Settings:
    """Snapshot the FENNEC_* environment (after .env has been loaded)."""
    return Settings(
        max_profiles=_env_int("FENNEC_MAX_PROFILES", DEFAULT_MAX_PROFILES),
        max_strategies=_env_int("FENNEC_MAX_STRATEGIES", DEFAULT_MAX_STRATEGIES),
        cds_max_rounds=_env_int("FENNEC_CDS_MAX_ROUNDS", DEFAULT_CDS_MAX_ROUNDS),
        jobs=_env_int("FENNEC_JOBS", DEFAULT_JOBS),
        log_level=(os.getenv("FENNEC_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper(),
    )

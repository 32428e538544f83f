import logging
import os
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, PositiveInt, ValidationError

from removal_lab.errors import ParameterError

# Load env vars
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = "REMOVAL_LAB_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Budgets(BaseModel):
    """Caps for every exhaustive search in the package."""
    backtracking_nodes: PositiveInt = 2_000_000
    completion_cap: PositiveInt = 1 << 22
    pattern_vertices: PositiveInt = 8
    vc_vertices: PositiveInt = 24
    hom_source_vertices: PositiveInt = 32
    hom_target_vertices: PositiveInt = 12
    core_vertices: PositiveInt = 12
    core_cross_check_vertices: PositiveInt = 9
    edit_distance_vertices: PositiveInt = 7
    convex_enumeration: PositiveInt = 5_000_000
    convex_samples: PositiveInt = 200_000
    rs_max_m: PositiveInt = 1 << 16
    partition_max_parts: PositiveInt = 64
    blowup_vertices: PositiveInt = 48


DEFAULT_BUDGETS = Budgets()


def default_threads() -> int:
    return os.cpu_count() or 1


class RunConfig(BaseModel):
    seed: int = Field(default=0, ge=0, lt=1 << 64)
    threads: PositiveInt = Field(default_factory=default_threads)
    budgets: Budgets = Field(default_factory=Budgets)
    out: Path | None = None
    fmt: Literal["graph6", "edges"] | None = None


def _env_int(name: str) -> int | None:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw, 0)
    except ValueError:
        raise ParameterError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}")


def env_budgets() -> dict[str, int]:
    """Budget overrides found in REMOVAL_LAB_BUDGET_<NAME> variables."""
    found = {}
    for name in Budgets.model_fields:
        value = _env_int("BUDGET_" + name.upper())
        if value is not None:
            found[name] = value
    return found


def log_level(explicit: str | None = None) -> str:
    """The --log-level value, else REMOVAL_LAB_LOG_LEVEL, else WARNING."""
    level = (explicit or os.getenv(ENV_PREFIX + "LOG_LEVEL") or "").strip().upper() or "WARNING"
    if level not in LOG_LEVELS:
        raise ParameterError(f"unknown log level {level!r}", suggestion="use one of " + ", ".join(LOG_LEVELS))
    return level


def load_run_config(
    seed: int | None = None,
    threads: int | None = None,
    budgets: dict[str, int] | None = None,
    out: Path | None = None,
    fmt: str | None = None,
) -> RunConfig:
    """Merge environment defaults with explicit overrides; explicit values win."""
    env_seed = _env_int("SEED")
    env_threads = _env_int("THREADS")
    merged_budgets = {**env_budgets(), **(budgets or {})}
    try:
        config = RunConfig(
            seed=seed if seed is not None else (env_seed if env_seed is not None else 0),
            threads=threads if threads is not None else (env_threads if env_threads is not None else default_threads()),
            budgets=Budgets(**merged_budgets),
            out=out,
            fmt=fmt,
        )
    except ValidationError as e:
        raise ParameterError(f"invalid run configuration: {e.errors()[0]['msg']}")
    logger.debug("run config: seed=%d threads=%d", config.seed, config.threads)
    return config

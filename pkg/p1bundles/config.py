"""
Runtime configuration read from environment variables.

    P1BL_MAX_DEGREE  cap on the degrees exercised by the selftest battery (default 6)
    P1BL_SEED        seed of every randomized battery (default 20240611)
"""

import os
from dataclasses import dataclass
from typing import Mapping, Optional

from p1bundles.errors import RangeViolation

DEFAULT_MAX_DEGREE = 6
DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Config:
    max_degree: int = DEFAULT_MAX_DEGREE
    seed: int = DEFAULT_SEED


def _int_var(env: Mapping[str, str], name: str, default: int, minimum: int) -> int:
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise RangeViolation(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise RangeViolation(f"{name} must be >= {minimum}, got {value}")
    return value


def get_config(env: Optional[Mapping[str, str]] = None) -> Config:
    """
    Read the configuration.

    Args:
        env: Mapping to read from (defaults to os.environ)

    Returns:
        Config with validated values

    Raises:
        RangeViolation: For non-integer or out-of-range values
    """
    env = os.environ if env is None else env
    return Config(
        max_degree=_int_var(env, "P1BL_MAX_DEGREE", DEFAULT_MAX_DEGREE, 1),
        seed=_int_var(env, "P1BL_SEED", DEFAULT_SEED, 0),
    )

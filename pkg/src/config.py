"""Engine configuration read from environment variables."""

import logging
import os
from dataclasses import dataclass
from fractions import Fraction

logger = logging.getLogger(__name__)

DEFAULT_ITER_BUDGET = 100_000
DEFAULT_MAX_ORDER_SIZE = 9
DEFAULT_WIDTH_TOLERANCE = Fraction(1, 10**6)
DEFAULT_MAX_PERIOD = 24
DEFAULT_EXACT_BITS = 512
DEFAULT_MATRIX_TOLERANCE = 1e-12
DEFAULT_EIGEN_TOLERANCE = 1e-9
DEFAULT_BATCH_WORKERS = 4


@dataclass(frozen=True)
class EngineConfig:
    """Tunable limits and tolerances for the computational services."""

    iter_budget: int = DEFAULT_ITER_BUDGET
    max_order_size: int = DEFAULT_MAX_ORDER_SIZE
    width_tolerance: Fraction = DEFAULT_WIDTH_TOLERANCE
    max_period: int = DEFAULT_MAX_PERIOD
    exact_bits: int = DEFAULT_EXACT_BITS
    matrix_tolerance: float = DEFAULT_MATRIX_TOLERANCE
    eigen_tolerance: float = DEFAULT_EIGEN_TOLERANCE
    batch_workers: int = DEFAULT_BATCH_WORKERS


def _read_int(name: str, default: int) -> int:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}; using {default}")
        return default
    if value < 1:
        logger.warning(f"Ignoring non-positive {name}={raw!r}; using {default}")
        return default
    return value


def _read_fraction(name: str, default: Fraction) -> Fraction:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        logger.warning(f"Ignoring unparseable {name}={raw!r}; using {default}")
        return default
    if value <= 0:
        logger.warning(f"Ignoring non-positive {name}={raw!r}; using {default}")
        return default
    return value


def get_engine_config() -> EngineConfig:
    """
    Build the engine configuration from environment variables.

    Environment variables:
        ORDERFORGE_ITER_BUDGET: Iteration budget for translation numbers (default: 100000)
        ORDERFORGE_MAX_ORDER_SIZE: Bound on |E| for automorphism searches (default: 9)
        ORDERFORGE_WIDTH_TOLERANCE: Target width of rotation-number intervals (default: 1/1000000)
        ORDERFORGE_MAX_PERIOD: Largest period searched for periodic points (default: 24)
        ORDERFORGE_EXACT_BITS: Denominator bit length at which exact orbits stop (default: 512)
        ORDERFORGE_BATCH_WORKERS: Worker threads for batch runs (default: 4)
    """
    return EngineConfig(
        iter_budget=_read_int("ORDERFORGE_ITER_BUDGET", DEFAULT_ITER_BUDGET),
        max_order_size=_read_int("ORDERFORGE_MAX_ORDER_SIZE", DEFAULT_MAX_ORDER_SIZE),
        width_tolerance=_read_fraction("ORDERFORGE_WIDTH_TOLERANCE", DEFAULT_WIDTH_TOLERANCE),
        max_period=_read_int("ORDERFORGE_MAX_PERIOD", DEFAULT_MAX_PERIOD),
        exact_bits=_read_int("ORDERFORGE_EXACT_BITS", DEFAULT_EXACT_BITS),
        batch_workers=_read_int("ORDERFORGE_BATCH_WORKERS", DEFAULT_BATCH_WORKERS),
    )

from concurrent.futures import ThreadPoolExecutor
import hashlib
import logging
import os
from typing import Any, List

import numpy as np
import orjson

from .const import ENV_THREADS, SIGNIFICANT_DIGITS

logger = logging.getLogger(__name__)

JSON_OPTIONS = (
    orjson.OPT_SORT_KEYS  # pylint: disable=no-member
    | orjson.OPT_INDENT_2  # pylint: disable=no-member
    | orjson.OPT_SERIALIZE_NUMPY  # pylint: disable=no-member
)


def to_json(dump_obj) -> bytes:
    """Convert an object to sorted, indented json."""
    return orjson.dumps(dump_obj, option=JSON_OPTIONS) + b"\n"  # pylint: disable=no-member


def from_json(json_str):
    """Convert json to an object."""
    return orjson.loads(json_str)  # pylint: disable=no-member


def config_hash(params: Any) -> str:
    """Return the sha256 of the canonical json of ``params``."""
    canonical = orjson.dumps(  # pylint: disable=no-member
        params,
        option=orjson.OPT_SORT_KEYS  # pylint: disable=no-member
        | orjson.OPT_SERIALIZE_NUMPY,  # pylint: disable=no-member
    )
    return hashlib.sha256(canonical).hexdigest()


def format_float(value: float) -> str:
    """Format a float with the fixed number of significant digits used in CSVs."""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def weight_grid(lo: float, hi: float, count: int) -> List[float]:
    """Return ``count`` geometrically spaced weights between ``lo`` and ``hi``.

    :raise ValueError: if the bounds are not positive or not ordered.
    """
    if lo <= 0 or hi <= 0:
        raise ValueError("Weight bounds must be positive")
    if hi < lo:
        raise ValueError(f"Weight bounds out of order: {lo} > {hi}")
    if count < 1:
        raise ValueError("Weight grid needs at least one point")
    if count == 1:
        return [float(lo)]
    return [float(w) for w in np.geomspace(lo, hi, count)]


def max_workers() -> int:
    """Return the worker cap from ``IBX_THREADS``, defaulting to the CPU count."""
    raw = os.environ.get(ENV_THREADS)
    if raw is None:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%s", ENV_THREADS, raw)
        return os.cpu_count() or 1
    return max(1, threads)


def create_executor() -> ThreadPoolExecutor:
    """Create the worker pool used for independent sweeps and suite rows."""
    return ThreadPoolExecutor(max_workers=max_workers(), thread_name_prefix="IBXWorker")

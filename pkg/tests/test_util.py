"""Test for ibx.util."""
import threading

import pytest

from ibx import util
from ibx.const import ENV_THREADS


def test_to_json_is_canonical():
    """Keys are sorted and the output ends with a newline."""
    first = util.to_json({"b": 1, "a": [1.5, None]})
    second = util.to_json({"a": [1.5, None], "b": 1})
    assert first == second
    assert first.endswith(b"\n")
    assert util.from_json(first) == {"a": [1.5, None], "b": 1}


def test_config_hash():
    """Hashes ignore key order and change with any value."""
    assert util.config_hash({"a": 1, "b": 2}) == util.config_hash({"b": 2, "a": 1})
    assert util.config_hash({"a": 1}) != util.config_hash({"a": 2})
    assert len(util.config_hash({})) == 64


def test_format_float():
    """Floats keep twelve significant digits."""
    assert util.format_float(0.1) == "0.1"
    assert util.format_float(1 / 3) == "0.333333333333"
    assert util.format_float(2.0) == "2"
    assert util.format_float(1e-13) == "1e-13"


def test_weight_grid():
    """Weight grids are geometric and inclusive."""
    grid = util.weight_grid(1e-3, 1e3, 7)
    assert len(grid) == 7
    assert grid[0] == 1e-3
    assert abs(grid[-1] - 1e3) < 1e-9
    assert abs(grid[3] - 1.0) < 1e-12
    assert util.weight_grid(2.0, 5.0, 1) == [2.0]


def test_weight_grid_errors():
    """Bad bounds raise."""
    for lo, hi, count in ((0.0, 1.0, 5), (10.0, 1.0, 5), (1.0, 10.0, 0)):
        with pytest.raises(ValueError):
            util.weight_grid(lo, hi, count)


def test_max_workers(monkeypatch):
    """The worker cap comes from the environment."""
    monkeypatch.setenv(ENV_THREADS, "3")
    assert util.max_workers() == 3
    monkeypatch.setenv(ENV_THREADS, "0")
    assert util.max_workers() == 1
    monkeypatch.setenv(ENV_THREADS, "many")
    assert util.max_workers() >= 1
    monkeypatch.delenv(ENV_THREADS)
    assert util.max_workers() >= 1


def test_create_executor(monkeypatch):
    """The executor runs work on named threads."""
    monkeypatch.setenv(ENV_THREADS, "2")
    with util.create_executor() as pool:
        names = list(pool.map(lambda _: threading.current_thread().name, range(4)))
    assert all(name.startswith("IBXWorker") for name in names)

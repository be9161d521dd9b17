"""Test fixtures."""
from concurrent.futures import ThreadPoolExecutor

import pytest

from ibx import util
from ibx.const import (
    KIND_COLOR,
    KIND_GRID,
    OBJECTIVE_BLUE_CONTINUOUS,
    OBJECTIVE_BLUE_DISCONTINUOUS,
    OBJECTIVE_MANHATTAN,
    OBJECTIVE_RANDOM,
    OBJECTIVE_RED_CONTINUOUS,
    OBJECTIVE_X_COORD,
)
from ibx.domains import DomainSpec, build_domain
from ibx.loader import Loader


@pytest.fixture(scope="session")
def manhattan():
    yield build_domain(DomainSpec(KIND_GRID, OBJECTIVE_MANHATTAN))


@pytest.fixture(scope="session")
def x_coord():
    yield build_domain(DomainSpec(KIND_GRID, OBJECTIVE_X_COORD))


@pytest.fixture(scope="session")
def random_grid():
    yield build_domain(DomainSpec(KIND_GRID, OBJECTIVE_RANDOM, seed=0))


@pytest.fixture(scope="session")
def blue_continuous():
    yield build_domain(DomainSpec(KIND_COLOR, OBJECTIVE_BLUE_CONTINUOUS))


@pytest.fixture(scope="session")
def blue_discontinuous():
    yield build_domain(DomainSpec(KIND_COLOR, OBJECTIVE_BLUE_DISCONTINUOUS))


@pytest.fixture(scope="session")
def red_continuous():
    yield build_domain(DomainSpec(KIND_COLOR, OBJECTIVE_RED_CONTINUOUS))


@pytest.fixture(scope="session")
def small_grid():
    """A coarse weight grid; the sweep refines it where clusters vanish."""
    yield util.weight_grid(1e-3, 1e3, 25)


@pytest.fixture
def executor():
    with ThreadPoolExecutor(max_workers=2, thread_name_prefix="IBXTest") as pool:
        yield pool


@pytest.fixture
def loader():
    yield Loader()

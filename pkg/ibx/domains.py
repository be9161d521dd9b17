"""Reward domains: 5x5 grids and color charts with their training objectives.

Items are integers. Grid cells use ``cell id = y * width + x`` with x the column
(left to right) and y the row (bottom to top). Color chips are numbered by their
row in the chart.
"""
import csv
import logging
import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .const import (
    BLUE_BIN_REWARDS,
    BLUE_BIN_WIDTH,
    CHART_CSV_HEADER,
    COLOR_CHART_SIZE,
    COLOR_OBJECTIVES,
    GRID_HEIGHT,
    GRID_OBJECTIVES,
    GRID_WIDTH,
    KIND_COLOR,
    KIND_GRID,
    MANHATTAN_DECREMENT,
    MANHATTAN_FLOOR,
    MANHATTAN_PEAK,
    OBJECTIVE_BLUE_CONTINUOUS,
    OBJECTIVE_BLUE_DISCONTINUOUS,
    OBJECTIVE_MANHATTAN,
    OBJECTIVE_RANDOM,
    OBJECTIVE_RED_CONTINUOUS,
    OBJECTIVE_X_COORD,
    OBJECTIVE_Y_COORD,
    IBXError,
)
from .ib_core import JointDistribution, SupportMismatchError

logger = logging.getLogger(__name__)

OBJECTIVES_BY_KIND = {KIND_GRID: GRID_OBJECTIVES, KIND_COLOR: COLOR_OBJECTIVES}


class ChartError(IBXError, ValueError):
    """Raised when a color chart file or color list is invalid."""


class DomainError(IBXError, ValueError):
    """Raised for an unknown kind or an objective that does not fit the kind."""


class RewardModel:
    """A tabular reward: one weight per one-hot feature id."""

    __slots__ = ("feature_ids", "weights", "_index")

    def __init__(self, feature_ids: Sequence[int], weights: Sequence[float]) -> None:
        self.feature_ids: Tuple[int, ...] = tuple(int(x) for x in feature_ids)
        values = np.array(weights, dtype=float)
        if values.shape != (len(self.feature_ids),):
            raise DomainError("Need exactly one reward weight per feature id")
        if len(set(self.feature_ids)) != len(self.feature_ids):
            raise DomainError("Feature ids must be distinct")
        if not np.all(np.isfinite(values)):
            raise DomainError("Reward weights must be finite")
        values.setflags(write=False)
        self.weights = values
        self._index = {x: i for i, x in enumerate(self.feature_ids)}

    def __call__(self, x: int) -> float:
        try:
            return float(self.weights[self._index[x]])
        except KeyError:
            raise SupportMismatchError(f"Item {x} has no reward") from None

    def __len__(self) -> int:
        return len(self.feature_ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RewardModel):
            return NotImplemented
        return self.feature_ids == other.feature_ids and np.array_equal(
            self.weights, other.weights
        )

    def __hash__(self) -> int:
        return hash((self.feature_ids, self.weights.tobytes()))

    def __repr__(self) -> str:
        return f"<RewardModel items={len(self)} levels={np.unique(self.weights).size}>"

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.feature_ids, self.weights.tolist()))

    def mean(self) -> float:
        return math.fsum(self.weights) / len(self)

    def variance(self) -> float:
        """Population variance over the items."""
        return float(np.var(self.weights))

    def check_covers(self, item_ids: Sequence[int]) -> None:
        if tuple(item_ids) != self.feature_ids:
            raise SupportMismatchError(
                f"Reward covers {len(self)} items, expected the {len(item_ids)} "
                "items of the abstraction; supports differ"
            )


def to_joint(reward: RewardModel) -> JointDistribution:
    """Uniform p(x) with Y the reward of x."""
    return JointDistribution.from_rewards(reward.feature_ids, reward.weights)


class GridWorld:
    """A rectangular grid of cells with a reward per cell."""

    __slots__ = ("width", "height", "reward")

    def __init__(self, width: int, height: int, reward: RewardModel) -> None:
        if width < 1 or height < 1:
            raise DomainError(f"Grid must be at least 1x1, got {width}x{height}")
        if reward.feature_ids != tuple(range(width * height)):
            raise DomainError("Grid rewards must cover cell ids 0..width*height-1 in order")
        self.width = width
        self.height = height
        self.reward = reward

    def __repr__(self) -> str:
        return f"<GridWorld {self.width}x{self.height}>"

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def cell_id(self, x: int, y: int) -> int:
        if not self.in_bounds(x, y):
            raise DomainError(f"Cell ({x}, {y}) is outside the {self.width}x{self.height} grid")
        return y * self.width + x

    def coords(self, cell: int) -> Tuple[int, int]:
        """Return (x, y) of ``cell``."""
        if not 0 <= cell < self.n_cells:
            raise DomainError(f"Cell id {cell} is outside the grid")
        return cell % self.width, cell // self.width

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def reward_at(self, x: int, y: int) -> float:
        return self.reward(self.cell_id(x, y))

    def as_array(self) -> np.ndarray:
        """Rewards as a (height, width) array indexed ``[y, x]``."""
        return self.reward.weights.reshape(self.height, self.width)


def _grid(values: Sequence[float], width: int = GRID_WIDTH, height: int = GRID_HEIGHT):
    return GridWorld(width, height, RewardModel(range(width * height), values))


def build_manhattan_grid(
    width: int = GRID_WIDTH, height: int = GRID_HEIGHT, peak: Tuple[int, int] = MANHATTAN_PEAK
) -> GridWorld:
    """+1 at ``peak``, decreased by 0.33 per step of Manhattan distance, floored at -1."""
    values = []
    for y in range(height):
        for x in range(width):
            distance = abs(x - peak[0]) + abs(y - peak[1])
            values.append(
                round(max(MANHATTAN_FLOOR, 1.0 - MANHATTAN_DECREMENT * distance), 2)
            )
    return _grid(values, width, height)


def build_random_grid(
    seed: int, width: int = GRID_WIDTH, height: int = GRID_HEIGHT
) -> GridWorld:
    """Independent uniform rewards on [-1, 1] from a seeded generator."""
    rng = np.random.default_rng(seed)
    return _grid(rng.uniform(-1.0, 1.0, width * height), width, height)


def build_coordinate_grid(
    axis: str, width: int = GRID_WIDTH, height: int = GRID_HEIGHT
) -> GridWorld:
    """The reward of a cell is its x or y coordinate."""
    if axis not in ("x", "y"):
        raise DomainError(f"Axis must be 'x' or 'y', got {axis!r}")
    values = [
        float(x if axis == "x" else y) for y in range(height) for x in range(width)
    ]
    return _grid(values, width, height)


class ColorChart:
    """An ordered list of RGB chips with channels in [0, 1]."""

    __slots__ = ("colors",)

    def __init__(self, colors) -> None:
        array = np.array(colors, dtype=float)
        if array.size == 0:
            raise ChartError("no colors")
        if array.ndim != 2 or array.shape[1] != 3:
            raise ChartError("Every chip needs exactly three channels")
        bad = np.flatnonzero(~np.all((array >= 0) & (array <= 1), axis=1))
        if bad.size:
            raise ChartError(f"Chip {int(bad[0])}: channels must lie in [0, 1]")
        array.setflags(write=False)
        self.colors = array

    def __len__(self) -> int:
        return self.colors.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColorChart):
            return NotImplemented
        return np.array_equal(self.colors, other.colors)

    def __hash__(self) -> int:
        return hash(self.colors.tobytes())

    def __repr__(self) -> str:
        return f"<ColorChart colors={len(self)}>"

    @property
    def ids(self) -> List[int]:
        return list(range(len(self)))

    @property
    def red(self) -> np.ndarray:
        return self.colors[:, 0]

    @property
    def green(self) -> np.ndarray:
        return self.colors[:, 1]

    @property
    def blue(self) -> np.ndarray:
        return self.colors[:, 2]

    def entries(self) -> Iterator[Tuple[int, float, float, float]]:
        """Yield (id, r, g, b) per chip."""
        for chip, (r, g, b) in enumerate(self.colors.tolist()):
            yield chip, r, g, b


def default_color_chart() -> ColorChart:
    """A synthetic 122-chip chart.

    Red and blue take every level 0.0, 0.1, ..., 1.0 in an 11x11 lattice, green
    cycles over the same levels, and a neutral grey chip completes the chart.
    Every red level sees every blue level once, so red carries no information
    about blue.
    """
    levels = [k / 10 for k in range(11)]
    colors = [
        (levels[r], levels[(r + 2 * b) % 11], levels[b])
        for r in range(11)
        for b in range(11)
    ]
    colors.append((0.5, 0.5, 0.5))
    assert len(colors) == COLOR_CHART_SIZE
    return ColorChart(colors)


def load_color_chart(path) -> ColorChart:
    """Read a chart CSV with header ``id,r,g,b``; row order defines the ids.

    Ids must count up from 0 in row order since they double as the item ids of
    color domains, tasks and encoders. Charts numbered otherwise have to be
    renumbered first.

    :raise ChartError: naming the offending row.
    """
    try:
        with open(path, newline="", encoding="utf-8") as chart_file:
            rows = list(csv.reader(chart_file))
    except FileNotFoundError as err:
        raise ChartError(f"Color chart {path} does not exist") from err

    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if rows and tuple(cell.strip() for cell in rows[0]) == CHART_CSV_HEADER:
        rows = rows[1:]
    if not rows:
        raise ChartError("no colors")

    colors = []
    for number, row in enumerate(rows, start=1):
        if len(row) != len(CHART_CSV_HEADER):
            raise ChartError(f"Row {number}: expected 4 fields, got {len(row)}")
        try:
            chip = int(row[0])
            channels = [float(cell) for cell in row[1:]]
        except ValueError as err:
            raise ChartError(f"Row {number}: {err}") from err
        if chip != number - 1:
            raise ChartError(f"Row {number}: color id {chip} is out of sequence")
        for name, value in zip("rgb", channels):
            if not 0.0 <= value <= 1.0:
                raise ChartError(f"Row {number}: {name} = {value} is outside [0, 1]")
        colors.append(channels)
    logger.debug("Loaded %d colors from %s", len(colors), path)
    return ColorChart(colors)


def write_color_chart(path, chart: ColorChart) -> None:
    """Write ``chart`` in the chart CSV format."""
    with open(path, "w", newline="", encoding="utf-8") as chart_file:
        writer = csv.writer(chart_file, lineterminator="\n")
        writer.writerow(CHART_CSV_HEADER)
        for chip, r, g, b in chart.entries():
            writer.writerow([chip, repr(r), repr(g), repr(b)])


def blue_bin(blue: float) -> int:
    """Index of the equal-width blue bin, with blue = 1.0 in the last bin."""
    return min(int(math.floor(blue / BLUE_BIN_WIDTH)), len(BLUE_BIN_REWARDS) - 1)


def build_color_reward(chart: ColorChart, objective: str) -> RewardModel:
    """Reward over chip ids for one of the color objectives."""
    if objective == OBJECTIVE_BLUE_CONTINUOUS:
        values = chart.blue
    elif objective == OBJECTIVE_RED_CONTINUOUS:
        values = chart.red
    elif objective == OBJECTIVE_BLUE_DISCONTINUOUS:
        values = [BLUE_BIN_REWARDS[blue_bin(b)] for b in chart.blue.tolist()]
    else:
        raise DomainError(f"{objective!r} is not a color objective")
    return RewardModel(chart.ids, values)


class DomainSpec:
    """Which domain to build: kind, reward objective and seed."""

    __slots__ = ("kind", "objective", "seed")

    def __init__(self, kind: str, objective: str, seed: int = 0) -> None:
        if kind not in OBJECTIVES_BY_KIND:
            raise DomainError(f"Unknown domain kind {kind!r}")
        if objective not in OBJECTIVES_BY_KIND[kind]:
            raise DomainError(
                f"Objective {objective!r} does not apply to {kind} domains; "
                f"choose from {', '.join(OBJECTIVES_BY_KIND[kind])}"
            )
        self.kind = kind
        self.objective = objective
        self.seed = int(seed)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DomainSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash((self.kind, self.objective, self.seed))

    def __repr__(self) -> str:
        return f"<DomainSpec kind={self.kind} objective={self.objective} seed={self.seed}>"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "objective": self.objective, "seed": self.seed}


class Domain:
    """A built domain: its spec, its items and the reward of the spec's objective."""

    __slots__ = ("spec", "items", "reward")

    def __init__(
        self, spec: DomainSpec, items: Union[GridWorld, ColorChart], reward: RewardModel
    ) -> None:
        self.spec = spec
        self.items = items
        self.reward = reward

    def __repr__(self) -> str:
        return f"<Domain {self.spec.kind}/{self.spec.objective} items={len(self.reward)}>"

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def objective(self) -> str:
        return self.spec.objective

    @property
    def item_ids(self) -> Tuple[int, ...]:
        return self.reward.feature_ids

    def joint(self) -> JointDistribution:
        return to_joint(self.reward)

    def with_objective(self, objective: str, seed: Optional[int] = None) -> "Domain":
        """The same items under another objective (same chart, same grid size)."""
        spec = DomainSpec(self.kind, objective, self.spec.seed if seed is None else seed)
        if self.kind == KIND_COLOR:
            return build_domain(spec, self.items)
        return build_domain(spec, width=self.items.width, height=self.items.height)


def build_domain(
    spec: DomainSpec,
    chart: Optional[ColorChart] = None,
    width: int = GRID_WIDTH,
    height: int = GRID_HEIGHT,
) -> Domain:
    """Build the domain described by ``spec``.

    Color domains use ``chart`` or the default chart.
    """
    if spec.kind == KIND_COLOR:
        chart = chart if chart is not None else default_color_chart()
        return Domain(spec, chart, build_color_reward(chart, spec.objective))

    if spec.objective == OBJECTIVE_MANHATTAN:
        grid = build_manhattan_grid(width, height)
    elif spec.objective == OBJECTIVE_RANDOM:
        grid = build_random_grid(spec.seed, width, height)
    elif spec.objective == OBJECTIVE_X_COORD:
        grid = build_coordinate_grid("x", width, height)
    elif spec.objective == OBJECTIVE_Y_COORD:
        grid = build_coordinate_grid("y", width, height)
    else:
        raise DomainError(f"{spec.objective!r} is not a grid objective")
    return Domain(spec, grid, grid.reward)

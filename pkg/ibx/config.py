"""Module for the `RunConfig` and `ScenarioConfig` classes."""
import logging
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from . import util
from .const import (
    DEFAULT_BANDWIDTH,
    DEFAULT_CHECKPOINTS,
    DEFAULT_MAX_ITERS,
    DEFAULT_REFINE_DEPTH,
    DEFAULT_RESTARTS,
    DEFAULT_WEIGHT_COUNT,
    DEFAULT_WEIGHT_MAX,
    DEFAULT_WEIGHT_MIN,
    GRID_HEIGHT,
    GRID_WIDTH,
    INIT_IDENTITY,
    INIT_RANDOM,
    KIND_GRID,
    RANK_BY_MAGNITUDE,
    RANK_BY_VALUE,
    TIE_LEXICOGRAPHIC,
    TIE_SEEDED_UNIFORM,
    IBXError,
)
from .domains import OBJECTIVES_BY_KIND

logger = logging.getLogger(__name__)

RUN_KEYS = (
    "scenarios",
    "weight_min",
    "weight_max",
    "weight_count",
    "init",
    "restarts",
    "bandwidth",
    "max_iters",
    "refine_depth",
    "checkpoints",
    "respondents",
    "tie_policy",
    "rank_by",
    "seed",
)
SCENARIO_KEYS = ("name", "kind", "target", "objectives", "seed", "chart", "queries", "tasks")


class ConfigError(IBXError, ValueError):
    """Raised with every problem found in a configuration."""

    def __init__(self, problems: Sequence[str]) -> None:
        self.problems = list(problems)
        super().__init__(
            "Invalid configuration:\n  " + "\n  ".join(self.problems)
        )


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _positive(value) -> bool:
    return _is_number(value) and value > 0


def _int_at_least(low: int):
    return lambda value: _is_int(value) and value >= low


def _one_of(*choices):
    return lambda value: value in choices


def _choices(*choices) -> str:
    return " or ".join(repr(choice) for choice in choices)


# key, default, check, expected
_RUN_OPTIONS = (
    ("weight_min", DEFAULT_WEIGHT_MIN, _positive, "a positive number"),
    ("weight_max", DEFAULT_WEIGHT_MAX, _positive, "a positive number"),
    ("weight_count", DEFAULT_WEIGHT_COUNT, _int_at_least(1), "an integer >= 1"),
    (
        "init",
        INIT_IDENTITY,
        _one_of(INIT_IDENTITY, INIT_RANDOM),
        _choices(INIT_IDENTITY, INIT_RANDOM),
    ),
    ("restarts", DEFAULT_RESTARTS, _int_at_least(0), "an integer >= 0"),
    (
        "bandwidth",
        DEFAULT_BANDWIDTH,
        lambda value: _is_number(value) and value >= 0,
        "a number >= 0",
    ),
    ("max_iters", DEFAULT_MAX_ITERS, _int_at_least(1), "an integer >= 1"),
    ("refine_depth", DEFAULT_REFINE_DEPTH, _int_at_least(0), "an integer >= 0"),
    ("respondents", 1, _int_at_least(1), "an integer >= 1"),
    (
        "tie_policy",
        TIE_LEXICOGRAPHIC,
        _one_of(TIE_LEXICOGRAPHIC, TIE_SEEDED_UNIFORM),
        _choices(TIE_LEXICOGRAPHIC, TIE_SEEDED_UNIFORM),
    ),
    (
        "rank_by",
        RANK_BY_VALUE,
        _one_of(RANK_BY_VALUE, RANK_BY_MAGNITUDE),
        _choices(RANK_BY_VALUE, RANK_BY_MAGNITUDE),
    ),
    ("seed", 0, _is_int, "an integer"),
)


def _unknown_keys(data: Mapping, known: Sequence[str], where: str) -> List[str]:
    return [f"{where}: unknown key {key!r}" for key in data if key not in known]


class ScenarioConfig:
    """One scenario: the domain, its true reward and the training objectives.

    ``chart`` is kept as written in the config and is what the config hash
    sees; ``chart_path`` is where the file is read from.
    """

    __slots__ = (
        "name",
        "kind",
        "target",
        "objectives",
        "seed",
        "chart",
        "chart_path",
        "queries",
        "tasks",
    )

    def __init__(
        self,
        name: str,
        kind: str,
        target: str,
        objectives: Sequence[str],
        seed: int = 0,
        chart: Optional[str] = None,
        queries: Optional[Sequence[Sequence[int]]] = None,
        tasks: Optional[Sequence[Tuple[Tuple[int, int], Tuple[int, int]]]] = None,
        chart_path: Optional[str] = None,
    ) -> None:
        self.name = name
        self.kind = kind
        self.target = target
        self.objectives = tuple(objectives)
        self.seed = seed
        self.chart = chart
        self.chart_path = chart if chart_path is None else chart_path
        self.queries = None if queries is None else tuple(tuple(q) for q in queries)
        self.tasks = (
            None
            if tasks is None
            else tuple((tuple(start), tuple(goal)) for start, goal in tasks)
        )

    def __repr__(self) -> str:
        return f"<ScenarioConfig {self.name} {self.kind}/{self.target}>"

    @classmethod
    def from_dict(
        cls, data: Any, where: str, problems: List[str], base_dir: Optional[str] = None
    ) -> Optional["ScenarioConfig"]:
        """Validate ``data`` and append every problem found to ``problems``."""
        if not isinstance(data, Mapping):
            problems.append(f"{where}: must be an object")
            return None
        start = len(problems)
        problems.extend(_unknown_keys(data, SCENARIO_KEYS, where))

        name = data.get("name")
        if not isinstance(name, str) or not name:
            problems.append(f"{where}: 'name' must be a non-empty string")
        kind = data.get("kind")
        allowed = OBJECTIVES_BY_KIND.get(kind)
        if allowed is None:
            problems.append(f"{where}: 'kind' must be one of {sorted(OBJECTIVES_BY_KIND)}")
            allowed = ()
        target = data.get("target")
        if allowed and target not in allowed:
            problems.append(f"{where}: target {target!r} does not apply to {kind} domains")
        objectives = data.get("objectives", [target] if target else [])
        if not isinstance(objectives, list) or not objectives:
            problems.append(f"{where}: 'objectives' must be a non-empty list")
            objectives = []
        for objective in objectives:
            if allowed and objective not in allowed:
                problems.append(
                    f"{where}: objective {objective!r} does not apply to {kind} domains"
                )
        if len(set(map(str, objectives))) != len(objectives):
            problems.append(f"{where}: 'objectives' contains duplicates")
        seed = data.get("seed", 0)
        if not _is_int(seed):
            problems.append(f"{where}: 'seed' must be an integer")

        chart = data.get("chart")
        chart_path = None
        if chart is not None:
            if kind == KIND_GRID:
                problems.append(f"{where}: 'chart' only applies to color scenarios")
            elif not isinstance(chart, str):
                problems.append(f"{where}: 'chart' must be a file path")
            else:
                if base_dir and not os.path.isabs(chart):
                    chart_path = os.path.join(base_dir, chart)
                else:
                    chart_path = chart
                if not os.path.isfile(chart_path):
                    problems.append(f"{where}: chart file {chart_path} does not exist")

        queries = data.get("queries")
        if queries is not None:
            if not isinstance(queries, list) or not all(
                isinstance(q, list) and len(q) >= 2 and all(_is_int(i) and i >= 0 for i in q)
                for q in queries
            ):
                problems.append(
                    f"{where}: 'queries' must be lists of at least two item ids"
                )
            elif any(len(set(q)) != len(q) for q in queries):
                problems.append(f"{where}: query items must be distinct")

        tasks = data.get("tasks")
        parsed_tasks = None
        if tasks is not None:
            parsed_tasks = []
            if not isinstance(tasks, list):
                problems.append(f"{where}: 'tasks' must be a list")
                tasks = []
            for number, task in enumerate(tasks):
                ends = _parse_task(task)
                if ends is None:
                    problems.append(
                        f"{where}: task {number} needs 'start' and 'goal' as [x, y] "
                        f"inside the {GRID_WIDTH}x{GRID_HEIGHT} grid"
                    )
                elif ends[0] == ends[1]:
                    problems.append(f"{where}: task {number} starts at its goal")
                else:
                    parsed_tasks.append(ends)

        if len(problems) > start:
            return None
        return cls(
            name, kind, target, objectives, seed, chart, queries, parsed_tasks, chart_path
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "name": self.name,
            "kind": self.kind,
            "target": self.target,
            "objectives": list(self.objectives),
            "seed": self.seed,
        }
        if self.chart is not None:
            data["chart"] = self.chart
        if self.queries is not None:
            data["queries"] = [list(q) for q in self.queries]
        if self.tasks is not None:
            data["tasks"] = [
                {"start": list(start), "goal": list(goal)} for start, goal in self.tasks
            ]
        return data


def _parse_task(task) -> Optional[Tuple[Tuple[int, int], Tuple[int, int]]]:
    if not isinstance(task, Mapping):
        return None
    ends = []
    for key in ("start", "goal"):
        cell = task.get(key)
        if (
            not isinstance(cell, list)
            or len(cell) != 2
            or not all(_is_int(c) for c in cell)
            or not (0 <= cell[0] < GRID_WIDTH and 0 <= cell[1] < GRID_HEIGHT)
        ):
            return None
        ends.append((cell[0], cell[1]))
    return ends[0], ends[1]


class RunConfig:
    """Everything a simulation run depends on.

    All randomness is derived from the explicit seeds held here.
    """

    __slots__ = RUN_KEYS

    def __init__(
        self,
        scenarios: Sequence[ScenarioConfig],
        *,
        weight_min: float = DEFAULT_WEIGHT_MIN,
        weight_max: float = DEFAULT_WEIGHT_MAX,
        weight_count: int = DEFAULT_WEIGHT_COUNT,
        init: str = INIT_IDENTITY,
        restarts: int = DEFAULT_RESTARTS,
        bandwidth: float = DEFAULT_BANDWIDTH,
        max_iters: int = DEFAULT_MAX_ITERS,
        refine_depth: int = DEFAULT_REFINE_DEPTH,
        checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS,
        respondents: int = 1,
        tie_policy: str = TIE_LEXICOGRAPHIC,
        rank_by: str = RANK_BY_VALUE,
        seed: int = 0,
    ) -> None:
        self.scenarios = tuple(scenarios)
        self.weight_min = weight_min
        self.weight_max = weight_max
        self.weight_count = weight_count
        self.init = init
        self.restarts = restarts
        self.bandwidth = bandwidth
        self.max_iters = max_iters
        self.refine_depth = refine_depth
        self.checkpoints = tuple(checkpoints)
        self.respondents = respondents
        self.tie_policy = tie_policy
        self.rank_by = rank_by
        self.seed = seed

    def __repr__(self) -> str:
        return f"<RunConfig scenarios={[s.name for s in self.scenarios]}>"

    @classmethod
    def from_dict(cls, data: Any, base_dir: Optional[str] = None) -> "RunConfig":
        """Validate ``data`` and build a config.

        :raise ConfigError: listing every problem found, not just the first.
        """
        if not isinstance(data, Mapping):
            raise ConfigError(["The configuration must be a JSON object"])
        problems = _unknown_keys(data, RUN_KEYS, "config")

        scenarios = []
        raw_scenarios = data.get("scenarios")
        if not isinstance(raw_scenarios, list) or not raw_scenarios:
            problems.append("config: 'scenarios' must be a non-empty list")
            raw_scenarios = []
        for number, raw in enumerate(raw_scenarios):
            scenario = ScenarioConfig.from_dict(
                raw, f"scenario {number}", problems, base_dir
            )
            if scenario is not None:
                scenarios.append(scenario)
        names = [s.name for s in scenarios]
        if len(set(names)) != len(names):
            problems.append("config: scenario names must be unique")

        options = {}
        for key, default, check, message in _RUN_OPTIONS:
            value = data.get(key, default)
            if not check(value):
                problems.append(f"config: {key!r} must be {message}, got {value!r}")
            options[key] = value
        if (
            _is_number(options["weight_min"])
            and _is_number(options["weight_max"])
            and options["weight_min"] > options["weight_max"]
        ):
            problems.append("config: 'weight_min' exceeds 'weight_max'")

        checkpoints = data.get("checkpoints", list(DEFAULT_CHECKPOINTS))
        if (
            not isinstance(checkpoints, list)
            or not checkpoints
            or not all(_is_int(c) and c >= 1 for c in checkpoints)
        ):
            problems.append("config: 'checkpoints' must be a non-empty list of integers >= 1")

        if problems:
            raise ConfigError(problems)
        return cls(scenarios, checkpoints=checkpoints, **options)

    @classmethod
    def load(cls, path) -> "RunConfig":
        """Read and validate a JSON config file.

        Relative chart paths are resolved against the file's directory.
        """
        with open(path, "rb") as config_file:
            raw = config_file.read()
        try:
            data = util.from_json(raw)
        except ValueError as err:
            raise ConfigError([f"{path}: not valid JSON ({err})"]) from err
        config = cls.from_dict(data, os.path.dirname(os.path.abspath(path)))
        logger.debug("Loaded %r from %s", config, path)
        return config

    def to_dict(self) -> Dict[str, Any]:
        data = {key: getattr(self, key) for key in RUN_KEYS}
        data["scenarios"] = [scenario.to_dict() for scenario in self.scenarios]
        data["checkpoints"] = list(self.checkpoints)
        return data

    def config_hash(self) -> str:
        return util.config_hash(self.to_dict())

    def weight_grid(self) -> List[float]:
        return util.weight_grid(self.weight_min, self.weight_max, self.weight_count)

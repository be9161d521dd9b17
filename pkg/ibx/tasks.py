"""Path tasks, demonstrations and simulated respondents.

A task asks for a monotone 4-connected path from ``start`` to ``goal`` on a grid:
every step moves one cell closer to the goal. The value of a path is the sum of
the rewards of all its cells, start and goal included. For color tasks every
cell shows a chip of the chart and is worth that chip's reward.

A respondent only knows an abstraction. It values each item at the mean target
reward of the item's cluster and acts optimally under that surrogate.
"""
from fractions import Fraction
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import util
from .config import RunConfig, ScenarioConfig
from .const import (
    GRID_HEIGHT,
    GRID_WIDTH,
    KIND_COLOR,
    RANK_BY_VALUE,
    REGRET_TOLERANCE,
    RESULTS_CSV_HEADER,
    SENSE_BEST,
    SENSE_WORST,
    TIE_LEXICOGRAPHIC,
    TIE_SEEDED_UNIFORM,
    IBXError,
)
from .domains import (
    ColorChart,
    Domain,
    DomainSpec,
    RewardModel,
    build_domain,
    load_color_chart,
    to_joint,
)
from .ib_core import (
    Encoder,
    FrontierPoint,
    JointDistribution,
    checkpoint_targets,
    sweep_frontier,
)
from .metrics import (
    MetricReport,
    UndefinedCorrelationError,
    cluster_means,
    complexity,
    distortion,
    feature_rank,
    informativeness,
    pairwise_ranking,
    regret_score,
    spearman,
)

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]

DEFAULT_GRID_QUERY = ((1, 3), (0, 1), (2, 2), (4, 4), (4, 0))
DEFAULT_BLUE_TARGETS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_TASKS = (((0, 0), (4, 4)), ((4, 0), (0, 4)))


class TaskError(IBXError, ValueError):
    """Raised for invalid tasks and demonstrations."""


class PathTask:
    """Reach ``goal`` from ``start`` on a width x height grid.

    ``item_of_cell[c]`` is the reward item shown in cell id ``c``
    (``y * width + x``); grid tasks use the cell id itself.
    """

    __slots__ = ("width", "height", "start", "goal", "item_of_cell")

    def __init__(
        self,
        width: int,
        height: int,
        start: Cell,
        goal: Cell,
        item_of_cell: Optional[Sequence[int]] = None,
    ) -> None:
        self.width = width
        self.height = height
        self.start = (int(start[0]), int(start[1]))
        self.goal = (int(goal[0]), int(goal[1]))
        for name, (x, y) in (("start", self.start), ("goal", self.goal)):
            if not (0 <= x < width and 0 <= y < height):
                raise TaskError(f"The {name} ({x}, {y}) is outside the {width}x{height} grid")
        if self.start == self.goal:
            raise TaskError("Start and goal must differ")
        if item_of_cell is None:
            item_of_cell = range(width * height)
        self.item_of_cell: Tuple[int, ...] = tuple(int(i) for i in item_of_cell)
        if len(self.item_of_cell) != width * height:
            raise TaskError("Need one item per cell")

    def __repr__(self) -> str:
        return f"<PathTask {self.start} -> {self.goal} on {self.width}x{self.height}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PathTask):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash((self.width, self.height, self.start, self.goal, self.item_of_cell))

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "start": list(self.start),
            "goal": list(self.goal),
            "item_of_cell": list(self.item_of_cell),
        }

    @property
    def length(self) -> int:
        """Number of cells in every demonstration."""
        return self.distance(self.cell_id(*self.start)) + 1

    def cell_id(self, x: int, y: int) -> int:
        return y * self.width + x

    def coords(self, cell: int) -> Cell:
        return cell % self.width, cell // self.width

    def distance(self, cell: int) -> int:
        """Manhattan distance from ``cell`` to the goal."""
        x, y = self.coords(cell)
        return abs(x - self.goal[0]) + abs(y - self.goal[1])

    def next_cells(self, cell: int) -> List[int]:
        """Neighbours one step closer to the goal, by ascending id."""
        x, y = self.coords(cell)
        steps = []
        if x != self.goal[0]:
            steps.append(self.cell_id(x + (1 if self.goal[0] > x else -1), y))
        if y != self.goal[1]:
            steps.append(self.cell_id(x, y + (1 if self.goal[1] > y else -1)))
        return sorted(steps)

    def cells_toward_goal(self) -> List[int]:
        """Cells inside the start-goal rectangle, nearest to the goal first."""
        xs = range(min(self.start[0], self.goal[0]), max(self.start[0], self.goal[0]) + 1)
        ys = range(min(self.start[1], self.goal[1]), max(self.start[1], self.goal[1]) + 1)
        cells = [self.cell_id(x, y) for y in ys for x in xs]
        return sorted(cells, key=lambda c: (self.distance(c), c))

    def cell_values(self, reward: RewardModel) -> List[float]:
        """Reward shown in each cell."""
        return [reward(item) for item in self.item_of_cell]

    def validate(self, demo: "Demonstration") -> None:
        """Raise :class:`TaskError` unless ``demo`` is a monotone path of this task."""
        cells = demo.cells
        if len(cells) != self.length:
            raise TaskError(f"A demonstration needs {self.length} cells, got {len(cells)}")
        if cells[0] != self.cell_id(*self.start) or cells[-1] != self.cell_id(*self.goal):
            raise TaskError("A demonstration must run from the start to the goal")
        for here, there in zip(cells, cells[1:]):
            if there not in self.next_cells(here):
                raise TaskError(f"Step {here} -> {there} does not move toward the goal")


def grid_task(start: Cell, goal: Cell, width: int = GRID_WIDTH, height: int = GRID_HEIGHT):
    """A task on the grid domain itself."""
    return PathTask(width, height, start, goal)


def color_task(
    chart: ColorChart,
    start: Cell,
    goal: Cell,
    seed: int,
    width: int = GRID_WIDTH,
    height: int = GRID_HEIGHT,
) -> PathTask:
    """A sample-collection task: each cell shows a distinct, seeded choice of chip."""
    if len(chart) < width * height:
        raise TaskError(f"A {width}x{height} task needs {width * height} colors")
    rng = np.random.default_rng(seed)
    chips = rng.choice(len(chart), size=width * height, replace=False)
    return PathTask(width, height, start, goal, chips.tolist())


class Demonstration:
    """An ordered list of cell ids."""

    __slots__ = ("task", "cells")

    def __init__(self, task: PathTask, cells: Sequence[int]) -> None:
        self.task = task
        self.cells: Tuple[int, ...] = tuple(int(c) for c in cells)
        task.validate(self)

    def __repr__(self) -> str:
        return f"<Demonstration {list(self.cells)}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Demonstration):
            return NotImplemented
        return self.cells == other.cells and self.task == other.task

    def __hash__(self) -> int:
        return hash(self.cells)

    def value(self, reward: RewardModel) -> float:
        return path_value(self.task, self, reward)


def path_value(task: PathTask, demo: Demonstration, reward: RewardModel) -> float:
    """Sum of the rewards of every cell of ``demo``."""
    if demo.task is not task:
        task.validate(demo)
    return math.fsum(reward(task.item_of_cell[cell]) for cell in demo.cells)


def enumerate_paths(task: PathTask) -> List[Demonstration]:
    """Every monotone demonstration, in lexicographic order of cell ids."""
    paths: List[List[int]] = []

    def extend(path: List[int]) -> None:
        steps = task.next_cells(path[-1])
        if not steps:
            paths.append(path)
            return
        for step in steps:
            extend(path + [step])

    extend([task.cell_id(*task.start)])
    return [Demonstration(task, path) for path in paths]


def _exact(values: Sequence[float]) -> List[Fraction]:
    return [Fraction(value) for value in values]


def extremal_path(task: PathTask, reward: RewardModel, sense: str = SENSE_BEST) -> Demonstration:
    """The best (or worst) monotone demonstration under ``reward``.

    Path sums are compared exactly; ties go to the lexicographically smallest
    sequence of cell ids.
    """
    if sense not in (SENSE_BEST, SENSE_WORST):
        raise TaskError(f"Unknown sense {sense!r}")
    better = (lambda a, b: a > b) if sense == SENSE_BEST else (lambda a, b: a < b)
    values = _exact(task.cell_values(reward))
    totals: Dict[int, Fraction] = {}
    successor: Dict[int, Optional[int]] = {}
    for cell in task.cells_toward_goal():
        choice = None
        for step in task.next_cells(cell):
            if choice is None or better(totals[step], totals[choice]):
                choice = step
        successor[cell] = choice
        totals[cell] = values[cell] + (totals[choice] if choice is not None else 0)
    return Demonstration(task, _follow(task, successor))


def _follow(task: PathTask, successor: Dict[int, Optional[int]]) -> List[int]:
    cells = [task.cell_id(*task.start)]
    while successor[cells[-1]] is not None:
        cells.append(successor[cells[-1]])
    return cells


def _sample_optimal(task: PathTask, values: Sequence[float], seed: int) -> List[int]:
    """Draw a path uniformly among all paths of maximal exact value."""
    exact = _exact(values)
    totals: Dict[int, Fraction] = {}
    counts: Dict[int, int] = {}
    optimal_steps: Dict[int, List[int]] = {}
    for cell in task.cells_toward_goal():
        steps = task.next_cells(cell)
        if not steps:
            totals[cell], counts[cell], optimal_steps[cell] = exact[cell], 1, []
            continue
        top = max(totals[step] for step in steps)
        optimal_steps[cell] = [step for step in steps if totals[step] == top]
        totals[cell] = exact[cell] + top
        counts[cell] = sum(counts[step] for step in optimal_steps[cell])

    rng = np.random.default_rng(seed)
    cells = [task.cell_id(*task.start)]
    while optimal_steps[cells[-1]]:
        steps = optimal_steps[cells[-1]]
        weights = np.array([counts[step] for step in steps], dtype=float)
        cells.append(steps[int(rng.choice(len(steps), p=weights / weights.sum()))])
    return cells


class Respondent:
    """Someone who knows only the abstraction ``encoder``.

    ``tie_policy`` picks among paths the surrogate reward cannot tell apart:
    ``"lexicographic"`` takes the smallest cell sequence, ``"seeded_uniform"``
    draws one uniformly with ``seed``.
    """

    __slots__ = ("encoder", "tie_policy", "seed", "rank_by")

    def __init__(
        self,
        encoder: Encoder,
        tie_policy: str = TIE_LEXICOGRAPHIC,
        seed: int = 0,
        rank_by: str = RANK_BY_VALUE,
    ) -> None:
        if tie_policy not in (TIE_LEXICOGRAPHIC, TIE_SEEDED_UNIFORM):
            raise TaskError(f"Unknown tie policy {tie_policy!r}")
        self.encoder = encoder
        self.tie_policy = tie_policy
        self.seed = seed
        self.rank_by = rank_by

    def __repr__(self) -> str:
        return f"<Respondent {self.encoder!r} ties={self.tie_policy} seed={self.seed}>"


def surrogate_reward(resp: Respondent, target: RewardModel) -> RewardModel:
    """Each item valued at the mean ``target`` reward of its cluster."""
    means = cluster_means(resp.encoder, target)
    return RewardModel(target.feature_ids, means[resp.encoder.assignments])


def respondent_demonstration(
    resp: Respondent, task: PathTask, target: RewardModel
) -> Demonstration:
    """The respondent's optimal path under its surrogate of ``target``."""
    surrogate = surrogate_reward(resp, target)
    if resp.tie_policy == TIE_LEXICOGRAPHIC:
        return extremal_path(task, surrogate, SENSE_BEST)
    return Demonstration(task, _sample_optimal(task, task.cell_values(surrogate), resp.seed))


def respondent_ranking(resp: Respondent, query: Sequence[int], target: RewardModel):
    """Pairwise ranking of ``query`` under the respondent's surrogate."""
    return pairwise_ranking(surrogate_reward(resp, target).as_dict(), query, resp.rank_by)


def default_queries(domain: Domain) -> List[List[int]]:
    """Five query items: grid region representatives or chips spanning blue."""
    if domain.kind == KIND_COLOR:
        blue = domain.items.blue
        query: List[int] = []
        for level in DEFAULT_BLUE_TARGETS:
            distance = np.abs(blue - level)
            distance[query] = np.inf
            query.append(int(np.argmin(distance)))
        return [query]
    grid = domain.items
    return [[grid.cell_id(x, y) for x, y in DEFAULT_GRID_QUERY]]


def default_tasks(
    domain: Domain, seed: int = 0, ends: Optional[Sequence[Tuple[Cell, Cell]]] = None
) -> List[PathTask]:
    """Path tasks between ``ends``; color tasks map seeded chips onto the cells."""
    ends = DEFAULT_TASKS if ends is None else ends
    if domain.kind == KIND_COLOR:
        return [
            color_task(domain.items, start, goal, seed + number)
            for number, (start, goal) in enumerate(ends)
        ]
    grid = domain.items
    return [grid_task(start, goal, grid.width, grid.height) for start, goal in ends]


def usable_tasks(tasks: Sequence[PathTask], target: RewardModel) -> Tuple[List, int]:
    """Split off tasks whose best and worst paths tie; return (usable, excluded).

    Usable entries are (task, best, worst) triples.
    """
    usable = []
    excluded = 0
    for task in tasks:
        best = extremal_path(task, target, SENSE_BEST)
        worst = extremal_path(task, target, SENSE_WORST)
        if best.value(target) - worst.value(target) <= REGRET_TOLERANCE:
            logger.warning("Excluding %r: every path is worth the same", task)
            excluded += 1
            continue
        usable.append((task, best, worst))
    return usable, excluded


def evaluate_encoder(
    encoder: Encoder,
    target_domain: Domain,
    queries: Sequence[Sequence[int]],
    tasks: Sequence[PathTask],
    respondent: Optional[Respondent] = None,
    target_label: Optional[str] = None,
) -> Tuple[MetricReport, int]:
    """Every metric of ``encoder`` against the reward of ``target_domain``.

    Feature rank and best demonstration are averaged over the queries and over
    the tasks whose optimal and worst paths differ.

    :return: The report and the number of excluded tasks.
    """
    target = target_domain.reward
    joint = to_joint(target)
    encoder.check_covers(joint)
    respondent = respondent or Respondent(encoder)

    ranks = []
    for query in queries:
        truth = pairwise_ranking(target.as_dict(), query, respondent.rank_by)
        ranks.append(feature_rank(respondent_ranking(respondent, query, target), truth))

    usable, excluded = usable_tasks(tasks, target)
    scores = []
    for task, best, worst in usable:
        demo = respondent_demonstration(respondent, task, target)
        scores.append(regret_score(best.value(target), demo.value(target), worst.value(target)))

    report = MetricReport(
        encoder_label=encoder.source_objective,
        target_label=target_label or target_domain.objective,
        n_clusters=encoder.n_clusters,
        complexity_bits=complexity(encoder, joint),
        informativeness_bits=informativeness(encoder, joint),
        distortion_mse=distortion(encoder, target),
        feature_rank=math.fsum(ranks) / len(ranks) if ranks else None,
        best_demonstration=math.fsum(scores) / len(scores) if scores else None,
    )
    return report, excluded


class SuiteRow:
    """Metrics of one (scenario, objective, checkpoint, respondent) combination."""

    __slots__ = ("scenario", "objective", "target", "checkpoint", "respondent", "report")

    def __init__(
        self,
        scenario: str,
        objective: str,
        target: str,
        checkpoint: int,
        respondent: int,
        report: MetricReport,
    ) -> None:
        self.scenario = scenario
        self.objective = objective
        self.target = target
        self.checkpoint = checkpoint
        self.respondent = respondent
        self.report = report

    @property
    def key(self) -> Tuple[str, str, int, int]:
        return self.scenario, self.objective, self.checkpoint, self.respondent

    @property
    def label(self) -> str:
        return f"{self.scenario}/{self.objective}/k{self.checkpoint}/r{self.respondent}"

    def csv_row(self) -> List[str]:
        report = self.report

        def optional(value):
            return "" if value is None else util.format_float(value)

        return [
            self.label,
            self.objective,
            self.target,
            str(report.n_clusters),
            util.format_float(report.complexity_bits),
            util.format_float(report.distortion_mse),
            optional(report.feature_rank),
            optional(report.best_demonstration),
        ]


class ScenarioInputs:
    """The target domain of a scenario with the queries and tasks it is evaluated on."""

    __slots__ = ("target", "queries", "tasks")

    def __init__(
        self, target: Domain, queries: Sequence[Sequence[int]], tasks: Sequence[PathTask]
    ) -> None:
        self.target = target
        self.queries = [list(query) for query in queries]
        self.tasks = list(tasks)


class SuiteResult:
    """All suite rows plus a per-scenario summary of rank correlations.

    ``inputs`` maps scenario names to their :class:`ScenarioInputs` and
    ``checkpoints`` maps (scenario, objective, checkpoint) to the frontier point
    and the training joint of the evaluated encoder, so every row can be
    stored and evaluated again.
    """

    def __init__(
        self,
        rows: Sequence[SuiteRow],
        excluded: Dict[str, int],
        config_hash: str,
        inputs: Optional[Dict[str, ScenarioInputs]] = None,
        checkpoints: Optional[
            Dict[Tuple[str, str, int], Tuple[FrontierPoint, JointDistribution]]
        ] = None,
    ):
        self.rows = list(rows)
        self.excluded = dict(excluded)
        self.config_hash = config_hash
        self.inputs = dict(inputs or {})
        self.checkpoints = dict(checkpoints or {})
        self.summary = self._summarize()

    def _summarize(self) -> Dict[str, dict]:
        summary = {}
        for scenario in self.excluded:
            rows = [row for row in self.rows if row.scenario == scenario]
            summary[scenario] = {
                "rows": len(rows),
                "excluded_tasks": self.excluded[scenario],
                "spearman_fr_distortion": _correlation(rows, "feature_rank"),
                "spearman_bd_distortion": _correlation(rows, "best_demonstration"),
                "mean_complexity_bits": math.fsum(r.report.complexity_bits for r in rows)
                / max(1, len(rows)),
            }
        return summary

    def csv_rows(self) -> List[List[str]]:
        return [list(RESULTS_CSV_HEADER)] + [row.csv_row() for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "queries": {name: given.queries for name, given in self.inputs.items()},
            "summary": self.summary,
        }


def _correlation(rows: Sequence[SuiteRow], field: str) -> Optional[float]:
    pairs = [
        (getattr(row.report, field), row.report.distortion_mse)
        for row in rows
        if getattr(row.report, field) is not None
    ]
    if len(pairs) < 3:
        return None
    try:
        return spearman([p[0] for p in pairs], [p[1] for p in pairs])
    except UndefinedCorrelationError:
        logger.warning("Spearman(%s, distortion) is undefined for these rows", field)
        return None


def _load_chart(scenario: ScenarioConfig) -> Optional[ColorChart]:
    return None if scenario.chart_path is None else load_color_chart(scenario.chart_path)


def run_simulation_suite(config: RunConfig, executor=None) -> SuiteResult:
    """Sweep every training objective of every scenario and evaluate the checkpoints.

    Rows are ordered by scenario, objective, checkpoint and respondent,
    regardless of how the work is scheduled.
    """
    if executor is None:
        with util.create_executor() as pool:
            return run_simulation_suite(config, pool)

    weights = config.weight_grid()
    inputs = {}
    excluded = {}
    sweeps = []
    for scenario in config.scenarios:
        target_domain = build_domain(
            DomainSpec(scenario.kind, scenario.target, scenario.seed), _load_chart(scenario)
        )
        queries = (
            scenario.queries
            if scenario.queries is not None
            else default_queries(target_domain)
        )
        tasks = default_tasks(target_domain, scenario.seed, scenario.tasks)
        inputs[scenario.name] = ScenarioInputs(target_domain, queries, tasks)
        excluded[scenario.name] = usable_tasks(tasks, target_domain.reward)[1]
        for objective in scenario.objectives:
            sweeps.append((scenario, target_domain.with_objective(objective)))

    def sweep(job):
        scenario, domain = job
        logger.info("Sweeping %s objective %s", scenario.name, domain.objective)
        return sweep_frontier(
            domain.joint(),
            weights,
            config.init,
            config.restarts,
            seed=config.seed,
            bandwidth=config.bandwidth,
            max_iters=config.max_iters,
            refine_depth=config.refine_depth,
            source_objective=domain.objective,
        )

    frontiers = list(executor.map(sweep, sweeps))

    checkpoints = {}
    jobs = []
    for (scenario, domain), frontier in zip(sweeps, frontiers):
        for checkpoint, point in checkpoint_targets(frontier, config.checkpoints):
            checkpoints[(scenario.name, domain.objective, checkpoint)] = (point, domain.joint())
            for number in range(config.respondents):
                respondent = Respondent(
                    point.encoder, config.tie_policy, config.seed + number, config.rank_by
                )
                jobs.append((scenario, domain.objective, checkpoint, number, respondent))

    def evaluate(job) -> SuiteRow:
        scenario, objective, checkpoint, number, respondent = job
        scenario_inputs = inputs[scenario.name]
        try:
            report, _ = evaluate_encoder(
                respondent.encoder,
                scenario_inputs.target,
                scenario_inputs.queries,
                scenario_inputs.tasks,
                respondent,
            )
        except Exception:
            logger.exception(
                "Evaluation failed for %s/%s/k%d", scenario.name, objective, checkpoint
            )
            raise
        return SuiteRow(scenario.name, objective, scenario.target, checkpoint, number, report)

    # map keeps the job order, which is the row order
    rows = list(executor.map(evaluate, jobs))
    logger.info("Simulation suite finished with %d rows", len(rows))
    return SuiteResult(rows, excluded, config.config_hash(), inputs, checkpoints)

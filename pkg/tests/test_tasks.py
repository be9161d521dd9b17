"""Tests for ibx.tasks."""
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
import itertools

import numpy as np
import pytest

from ibx import tasks
from ibx.config import RunConfig
from ibx.domains import RewardModel, build_random_grid, default_color_chart, to_joint
from ibx.ib_core import Encoder, identity_encoder, partition_by_value
from ibx.metrics import spearman
from ibx.tasks import Demonstration, PathTask, Respondent, TaskError

CELLS = [(x, y) for y in range(5) for x in range(5)]


def _exact_value(demo, reward):
    return sum(Fraction(reward(demo.task.item_of_cell[c])) for c in demo.cells)


def _suite_config(**overrides):
    data = {
        "scenarios": [
            {
                "name": "manhattan",
                "kind": "grid",
                "target": "manhattan",
                "objectives": ["manhattan", "x_coord"],
            }
        ],
        "weight_count": 15,
    }
    data.update(overrides)
    return RunConfig.from_dict(data)


def test_path_task():
    """Tasks know their length and the steps toward the goal."""
    task = tasks.grid_task((0, 0), (4, 4))
    assert task.length == 9
    assert task.next_cells(0) == [1, 5]
    assert task.next_cells(24) == []
    assert task.cells_toward_goal()[0] == 24
    reverse = tasks.grid_task((4, 0), (0, 4))
    assert reverse.next_cells(4) == [3, 9]
    with pytest.raises(TaskError):
        tasks.grid_task((0, 0), (0, 0))
    with pytest.raises(TaskError):
        tasks.grid_task((0, 0), (5, 0))
    with pytest.raises(TaskError):
        PathTask(5, 5, (0, 0), (1, 1), item_of_cell=[0, 1, 2])


def test_demonstration_validation():
    """Demonstrations must be monotone start-to-goal paths."""
    task = tasks.grid_task((0, 0), (2, 0))
    assert Demonstration(task, [0, 1, 2]).cells == (0, 1, 2)
    with pytest.raises(TaskError):
        Demonstration(task, [0, 2])
    with pytest.raises(TaskError):
        Demonstration(task, [1, 2, 3])
    with pytest.raises(TaskError):
        Demonstration(task, [0, 5, 2])


def test_path_value(manhattan):
    """A path is worth the sum of its cells."""
    task = tasks.grid_task((1, 3), (2, 3))
    demo = Demonstration(task, [16, 17])
    assert demo.value(manhattan.reward) == 1.0 + 0.67
    grid_task = PathTask(2, 1, (0, 0), (1, 0), item_of_cell=[3, 4])
    reward = RewardModel([3, 4], [0.2, 0.3])
    assert tasks.path_value(grid_task, Demonstration(grid_task, [0, 1]), reward) == 0.5


def test_enumerate_paths():
    """Every monotone path appears once, in lexicographic order."""
    demos = tasks.enumerate_paths(tasks.grid_task((0, 0), (4, 4)))
    assert len(demos) == 70
    assert [d.cells for d in demos] == sorted(d.cells for d in demos)
    assert len({d.cells for d in demos}) == 70


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_extremal_path_matches_enumeration(seed):
    """The exact DP agrees with brute force on every start and goal."""
    reward = build_random_grid(seed).reward
    for start, goal in itertools.permutations(CELLS, 2):
        task = tasks.grid_task(start, goal)
        demos = tasks.enumerate_paths(task)
        exact = [_exact_value(d, reward) for d in demos]
        best = tasks.extremal_path(task, reward, "best")
        worst = tasks.extremal_path(task, reward, "worst")
        assert best.cells == demos[exact.index(max(exact))].cells
        assert worst.cells == demos[exact.index(min(exact))].cells
        assert best.value(reward) == max(d.value(reward) for d in demos)
        assert worst.value(reward) == min(d.value(reward) for d in demos)


def test_extremal_path_ties_are_lexicographic():
    """With a flat reward the smallest cell sequence wins."""
    reward = RewardModel(range(25), [0.5] * 25)
    for start, goal in (((0, 0), (4, 4)), ((4, 0), (0, 4)), ((2, 3), (0, 0))):
        task = tasks.grid_task(start, goal)
        expected = tasks.enumerate_paths(task)[0]
        assert tasks.extremal_path(task, reward, "best") == expected
        assert tasks.extremal_path(task, reward, "worst") == expected
    with pytest.raises(TaskError):
        tasks.extremal_path(task, reward, "median")


def test_color_task():
    """Color tasks show distinct seeded chips."""
    chart = default_color_chart()
    task = tasks.color_task(chart, (0, 0), (4, 4), seed=3)
    assert len(task.item_of_cell) == 25
    assert len(set(task.item_of_cell)) == 25
    assert all(0 <= item < 122 for item in task.item_of_cell)
    assert task == tasks.color_task(chart, (0, 0), (4, 4), seed=3)
    assert task != tasks.color_task(chart, (0, 0), (4, 4), seed=4)


def test_respondent_policies(manhattan):
    """Unknown tie policies are rejected."""
    with pytest.raises(TaskError):
        Respondent(identity_encoder(manhattan.joint()), tie_policy="coin")


def test_identity_respondent_is_optimal(manhattan, random_grid):
    """Knowing every value means demonstrating the optimal path."""
    for domain in (manhattan, random_grid):
        respondent = Respondent(identity_encoder(domain.joint()))
        for task in tasks.default_tasks(domain):
            demo = tasks.respondent_demonstration(respondent, task, domain.reward)
            assert demo == tasks.extremal_path(task, domain.reward, "best")


def test_single_cluster_respondent(manhattan):
    """One cluster knows nothing: rankings are empty and paths are guesses."""
    single = Encoder.from_assignments(manhattan.joint(), [0] * 25)
    (query,) = tasks.default_queries(manhattan)
    ranking = tasks.respondent_ranking(Respondent(single), query, manhattan.reward)
    assert len(ranking) == 0

    task = tasks.grid_task((0, 0), (4, 4))
    best = tasks.extremal_path(task, manhattan.reward, "best").value(manhattan.reward)
    worst = tasks.extremal_path(task, manhattan.reward, "worst").value(manhattan.reward)
    scores = []
    for seed in range(30):
        respondent = Respondent(single, "seeded_uniform", seed)
        demo = tasks.respondent_demonstration(respondent, task, manhattan.reward)
        scores.append((demo.value(manhattan.reward) - worst) / (best - worst))
    assert 0.0 < float(np.mean(scores)) < 1.0


def test_seeded_uniform_covers_ties():
    """Seeded tie breaking is reproducible and reaches every co-optimal path."""
    task = tasks.grid_task((0, 0), (1, 1))
    flat = RewardModel(range(25), [0.0] * 25)
    encoder = Encoder.from_assignments(to_joint(flat), [0] * 25)
    seen = set()
    for seed in range(64):
        respondent = Respondent(encoder, "seeded_uniform", seed)
        first = tasks.respondent_demonstration(respondent, task, flat)
        again = tasks.respondent_demonstration(respondent, task, flat)
        assert first == again
        seen.add(first.cells)
    assert seen == {(0, 1, 6), (0, 5, 6)}


def test_partial_abstraction_ranking(manhattan):
    """Merging the peak with a neighbour loses exactly that pair."""
    assignments = list(range(25))
    assignments[21] = 16  # (1, 4) joins the peak (1, 3)
    encoder = Encoder.from_assignments(manhattan.joint(), assignments)
    query = [16, 21, 4]
    human = tasks.respondent_ranking(Respondent(encoder), query, manhattan.reward)
    assert set(human) == {(16, 4), (21, 4)}


def test_default_queries(manhattan, blue_continuous):
    """Default queries span the reward."""
    (grid_query,) = tasks.default_queries(manhattan)
    assert grid_query == [16, 5, 12, 24, 4]
    assert len({manhattan.reward(i) for i in grid_query}) == 5
    (color_query,) = tasks.default_queries(blue_continuous)
    assert len(set(color_query)) == 5
    blues = blue_continuous.items.blue
    assert blues[color_query[0]] == 0.0
    assert blues[color_query[-1]] == 1.0


def test_usable_tasks(manhattan, x_coord):
    """Tasks whose paths are all worth the same are excluded."""
    straight = tasks.grid_task((0, 0), (4, 0))
    usable, excluded = tasks.usable_tasks([straight] + tasks.default_tasks(manhattan), x_coord.reward)
    assert excluded == 1
    assert [task for task, _, _ in usable] == tasks.default_tasks(manhattan)


def test_evaluate_encoder(manhattan):
    """Identity and single cluster encoders bound every metric."""
    joint = manhattan.joint()
    queries = tasks.default_queries(manhattan)
    path_tasks = tasks.default_tasks(manhattan)

    report, excluded = tasks.evaluate_encoder(
        identity_encoder(joint, "manhattan"), manhattan, queries, path_tasks
    )
    assert excluded == 0
    assert report.distortion_mse == 0.0
    assert report.feature_rank == 1.0
    assert report.best_demonstration == 1.0
    assert report.encoder_label == "manhattan"
    assert report.target_label == "manhattan"

    single = Encoder.from_assignments(joint, [0] * 25)
    report, _ = tasks.evaluate_encoder(single, manhattan, queries, path_tasks)
    assert report.feature_rank == 0.0
    assert report.n_clusters == 1
    assert report.distortion_mse == pytest.approx(manhattan.reward.variance(), abs=1e-12)


def test_evaluate_encoder_without_usable_tasks(manhattan):
    """Best demonstration is undefined when every task is excluded."""
    straight = tasks.grid_task((0, 0), (4, 0))
    report, excluded = tasks.evaluate_encoder(
        identity_encoder(manhattan.joint()), manhattan, [], [straight]
    )
    # a straight task has a single path
    assert excluded == 1
    assert report.best_demonstration is None
    assert report.feature_rank is None


def test_simulation_suite(executor):
    """Suite rows are ordered and accurate abstractions score perfectly."""
    config = _suite_config()
    result = tasks.run_simulation_suite(config, executor)
    keys = [row.key for row in result.rows]
    assert keys == sorted(keys, key=lambda k: (["manhattan", "x_coord"].index(k[1]), k[2], k[3]))
    assert {row.objective for row in result.rows} == {"manhattan", "x_coord"}
    assert all(row.target == "manhattan" for row in result.rows)

    exact = [row for row in result.rows if row.report.distortion_mse < 1e-12]
    assert exact
    for row in exact:
        assert row.report.feature_rank == 1.0
        assert row.report.best_demonstration == pytest.approx(1.0, abs=1e-9)

    summary = result.summary["manhattan"]
    assert summary["rows"] == len(result.rows)
    assert summary["excluded_tasks"] == 0
    assert summary["spearman_fr_distortion"] < 0
    fr = [row.report.feature_rank for row in result.rows]
    distortion = [row.report.distortion_mse for row in result.rows]
    assert summary["spearman_fr_distortion"] == pytest.approx(spearman(fr, distortion))

    header, *rows = result.csv_rows()
    assert header[0] == "encoder"
    assert rows[0][0] == result.rows[0].label
    assert result.to_dict()["config_hash"] == config.config_hash()


def test_simulation_suite_is_deterministic():
    """Worker count does not change the results."""
    config = _suite_config(respondents=2, tie_policy="seeded_uniform")
    with ThreadPoolExecutor(max_workers=1) as one:
        first = tasks.run_simulation_suite(config, one)
    with ThreadPoolExecutor(max_workers=4) as four:
        second = tasks.run_simulation_suite(config, four)
    assert first.csv_rows() == second.csv_rows()
    assert {row.respondent for row in first.rows} == {0, 1}


def test_simulation_suite_keeps_inputs_and_checkpoints(executor):
    """Every row can be traced back to its stored encoder, target and tasks."""
    result = tasks.run_simulation_suite(_suite_config(), executor)
    scenario_inputs = result.inputs["manhattan"]
    assert scenario_inputs.target.objective == "manhattan"
    assert len(scenario_inputs.tasks) == 2
    for row in result.rows:
        point, joint = result.checkpoints[(row.scenario, row.objective, row.checkpoint)]
        assert point.n_clusters == row.report.n_clusters
        assert joint.x_support == point.encoder.x_support


@pytest.mark.slow
@pytest.mark.timeout(900)
def test_default_suite_correlations(loader):
    """On the bundled suite, more distortion means worse rankings and demonstrations."""
    result = tasks.run_simulation_suite(loader.get_suite())
    assert set(result.summary) == {
        "manhattan",
        "random",
        "blue_continuous",
        "blue_discontinuous",
    }
    for name, summary in result.summary.items():
        assert summary["spearman_fr_distortion"] <= -0.5, name
        assert summary["spearman_bd_distortion"] < 0, name


def test_refining_never_lowers_feature_rank(manhattan, random_grid):
    """Splitting clusters along the reward only adds correctly ordered pairs."""
    for domain in (manhattan, random_grid):
        joint = domain.joint()
        reward = domain.reward
        levels = np.unique(reward.weights)
        queries = tasks.default_queries(domain) + [list(range(25))]
        encoders = [Encoder.from_assignments(joint, np.zeros(25, dtype=int))]
        for pieces in (2, 4):
            cuts = levels[[len(levels) * k // pieces for k in range(1, pieces)]]
            labels = np.searchsorted(cuts, reward.weights, side="right")
            encoders.append(Encoder.from_assignments(joint, labels))
        encoders += [partition_by_value(joint), identity_encoder(joint)]

        ranks = [
            tasks.evaluate_encoder(encoder, domain, queries, [])[0].feature_rank
            for encoder in encoders
        ]
        assert ranks[0] == 0.0
        assert ranks[-2] == ranks[-1] == 1.0
        assert all(b >= a for a, b in zip(ranks, ranks[1:])), ranks

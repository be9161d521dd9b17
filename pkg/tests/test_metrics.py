"""Tests for ibx.metrics."""
import math

import numpy as np
import pytest

from ibx import metrics
from ibx.domains import RewardModel
from ibx.ib_core import Encoder, identity_encoder, partition_by_value
from ibx.metrics import (
    DegenerateTaskError,
    MetricError,
    MetricReport,
    RankingSet,
    UndefinedCorrelationError,
)


class _Demo:
    """Anything with a value(reward) method counts as a demonstration."""

    def __init__(self, value):
        self._value = value

    def value(self, reward):
        return self._value


def test_complexity(manhattan, x_coord):
    """Complexity of identity, strips and single cluster encoders."""
    joint = manhattan.joint()
    assert metrics.complexity(identity_encoder(joint), joint) == pytest.approx(
        math.log2(25), abs=1e-9
    )
    strips = partition_by_value(x_coord.joint())
    assert metrics.complexity(strips, x_coord.joint()) == pytest.approx(math.log2(5), abs=1e-9)
    single = Encoder.from_assignments(joint, [0] * 25)
    assert metrics.complexity(single, joint) == pytest.approx(0.0, abs=1e-12)


def test_informativeness(manhattan, x_coord):
    """Informativeness is measured on the joint it is given."""
    joint = manhattan.joint()
    assert metrics.informativeness(identity_encoder(joint), joint) == pytest.approx(
        joint.entropy_y(), abs=1e-9
    )
    strips = partition_by_value(x_coord.joint())
    # strips are trained on x but evaluated against the Manhattan reward
    value = metrics.informativeness(strips, joint)
    assert 0.0 < value < joint.entropy_y()


def test_distortion(manhattan):
    """Single cluster distortion is the variance; finer partitions never do worse."""
    joint = manhattan.joint()
    reward = manhattan.reward
    single = Encoder.from_assignments(joint, [0] * 25)
    assert metrics.distortion(single, reward) == pytest.approx(reward.variance(), abs=1e-12)
    assert metrics.distortion(identity_encoder(joint), reward) == 0.0
    assert metrics.distortion(partition_by_value(joint), reward) == pytest.approx(0.0, abs=1e-12)

    halves = Encoder.from_assignments(joint, [int(i >= 13) for i in range(25)])
    quarters = Encoder.from_assignments(joint, [i * 4 // 25 for i in range(25)])
    assert metrics.distortion(halves, reward) <= metrics.distortion(single, reward)
    assert metrics.distortion(quarters, reward) <= metrics.distortion(halves, reward)


def test_cluster_means_are_optimal(manhattan):
    """Cluster means beat any perturbed per-cluster prediction."""
    joint = manhattan.joint()
    reward = manhattan.reward
    encoder = Encoder.from_assignments(joint, [i % 3 for i in range(25)])
    means = metrics.cluster_means(encoder, reward)
    best = metrics.distortion(encoder, reward)
    for shift in (-0.1, 0.05, 0.2):
        for cluster in range(3):
            moved = means.copy()
            moved[cluster] += shift
            error = np.mean((moved[encoder.assignments] - reward.weights) ** 2)
            assert error > best


def test_pairwise_ranking():
    """Pairs follow the values; ties give no pair."""
    values = {0: 0.5, 1: -0.9, 2: 0.5, 3: 0.1}
    ranking = metrics.pairwise_ranking(values, [0, 1, 2, 3])
    assert set(ranking) == {(0, 1), (0, 3), (2, 1), (2, 3), (3, 1)}
    by_magnitude = metrics.pairwise_ranking(values, [0, 1, 3], "magnitude")
    assert set(by_magnitude) == {(1, 0), (1, 3), (0, 3)}
    with pytest.raises(MetricError):
        metrics.pairwise_ranking(values, [0, 0])
    with pytest.raises(MetricError):
        metrics.pairwise_ranking(values, [0, 9])
    with pytest.raises(MetricError):
        metrics.pairwise_ranking(values, [0, 1], "rank")


def test_ranking_set():
    """Rankings are antisymmetric."""
    with pytest.raises(MetricError):
        RankingSet([(1, 2), (2, 1)])
    with pytest.raises(MetricError):
        RankingSet([(1, 1)])
    assert RankingSet([(1, 2)]) == RankingSet([(1, 2)])
    assert (1, 2) in RankingSet([(1, 2)])
    assert len(RankingSet()) == 0


def test_feature_rank():
    """Jaccard overlap of the ranked pairs."""
    a, b, c = 0, 1, 2
    truth = RankingSet([(a, b), (a, c), (b, c)])
    assert metrics.feature_rank(truth, truth) == 1.0
    assert metrics.feature_rank(RankingSet([(a, c), (a, b), (c, b)]), truth) == 0.5
    assert metrics.feature_rank(RankingSet(), truth) == 0.0
    assert metrics.feature_rank(RankingSet(), RankingSet()) == 1.0


def test_regret_score():
    """Regret is scaled between worst and optimal."""
    assert metrics.regret_score(2.0, 1.0, 0.0) == 0.5
    assert metrics.regret_score(2.0, 2.0, 0.0) == 1.0
    assert metrics.regret_score(2.0, 0.0, 0.0) == 0.0
    with pytest.raises(DegenerateTaskError):
        metrics.regret_score(1.0, 1.0, 1.0)
    with pytest.raises(MetricError):
        metrics.regret_score(2.0, 3.0, 0.0)
    with pytest.raises(MetricError):
        metrics.regret_score(2.0, -1.0, 0.0)


def test_regret_score_is_affine_invariant():
    """Shifting and scaling the reward leaves the score unchanged."""
    for scale, shift in ((2.0, 0.0), (0.5, 3.0), (10.0, -7.0)):
        score = metrics.regret_score(2.0 * scale + shift, 0.7 * scale + shift, -1.0 * scale + shift)
        assert score == pytest.approx(metrics.regret_score(2.0, 0.7, -1.0), abs=1e-12)


def test_best_demonstration():
    """Demonstrations are valued under the target reward."""
    reward = RewardModel([0], [0.0])
    assert metrics.best_demonstration(_Demo(4.0), _Demo(3.0), _Demo(0.0), reward) == 0.75


def test_spearman():
    """Rank correlation with average ranks for ties."""
    assert metrics.spearman([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert metrics.spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert metrics.spearman([1, 2, 3], [3, 1, 2]) == pytest.approx(-0.5)
    xs = [0.3, 1.2, 5.0, 7.5, 9.9]
    ys = [2.0, 1.0, 4.0, 3.0, 5.0]
    transformed = [math.exp(x) for x in xs]
    assert metrics.spearman(transformed, ys) == pytest.approx(metrics.spearman(xs, ys))
    assert -1.0 <= metrics.spearman([1, 1, 2, 3], [4, 2, 2, 1]) <= 1.0


def test_spearman_undefined():
    """Constant input or too few pairs cannot be correlated."""
    with pytest.raises(UndefinedCorrelationError):
        metrics.spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(MetricError):
        metrics.spearman([1, 2], [1, 2])
    with pytest.raises(MetricError):
        metrics.spearman([1, 2, 3], [1, 2])


def test_metric_report():
    """Reports validate their ranges and round trip through dicts."""
    report = MetricReport("manhattan", "manhattan", 3, 1.2, 0.9, 0.05, 0.8, None)
    assert MetricReport.from_dict(report.to_dict()).to_dict() == report.to_dict()
    assert report.to_dict()["best_demonstration"] is None
    with pytest.raises(MetricError):
        MetricReport("a", "b", 1, -0.5, 0.0, 0.0)
    with pytest.raises(MetricError):
        MetricReport("a", "b", 1, 0.0, 0.0, float("nan"))
    with pytest.raises(MetricError):
        MetricReport("a", "b", 1, 0.0, 0.0, 0.0, feature_rank=1.5)

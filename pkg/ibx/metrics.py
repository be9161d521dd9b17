"""Evaluation metrics for abstractions.

- complexity: I(X;Z) of the abstraction, in bits.
- distortion: MSE of the best per-cluster prediction of a target reward.
- feature rank: intersection over union of pairwise orderings.
- best demonstration: regret of a path normalized by the optimal-worst gap.
- spearman: rank correlation with average ranks for ties.
"""
import logging
import math
from typing import FrozenSet, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from .const import RANK_BY_MAGNITUDE, RANK_BY_VALUE, REGRET_TOLERANCE, IBXError
from .domains import RewardModel
from .ib_core import Encoder, JointDistribution, mutual_information

logger = logging.getLogger(__name__)


class MetricError(IBXError, ValueError):
    """Raised when a metric's input contract is violated."""


class DegenerateTaskError(MetricError):
    """Raised when the optimal and worst demonstrations have the same value."""


class UndefinedCorrelationError(MetricError):
    """Raised when a ranked input has zero variance."""


def complexity(encoder: Encoder, joint: JointDistribution) -> float:
    """I(X;Z) in bits of the joint induced by ``encoder`` on p(x)."""
    encoder.check_covers(joint)
    return mutual_information(joint.p_x[:, None] * encoder.membership())


def informativeness(encoder: Encoder, joint: JointDistribution) -> float:
    """I(Y;Z) in bits, with Y distributed as in ``joint``."""
    encoder.check_covers(joint)
    regrouped = Encoder.from_assignments(joint, encoder.assignments)
    return mutual_information(regrouped.cluster_joint())


def cluster_means(encoder: Encoder, target: RewardModel) -> np.ndarray:
    """Mean of ``target`` over the members of each cluster."""
    target.check_covers(encoder.x_support)
    totals = np.bincount(
        encoder.assignments, weights=target.weights, minlength=encoder.n_clusters
    )
    counts = np.bincount(encoder.assignments, minlength=encoder.n_clusters)
    return totals / counts


def distortion(encoder: Encoder, target: RewardModel) -> float:
    """Mean squared error of predicting ``target`` by its cluster mean.

    The means are recomputed against ``target``, not the training objective.
    """
    residual = cluster_means(encoder, target)[encoder.assignments] - target.weights
    return float(np.mean(residual**2))


class RankingSet:
    """A set of ordered pairs (a, b) meaning a is ranked strictly above b."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[Tuple[int, int]] = ()) -> None:
        self.pairs: FrozenSet[Tuple[int, int]] = frozenset(
            (int(a), int(b)) for a, b in pairs
        )
        for a, b in self.pairs:
            if a == b:
                raise MetricError(f"Item {a} cannot be ranked above itself")
            if (b, a) in self.pairs:
                raise MetricError(f"Items {a} and {b} are ranked both ways")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self.pairs))

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankingSet):
            return NotImplemented
        return self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"<RankingSet pairs={sorted(self.pairs)}>"


def pairwise_ranking(
    values: Mapping[int, float], query: Sequence[int], rank_by: str = RANK_BY_VALUE
) -> RankingSet:
    """All pairs of ``query`` items ordered by ``values``; ties give no pair.

    :param rank_by: ``"value"`` ranks signed values, ``"magnitude"`` their
        absolute values.
    """
    if rank_by not in (RANK_BY_VALUE, RANK_BY_MAGNITUDE):
        raise MetricError(f"Unknown ranking mode {rank_by!r}")
    if len(set(query)) != len(query):
        raise MetricError("Query items must be distinct")
    missing = [item for item in query if item not in values]
    if missing:
        raise MetricError(f"No value for queried items {missing}")
    score = {
        item: abs(values[item]) if rank_by == RANK_BY_MAGNITUDE else values[item]
        for item in query
    }
    return RankingSet(
        (a, b) for a in query for b in query if score[a] > score[b]
    )


def feature_rank(human: RankingSet, ground_truth: RankingSet) -> float:
    """|human & ground_truth| / |human | ground_truth|; 1.0 when both are empty."""
    union = human.pairs | ground_truth.pairs
    if not union:
        return 1.0
    return len(human.pairs & ground_truth.pairs) / len(union)


def regret_score(optimal: float, human: float, worst: float) -> float:
    """1 - (optimal - human) / (optimal - worst) on raw path values.

    :raise DegenerateTaskError: if optimal and worst coincide.
    :raise MetricError: if ``human`` lies outside [worst, optimal].
    """
    gap = optimal - worst
    if abs(gap) <= REGRET_TOLERANCE:
        raise DegenerateTaskError(
            f"Optimal and worst demonstrations are both worth {optimal}"
        )
    if gap < 0:
        raise MetricError(f"Optimal value {optimal} is below worst value {worst}")
    if human > optimal + REGRET_TOLERANCE or human < worst - REGRET_TOLERANCE:
        raise MetricError(
            f"Demonstration value {human} is outside [{worst}, {optimal}]"
        )
    return min(1.0, max(0.0, 1.0 - (optimal - human) / gap))


def best_demonstration(optimal, human, worst, target: RewardModel) -> float:
    """Regret score of ``human`` between ``optimal`` and ``worst`` under ``target``.

    The demonstrations only need a ``value(reward)`` method.
    """
    return regret_score(optimal.value(target), human.value(target), worst.value(target))


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman correlation with average ranks for ties.

    :raise UndefinedCorrelationError: if either input is constant.
    """
    if len(xs) != len(ys):
        raise MetricError(f"Length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise MetricError("Spearman correlation needs at least 3 pairs")
    rx = rankdata(xs)
    ry = rankdata(ys)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    sxx = float(np.dot(rx, rx))
    syy = float(np.dot(ry, ry))
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelationError("Correlation is undefined for a constant input")
    return min(1.0, max(-1.0, float(np.dot(rx, ry)) / math.sqrt(sxx * syy)))


class MetricReport:
    """All metrics of one abstraction evaluated against one target reward.

    ``feature_rank`` and ``best_demonstration`` are None when no query or task applied.
    """

    __slots__ = (
        "encoder_label",
        "target_label",
        "n_clusters",
        "complexity_bits",
        "informativeness_bits",
        "distortion_mse",
        "feature_rank",
        "best_demonstration",
    )

    def __init__(
        self,
        encoder_label: str,
        target_label: str,
        n_clusters: int,
        complexity_bits: float,
        informativeness_bits: float,
        distortion_mse: float,
        feature_rank: Optional[float] = None,
        best_demonstration: Optional[float] = None,
    ) -> None:
        for name, value in (
            ("complexity_bits", complexity_bits),
            ("informativeness_bits", informativeness_bits),
            ("distortion_mse", distortion_mse),
        ):
            if not math.isfinite(value) or value < 0:
                raise MetricError(f"{name} must be finite and non-negative, got {value}")
        for name, value in (
            ("feature_rank", feature_rank),
            ("best_demonstration", best_demonstration),
        ):
            if value is not None and not 0.0 <= value <= 1.0:
                raise MetricError(f"{name} must lie in [0, 1], got {value}")
        self.encoder_label = encoder_label
        self.target_label = target_label
        self.n_clusters = n_clusters
        self.complexity_bits = complexity_bits
        self.informativeness_bits = informativeness_bits
        self.distortion_mse = distortion_mse
        self.feature_rank = feature_rank
        self.best_demonstration = best_demonstration

    def __repr__(self) -> str:
        return (
            f"<MetricReport {self.encoder_label} vs {self.target_label}: "
            f"distortion={self.distortion_mse:.6g} fr={self.feature_rank} "
            f"bd={self.best_demonstration}>"
        )

    def to_dict(self) -> dict:
        return {slot: getattr(self, slot) for slot in self.__slots__}

    @classmethod
    def from_dict(cls, data: Mapping) -> "MetricReport":
        return cls(**{slot: data[slot] for slot in cls.__slots__})

"""Discrete information theory and the deterministic information bottleneck (DIB).

A :class:`JointDistribution` p(x, y) couples domain items X with quantized reward
levels Y. The DIB solver groups items into a hard abstraction Z (an
:class:`Encoder`) by trading informativeness I(Y;Z) against complexity H(Z):

    maximize    weight * I(Y;Z) - H(Z)

``weight`` plays the role of 1/beta of the usual "I(Y;Z) - beta I(X;Z)" form.
For a deterministic encoder I(X;Z) = H(Z), so complexity is the entropy of the
cluster prior.

The solver alternates between recomputing the cluster statistics q(z), q(y|z)
and reassigning every item to

    argmax_z  log q(z) + weight * sum_y p(y|x) log q(y|z)

Once the reassignment is a fixed point the best single merge of two clusters is
applied when it strictly improves the objective, then the reassignment resumes.
Neither step can decrease the objective.

When Y is a deterministic function of X every reassignment fixed point keeps each
reward level inside one cluster, and the plain objective only distinguishes "one
cluster" from "one cluster per reward level". A positive ``bandwidth`` replaces
p(y|x) by a Gaussian-smoothed relevance so that nearby reward values carry
information about each other; intermediate weights then yield intermediate,
reward-contiguous abstractions. Reported statistics always use the raw joint.
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import entr, rel_entr

from .const import (
    DEFAULT_BANDWIDTH,
    DEFAULT_MAX_ITERS,
    DEFAULT_REFINE_DEPTH,
    INIT_IDENTITY,
    INIT_RANDOM,
    JOINT_TOLERANCE,
    NORMALIZATION_TOLERANCE,
    PARETO_TOLERANCE,
    IBXError,
)

logger = logging.getLogger(__name__)

LOG2 = np.log(2.0)
MERGE_TOLERANCE = 1e-12


class DistributionError(IBXError, ValueError):
    """Raised for invalid probability vectors and joint tables."""


class SupportMismatchError(IBXError, ValueError):
    """Raised when an encoder, joint or reward do not cover the same items."""


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_pmf(pmf) -> np.ndarray:
    """Validate and return ``pmf`` as a float vector."""
    p = np.asarray(pmf, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DistributionError("A probability vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DistributionError(f"Probability masses must be finite and non-negative: {p}")
    total = p.sum()
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise DistributionError(f"Probability masses sum to {total!r}, not 1")
    return p


def _as_joint_table(table, tolerance: float = NORMALIZATION_TOLERANCE) -> np.ndarray:
    """Validate and return a two-dimensional joint probability table."""
    t = np.asarray(table, dtype=float)
    if t.ndim != 2 or t.size == 0:
        raise DistributionError("A joint table must be two-dimensional and non-empty")
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise DistributionError("Joint masses must be finite and non-negative")
    total = t.sum()
    if abs(total - 1.0) > tolerance:
        raise DistributionError(f"Joint masses sum to {total!r}, not 1")
    return t


def entropy(pmf) -> float:
    """Return the entropy of ``pmf`` in bits, with 0 log 0 = 0.

    :raise DistributionError: for negative or non-normalized input.
    """
    p = _as_pmf(pmf)
    return max(0.0, float(entr(p).sum() / LOG2))


def mutual_information(joint: Union["JointDistribution", np.ndarray]) -> float:
    """Return I(X;Y) in bits of a :class:`JointDistribution` or a 2-D joint table.

    Rows index the first variable, columns the second, so a cluster joint
    q(z, y) gives I(Y;Z) and an induced (x, z) table gives I(X;Z).
    """
    if isinstance(joint, JointDistribution):
        table = joint.table
    else:
        table = _as_joint_table(joint)
    independent = np.outer(table.sum(axis=1), table.sum(axis=0))
    return max(0.0, float(rel_entr(table, independent).sum() / LOG2))


class JointDistribution:
    """A discrete joint p(x, y) over item ids and distinct reward levels."""

    __slots__ = ("x_support", "y_support", "table", "_p_x", "_p_y_given_x", "_index")

    def __init__(
        self, x_support: Sequence[int], y_support: Sequence[float], table
    ) -> None:
        """Initialise and validate.

        :param x_support: Item ids, one per table row.
        :type x_support: list of int

        :param y_support: Distinct reward levels, one per table column.
        :type y_support: list of float

        :param table: Probability mass per (x, y) pair.
        :type table: array-like of shape (len(x_support), len(y_support))

        :raise DistributionError: if any invariant is violated.
        """
        self.x_support: Tuple[int, ...] = tuple(int(x) for x in x_support)
        self.y_support: Tuple[float, ...] = tuple(float(y) for y in y_support)
        if len(set(self.x_support)) != len(self.x_support):
            raise DistributionError("Item ids must be distinct")
        if len(set(self.y_support)) != len(self.y_support):
            raise DistributionError("Reward levels must be distinct")
        table = _as_joint_table(table, JOINT_TOLERANCE).copy()
        if table.shape != (len(self.x_support), len(self.y_support)):
            raise DistributionError(
                f"Joint table has shape {table.shape}, expected "
                f"({len(self.x_support)}, {len(self.y_support)})"
            )
        p_x = table.sum(axis=1)
        if np.any(p_x <= 0):
            raise DistributionError("Every item needs a positive marginal p(x)")
        self.table = _readonly(table)
        self._p_x = _readonly(p_x)
        self._p_y_given_x = _readonly(table / p_x[:, None])
        self._index = {x: i for i, x in enumerate(self.x_support)}

    @classmethod
    def from_rewards(
        cls, item_ids: Sequence[int], rewards: Sequence[float]
    ) -> "JointDistribution":
        """Uniform p(x) with Y the (deterministic) reward of each item."""
        values = np.asarray(rewards, dtype=float)
        if values.ndim != 1 or values.size != len(item_ids) or values.size == 0:
            raise DistributionError("Need exactly one reward per item")
        levels, column = np.unique(values, return_inverse=True)
        table = np.zeros((values.size, levels.size))
        table[np.arange(values.size), column] = 1.0 / values.size
        return cls(item_ids, levels, table)

    def __repr__(self) -> str:
        return f"<JointDistribution items={len(self.x_support)} levels={len(self.y_support)}>"

    @property
    def n_items(self) -> int:
        return len(self.x_support)

    @property
    def p_x(self) -> np.ndarray:
        return self._p_x

    @property
    def p_y(self) -> np.ndarray:
        return self.table.sum(axis=0)

    @property
    def p_y_given_x(self) -> np.ndarray:
        return self._p_y_given_x

    @property
    def y_values(self) -> np.ndarray:
        return np.asarray(self.y_support, dtype=float)

    @property
    def is_deterministic(self) -> bool:
        """Whether every item row has exactly one nonzero entry."""
        return bool(np.all(np.count_nonzero(self.table, axis=1) == 1))

    def index_of(self, x: int) -> int:
        """Return the row index of item ``x``."""
        try:
            return self._index[x]
        except KeyError:
            raise SupportMismatchError(f"Item {x} is not in the joint support") from None

    def entropy_y(self) -> float:
        return entropy(self.p_y)

    def mutual_information(self) -> float:
        return mutual_information(self)


def compact_labels(assignments) -> np.ndarray:
    """Relabel cluster ids to 0..K-1 in order of first appearance."""
    labels = np.asarray(assignments, dtype=np.int64)
    if labels.ndim != 1:
        raise ValueError("Assignments must be one-dimensional")
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[np.ravel(inverse)]


class Encoder:
    """A deterministic abstraction z(x) with its per-cluster reward statistics.

    Instances are immutable; build them with :meth:`from_assignments`.
    """

    __slots__ = (
        "x_support",
        "assignments",
        "cluster_prior",
        "cluster_predictive",
        "cluster_mean",
        "y_support",
        "source_objective",
        "weight",
        "converged",
        "_index",
    )

    def __init__(
        self,
        x_support: Sequence[int],
        assignments,
        cluster_prior,
        cluster_predictive,
        y_support: Sequence[float],
        source_objective: str = "",
        weight: Optional[float] = None,
        converged: bool = True,
    ) -> None:
        """Initialise and validate the encoder invariants."""
        self.x_support: Tuple[int, ...] = tuple(int(x) for x in x_support)
        labels = np.array(assignments, dtype=np.int64)
        if labels.shape != (len(self.x_support),):
            raise DistributionError("Need exactly one cluster id per item")
        n_clusters = int(labels.max()) + 1
        if labels.min() < 0 or np.unique(labels).size != n_clusters:
            raise DistributionError("Cluster ids must be contiguous from 0 with no empty cluster")
        prior = np.array(cluster_prior, dtype=float)
        predictive = np.array(cluster_predictive, dtype=float)
        if prior.shape != (n_clusters,) or abs(prior.sum() - 1.0) > JOINT_TOLERANCE:
            raise DistributionError("Cluster prior must be a distribution over the clusters")
        if predictive.shape != (n_clusters, len(y_support)) or np.any(
            np.abs(predictive.sum(axis=1) - 1.0) > JOINT_TOLERANCE
        ):
            raise DistributionError("Every q(y|z) row must sum to 1")
        self.assignments = _readonly(labels)
        self.cluster_prior = _readonly(prior)
        self.cluster_predictive = _readonly(predictive)
        self.y_support: Tuple[float, ...] = tuple(float(y) for y in y_support)
        self.cluster_mean = _readonly(predictive @ np.asarray(self.y_support, dtype=float))
        self.source_objective = source_objective
        self.weight = weight
        self.converged = converged
        self._index = {x: i for i, x in enumerate(self.x_support)}

    @classmethod
    def from_assignments(
        cls,
        joint: JointDistribution,
        assignments,
        source_objective: str = "",
        weight: Optional[float] = None,
        converged: bool = True,
    ) -> "Encoder":
        """Compute q(z), q(y|z) and the cluster means for the given assignments.

        Assignments are indexed like ``joint.x_support``; ids are compacted.
        """
        labels = compact_labels(assignments)
        if labels.size != joint.n_items:
            raise SupportMismatchError(
                f"{labels.size} assignments for {joint.n_items} items"
            )
        n_clusters = int(labels.max()) + 1
        prior = np.bincount(labels, weights=joint.p_x, minlength=n_clusters)
        cluster_joint = np.zeros((n_clusters, len(joint.y_support)))
        np.add.at(cluster_joint, labels, joint.table)
        return cls(
            joint.x_support,
            labels,
            prior,
            cluster_joint / prior[:, None],
            joint.y_support,
            source_objective=source_objective,
            weight=weight,
            converged=converged,
        )

    def __repr__(self) -> str:
        return (
            f"<Encoder objective={self.source_objective!r} clusters={self.n_clusters} "
            f"weight={self.weight} converged={self.converged}>"
        )

    @property
    def n_clusters(self) -> int:
        return self.cluster_prior.size

    def cluster_of(self, x: int) -> int:
        """Return the cluster id of item ``x``."""
        try:
            return int(self.assignments[self._index[x]])
        except KeyError:
            raise SupportMismatchError(f"Item {x} is not covered by the encoder") from None

    def members(self, z: int) -> List[int]:
        """Return the item ids assigned to cluster ``z``."""
        return [x for x, label in zip(self.x_support, self.assignments) if label == z]

    def membership(self) -> np.ndarray:
        """Return the (items x clusters) 0/1 membership matrix."""
        matrix = np.zeros((len(self.x_support), self.n_clusters))
        matrix[np.arange(len(self.x_support)), self.assignments] = 1.0
        return matrix

    def cluster_joint(self) -> np.ndarray:
        """Return the (clusters x levels) joint q(z, y)."""
        return self.cluster_prior[:, None] * self.cluster_predictive

    def same_partition(self, other: "Encoder") -> bool:
        """Whether both encoders group the same items together."""
        return self.x_support == other.x_support and np.array_equal(
            compact_labels(self.assignments), compact_labels(other.assignments)
        )

    def check_covers(self, joint: JointDistribution) -> None:
        """Raise :class:`SupportMismatchError` unless this encoder covers ``joint``."""
        if self.x_support != joint.x_support:
            raise SupportMismatchError(
                f"Encoder covers {len(self.x_support)} items, joint has "
                f"{joint.n_items}; supports differ"
            )


def identity_encoder(joint: JointDistribution, source_objective: str = "") -> Encoder:
    """One cluster per item."""
    return Encoder.from_assignments(joint, np.arange(joint.n_items), source_objective)


def partition_by_value(joint: JointDistribution, source_objective: str = "") -> Encoder:
    """Group items whose conditional p(y|x) rows are identical."""
    _, labels = np.unique(joint.p_y_given_x, axis=0, return_inverse=True)
    return Encoder.from_assignments(joint, np.ravel(labels), source_objective)


def smoothed_relevance(joint: JointDistribution, bandwidth: float) -> np.ndarray:
    """Return p~(y|x): each level spreads over the levels with a Gaussian kernel.

    The kernel width is ``bandwidth`` times the spread of the reward levels; a
    zero bandwidth returns the raw p(y|x).
    """
    if bandwidth < 0:
        raise ValueError("Bandwidth must be non-negative")
    values = joint.y_values
    spread = values.max() - values.min()
    if bandwidth == 0 or spread == 0:
        return joint.p_y_given_x
    sigma = bandwidth * spread
    kernel = np.exp(-((values[:, None] - values[None, :]) ** 2) / (2.0 * sigma**2))
    kernel /= kernel.sum(axis=1, keepdims=True)
    return joint.p_y_given_x @ kernel


def random_assignments(n_items: int, seed: int) -> np.ndarray:
    """Seeded random start: every item draws one of ``n_items`` labels."""
    return np.random.default_rng(seed).integers(0, n_items, size=n_items)


class DIBSolver:
    """Runs the DIB iteration for one joint and one weight.

    ``history`` holds the objective after every recomputation of the cluster
    statistics during the last :meth:`run`; it never decreases.
    """

    def __init__(
        self,
        joint: JointDistribution,
        weight: float,
        *,
        bandwidth: float = 0.0,
        max_iters: int = DEFAULT_MAX_ITERS,
        merges: bool = True,
        source_objective: str = "",
    ) -> None:
        if not weight > 0:
            raise ValueError(f"Weight must be positive, got {weight}")
        if max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        self.joint = joint
        self.weight = float(weight)
        self.bandwidth = bandwidth
        self.max_iters = max_iters
        self.merges = merges
        self.source_objective = source_objective
        self.history: List[float] = []
        self.iterations = 0
        self._relevance = smoothed_relevance(joint, bandwidth)
        self._relevance_joint = joint.p_x[:, None] * self._relevance
        self._relevance_marginal = self._relevance_joint.sum(axis=0)

    def _statistics(self, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        n_clusters = int(labels.max()) + 1
        prior = np.bincount(labels, weights=self.joint.p_x, minlength=n_clusters)
        cluster_joint = np.zeros((n_clusters, self._relevance.shape[1]))
        np.add.at(cluster_joint, labels, self._relevance_joint)
        return prior, cluster_joint / prior[:, None]

    def _objective(self, prior: np.ndarray, predictive: np.ndarray) -> float:
        complexity = entr(prior).sum() / LOG2
        informativeness = (
            prior[:, None] * rel_entr(predictive, self._relevance_marginal[None, :])
        ).sum() / LOG2
        return float(self.weight * informativeness - complexity)

    def objective(self, assignments) -> float:
        """Return weight * I(Y;Z) - H(Z) for the given assignments."""
        return self._objective(*self._statistics(compact_labels(assignments)))

    def _reassign(self, prior: np.ndarray, predictive: np.ndarray) -> np.ndarray:
        positive = predictive > 0
        log_predictive = np.log(np.where(positive, predictive, 1.0))
        # einsum keeps one summation order per entry, so identical clusters tie exactly
        fit = np.einsum("xy,zy->xz", self._relevance, log_predictive)
        impossible = (self._relevance > 0).astype(float) @ (~positive).astype(float).T
        scores = np.log(prior)[None, :] + self.weight * fit
        scores[impossible > 0] = -np.inf
        return np.argmax(scores, axis=1)

    def _best_merge(
        self, prior: np.ndarray, predictive: np.ndarray
    ) -> Optional[Tuple[int, int]]:
        n_clusters = prior.size
        if n_clusters < 2:
            return None
        p_a = prior[:, None]
        p_b = prior[None, :]
        p_ab = p_a + p_b
        complexity_drop = (entr(p_a) + entr(p_b) - entr(p_ab)) / LOG2
        mixed = (
            p_a[..., None] * predictive[:, None, :] + p_b[..., None] * predictive[None, :, :]
        ) / p_ab[..., None]
        information_loss = (
            p_a[..., None] * rel_entr(predictive[:, None, :], mixed)
            + p_b[..., None] * rel_entr(predictive[None, :, :], mixed)
        ).sum(axis=-1) / LOG2
        gain = complexity_drop - self.weight * information_loss
        gain[np.tril_indices(n_clusters)] = -np.inf
        a, b = np.unravel_index(np.argmax(gain), gain.shape)
        if gain[a, b] <= MERGE_TOLERANCE:
            return None
        return int(a), int(b)

    def run(self, assignments) -> Encoder:
        """Iterate from ``assignments`` to a fixed point (or ``max_iters``)."""
        labels = compact_labels(assignments)
        if labels.size != self.joint.n_items:
            raise SupportMismatchError(
                f"{labels.size} assignments for {self.joint.n_items} items"
            )
        self.history = []
        converged = False
        iteration = 0
        for iteration in range(1, self.max_iters + 1):
            prior, predictive = self._statistics(labels)
            self.history.append(self._objective(prior, predictive))
            new_labels = compact_labels(self._reassign(prior, predictive))
            if np.array_equal(new_labels, labels):
                merge = self._best_merge(prior, predictive) if self.merges else None
                if merge is None:
                    converged = True
                    break
                logger.debug(
                    "weight=%g: merging clusters %s and %s of %d",
                    self.weight,
                    merge[0],
                    merge[1],
                    prior.size,
                )
                new_labels = compact_labels(np.where(labels == merge[1], merge[0], labels))
            labels = new_labels
        else:
            # the last reassignment or merge has not been scored yet
            self.history.append(self.objective(labels))
        self.iterations = iteration
        if not converged:
            logger.warning(
                "DIB did not converge after %d iterations (weight=%g, objective=%s)",
                self.max_iters,
                self.weight,
                self.source_objective,
            )
        return Encoder.from_assignments(
            self.joint,
            labels,
            source_objective=self.source_objective,
            weight=self.weight,
            converged=converged,
        )


def objective(
    joint: JointDistribution, assignments, weight: float, bandwidth: float = 0.0
) -> float:
    """Return the DIB objective weight * I(Y;Z) - H(Z) of ``assignments``."""
    return DIBSolver(joint, weight, bandwidth=bandwidth).objective(assignments)


def solve_dib(
    joint: JointDistribution,
    weight: float,
    init: str = INIT_IDENTITY,
    max_iters: int = DEFAULT_MAX_ITERS,
    restarts: int = 0,
    *,
    seed: int = 0,
    bandwidth: float = 0.0,
    warm_start=None,
    source_objective: str = "",
) -> Encoder:
    """Solve the DIB for one weight and return the best encoder found.

    :param init: ``"identity"`` (one cluster per item) or ``"random"`` (seeded
        by ``seed``). Ignored when ``warm_start`` assignments are given.
    :type init: str

    :param restarts: Number of extra random starts, seeded ``seed + 1 ...``.
    :type restarts: int

    :return: The encoder with the highest objective; ties keep the earliest start.
        A non-converged encoder has ``converged`` set to False.
    :rtype: Encoder
    """
    if init not in (INIT_IDENTITY, INIT_RANDOM):
        raise ValueError(f"Unknown init {init!r}")
    if restarts < 0:
        raise ValueError("restarts must be non-negative")
    solver = DIBSolver(
        joint,
        weight,
        bandwidth=bandwidth,
        max_iters=max_iters,
        source_objective=source_objective,
    )
    if warm_start is not None:
        starts = [np.asarray(warm_start)]
    elif init == INIT_IDENTITY:
        starts = [np.arange(joint.n_items)]
    else:
        starts = [random_assignments(joint.n_items, seed)]
    starts.extend(random_assignments(joint.n_items, seed + 1 + k) for k in range(restarts))

    best: Optional[Encoder] = None
    best_value = -np.inf
    for start in starts:
        encoder = solver.run(start)
        value = solver.history[-1]
        if best is None or value > best_value + MERGE_TOLERANCE:
            best, best_value = encoder, value
    return best


class FrontierPoint:
    """One solved weight: the encoder and its complexity, informativeness, distortion."""

    __slots__ = (
        "weight",
        "n_clusters",
        "complexity_bits",
        "informativeness_bits",
        "distortion_mse",
        "encoder",
    )

    def __init__(
        self,
        weight: float,
        n_clusters: int,
        complexity_bits: float,
        informativeness_bits: float,
        distortion_mse: float,
        encoder: Encoder,
    ) -> None:
        self.weight = weight
        self.n_clusters = n_clusters
        self.complexity_bits = complexity_bits
        self.informativeness_bits = informativeness_bits
        self.distortion_mse = distortion_mse
        self.encoder = encoder

    @classmethod
    def from_encoder(
        cls, joint: JointDistribution, encoder: Encoder, weight: Optional[float] = None
    ) -> "FrontierPoint":
        """Evaluate ``encoder`` against the raw ``joint``."""
        encoder.check_covers(joint)
        prediction = encoder.cluster_mean[encoder.assignments]
        squared_error = (joint.y_values[None, :] - prediction[:, None]) ** 2
        return cls(
            weight=encoder.weight if weight is None else weight,
            n_clusters=encoder.n_clusters,
            complexity_bits=entropy(encoder.cluster_prior),
            informativeness_bits=mutual_information(encoder.cluster_joint()),
            distortion_mse=float((joint.table * squared_error).sum()),
            encoder=encoder,
        )

    @property
    def beta(self) -> float:
        """The complexity multiplier of the "I(Y;Z) - beta H(Z)" form."""
        return 1.0 / self.weight

    def __repr__(self) -> str:
        return (
            f"<FrontierPoint weight={self.weight:.6g} clusters={self.n_clusters} "
            f"complexity={self.complexity_bits:.6g} distortion={self.distortion_mse:.6g}>"
        )


def pareto_front(points: Sequence[FrontierPoint]) -> List[FrontierPoint]:
    """Drop dominated points; the result has strictly increasing complexity and
    strictly decreasing distortion."""
    ordered = sorted(
        points, key=lambda p: (p.complexity_bits, p.distortion_mse, -p.weight)
    )
    front: List[FrontierPoint] = []
    for point in ordered:
        if front and point.distortion_mse >= front[-1].distortion_mse - PARETO_TOLERANCE:
            continue
        if front and point.complexity_bits <= front[-1].complexity_bits + PARETO_TOLERANCE:
            front[-1] = point
            continue
        front.append(point)
    return front


def sweep_frontier(
    joint: JointDistribution,
    weight_grid: Sequence[float],
    init: str = INIT_IDENTITY,
    restarts: int = 0,
    *,
    seed: int = 0,
    bandwidth: float = DEFAULT_BANDWIDTH,
    max_iters: int = DEFAULT_MAX_ITERS,
    refine_depth: int = DEFAULT_REFINE_DEPTH,
    source_objective: str = "",
) -> List[FrontierPoint]:
    """Trace the complexity-distortion frontier over ``weight_grid``.

    The largest weight is solved from ``init``; every smaller weight is
    warm-started from the previous solution. When the cluster count drops by
    more than one between neighbouring weights, their geometric midpoint is
    solved as well, recursively up to ``refine_depth`` times.

    With a positive ``bandwidth`` the smoothed relevance already treats close
    reward levels as one, so even the largest weight may stop short of the
    lossless partition: on the random grid with the default bandwidth the front
    ends around 17 clusters. Sweep with ``bandwidth=0`` to reach
    :func:`partition_by_value`.

    :return: The Pareto front sorted by complexity.
    :rtype: list of FrontierPoint
    """
    weights = [float(w) for w in weight_grid]
    if not weights:
        raise ValueError("The weight grid must not be empty")
    if any(w <= 0 for w in weights):
        raise ValueError("Weights must be positive")
    if any(b < a for a, b in zip(weights, weights[1:])):
        raise ValueError("The weight grid must be sorted ascending")

    def solve(weight: float, warm_start=None) -> Encoder:
        return solve_dib(
            joint,
            weight,
            init,
            max_iters,
            restarts,
            seed=seed,
            bandwidth=bandwidth,
            warm_start=warm_start,
            source_objective=source_objective,
        )

    def anneal(high: float, encoder: Encoder, low: float, depth: int):
        solved = solve(low, encoder.assignments)
        if depth <= 0 or encoder.n_clusters - solved.n_clusters <= 1:
            return [solved]
        middle = float(np.sqrt(high * low))
        logger.debug("Refining between weights %g and %g", high, low)
        upper = anneal(high, encoder, middle, depth - 1)
        return upper + anneal(middle, upper[-1], low, depth - 1)

    descending = sorted(set(weights), reverse=True)
    encoders = [solve(descending[0])]
    for high, low in zip(descending, descending[1:]):
        encoders.extend(anneal(high, encoders[-1], low, refine_depth))

    points = [FrontierPoint.from_encoder(joint, encoder) for encoder in encoders]
    front = pareto_front(points)
    logger.debug(
        "Swept %d weights (%d solves) for %r, %d frontier points",
        len(descending),
        len(points),
        source_objective,
        len(front),
    )
    return front


def checkpoint_targets(
    frontier: Sequence[FrontierPoint], target_cluster_counts: Sequence[int]
) -> List[Tuple[int, FrontierPoint]]:
    """Pair every distinct checkpoint with the first target that selected it."""
    if not frontier:
        raise ValueError("The frontier must not be empty")
    selected: List[Tuple[int, FrontierPoint]] = []
    for target in target_cluster_counts:
        if target < 1:
            raise ValueError(f"Cluster count targets must be >= 1, got {target}")
        point = min(
            frontier, key=lambda p: (abs(p.n_clusters - target), p.complexity_bits)
        )
        if not any(point is chosen for _, chosen in selected):
            selected.append((target, point))
    return selected


def select_checkpoints(
    frontier: Sequence[FrontierPoint], target_cluster_counts: Sequence[int]
) -> List[FrontierPoint]:
    """Pick the frontier point nearest to each target cluster count.

    Ties go to the lower complexity; repeated picks are kept once, in order.
    """
    return [point for _, point in checkpoint_targets(frontier, target_cluster_counts)]


def retarget_frontier(
    points: Sequence[FrontierPoint], joint: JointDistribution
) -> List[FrontierPoint]:
    """Re-evaluate every point's abstraction against another joint on the same items.

    Cluster statistics are recomputed from ``joint``; the points keep their
    order and are not pruned.
    """
    retargeted = []
    for point in points:
        encoder = point.encoder
        encoder.check_covers(joint)
        regrouped = Encoder.from_assignments(
            joint,
            encoder.assignments,
            source_objective=encoder.source_objective,
            weight=point.weight,
            converged=encoder.converged,
        )
        retargeted.append(FrontierPoint.from_encoder(joint, regrouped, point.weight))
    return retargeted

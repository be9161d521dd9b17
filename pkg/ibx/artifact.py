"""This module persists and loads the artifacts of a run.

Domains, encoders, tasks and metric reports are stored as sorted, indented JSON
so that identical runs produce identical bytes. Frontiers and suite results
are CSV files.

The idea is:
    - A domain file pins the full reward table, so a random grid is never
      re-rolled by a later command.
    - An encoder file stores the assignments together with the statistics of
      the objective it was trained on; loading it restores the same encoder.
    - Every file carries the ``config_hash`` of the parameters that made it.
"""
import csv
import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import util
from .const import FRONTIER_CSV_HEADER, INFO_TOLERANCE, KIND_COLOR, IBXError
from .domains import ColorChart, Domain, DomainSpec, GridWorld, RewardModel
from .ib_core import Encoder, FrontierPoint, JointDistribution, SupportMismatchError
from .metrics import MetricReport
from .tasks import PathTask

logger = logging.getLogger(__name__)


class ArtifactError(IBXError, ValueError):
    """Raised when a stored artifact is incomplete or inconsistent."""


def _require(data, keys: Sequence[str], what: str) -> None:
    if not isinstance(data, dict):
        raise ArtifactError(f"A {what} file must hold a JSON object")
    missing = [key for key in keys if key not in data]
    if missing:
        raise ArtifactError(f"The {what} file lacks {', '.join(missing)}")


class ArtifactEncoder:
    """Persist and load run artifacts through binary file objects.

    Every ``persist_*`` writes one JSON document; the matching ``load_*`` reads
    it back and validates it through the constructors of the loaded type.
    """

    @staticmethod
    def persist_domain(fp, domain: Domain, config_hash: Optional[str] = None) -> None:
        """Persist the spec, the items and the full reward table of ``domain``."""
        data = {
            **domain.spec.to_dict(),
            "item_ids": list(domain.item_ids),
            "reward": domain.reward.weights.tolist(),
            "config_hash": config_hash,
        }
        if domain.kind == KIND_COLOR:
            data["colors"] = domain.items.colors.tolist()
        else:
            data["width"] = domain.items.width
            data["height"] = domain.items.height
        fp.write(util.to_json(data))

    @staticmethod
    def load_domain(fp) -> Domain:
        """Load a domain without rebuilding its reward."""
        data = util.from_json(fp.read())
        _require(data, ("kind", "objective", "seed", "item_ids", "reward"), "domain")
        spec = DomainSpec(data["kind"], data["objective"], data["seed"])
        reward = RewardModel(data["item_ids"], data["reward"])
        if spec.kind == KIND_COLOR:
            _require(data, ("colors",), "domain")
            items = ColorChart(data["colors"])
            reward.check_covers(items.ids)
        else:
            _require(data, ("width", "height"), "domain")
            items = GridWorld(data["width"], data["height"], reward)
        return Domain(spec, items, reward)

    @staticmethod
    def persist_encoder(
        fp,
        point: FrontierPoint,
        config_hash: Optional[str] = None,
        target: Optional[int] = None,
        joint: Optional[JointDistribution] = None,
    ) -> None:
        """Persist the encoder of ``point`` with its frontier coordinates.

        With ``joint``, the training joint is stored as well and loading
        rebuilds the cluster statistics from it.
        """
        encoder = point.encoder
        data = {
            "objective": encoder.source_objective,
            "checkpoint": target,
            "n_items": len(encoder.x_support),
            "x_support": list(encoder.x_support),
            "assignments": encoder.assignments.tolist(),
            "n_clusters": encoder.n_clusters,
            "cluster_prior": encoder.cluster_prior.tolist(),
            "cluster_predictive": encoder.cluster_predictive.tolist(),
            "cluster_means": encoder.cluster_mean.tolist(),
            "y_support": list(encoder.y_support),
            "weight": point.weight,
            "complexity_bits": point.complexity_bits,
            "informativeness_bits": point.informativeness_bits,
            "distortion_mse": point.distortion_mse,
            "converged": encoder.converged,
            "config_hash": config_hash,
        }
        if joint is not None:
            encoder.check_covers(joint)
            if joint.y_support != encoder.y_support:
                raise SupportMismatchError("The joint has other reward levels than the encoder")
            data["joint_table"] = joint.table.tolist()
        fp.write(util.to_json(data))

    @staticmethod
    def load_encoder(fp) -> Encoder:
        """Load an encoder exactly as it was persisted.

        Files with a ``joint_table`` get their statistics rebuilt from the
        assignments and that joint, and the stored ones must agree.

        @see: ArtifactEncoder.persist_encoder
        """
        data = util.from_json(fp.read())
        _require(
            data,
            (
                "objective",
                "x_support",
                "assignments",
                "cluster_prior",
                "cluster_predictive",
                "y_support",
            ),
            "encoder",
        )
        stored = Encoder(
            data["x_support"],
            data["assignments"],
            data["cluster_prior"],
            data["cluster_predictive"],
            data["y_support"],
            source_objective=data["objective"],
            weight=data.get("weight"),
            converged=data.get("converged", True),
        )
        if "joint_table" not in data:
            return stored
        joint = JointDistribution(data["x_support"], data["y_support"], data["joint_table"])
        rebuilt = Encoder.from_assignments(
            joint,
            data["assignments"],
            source_objective=stored.source_objective,
            weight=stored.weight,
            converged=stored.converged,
        )
        if not (
            np.array_equal(rebuilt.assignments, stored.assignments)
            and np.allclose(
                rebuilt.cluster_prior, stored.cluster_prior, rtol=0, atol=INFO_TOLERANCE
            )
            and np.allclose(
                rebuilt.cluster_predictive,
                stored.cluster_predictive,
                rtol=0,
                atol=INFO_TOLERANCE,
            )
        ):
            raise ArtifactError("The stored cluster statistics do not match the stored joint")
        return rebuilt

    @staticmethod
    def persist_task(fp, task: PathTask, config_hash: Optional[str] = None) -> None:
        """Persist a path task including its cell to item assignment."""
        fp.write(util.to_json({**task.to_dict(), "config_hash": config_hash}))

    @staticmethod
    def load_task(fp) -> PathTask:
        data = util.from_json(fp.read())
        _require(data, ("width", "height", "start", "goal", "item_of_cell"), "task")
        return PathTask(
            data["width"], data["height"], data["start"], data["goal"], data["item_of_cell"]
        )

    @staticmethod
    def persist_report(
        fp, report: MetricReport, config_hash: Optional[str] = None, **extra
    ) -> None:
        """Persist a metric report plus any ``extra`` provenance fields."""
        fp.write(util.to_json({**report.to_dict(), **extra, "config_hash": config_hash}))

    @staticmethod
    def load_report(fp) -> MetricReport:
        return MetricReport.from_dict(util.from_json(fp.read()))


def frontier_rows(points: Iterable[FrontierPoint]) -> List[List[str]]:
    """CSV rows (header first) for a frontier, 12 significant digits."""
    rows = [list(FRONTIER_CSV_HEADER)]
    for point in points:
        rows.append(
            [
                util.format_float(point.weight),
                str(point.n_clusters),
                util.format_float(point.complexity_bits),
                util.format_float(point.informativeness_bits),
                util.format_float(point.distortion_mse),
            ]
        )
    return rows


def write_csv(path, rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as csv_file:
        csv.writer(csv_file, lineterminator="\n").writerows(rows)
    logger.debug("Wrote %s", path)


def write_frontier_csv(path, points: Iterable[FrontierPoint]) -> None:
    """Write one row per frontier point."""
    write_csv(path, frontier_rows(points))


def read_frontier_csv(path) -> List[dict]:
    """Read a frontier CSV back as a list of dicts of floats."""
    with open(path, newline="", encoding="utf-8") as csv_file:
        reader = csv.DictReader(csv_file)
        if tuple(reader.fieldnames or ()) != FRONTIER_CSV_HEADER:
            raise ArtifactError(f"{path} is not a frontier CSV")
        return [
            {
                key: (int(value) if key == "n_clusters" else float(value))
                for key, value in row.items()
            }
            for row in reader
        ]

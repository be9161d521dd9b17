"""Tests for ibx.artifact."""
import io
import tempfile

import numpy as np
import pytest

from ibx import artifact, util
from ibx.artifact import ArtifactEncoder, ArtifactError
from ibx.domains import ColorChart, DomainSpec, build_domain
from ibx.ib_core import (
    Encoder,
    FrontierPoint,
    SupportMismatchError,
    identity_encoder,
    solve_dib,
)
from ibx.metrics import MetricReport
from ibx.tasks import color_task, grid_task


def _round_trip(persist, load, *values, **kwargs):
    with tempfile.TemporaryFile(mode="w+b") as fp:
        persist(fp, *values, **kwargs)
        fp.seek(0)
        return load(fp)


def test_persist_and_load_domain(random_grid, blue_discontinuous):
    """A loaded domain keeps its reward table and items."""
    for domain in (random_grid, blue_discontinuous):
        loaded = _round_trip(
            ArtifactEncoder.persist_domain, ArtifactEncoder.load_domain, domain, "abc"
        )
        assert loaded.spec == domain.spec
        assert loaded.reward == domain.reward
        assert loaded.item_ids == domain.item_ids
    loaded = _round_trip(
        ArtifactEncoder.persist_domain, ArtifactEncoder.load_domain, blue_discontinuous
    )
    assert loaded.items == blue_discontinuous.items


def test_persist_domain_is_byte_identical(random_grid):
    """Persisting twice gives the same bytes."""
    first, second = io.BytesIO(), io.BytesIO()
    ArtifactEncoder.persist_domain(first, random_grid, "abc")
    ArtifactEncoder.persist_domain(second, random_grid, "abc")
    assert first.getvalue() == second.getvalue()
    assert util.from_json(first.getvalue())["config_hash"] == "abc"


def test_persist_and_load_encoder(manhattan):
    """A loaded encoder has the same partition and statistics."""
    joint = manhattan.joint()
    encoder = solve_dib(joint, 3.0, bandwidth=0.1, source_objective="manhattan")
    point = FrontierPoint.from_encoder(joint, encoder)
    loaded = _round_trip(
        ArtifactEncoder.persist_encoder, ArtifactEncoder.load_encoder, point, "abc", target=3
    )
    assert loaded.same_partition(encoder)
    assert np.array_equal(loaded.cluster_mean, encoder.cluster_mean)
    assert np.array_equal(loaded.cluster_prior, encoder.cluster_prior)
    assert loaded.source_objective == "manhattan"
    assert loaded.weight == 3.0
    assert loaded.converged is encoder.converged


def test_persist_encoder_fields(manhattan):
    """Encoder files carry the frontier coordinates."""
    joint = manhattan.joint()
    point = FrontierPoint.from_encoder(joint, identity_encoder(joint, "manhattan"), 10.0)
    fp = io.BytesIO()
    ArtifactEncoder.persist_encoder(fp, point, "abc", target=8)
    data = util.from_json(fp.getvalue())
    assert data["checkpoint"] == 8
    assert data["n_clusters"] == 25
    assert data["n_items"] == 25
    assert data["distortion_mse"] == point.distortion_mse
    assert data["complexity_bits"] == point.complexity_bits
    assert data["config_hash"] == "abc"


def test_persist_and_load_task():
    """Tasks keep their cell to item assignment."""
    chart = ColorChart([[k / 30, 0.0, 1 - k / 30] for k in range(30)])
    for task in (grid_task((0, 0), (4, 4)), color_task(chart, (4, 0), (0, 4), seed=2)):
        loaded = _round_trip(ArtifactEncoder.persist_task, ArtifactEncoder.load_task, task)
        assert loaded == task


def test_persist_and_load_report():
    """Reports load back unchanged, extra fields are stored alongside."""
    report = MetricReport("x_coord", "manhattan", 5, 2.3, 1.1, 0.12, 0.7, 0.4)
    fp = io.BytesIO()
    ArtifactEncoder.persist_report(fp, report, "abc", excluded_tasks=1)
    assert util.from_json(fp.getvalue())["excluded_tasks"] == 1
    fp.seek(0)
    assert ArtifactEncoder.load_report(fp).to_dict() == report.to_dict()


def test_load_incomplete_files():
    """Missing fields are reported."""
    with pytest.raises(ArtifactError, match="reward"):
        ArtifactEncoder.load_domain(io.BytesIO(b'{"kind": "grid", "objective": "manhattan"}'))
    with pytest.raises(ArtifactError):
        ArtifactEncoder.load_encoder(io.BytesIO(b"[1, 2]"))
    with pytest.raises(ArtifactError):
        ArtifactEncoder.load_task(io.BytesIO(b'{"width": 5}'))


def test_load_inconsistent_domain():
    """A color domain whose reward misses chips is rejected."""
    domain = build_domain(DomainSpec("color", "red_continuous"))
    fp = io.BytesIO()
    ArtifactEncoder.persist_domain(fp, domain)
    data = util.from_json(fp.getvalue())
    data["colors"] = data["colors"][:10]
    with pytest.raises(ValueError):
        ArtifactEncoder.load_domain(io.BytesIO(util.to_json(data)))


def test_frontier_csv(tmp_path, manhattan):
    """Frontier CSVs hold twelve significant digits and read back."""
    joint = manhattan.joint()
    points = [
        FrontierPoint.from_encoder(joint, solve_dib(joint, weight), weight)
        for weight in (0.01, 100.0)
    ]
    path = tmp_path / "frontier.csv"
    artifact.write_frontier_csv(path, points)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "weight,n_clusters,complexity_bits,informativeness_bits,distortion_mse"
    assert len(lines) == 3
    rows = artifact.read_frontier_csv(path)
    assert [row["n_clusters"] for row in rows] == [1, 7]
    assert rows[0]["distortion_mse"] == pytest.approx(points[0].distortion_mse, rel=1e-11)

    other = tmp_path / "other.csv"
    other.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ArtifactError):
        artifact.read_frontier_csv(other)


def test_load_encoder_rebuilds_statistics(manhattan):
    """Encoders stored with their joint get statistics recomputed on load."""
    joint = manhattan.joint()
    encoder = solve_dib(joint, 3.0, bandwidth=0.1, source_objective="manhattan")
    point = FrontierPoint.from_encoder(joint, encoder)
    fp = io.BytesIO()
    ArtifactEncoder.persist_encoder(fp, point, "abc", target=3, joint=joint)
    data = util.from_json(fp.getvalue())
    assert len(data["joint_table"]) == 25
    fp.seek(0)
    loaded = ArtifactEncoder.load_encoder(fp)
    rebuilt = Encoder.from_assignments(joint, encoder.assignments)
    assert loaded.same_partition(encoder)
    assert np.allclose(loaded.cluster_prior, rebuilt.cluster_prior, rtol=0, atol=1e-12)
    assert np.allclose(loaded.cluster_predictive, rebuilt.cluster_predictive, rtol=0, atol=1e-12)
    assert loaded.source_objective == "manhattan"
    assert loaded.weight == 3.0


def test_load_encoder_rejects_tampered_statistics(manhattan):
    """Stored statistics that disagree with the stored joint are rejected."""
    joint = manhattan.joint()
    point = FrontierPoint.from_encoder(joint, identity_encoder(joint, "manhattan"), 10.0)
    fp = io.BytesIO()
    ArtifactEncoder.persist_encoder(fp, point, joint=joint)
    data = util.from_json(fp.getvalue())
    data["cluster_prior"][0] += 0.01
    data["cluster_prior"][1] -= 0.01
    with pytest.raises(ArtifactError, match="do not match"):
        ArtifactEncoder.load_encoder(io.BytesIO(util.to_json(data)))

    # without the joint the stored statistics are taken as they are
    del data["joint_table"]
    loaded = ArtifactEncoder.load_encoder(io.BytesIO(util.to_json(data)))
    assert loaded.cluster_prior[0] == pytest.approx(0.05)


def test_persist_encoder_rejects_other_joint(manhattan, x_coord):
    """The stored joint must have the encoder's items and reward levels."""
    joint = manhattan.joint()
    point = FrontierPoint.from_encoder(joint, identity_encoder(joint, "manhattan"), 10.0)
    with pytest.raises(SupportMismatchError):
        ArtifactEncoder.persist_encoder(io.BytesIO(), point, joint=x_coord.joint())

"""Heat maps of domains and abstractions, and complexity-distortion curves.

Raster images are binary PPM (P6), or PNG when pypng is installed. Values are
colored on a diverging scale: -1 is blue, 0 white and +1 red.
"""
import logging
import os
from typing import List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402 pylint: disable=wrong-import-position
import numpy as np  # noqa: E402 pylint: disable=wrong-import-order,wrong-import-position

from . import SUPPORT_PNG  # noqa: E402
from .artifact import write_frontier_csv  # noqa: E402
from .const import (  # noqa: E402
    BOUNDARY_WIDTH,
    CELL_SIZE,
    CHART_COLUMNS,
    EMPTY_PIXEL,
    KIND_COLOR,
    SVG_HASH_SALT,
    IBXError,
)
from .domains import Domain  # noqa: E402
from .ib_core import Encoder, FrontierPoint  # noqa: E402
from .metrics import cluster_means  # noqa: E402

logger = logging.getLogger(__name__)

BOUNDARY_PIXEL = (0, 0, 0)


def diverging_color(value: float) -> Tuple[int, int, int]:
    """Map [-1, 1] to blue-white-red, linear in each half."""
    value = min(1.0, max(-1.0, float(value)))
    fade = int(round(255 * (1.0 - abs(value))))
    if value < 0:
        return fade, fade, 255
    return 255, fade, fade


class Heatmap:
    """Values laid out on display rows (top row first) with optional cluster ids.

    Cells without an item are masked and drawn grey.
    """

    __slots__ = ("values", "clusters", "mask")

    def __init__(self, values, clusters=None, mask=None) -> None:
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("Heat map values must be two-dimensional")
        self.mask = (
            np.zeros(self.values.shape, dtype=bool) if mask is None else np.asarray(mask, bool)
        )
        if not np.all(np.isfinite(self.values[~self.mask])):
            raise ValueError("Heat map values must be finite")
        self.clusters = None if clusters is None else np.asarray(clusters)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def scale(self) -> float:
        """Divisor bringing every value into [-1, 1]."""
        shown = np.abs(self.values[~self.mask])
        return max(1.0, float(shown.max())) if shown.size else 1.0

    def to_rgb(self, cell_size: int = CELL_SIZE, boundary: int = BOUNDARY_WIDTH) -> np.ndarray:
        """Render to an (H, W, 3) uint8 array."""
        rows, cols = self.shape
        scale = self.scale()
        cells = np.empty((rows, cols, 3), dtype=np.uint8)
        for r in range(rows):
            for c in range(cols):
                cells[r, c] = (
                    EMPTY_PIXEL if self.mask[r, c] else diverging_color(self.values[r, c] / scale)
                )
        image = np.repeat(np.repeat(cells, cell_size, axis=0), cell_size, axis=1)
        if self.clusters is not None and boundary > 0:
            self._draw_boundaries(image, cell_size, boundary)
        return image

    def _draw_boundaries(self, image: np.ndarray, cell_size: int, boundary: int) -> None:
        rows, cols = self.shape
        before = boundary // 2
        after = boundary - before
        for r in range(rows):
            for c in range(cols):
                if self.mask[r, c]:
                    continue
                edge = (c + 1) * cell_size
                if c + 1 < cols and not self.mask[r, c + 1] and (
                    self.clusters[r, c] != self.clusters[r, c + 1]
                ):
                    cell_rows = slice(r * cell_size, (r + 1) * cell_size)
                    image[cell_rows, edge - before:edge + after] = BOUNDARY_PIXEL
                edge = (r + 1) * cell_size
                if r + 1 < rows and not self.mask[r + 1, c] and (
                    self.clusters[r, c] != self.clusters[r + 1, c]
                ):
                    cell_cols = slice(c * cell_size, (c + 1) * cell_size)
                    image[edge - before:edge + after, cell_cols] = BOUNDARY_PIXEL


def domain_heatmap(domain: Domain, encoder: Optional[Encoder] = None) -> Heatmap:
    """Heat map of the domain reward, or of ``encoder``'s cluster means of it.

    Grids show their top row (largest y) first. Charts fill rows of
    ``CHART_COLUMNS`` chips in id order.
    """
    reward = domain.reward
    if encoder is None:
        values = reward.weights
        clusters = None
    else:
        values = cluster_means(encoder, reward)[encoder.assignments]
        clusters = encoder.assignments

    if domain.kind == KIND_COLOR:
        count = len(values)
        rows = -(-count // CHART_COLUMNS)
        padded = np.zeros(rows * CHART_COLUMNS)
        padded[:count] = values
        mask = np.arange(rows * CHART_COLUMNS) >= count
        labels = None
        if clusters is not None:
            labels = np.full(rows * CHART_COLUMNS, -1)
            labels[:count] = clusters
            labels = labels.reshape(rows, CHART_COLUMNS)
        return Heatmap(
            padded.reshape(rows, CHART_COLUMNS), labels, mask.reshape(rows, CHART_COLUMNS)
        )

    grid = domain.items
    shape = (grid.height, grid.width)
    return Heatmap(
        np.flipud(np.reshape(values, shape)),
        None if clusters is None else np.flipud(np.reshape(clusters, shape)),
    )


def write_ppm(path, rgb: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 array as binary PPM (P6)."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("rgb must be an (H, W, 3) uint8 array")
    height, width = rgb.shape[:2]
    with open(path, "wb") as image_file:
        image_file.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        image_file.write(np.ascontiguousarray(rgb).tobytes())


def write_png(path, rgb: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 array as PNG through pypng."""
    if not SUPPORT_PNG:
        raise IBXError("PNG output needs the 'pypng' package; install ibx[PNG]")
    import png  # pylint: disable=import-outside-toplevel

    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("rgb must be an (H, W, 3) uint8 array")
    height, width = rgb.shape[:2]
    writer = png.Writer(width, height, greyscale=False, bitdepth=8)
    with open(path, "wb") as image_file:
        writer.write(image_file, rgb.reshape(height, width * 3).tolist())


def _configure_svg() -> None:
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT


def _write_heatmap_svg(path, heatmap: Heatmap, labels: bool) -> None:
    _configure_svg()
    rows, cols = heatmap.shape
    fig, ax = plt.subplots(figsize=(cols * 0.6, rows * 0.6))
    ax.imshow(heatmap.to_rgb(cell_size=1, boundary=0), interpolation="nearest")
    if labels:
        for r in range(rows):
            for c in range(cols):
                if not heatmap.mask[r, c]:
                    label = f"{heatmap.values[r, c]:.2f}"
                    ax.text(c, r, label, ha="center", va="center", fontsize=7)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)


def render_heatmap(
    domain: Domain, out, encoder: Optional[Encoder] = None, labels: bool = False
) -> str:
    """Write the heat map of ``domain`` (or of ``encoder`` on it) to ``out``.

    The format follows the suffix: ``.ppm``, ``.png`` or ``.svg``. Numeric cell
    labels are only drawn in SVG output.
    """
    heatmap = domain_heatmap(domain, encoder)
    suffix = os.path.splitext(str(out))[1].lower()
    if suffix == ".svg":
        _write_heatmap_svg(out, heatmap, labels)
    elif suffix == ".png":
        write_png(out, heatmap.to_rgb())
    else:
        write_ppm(out, heatmap.to_rgb())
    logger.info("Wrote heat map %s", out)
    return str(out)


def render_frontier(
    curves: Sequence[Tuple[str, Sequence[FrontierPoint]]], out
) -> List[str]:
    """Plot one complexity-distortion polyline per labelled frontier.

    Writes an SVG to ``out`` and one frontier CSV per curve next to it.

    :return: The paths written.
    """
    curves = [(label, list(points)) for label, points in curves if points]
    if not curves:
        raise ValueError("Need at least one non-empty frontier")
    _configure_svg()
    fig, ax = plt.subplots(figsize=(5, 4))
    written = []
    stem = os.path.splitext(str(out))[0]
    for label, points in curves:
        ax.plot(
            [p.complexity_bits for p in points],
            [p.distortion_mse for p in points],
            marker="o",
            markersize=3,
            label=label,
        )
        sidecar = f"{stem}_{label}.csv"
        write_frontier_csv(sidecar, points)
        written.append(sidecar)
    ax.set_xlabel("complexity (bits)")
    ax.set_ylabel("distortion (MSE)")
    ax.legend()
    fig.savefig(out, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    logger.info("Wrote frontier plot %s", out)
    return [str(out)] + written

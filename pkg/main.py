"""An example of how to trace a frontier and draw what the abstractions look like.

This is:
1. Build the Manhattan grid domain.
2. Sweep the complexity-distortion frontier of its reward.
3. Pick the encoders closest to a few cluster counts and render their heat maps,
    plus the frontier itself, into ``out/``.
"""
import logging
import os

from ibx import util
from ibx.const import KIND_GRID, OBJECTIVE_MANHATTAN
from ibx.domains import DomainSpec, build_domain
from ibx.ib_core import checkpoint_targets, sweep_frontier
from ibx.render import render_frontier, render_heatmap

logging.basicConfig(level=logging.INFO, format="[%(module)s] %(message)s")

OUT_DIR = "out"

os.makedirs(OUT_DIR, exist_ok=True)
domain = build_domain(DomainSpec(KIND_GRID, OBJECTIVE_MANHATTAN))

# A coarse grid is enough here, refinement fills in the missing cluster counts.
frontier = sweep_frontier(
    domain.joint(),
    util.weight_grid(1e-3, 1e3, 50),
    source_objective=domain.objective,
)

render_heatmap(domain, os.path.join(OUT_DIR, "manhattan_reward.ppm"))
for target, point in checkpoint_targets(frontier, (1, 2, 3, 5, 8)):
    logging.info(
        "k=%d: %d clusters, %.3f bits, distortion %.4f",
        target,
        point.n_clusters,
        point.complexity_bits,
        point.distortion_mse,
    )
    render_heatmap(
        domain, os.path.join(OUT_DIR, f"manhattan_k{point.n_clusters}.ppm"), point.encoder
    )

render_frontier([("manhattan", frontier)], os.path.join(OUT_DIR, "frontier.svg"))

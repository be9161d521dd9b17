"""Command-line front end: domain -> sweep -> eval / simulate -> render.

Every input and output path is relative to ``--out-dir``. Exit codes: 0 on
success, 1 on usage errors, 2 on validation errors and 3 on I/O errors.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from . import util
from .artifact import ArtifactEncoder, read_frontier_csv, write_csv, write_frontier_csv
from .config import RunConfig
from .const import (
    DEFAULT_BANDWIDTH,
    DEFAULT_CHECKPOINTS,
    DEFAULT_MAX_ITERS,
    DEFAULT_REFINE_DEPTH,
    DEFAULT_RESTARTS,
    DEFAULT_WEIGHT_COUNT,
    DEFAULT_WEIGHT_MAX,
    DEFAULT_WEIGHT_MIN,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
    INIT_IDENTITY,
    INIT_RANDOM,
    KIND_COLOR,
    KIND_GRID,
    RANK_BY_MAGNITUDE,
    RANK_BY_VALUE,
    TIE_LEXICOGRAPHIC,
    TIE_SEEDED_UNIFORM,
    IBXError,
    __version__,
)
from .domains import OBJECTIVES_BY_KIND, DomainSpec, build_domain, load_color_chart
from .ib_core import FrontierPoint, checkpoint_targets, retarget_frontier, sweep_frontier
from .loader import get_loader
from .render import render_frontier, render_heatmap
from .tasks import (
    Respondent,
    default_queries,
    evaluate_encoder,
    default_tasks,
    run_simulation_suite,
)

logger = logging.getLogger(__name__)

ALL_OBJECTIVES = sorted({o for objectives in OBJECTIVES_BY_KIND.values() for o in objectives})


class UsageError(IBXError):
    """Raised for flag combinations argparse cannot reject by itself."""


class ArgumentParser(argparse.ArgumentParser):
    """Exits with the usage exit code instead of argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _path(args, name: str) -> str:
    return os.path.join(args.out_dir, name)


def _read(args, name: str, load):
    with open(_path(args, name), "rb") as fp:
        return load(fp)


def _write(args, name: str, persist, *values, **kwargs) -> str:
    path = _path(args, name)
    with open(path, "wb") as fp:
        persist(fp, *values, **kwargs)
    logger.info("Wrote %s", path)
    return path


def _domain_fingerprint(domain) -> dict:
    return {**domain.spec.to_dict(), "reward": domain.reward.weights.tolist()}


def cmd_domain(args) -> None:
    """Build a domain and pin its full reward table in a file."""
    if args.objective not in OBJECTIVES_BY_KIND[args.kind]:
        raise UsageError(
            f"--objective {args.objective} does not apply to --kind {args.kind}; "
            f"choose from {', '.join(OBJECTIVES_BY_KIND[args.kind])}"
        )
    if args.chart and args.kind != KIND_COLOR:
        raise UsageError("--chart only applies to --kind color")
    chart = load_color_chart(_path(args, args.chart)) if args.chart else None
    domain = build_domain(DomainSpec(args.kind, args.objective, args.seed), chart)
    name = args.out or f"domain_{args.kind}_{args.objective}.json"
    _write(
        args,
        name,
        ArtifactEncoder.persist_domain,
        domain,
        config_hash=util.config_hash(_domain_fingerprint(domain)),
    )


def cmd_sweep(args) -> None:
    """Trace a frontier and store one encoder per checkpoint target."""
    domain = _read(args, args.domain, ArtifactEncoder.load_domain)
    weights = util.weight_grid(args.weight_min, args.weight_max, args.weight_count)
    params = {
        "domain": _domain_fingerprint(domain),
        "weights": weights,
        "init": args.init,
        "restarts": args.restarts,
        "seed": args.seed,
        "bandwidth": args.bandwidth,
        "max_iters": args.max_iters,
        "refine_depth": args.refine_depth,
        "targets": args.targets,
    }
    config_hash = util.config_hash(params)
    joint = domain.joint()
    frontier = sweep_frontier(
        joint,
        weights,
        args.init,
        args.restarts,
        seed=args.seed,
        bandwidth=args.bandwidth,
        max_iters=args.max_iters,
        refine_depth=args.refine_depth,
        source_objective=domain.objective,
    )
    prefix = args.prefix or f"{domain.objective}_"
    write_frontier_csv(_path(args, f"{prefix}frontier.csv"), frontier)
    for target, point in checkpoint_targets(frontier, args.targets):
        _write(
            args,
            f"{prefix}encoder_k{target}.json",
            ArtifactEncoder.persist_encoder,
            point,
            config_hash=config_hash,
            target=target,
            joint=joint,
        )
    if args.against:
        if args.against not in OBJECTIVES_BY_KIND[domain.kind]:
            raise UsageError(f"--against {args.against} does not apply to {domain.kind} domains")
        target_domain = domain.with_objective(args.against)
        write_frontier_csv(
            _path(args, f"{prefix}frontier_vs_{args.against}.csv"),
            retarget_frontier(frontier, target_domain.joint()),
        )


def cmd_eval(args) -> None:
    """Evaluate one stored encoder against a stored target domain."""
    encoder = _read(args, args.encoder, ArtifactEncoder.load_encoder)
    domain = _read(args, args.domain, ArtifactEncoder.load_domain)
    queries = args.query or default_queries(domain)
    if args.task:
        tasks = [_read(args, name, ArtifactEncoder.load_task) for name in args.task]
    else:
        tasks = default_tasks(domain, args.seed)
    respondent_seed = args.seed if args.respondent_seed is None else args.respondent_seed
    respondent = Respondent(encoder, args.tie_policy, respondent_seed, args.rank_by)
    report, excluded = evaluate_encoder(encoder, domain, queries, tasks, respondent)
    params = {
        "encoder": encoder.assignments.tolist(),
        "domain": _domain_fingerprint(domain),
        "queries": queries,
        "tasks": [task.to_dict() for task in tasks],
        "tie_policy": args.tie_policy,
        "rank_by": args.rank_by,
        "seed": args.seed,
        "respondent_seed": respondent_seed,
    }
    _write(
        args,
        args.out,
        ArtifactEncoder.persist_report,
        report,
        config_hash=util.config_hash(params),
        excluded_tasks=excluded,
    )


def _write_suite_artifacts(args, result) -> None:
    """Store what eval needs to reproduce any suite row."""
    for name, scenario_inputs in result.inputs.items():
        _write(
            args,
            f"{args.prefix}{name}_target.json",
            ArtifactEncoder.persist_domain,
            scenario_inputs.target,
            config_hash=result.config_hash,
        )
        for number, task in enumerate(scenario_inputs.tasks):
            _write(
                args,
                f"{args.prefix}{name}_task{number}.json",
                ArtifactEncoder.persist_task,
                task,
                config_hash=result.config_hash,
            )
    for (name, objective, checkpoint), (point, joint) in result.checkpoints.items():
        _write(
            args,
            f"{args.prefix}{name}_{objective}_encoder_k{checkpoint}.json",
            ArtifactEncoder.persist_encoder,
            point,
            config_hash=result.config_hash,
            target=checkpoint,
            joint=joint,
        )


def cmd_simulate(args) -> None:
    """Run a whole simulation suite.

    Besides the results, every checkpoint encoder, every target domain and every
    task it is evaluated on is written, so ``eval`` can recompute any row.
    """
    if args.config:
        config = RunConfig.load(_path(args, args.config))
    else:
        config = get_loader().get_suite()
    result = run_simulation_suite(config)
    write_csv(_path(args, f"{args.prefix}results.csv"), result.csv_rows())
    summary_path = _path(args, f"{args.prefix}summary.json")
    with open(summary_path, "wb") as fp:
        fp.write(util.to_json(result.to_dict()))
    if not args.no_artifacts:
        _write_suite_artifacts(args, result)
    for scenario, summary in result.summary.items():
        logger.info(
            "%s: spearman(FR, distortion)=%s spearman(BD, distortion)=%s",
            scenario,
            summary["spearman_fr_distortion"],
            summary["spearman_bd_distortion"],
        )


def cmd_render(args) -> None:
    """Render heat maps and frontier curves."""
    if not (args.domain or args.frontier):
        raise UsageError("Nothing to render: give --domain and/or --frontier")
    if args.encoder and not args.domain:
        raise UsageError("--encoder needs --domain")
    if args.domain:
        domain = _read(args, args.domain, ArtifactEncoder.load_domain)
        render_heatmap(
            domain,
            _path(args, f"heatmap_{domain.objective}_reward.{args.format}"),
            labels=args.labels,
        )
        for name in args.encoder or ():
            encoder = _read(args, name, ArtifactEncoder.load_encoder)
            render_heatmap(
                domain,
                _path(
                    args,
                    f"heatmap_{encoder.source_objective}_k{encoder.n_clusters}.{args.format}",
                ),
                encoder,
                labels=args.labels,
            )
    if args.frontier:
        curves = []
        for entry in args.frontier:
            label, sep, name = entry.partition("=")
            if not sep:
                label, name = os.path.splitext(os.path.basename(entry))[0], entry
            rows = read_frontier_csv(_path(args, name))
            curves.append((label, [FrontierPoint(encoder=None, **row) for row in rows]))
        render_frontier(curves, _path(args, args.frontier_out))


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="ibx",
        description="Reward explanations through information-bottleneck abstractions. "
        "Sweeps use a weight on informativeness, roughly 1/beta of the "
        "'complexity times beta' form.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--out-dir", default=".", help="directory all paths are relative to")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug output")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings only")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    domain = commands.add_parser("domain", help="build and store a reward domain")
    domain.add_argument("--kind", choices=(KIND_GRID, KIND_COLOR), required=True)
    domain.add_argument("--objective", choices=ALL_OBJECTIVES, required=True)
    domain.add_argument("--seed", type=int, default=0)
    domain.add_argument("--chart", help="color chart CSV (id,r,g,b)")
    domain.add_argument("--out", help="output file name")
    domain.set_defaults(func=cmd_domain)

    sweep = commands.add_parser("sweep", help="trace the complexity-distortion frontier")
    sweep.add_argument("--domain", required=True, help="domain file to train on")
    sweep.add_argument("--weight-min", type=float, default=DEFAULT_WEIGHT_MIN)
    sweep.add_argument("--weight-max", type=float, default=DEFAULT_WEIGHT_MAX)
    sweep.add_argument("--weight-count", type=int, default=DEFAULT_WEIGHT_COUNT)
    sweep.add_argument("--init", choices=(INIT_IDENTITY, INIT_RANDOM), default=INIT_IDENTITY)
    sweep.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--bandwidth", type=float, default=DEFAULT_BANDWIDTH)
    sweep.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    sweep.add_argument("--refine-depth", type=int, default=DEFAULT_REFINE_DEPTH)
    sweep.add_argument("--targets", type=int, nargs="+", default=list(DEFAULT_CHECKPOINTS))
    sweep.add_argument(
        "--against", choices=ALL_OBJECTIVES, help="also evaluate against this objective"
    )
    sweep.add_argument("--prefix", help="output name prefix (default: '<objective>_')")
    sweep.set_defaults(func=cmd_sweep)

    evaluate = commands.add_parser("eval", help="evaluate an encoder against a target domain")
    evaluate.add_argument("--encoder", required=True)
    evaluate.add_argument("--domain", required=True, help="target domain file")
    evaluate.add_argument("--task", action="append", help="task file (repeatable)")
    evaluate.add_argument(
        "--query", type=int, nargs="+", action="append", help="item ids to rank (repeatable)"
    )
    evaluate.add_argument(
        "--tie-policy", choices=(TIE_LEXICOGRAPHIC, TIE_SEEDED_UNIFORM), default=TIE_LEXICOGRAPHIC
    )
    evaluate.add_argument(
        "--rank-by", choices=(RANK_BY_VALUE, RANK_BY_MAGNITUDE), default=RANK_BY_VALUE
    )
    evaluate.add_argument("--seed", type=int, default=0, help="seed of generated color tasks")
    evaluate.add_argument(
        "--respondent-seed", type=int, help="seed of seeded_uniform ties (default: --seed)"
    )
    evaluate.add_argument("--out", default="report.json")
    evaluate.set_defaults(func=cmd_eval)

    simulate = commands.add_parser("simulate", help="run a simulation suite")
    simulate.add_argument("--config", help="suite config (default: the bundled default suite)")
    simulate.add_argument("--prefix", default="", help="output name prefix")
    simulate.add_argument(
        "--no-artifacts",
        action="store_true",
        help="skip the encoder, target domain and task files",
    )
    simulate.set_defaults(func=cmd_simulate)

    render = commands.add_parser("render", help="render heat maps and frontier curves")
    render.add_argument("--domain", help="domain file whose reward is drawn")
    render.add_argument("--encoder", action="append", help="encoder file (repeatable)")
    render.add_argument("--format", choices=("ppm", "png", "svg"), default="ppm")
    render.add_argument("--labels", action="store_true", help="numeric cell labels (svg only)")
    render.add_argument(
        "--frontier", action="append", help="LABEL=frontier.csv (repeatable)"
    )
    render.add_argument("--frontier-out", default="frontier.svg")
    render.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="[%(module)s] %(message)s")
    try:
        args.func(args)
    except UsageError as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except (IBXError, ValueError) as err:
        logger.error("%s", err)
        return EXIT_VALIDATION
    except OSError as err:
        logger.error("%s", err)
        return EXIT_IO
    return EXIT_OK

#!/usr/bin/env python3
import argparse
import json
import logging
import sys
from dataclasses import asdict
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__, bench
from .baselines import kmeans_restarts, model_problem
from .core import SolverConfig
from .errors import DomainError, GlobalKMeansError
from .metrics import nmi, purity
from .solver import solve
from .util import (
    dataset_digest,
    read_labels,
    read_points,
    to_jsonable,
    write_json,
    write_labels,
    write_points,
)

REPORT_SCHEMA_VERSION = 1

EXIT_CERTIFIED = 0
EXIT_ERROR = 1
EXIT_UNCERTIFIED = 2

_LOGGER = logging.getLogger(__name__)


def _gate(value: str) -> Optional[float]:
    """Gap threshold, or "off" to disable the accelerator."""
    if value.lower() in ("off", "none"):
        return None

    return float(value)


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="global-kmeans",
        description="Globally optimal k-means clustering with a certified gap",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--debug", action="store_true", help="Print DEBUG messages to the console"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # solve
    solve_parser = subparsers.add_parser("solve", help="Cluster a CSV point file")
    solve_parser.add_argument(
        "--input", required=True, help="CSV file with one point per row"
    )
    solve_parser.add_argument(
        "--labels", help="CSV file with one ground-truth class per row"
    )
    solve_parser.add_argument("--k", type=int, required=True, help="Cluster count")
    solve_parser.add_argument(
        "--epsilon", type=float, default=0.0, help="Absolute gap tolerance"
    )
    solve_parser.add_argument(
        "--rel-gap",
        type=float,
        default=1e-4,
        help="Relative gap tolerance (default: 1e-4)",
    )
    solve_parser.add_argument(
        "--n-min", type=int, default=1, help="Minimum cluster size (default: 1)"
    )
    solve_parser.add_argument("--seed", type=int, default=0)
    solve_parser.add_argument(
        "--threads", type=int, default=1, help="Branch nodes processed in parallel"
    )
    #
    solve_parser.add_argument("--max-vertices", type=int)
    solve_parser.add_argument("--max-iterations", type=int, default=100_000)
    solve_parser.add_argument("--time-limit", type=float, help="Seconds")
    solve_parser.add_argument(
        "--branch-vertex-limit",
        type=int,
        default=500_000,
        help="Branch a node once its polytope has more vertices",
    )
    #
    solve_parser.add_argument("--no-symmetry", action="store_true")
    solve_parser.add_argument("--no-box", action="store_true")
    solve_parser.add_argument("--no-local-search", action="store_true")
    solve_parser.add_argument("--no-integer-cuts", action="store_true")
    solve_parser.add_argument("--no-fixed-marginal", action="store_true")
    solve_parser.add_argument(
        "--ls-gate",
        type=_gate,
        default=1.0,
        help="Least-squares cuts while the gap exceeds this ('off' to disable)",
    )
    solve_parser.add_argument(
        "--tight-gate",
        type=_gate,
        default=0.01,
        help="Tight cuts once the gap is below this ('off' to disable)",
    )
    #
    solve_parser.add_argument("--trace", help="Write the solver trace CSV here")
    solve_parser.add_argument("--out", help="Write the JSON report here (or stdout)")
    solve_parser.add_argument(
        "--restarts",
        type=int,
        default=100,
        help="k-means++ restarts for the baseline block (0 to skip)",
    )
    solve_parser.add_argument(
        "--timings", action="store_true", help="Include wall times in the report"
    )
    solve_parser.add_argument(
        "--dump-polytope", help="Write the last processed polytope as JSON"
    )
    solve_parser.set_defaults(func=cmd_solve)

    # generate
    generate_parser = subparsers.add_parser(
        "generate", help="Sample the three-Gaussian model problem"
    )
    generate_parser.add_argument("--sigma", type=float, required=True)
    generate_parser.add_argument("--n", type=int, required=True, help="Point count")
    generate_parser.add_argument("--seed", type=int, default=0)
    generate_parser.add_argument("--out", required=True, help="Points CSV")
    generate_parser.add_argument("--labels-out", help="Labels CSV")
    generate_parser.set_defaults(func=cmd_generate)

    # bench
    bench_parser = subparsers.add_parser("bench", help="Run an experiment suite")
    bench_parser.add_argument("--suite", required=True, choices=bench.SUITES)
    bench_parser.add_argument("--seed", type=int, default=0)
    bench_parser.add_argument("--n", type=int, help="Point count of the instances")
    bench_parser.add_argument("--threads", type=int, default=1)
    bench_parser.add_argument("--time-limit", type=float, help="Seconds per run")
    bench_parser.add_argument("--out", help="Write the result table as CSV")
    bench_parser.add_argument(
        "--dry-run", action="store_true", help="Print the planned runs and exit"
    )
    bench_parser.set_defaults(func=cmd_bench)

    return parser


# -----------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    if args.k < 1:
        _LOGGER.fatal("--k must be at least 1")
        return EXIT_ERROR

    cloud = read_points(args.input)
    labels = read_labels(args.labels) if args.labels else None
    if labels is not None and labels.size != cloud.n:
        raise DomainError(f"Got {labels.size} labels for {cloud.n} points")

    config = SolverConfig(
        k=args.k,
        epsilon=args.epsilon,
        rel_gap=args.rel_gap,
        n_min=args.n_min,
        fixed_marginal=not args.no_fixed_marginal,
        symmetry_breaking=not args.no_symmetry,
        centroid_box=not args.no_box,
        integer_cuts=not args.no_integer_cuts,
        local_search=not args.no_local_search,
        ls_gate=args.ls_gate,
        tight_gate=args.tight_gate,
        branch_vertex_limit=args.branch_vertex_limit,
        max_iterations=args.max_iterations,
        max_vertices=args.max_vertices,
        time_limit=args.time_limit,
        threads=args.threads,
        rng_seed=args.seed,
    )
    result = solve(cloud, config)

    report: Dict[str, Any] = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": asdict(config),
        "dataset": {"input": str(args.input), **dataset_digest(cloud)},
        "result": result.summary(),
    }

    if args.restarts > 0:
        _, objectives = kmeans_restarts(
            cloud, args.k, args.restarts, config.rng_seed
        )
        report["baseline"] = {
            "method": "k-means++ / Lloyd",
            "restarts": args.restarts,
            "best_objective": min(objectives),
            "mean_objective": float(np.mean(objectives)),
        }

    if labels is not None:
        report["metrics"] = {
            "purity": purity(result.best_assignment, labels),
            "nmi": nmi(result.best_assignment, labels),
            "nmi_normalization": "arithmetic",
        }

    environment: Dict[str, Any] = {"version": __version__, "threads": args.threads}
    if args.timings:
        environment["wall_time"] = result.wall_time

    report["environment"] = environment

    if args.out:
        write_json(args.out, report)
    else:
        print(json.dumps(to_jsonable(report), indent=2, allow_nan=False))

    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as trace_file:
            result.trace.write_csv(trace_file)

    if args.dump_polytope and result.polytope is not None:
        write_json(args.dump_polytope, result.polytope.to_json())

    return EXIT_CERTIFIED if result.certified else EXIT_UNCERTIFIED


def cmd_generate(args: argparse.Namespace) -> int:
    if not args.sigma > 0:
        _LOGGER.fatal("--sigma must be positive")
        return EXIT_ERROR

    if args.n < 1:
        _LOGGER.fatal("--n must be at least 1")
        return EXIT_ERROR

    dataset = model_problem(args.sigma, bench.split_sizes(args.n), args.seed)
    write_points(args.out, dataset.cloud.points)
    if args.labels_out:
        assert dataset.labels is not None
        write_labels(args.labels_out, dataset.labels)

    _LOGGER.info("Wrote %s points to %s", dataset.cloud.n, args.out)
    return EXIT_CERTIFIED


def cmd_bench(args: argparse.Namespace) -> int:
    runs = bench.plan(args.suite, args.n)
    if args.dry_run:
        print(bench.format_plan(runs))
        return EXIT_CERTIFIED

    rows = bench.run(runs, args.seed, args.threads, args.time_limit)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as bench_file:
            bench.write_csv(rows, bench_file)

    print(bench.format_table(rows))
    return EXIT_CERTIFIED


# -----------------------------------------------------------------------------


def main(argv: Optional[List[str]] = None) -> int:
    parser = get_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.INFO)
    _LOGGER.debug(args)

    try:
        return args.func(args)
    except (GlobalKMeansError, OSError) as err:
        _LOGGER.fatal("%s", err)
    except Exception:
        _LOGGER.exception("Unexpected error")

    return EXIT_ERROR


def run():
    sys.exit(main())


if __name__ == "__main__":
    try:
        run()
    except KeyboardInterrupt:
        pass

"""Experiment suites on the three-Gaussian model problem."""
import csv
import logging
from dataclasses import dataclass, replace
from typing import IO, Any, Dict, List, Optional

import numpy as np

from .baselines import model_problem
from .core import SolverConfig
from .solver import solve

SUITES = ("ablation", "separability", "scaling-lite")

BENCH_COLUMNS = (
    "suite",
    "name",
    "sigma",
    "n",
    "k",
    "status",
    "objective",
    "lower",
    "gap",
    "iterations",
    "cuts",
    "peak_vertices",
    "cumulative_vertices",
    "branches",
    "time",
)

DEFAULT_N = {"ablation": 24, "separability": 30, "scaling-lite": 30}
SEPARABILITY_SIGMAS = (1.0, 0.5, 0.2)

_LOGGER = logging.getLogger(__name__)


def split_sizes(n: int, parts: int = 3) -> List[int]:
    """n split into near-equal counts, larger counts first."""
    return [n // parts + (1 if index < n % parts else 0) for index in range(parts)]


def ablation_configs(k: int = 3) -> Dict[str, SolverConfig]:
    """Accelerator combinations from plain cutting planes to the full schedule."""
    plain = SolverConfig(
        k=k,
        symmetry_breaking=False,
        centroid_box=False,
        integer_cuts=False,
        local_search=False,
        ls_gate=None,
        tight_gate=None,
    )
    symmetry = replace(plain, symmetry_breaking=True, local_search=True)
    return {
        "Original": plain,
        "SB": symmetry,
        "SB+LS": replace(symmetry, ls_gate=0.0),
        "SB+CC": replace(symmetry, centroid_box=True),
        "SB+CC+LS": replace(symmetry, centroid_box=True, ls_gate=0.0),
        "scheduled": SolverConfig(k=k),
    }


@dataclass
class BenchRun:
    suite: str
    name: str
    sigma: float
    n: int
    config: SolverConfig


def plan(suite: str, n: Optional[int] = None) -> List[BenchRun]:
    if suite not in SUITES:
        raise ValueError(f"Unknown suite: {suite}")

    size = n if n is not None else DEFAULT_N[suite]
    if suite == "ablation":
        return [
            BenchRun(suite, name, 1.0, size, config)
            for name, config in ablation_configs().items()
        ]

    if suite == "separability":
        return [
            BenchRun(suite, f"sigma={sigma}", sigma, size, SolverConfig(k=3))
            for sigma in SEPARABILITY_SIGMAS
        ]

    sizes = sorted({max(6, size // 4), max(6, size // 2), max(6, 3 * size // 4), size})
    return [
        BenchRun(suite, f"n={count}", 0.5, count, SolverConfig(k=3))
        for count in sizes
    ]


def run(
    runs: List[BenchRun],
    seed: int = 0,
    threads: int = 1,
    time_limit: Optional[float] = None,
) -> List[Dict[str, Any]]:
    rows = []
    for bench_run in runs:
        dataset = model_problem(
            bench_run.sigma,
            split_sizes(bench_run.n),
            np.random.default_rng(seed),
        )
        config = replace(
            bench_run.config, threads=threads, time_limit=time_limit, rng_seed=seed
        )
        _LOGGER.info("Running %s / %s", bench_run.suite, bench_run.name)
        result = solve(dataset.cloud, config)
        rows.append(
            {
                "suite": bench_run.suite,
                "name": bench_run.name,
                "sigma": bench_run.sigma,
                "n": bench_run.n,
                "k": config.k,
                "status": result.status.value,
                "objective": result.best_objective,
                "lower": result.lower_bound,
                "gap": result.relative_gap,
                "iterations": result.iterations,
                "cuts": result.cuts_added,
                "peak_vertices": result.peak_vertices,
                "cumulative_vertices": result.cumulative_vertices,
                "branches": result.branches,
                "time": result.wall_time,
            }
        )

    return rows


def write_csv(rows: List[Dict[str, Any]], bench_file: IO[str]) -> None:
    writer = csv.DictWriter(bench_file, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def format_table(rows: List[Dict[str, Any]]) -> str:
    """Fixed-width table of the bench rows for the console."""
    header = (
        f"{'name':<12} {'sigma':>6} {'n':>5} {'status':>11} {'objective':>12} "
        f"{'gap':>9} {'iters':>6} {'cuts':>6} {'peak V':>8} {'branches':>8} "
        f"{'time':>8}"
    )
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row['name']:<12} {row['sigma']:>6.2f} {row['n']:>5d} "
            f"{row['status']:>11} {row['objective']:>12.6g} {row['gap']:>9.2e} "
            f"{row['iterations']:>6d} {row['cuts']:>6d} {row['peak_vertices']:>8d} "
            f"{row['branches']:>8d} {row['time']:>8.2f}"
        )

    return "\n".join(lines)


def format_plan(runs: List[BenchRun]) -> str:
    return "\n".join(
        f"{bench_run.suite}: {bench_run.name} (sigma={bench_run.sigma}, "
        f"n={bench_run.n}, k={bench_run.config.k})"
        for bench_run in runs
    )

import io
from dataclasses import replace

import numpy as np
import pytest

from global_kmeans.baselines import model_problem
from global_kmeans.bench import (
    BENCH_COLUMNS,
    DEFAULT_N,
    ablation_configs,
    format_plan,
    format_table,
    plan,
    run,
    split_sizes,
    write_csv,
)
from global_kmeans.solver import solve


def test_split_sizes():
    assert split_sizes(10) == [4, 3, 3]
    assert split_sizes(9) == [3, 3, 3]
    assert sum(split_sizes(31)) == 31


def test_ablation_configs():
    configs = ablation_configs()
    names = ["Original", "SB", "SB+LS", "SB+CC", "SB+CC+LS", "scheduled"]
    assert list(configs) == names

    original = configs["Original"]
    assert not original.symmetry_breaking
    assert not original.local_search
    assert original.ls_gate is None and original.tight_gate is None

    assert configs["SB+CC+LS"].centroid_box
    assert configs["SB+CC+LS"].ls_gate == 0.0
    assert not configs["SB"].centroid_box


def test_plans():
    assert len(plan("ablation")) == 6
    assert all(r.n == DEFAULT_N["ablation"] for r in plan("ablation"))
    assert [r.sigma for r in plan("separability", 12)] == [1.0, 0.5, 0.2]
    assert [r.n for r in plan("scaling-lite", 24)] == [6, 12, 18, 24]

    with pytest.raises(ValueError):
        plan("everything")

    assert "scaling-lite: n=6" in format_plan(plan("scaling-lite", 24))


def test_run_and_report():
    rows = run(plan("scaling-lite", 6), seed=2)
    assert len(rows) == 1
    assert rows[0]["status"] == "optimal"
    assert rows[0]["k"] == 3

    output = io.StringIO()
    write_csv(rows, output)
    assert output.getvalue().splitlines()[0] == ",".join(BENCH_COLUMNS)
    assert "n=6" in format_table(rows)


# -----------------------------------------------------------------------------


@pytest.mark.slow
def test_separability_reduces_iterations():
    rows = run(plan("separability", 500), seed=3)
    assert all(row["status"] == "optimal" for row in rows)

    iterations = {row["sigma"]: row["iterations"] for row in rows}
    assert iterations[0.2] < iterations[0.5] < iterations[1.0]


@pytest.mark.slow
def test_ablation_direction():
    configs = ablation_configs()
    cloud = model_problem(1.0, split_sizes(50), np.random.default_rng(0)).cloud

    symmetric = solve(cloud, configs["SB"])
    assert symmetric.certified

    # Plain cutting planes cannot close the gap within the same budget
    original = solve(
        cloud, replace(configs["Original"], max_iterations=symmetric.iterations)
    )
    assert not original.certified

    boxed = solve(cloud, configs["SB+CC"])
    assert boxed.certified
    assert boxed.cuts_added < symmetric.cuts_added

import json
import math

import numpy as np
import pytest

from detprm.bench import (
    ConfigError,
    complexity_scan,
    config_from_json,
    lattice_distinct_lengths_oracle,
    oracle_delta_cost,
    read_csv,
    records_to_csv,
    run_experiment,
    summary_csv,
    summary_table,
    sustained_n,
)
from detprm.bench.oracle import brute_force_cost
from detprm.bench.summary import CurvePoint, medium_high, per_seed_sustained_n
from detprm.core import Problem
from detprm.environments import Environment, family_problem
from detprm.planner import RadiusRule
from detprm.sampling import SamplerSpec
from oracles import integer_lattice_distinct_lengths, octile_length


def small_config(**over):
    doc = {"schema": 1, "problem": {"family": "maze2d"}, "samplers": ["iid", "halton", "lattice"],
           "n_schedule": [60, 120, 240], "iid_repeats": 3, "seed": 11}
    doc.update(over)
    return config_from_json(doc)


def test_row_count_arithmetic():
    cfg = small_config()
    recs = run_experiment(cfg)
    assert len(recs) == 3 * 3 + 2 * 3
    det = [r for r in recs if r.sampler == "halton"]
    assert [r.n for r in det] == [60, 120, 240] and all(r.seed is None for r in det)


def test_csv_roundtrip_and_header():
    recs = run_experiment(small_config(n_schedule=[80, 160]))
    text = records_to_csv(recs)
    assert text.splitlines()[0].startswith("schema,problem,sampler,variant,seed,n,success,cost")
    assert records_to_csv(read_csv(text)) == text


def test_rerun_is_byte_identical():
    cfg = small_config()
    assert records_to_csv(run_experiment(cfg)) == records_to_csv(run_experiment(cfg))


def test_timings_only_on_request():
    recs = run_experiment(small_config(n_schedule=[80]))
    assert "build_time" not in records_to_csv(recs)
    assert "build_time" in records_to_csv(recs, timings=True).splitlines()[0]


def test_trial_errors_are_recorded():
    cfg = small_config(samplers=["triangular"], problem={"family": "recursive-maze", "dim": 3})
    recs = run_experiment(cfg)
    assert all(r.success == 0 and r.note.startswith("error:") for r in recs)


@pytest.mark.parametrize("bad", [
    {"schema": 2},
    {"n_schedule": [100, 100]},
    {"iid_repeats": 0},
    {"samplers": ["sobol"]},
    {"variants": ["rrt"]},
    {"problem": {"family": "nowhere"}},
    {"samplers": ["halton", "halton"]},
])
def test_config_errors(bad):
    doc = {"schema": 1, "problem": {"family": "maze2d"}, "samplers": ["halton"], "n_schedule": [10, 20]}
    doc.update(bad)
    with pytest.raises(ConfigError):
        config_from_json(doc)


def test_sustained_definition():
    pts = [CurvePoint(n, 1, s, 1.0) for n, s in [(10, 1.0), (20, 0.0), (30, 1.0), (40, 0.95), (50, 1.0)]]
    assert sustained_n(pts) == 30
    assert sustained_n(pts[:2]) is None


def test_medium_and_high_points():
    pts = [CurvePoint(n, 1, 1.0, 1.0) for n in (100, 500, 800, 3000)]
    assert medium_high(pts) == (800, 3000)


def test_summary_is_pure_function_of_csv():
    recs = run_experiment(small_config())
    text = records_to_csv(recs)
    assert summary_csv(summary_table(read_csv(text))) == summary_csv(summary_table(recs))
    rows = summary_table(recs)
    assert {r.sampler for r in rows} == {"halton", "lattice"}


def test_summary_percentages():
    recs = run_experiment(small_config())
    for row in summary_table(recs):
        if row.n90 is not None and row.baseline_n90 is not None:
            assert row.n90_pct == pytest.approx(100.0 * row.n90 / row.baseline_n90)


def test_per_seed_thresholds():
    recs = run_experiment(small_config())
    seeds = per_seed_sustained_n(recs, "maze2d", "iid", "gprm")
    assert len(seeds) == 3


def test_bound_and_oracle_columns():
    cfg = small_config(samplers=["lattice"], n_schedule=[200, 800], bound={"dispersion_resolution": 101},
                       oracle={"grid_resolution": 101, "deltas": [0.02, 0.04, 0.2]})
    for r in run_experiment(cfg):
        assert r.dispersion_hi is not None
        if r.bound_factor is not None and r.oracle_cost_delta is not None and math.isfinite(r.oracle_cost_delta):
            assert r.oracle_delta > r.r_n
            assert r.cost <= r.bound_factor * r.oracle_cost_delta


def test_oracle_free_space_diagonal():
    p = Problem(Environment(2), [0.0, 0.0], [1.0, 1.0], 0.05)
    res = oracle_delta_cost(p, 0.0, 101)
    assert res.cost <= 1.4568
    assert res.cost == pytest.approx(octile_length(100, 100, 0.01), abs=1e-12)
    assert res.resolution == 101


def test_oracle_refinement():
    p = family_problem("maze2d")
    coarse = oracle_delta_cost(p, 0.02, 51).cost
    fine = oracle_delta_cost(p, 0.02, 101).cost
    assert fine <= coarse + math.sqrt(2) / 50


def test_brute_force_oracle_matches_planner():
    p = family_problem("spheres", 2)
    from detprm.planner import build_roadmap, shortest_path
    from detprm.sampling import halton_sequence

    rm = build_roadmap(halton_sequence(120, 2), p, 0.2)
    assert shortest_path(rm, p).cost == pytest.approx(brute_force_cost(rm.points, p, 0.2), abs=1e-12)


def test_complexity_scan_lattice_oracle():
    recs = complexity_scan(family_problem("free", 2), SamplerSpec("sukharev", 2), RadiusRule.explicit(3 / 32), [1024])
    assert recs[0].distinct_lengths == lattice_distinct_lengths_oracle(32, 3 / 32)
    assert recs[0].distinct_lengths == integer_lattice_distinct_lengths(32, 3 / 32)


def test_complexity_scan_distinct_lengths_direction():
    free = family_problem("free", 2)
    rule = RadiusRule.explicit(3 / 32)
    lattice = complexity_scan(free, SamplerSpec("sukharev", 2), rule, [1024])[0]
    halton = complexity_scan(free, SamplerSpec("halton", 2), rule, [1024])[0]
    iid = complexity_scan(free, SamplerSpec("iid", 2, seed=0), rule, [1024])[0]
    # Random positions give one length per edge. Halton repeats many offsets
    # (its radical-inverse digits recur) but still has far more than a lattice.
    assert iid.distinct_lengths == iid.edges
    assert halton.distinct_lengths > 50 * lattice.distinct_lengths

"""Invariants of every module, as property tests."""

import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from detprm.bench import config_from_json, oracle_delta_cost, records_to_csv, run_experiment
from detprm.core import ANGULAR_L1, EUCLIDEAN, PathPolyline, Problem, metric_distance, pairwise_distance, path_cost
from detprm.dispersion import dispersion_bounds
from detprm.environments import (
    AABox,
    Environment,
    Sphere,
    chain_edge_collision_free,
    chain_problem,
    family_problem,
    inflate,
    load_shipped_problem,
    min_clearance,
    recursive_maze,
    segment_collision_free,
)
from detprm.planner import RadiusRule, build_roadmap, connection_radius, plan, suboptimality_factor
from detprm.planner.plan import config_samples
from detprm.sampling import (
    SamplerSpec,
    halton_sequence,
    iid_uniform,
    lattice_spec,
    make_samples,
    random_lattice_spec,
    sukharev_lattice,
    transform_lattice,
)

unit = st.floats(0.0, 1.0, allow_nan=False)
angle = st.floats(-math.pi, math.pi, allow_nan=False, exclude_max=True)


# core ---------------------------------------------------------------------

@pytest.mark.parametrize("metric,scale", [(EUCLIDEAN, 1.0), (ANGULAR_L1, math.pi)])
def test_triangle_inequality_10k_triples(metric, scale):
    rng = np.random.default_rng(0)
    a, b, c = (rng.uniform(-scale, scale, (10_000, 4)) for _ in range(3))
    ab = pairwise_distance(a, b, metric)
    bc = pairwise_distance(b, c, metric)
    ac = pairwise_distance(a, c, metric)
    assert np.all(ac <= ab + bc + 1e-12)


@given(st.lists(st.tuples(angle, angle, angle), min_size=3, max_size=3))
def test_triangle_inequality_angular(pts):
    a, b, c = (np.array(p) for p in pts)
    assert metric_distance(a, c, ANGULAR_L1) <= metric_distance(a, b, ANGULAR_L1) + metric_distance(b, c, ANGULAR_L1) + 1e-12


@given(st.lists(st.tuples(unit, unit, unit), min_size=2, max_size=2), st.sampled_from([EUCLIDEAN, ANGULAR_L1]))
@example([(0.0, 0.0, 0.0), (0.0, 0.0, 0.8594751693283427)], ANGULAR_L1)
def test_metric_symmetry(pts, metric):
    a, b = np.array(pts[0]), np.array(pts[1])
    assert metric_distance(a, b, metric) == metric_distance(b, a, metric)


@given(st.lists(st.tuples(unit, unit), min_size=2, max_size=12, unique=True), st.sampled_from([EUCLIDEAN, ANGULAR_L1]))
def test_path_cost_reversal(pts, metric):
    v = np.array(pts)
    if np.any(np.all(v[1:] == v[:-1], axis=1)):
        return
    path = PathPolyline(v, metric)
    assert path_cost(path) == pytest.approx(path_cost(path.reversed()), rel=1e-12, abs=1e-15)


# sampling -----------------------------------------------------------------

SPECS = [
    SamplerSpec("halton", 3),
    SamplerSpec("sukharev", 3),
    SamplerSpec("iid", 3, seed=4),
    lattice_spec(2),
    lattice_spec(3),
    random_lattice_spec(3, 2),
    SamplerSpec("mixed", 3, children=(SamplerSpec("halton", 3), SamplerSpec("iid", 3, seed=1))),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.name}{s.dim}")
@pytest.mark.parametrize("n", [1, 17, 500])
def test_generators_stay_in_cube(spec, n):
    pts = make_samples(spec, n).points
    assert pts.shape[1] == spec.dim and np.all((pts >= 0) & (pts <= 1))


@given(st.integers(1, 3000))
@settings(max_examples=25)
def test_chain_samples_on_torus(n):
    p = chain_problem()
    pts = config_samples(p, SamplerSpec("halton", 8), n)
    assert np.all(pts >= -math.pi) and np.all(pts < math.pi)


@given(st.integers(1, 400), st.integers(1, 400), st.integers(1, 5))
def test_halton_prefix(n, m, d):
    lo, hi = sorted((n, m))
    assert np.array_equal(halton_sequence(hi, d).points[:lo], halton_sequence(lo, d).points)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("k", [2, 4, 8])
def test_sukharev_cubic_dispersion_contained(d, k):
    res = {1: 201, 2: 201, 3: 101}[d]
    assert math.sqrt(d) / 2 / k in dispersion_bounds(sukharev_lattice((k,) * d), res)


@given(st.sampled_from(["halton", "iid", "sukharev"]), st.integers(2, 300), st.integers(1, 3))
@settings(max_examples=30)
def test_sandwich_on_generated_sets(kind, n, d):
    spec = SamplerSpec(kind, d, seed=3 if kind == "iid" else None)
    pts = make_samples(spec, n).points
    res = {1: 401, 2: 101, 3: 31}[d]
    l2 = dispersion_bounds(pts, res, "l2")
    linf = dispersion_bounds(pts, res, "linf")
    assert linf.lo <= l2.hi
    assert l2.lo <= math.sqrt(d) * linf.hi


@pytest.mark.parametrize("spec", [SamplerSpec("halton", 2), lattice_spec(2), SamplerSpec("halton", 3), lattice_spec(3)],
                         ids=["halton2", "lattice2", "halton3", "lattice3"])
def test_low_dispersion_scaling(spec):
    res = 1001 if spec.dim == 2 else 101
    stats = []
    for n in (100, 1000, 10_000):
        s = make_samples(spec, n)
        stats.append(dispersion_bounds(s, res).hi * s.n ** (1 / spec.dim))
    assert max(stats) <= 3.0


@pytest.mark.parametrize("d,res,n_big", [(2, 1001, 10_000), (3, 161, 100_000)])
def test_iid_scaling_grows(d, res, n_big):
    # Certified: the lower end at n_big beats the upper end at n = 100. In 3-D
    # boundary effects hide the log factor until well past 10^4 points.
    def median_stat(n, end):
        return np.median([getattr(dispersion_bounds(iid_uniform(n, d, seed), res, workers=4), end) * n ** (1 / d)
                          for seed in range(5)])

    assert median_stat(n_big, "lo") > median_stat(100, "hi")


@given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
@settings(max_examples=15)
def test_transform_density(theta, ox, oy):
    base = sukharev_lattice((12, 12))
    out = transform_lattice(base, [theta], [ox, oy])
    assert dispersion_bounds(out, 121).hi <= math.sqrt(2) * dispersion_bounds(base, 121).hi


# environments -------------------------------------------------------------

def random_env(seed: int, d: int = 2) -> Environment:
    rng = np.random.default_rng(seed)
    obs = []
    for _ in range(4):
        lo = rng.uniform(0, 0.8, d)
        obs.append(AABox(lo, lo + rng.uniform(0.05, 0.2, d)))
        obs.append(Sphere(rng.uniform(0, 1, d), float(rng.uniform(0.03, 0.12))))
    return Environment(d, tuple(obs))


@given(st.integers(0, 50), st.tuples(unit, unit), st.tuples(unit, unit))
def test_segment_check_symmetric(seed, a, b):
    env = random_env(seed)
    assert segment_collision_free(a, b, env) == segment_collision_free(b, a, env)


@given(st.integers(0, 50), st.tuples(unit, unit, unit), st.tuples(unit, unit, unit), st.floats(0.0, 0.1))
def test_inflated_freedom_implies_clearance(seed, a, b, delta):
    env = random_env(seed, 3)
    if a == b or not segment_collision_free(a, b, inflate(env, delta)):
        return
    c = min_clearance(PathPolyline([a, b]), env).min_clearance
    assert c >= delta / math.sqrt(3) - 1e-12
    # Per-face growth contains the ball of radius delta, so the sharper bound holds too.
    assert c >= delta - 1e-12


def test_recursive_maze_deterministic():
    for d in (2, 3, 4, 5):
        assert recursive_maze(d).to_json() == recursive_maze(d).to_json()


@given(st.lists(angle, min_size=8, max_size=8), st.lists(angle, min_size=8, max_size=8), st.integers(2, 12))
@settings(max_examples=60)
def test_chain_resolution_monotone(a, b, res):
    env = chain_problem().env
    coarse = chain_edge_collision_free(a, b, env, res)
    fine = chain_edge_collision_free(a, b, env, 2 * res)
    assert not (fine and not coarse)


# planner ------------------------------------------------------------------

def test_roadmap_full_rescan_n2000():
    p = family_problem("spheres", 3)
    rm = build_roadmap(halton_sequence(2000, 3), p, 0.11)
    from detprm.planner import radius_pairs

    i, j, length = radius_pairs(rm.points, 0.11)
    assert np.all(length < 0.11)
    expect = {(a, b) for a, b in zip(i.tolist(), j.tolist())
              if segment_collision_free(rm.points[a], rm.points[b], p.env)}
    got = set(zip(rm.edge_i.tolist(), rm.edge_j.tolist()))
    assert got == expect
    # No self loops and every edge shows up from both ends.
    assert np.all(rm.edge_i != rm.edge_j)
    indptr, nbr, _ = rm.adjacency()
    deg = np.diff(indptr)
    assert deg.sum() == 2 * rm.n_edges
    assert np.array_equal(np.bincount(np.concatenate([rm.edge_i, rm.edge_j]), minlength=rm.n_vertices), deg)


def test_cost_monotone_in_n_with_halton():
    p = Problem(Environment(3), [0.05] * 3, [0.95] * 3, 0.05)
    costs = [plan(p, SamplerSpec("halton", 3), n, RadiusRule.explicit(0.2)).cost for n in (50, 100, 200, 400, 800)]
    assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))


@pytest.mark.parametrize("name", ["maze2d", "recmaze2", "rect2", "spheres2"])
def test_convergence_bound_on_shipped_problems(name):
    p = load_shipped_problem(name)
    s = make_samples(lattice_spec(2), 10_000)
    D = dispersion_bounds(s, 1001).hi
    r, delta = 0.03, 0.04
    assert 2 * D < r < delta
    res = plan(p, None, s.n, RadiusRule.explicit(r), samples=s)
    oracle = oracle_delta_cost(p, delta, 201).cost
    assert math.isfinite(oracle) and res.success
    assert res.cost <= suboptimality_factor(D, r) * oracle


@pytest.mark.parametrize("name", ["maze2d", "recmaze2", "recmaze3"])
def test_failure_implies_narrow_corridor(name):
    # Only failures with r > 2 D(S) say anything; recmaze3 has none at these n.
    p = load_shipped_problem(name)
    checked = 0
    for spec in (SamplerSpec("halton", p.dim), lattice_spec(p.dim)):
        for n in (20, 40, 60, 100, 150):
            pts = config_samples(p, spec, n)
            r = connection_radius(len(pts), p.dim, RadiusRule())
            res = plan(p, spec, n, samples=pts)
            D = dispersion_bounds(pts, 201 if p.dim == 2 else 41).hi
            if not res.success and r > 2 * D:
                checked += 1
                assert math.isinf(oracle_delta_cost(p, D, 101 if p.dim == 2 else 41).cost)
    assert checked >= 1 or p.dim > 2


# bench --------------------------------------------------------------------

def test_csv_byte_identical_across_worker_counts():
    cfg = config_from_json({"schema": 1, "problem": {"shipped": "recmaze2"}, "samplers": ["iid", "halton", "lattice"],
                            "n_schedule": [50, 100, 200], "iid_repeats": 4,
                            "bound": {"dispersion_resolution": 101}})
    one = records_to_csv(run_experiment(cfg, workers=1))
    eight = records_to_csv(run_experiment(cfg, workers=8))
    assert one == eight

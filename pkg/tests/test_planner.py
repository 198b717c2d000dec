import math

import numpy as np
import pytest

from detprm.core import ANGULAR_L1, PathPolyline, Problem, metric_distance, path_cost
from detprm.environments import Environment, family_problem, segment_collision_free
from detprm.planner import (
    CertificationQuery,
    RadiusRule,
    build_knn_roadmap,
    build_roadmap,
    certify_sample_count,
    connection_radius,
    fmt_star,
    gamma_prm,
    knn_count,
    plan,
    shortest_path,
    suboptimality_factor,
)
from detprm.planner.roadmap import length_classes
from detprm.sampling import SamplerSpec, halton_sequence, lattice_spec, sukharev_lattice
from oracles import FROZEN

FREE2 = Problem(Environment(2), [0.05, 0.05], [0.95, 0.95], 0.05)


def test_unit_ball_and_gamma():
    assert gamma_prm(2) == pytest.approx(2.2 * math.sqrt(1.5) / math.sqrt(math.pi), rel=1e-14)
    assert gamma_prm(2) == pytest.approx(1.52017, abs=1e-5)
    assert gamma_prm(2) == pytest.approx(FROZEN["gamma_prm_2d"], rel=1e-14)


def test_gamma_prm_radius():
    r = connection_radius(100, 2, RadiusRule())
    assert r == pytest.approx(1.52017 * math.sqrt(math.log(100) / 100), abs=1e-4)
    assert r == pytest.approx(FROZEN["radius_2d_n100"], rel=1e-14)


def test_explicit_and_power_rules():
    assert connection_radius(1000, 3, RadiusRule.explicit(0.3)) == 0.3
    r = connection_radius(1000, 2, RadiusRule.power(1.2))
    assert r == pytest.approx(1.2 / math.sqrt(1000) * math.log(math.log(1000)))
    assert connection_radius(2, 2, RadiusRule.power(1.0)) > 0


def test_chain_radius_scaling():
    base = connection_radius(500, 8, RadiusRule())
    assert connection_radius(500, 8, RadiusRule(), ANGULAR_L1) == pytest.approx(base * math.sqrt(8) * math.pi)


def test_rule_errors():
    with pytest.raises(ValueError):
        RadiusRule("nearest")
    with pytest.raises(ValueError):
        connection_radius(10, 2, RadiusRule.explicit(-1.0))
    with pytest.raises(ValueError):
        connection_radius(1, 2, RadiusRule())


def test_rule_parse_roundtrip():
    for rule in (RadiusRule(), RadiusRule.power(1.2), RadiusRule.explicit(0.1), RadiusRule("gamma_prm", 1.5)):
        assert RadiusRule.parse(rule.describe()) == rule


def test_knn_count_example():
    assert knn_count(100, 2, 0.2, 0.1) == FROZEN["knn_k_2d_n100_r02"] == math.ceil(1.1 * 100 * math.pi * 0.04)


def test_collinear_radius_edges():
    p = Problem(Environment(2), [0.1, 0.5], [0.9, 0.9], 0.05)
    rm = build_roadmap(np.array([[0.3, 0.5], [0.5, 0.5]]), p, 0.25, include_goal=False)
    assert rm.n_edges == 2
    assert sorted(rm.lengths.round(12)) == [0.2, 0.2]


def test_radius_is_strict():
    p = Problem(Environment(2), [0.25, 0.5], [0.9, 0.9], 0.05)
    rm = build_roadmap(np.array([[0.5, 0.5]]), p, 0.25, include_goal=False)
    assert rm.n_edges == 0
    rm = build_roadmap(np.array([[0.5, 0.5]]), p, np.nextafter(0.25, 1.0), include_goal=False)
    assert rm.n_edges == 1


def brute_force_edges(points, problem, r):
    out = set()
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if metric_distance(points[a], points[b]) < r and segment_collision_free(points[a], points[b], problem.env):
                out.add((a, b))
    return out


def test_roadmap_matches_brute_force_on_maze():
    p = family_problem("maze2d")
    s = sukharev_lattice((32, 32))
    r = connection_radius(s.n, 2, RadiusRule())
    rm = build_roadmap(s, p, r)
    got = set(zip(rm.edge_i.tolist(), rm.edge_j.tolist()))
    assert got == brute_force_edges(rm.points, p, r)


def test_roadmap_invariants_by_rescan():
    p = family_problem("spheres", 2)
    rm = build_roadmap(halton_sequence(600, 2), p, 0.12)
    idx, nbr, eid = rm.adjacency()
    assert np.all(rm.edge_i < rm.edge_j)
    assert np.all(rm.lengths < 0.12)
    for e in range(rm.n_edges):
        a, b = rm.points[rm.edge_i[e]], rm.points[rm.edge_j[e]]
        assert segment_collision_free(a, b, p.env)
    # Symmetry: each edge appears in both endpoints' lists.
    for e in range(0, rm.n_edges, 37):
        i, j = rm.edge_i[e], rm.edge_j[e]
        assert j in nbr[idx[i]:idx[i + 1]] and i in nbr[idx[j]:idx[j + 1]]
    assert rm.stats.n_distinct_edge_lengths <= rm.stats.n_edges


def test_lazy_roadmap_stores_all_candidates():
    p = family_problem("maze2d")
    s = halton_sequence(300, 2)
    full = build_roadmap(s, p, 0.15)
    lazy = build_roadmap(s, p, 0.15, lazy=True)
    assert lazy.n_edges >= full.n_edges
    assert lazy.stats.n_collision_checks == 0
    assert full.stats.n_collision_checks == lazy.n_edges


def test_knn_complete_graph():
    pts = halton_sequence(30, 2).points
    rm = build_knn_roadmap(pts, FREE2, 31)
    n = rm.n_vertices
    assert rm.n_edges == n * (n - 1) // 2


def test_knn_union_is_symmetric_superset_of_radius_graph():
    s = sukharev_lattice((12, 12))
    r = 0.2
    radius = build_roadmap(s, FREE2, r)
    k = int(radius.degrees().max())
    knn = build_knn_roadmap(s, FREE2, k)
    rad_edges = set(zip(radius.edge_i.tolist(), radius.edge_j.tolist()))
    knn_edges = set(zip(knn.edge_i.tolist(), knn.edge_j.tolist()))
    assert rad_edges <= knn_edges


def test_knn_rejects_bad_k():
    with pytest.raises(ValueError):
        build_knn_roadmap(halton_sequence(5, 2), FREE2, 0)


def test_single_edge_path():
    p = Problem(Environment(2), [0.1, 0.1], [0.6, 0.1], 0.01)
    rm = build_roadmap(np.zeros((0, 2)), p, 0.6)
    res = shortest_path(rm, p)
    assert res.success and res.cost == pytest.approx(0.5)


def test_disconnected_fails():
    p = Problem(Environment(2), [0.1, 0.1], [0.9, 0.9], 0.05)
    rm = build_roadmap(halton_sequence(20, 2), p, 0.01)
    for engine in ("binary_heap", "bucket"):
        res = shortest_path(rm, p, engine)
        assert not res.success and math.isinf(res.cost) and res.path is None


def test_no_goal_vertex_is_failure():
    p = Problem(Environment(2), [0.1, 0.1], [0.9, 0.9], 0.01)
    rm = build_roadmap(halton_sequence(20, 2), p, 0.5, include_goal=False)
    res = shortest_path(rm, p)
    assert not res.success and "goal" in res.note


def test_bucket_threshold_fallback():
    p = family_problem("maze2d")
    rm = build_roadmap(halton_sequence(400, 2), p, 0.15)
    res = shortest_path(rm, p, "bucket", bucket_threshold=10)
    assert "fallback" in res.note
    ref = shortest_path(rm, p, "binary_heap")
    assert res.cost == ref.cost


def test_length_classes_group_rounding():
    ids, rep = length_classes(np.array([0.1, 0.1 + 1e-15, 0.2, 0.30000000000000004, 0.3]))
    assert len(rep) == 3 and ids[0] == ids[1] and ids[3] == ids[4]


def test_free_space_bound_64():
    k = 64
    s = sukharev_lattice((k, k))
    res = plan(FREE2, None, s.n, RadiusRule.explicit(3 / k), samples=s)
    opt = 0.9 * math.sqrt(2) - 0.05
    D = math.sqrt(2) / (2 * k)
    assert opt - 1e-12 <= res.cost <= suboptimality_factor(D, 3 / k) * opt


def test_result_cost_is_path_cost():
    res = plan(family_problem("maze2d"), SamplerSpec("halton", 2), 400)
    assert res.success and res.cost == path_cost(res.path)
    assert np.array_equal(res.path.vertices[0], [0.05, 0.05])
    assert family_problem("maze2d").in_goal(res.path.vertices[-1])


def test_lazy_equals_gprm_on_maze_halton_500():
    p = family_problem("maze2d")
    a = plan(p, SamplerSpec("halton", 2), 500, variant="gprm")
    b = plan(p, SamplerSpec("halton", 2), 500, variant="lazy")
    assert abs(a.cost - b.cost) <= 1e-9
    assert b.stats.n_collision_checks < a.stats.n_collision_checks


def test_lazy_path_is_fully_valid():
    p = family_problem("recursive-maze", 3)
    res = plan(p, SamplerSpec("halton", 3), 600, variant="lazy")
    assert res.success
    verts = res.path.vertices
    for a, b in zip(verts[:-1], verts[1:]):
        assert segment_collision_free(a, b, p.env)


def test_fmt_vs_gprm_free_space():
    spec = SamplerSpec("sukharev", 2)
    g = plan(FREE2, spec, 1024, variant="gprm")
    f = plan(FREE2, spec, 1024, variant="fmt")
    r = connection_radius(1024, 2, RadiusRule())
    bound = suboptimality_factor(math.sqrt(2) / 64, r) * (0.9 * math.sqrt(2) - 0.05)
    assert f.cost >= g.cost - 1e-12
    assert g.cost <= bound and f.cost <= bound


def test_fmt_on_obstacles_not_better_than_gprm():
    p = family_problem("maze2d")
    for n in (300, 800):
        g = plan(p, SamplerSpec("halton", 2), n, variant="gprm")
        f = plan(p, SamplerSpec("halton", 2), n, variant="fmt")
        assert f.success and f.cost >= g.cost - 1e-12


def test_fmt_requires_lazy_roadmap():
    rm = build_roadmap(halton_sequence(50, 2), FREE2, 0.3)
    with pytest.raises(ValueError):
        fmt_star(rm, FREE2)


def test_knn_variant():
    p = family_problem("maze2d")
    res = plan(p, SamplerSpec("halton", 2), 500, variant="knn", knn_epsilon=0.1)
    assert res.success
    with pytest.raises(ValueError):
        plan(p, SamplerSpec("halton", 2), 500, variant="knn")


def test_zero_samples_fails():
    res = plan(FREE2, SamplerSpec("halton", 2), 0)
    assert not res.success and math.isinf(res.cost)


def test_strict_mode_drops_goal_center():
    p = Problem(Environment(2), [0.05, 0.05], [0.95, 0.95], 0.01)
    loose = plan(p, SamplerSpec("halton", 2), 50)
    strict = plan(p, SamplerSpec("halton", 2), 50, strict=True)
    assert loose.success and not strict.success
    assert strict.stats.n_vertices == loose.stats.n_vertices - 1


def test_plan_dimension_mismatch():
    with pytest.raises(ValueError):
        plan(FREE2, SamplerSpec("halton", 3), 50)


def test_chain_plan_succeeds():
    from detprm.environments import chain_problem

    p = chain_problem()
    res = plan(p, SamplerSpec("halton", 8), 1500, variant="lazy")
    assert res.success
    assert res.cost >= math.pi - 0.5 - 1e-9
    assert res.path.metric == ANGULAR_L1


def test_suboptimality_factor():
    assert suboptimality_factor(0.1, 0.4) == pytest.approx(2.0)
    assert suboptimality_factor(0.0, 0.3) == 1.0
    with pytest.raises(ValueError):
        suboptimality_factor(0.1, 0.2)


def test_certification_example():
    c = certify_sample_count(CertificationQuery(2.0, 0.1, math.sqrt(2) / 2, 2))
    assert c.n_required == FROZEN["certify_n"] == 801
    assert c.factor_excess == 1.0
    assert c.radius < 0.1
    assert 2 * 2.0 * (math.sqrt(2) / 2) * 800 ** -0.5 >= 0.1 - 1e-15


def test_certification_limits_and_scaling():
    big = certify_sample_count(CertificationQuery(1e9, 0.1, 0.5, 2))
    assert big.factor_excess < 1e-8
    for d in (2, 3):
        a = certify_sample_count(CertificationQuery(3.0, 0.05, 0.6, d)).n_required
        b = certify_sample_count(CertificationQuery(3.0, 0.10, 0.6, d)).n_required
        assert abs(a / 2**d - b) <= 1
    with pytest.raises(ValueError):
        CertificationQuery(1.0, 0.1, 0.5, 2)

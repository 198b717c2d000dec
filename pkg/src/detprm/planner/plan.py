"""End-to-end pipeline: sample, build the roadmap, search."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from detprm.core import PlanResult, Problem, SampleSet, Stats
from detprm.environments.chain import DEFAULT_EDGE_RESOLUTION
from detprm.planner.fmt import fmt_star
from detprm.planner.radius import RadiusRule, connection_radius, knn_count
from detprm.planner.roadmap import build_knn_roadmap, build_roadmap
from detprm.planner.search import DEFAULT_BUCKET_THRESHOLD, shortest_path
from detprm.sampling import SamplerSpec, make_samples

VARIANTS = ("gprm", "knn", "lazy", "fmt")


def config_samples(problem: Problem, spec: SamplerSpec, n: int) -> np.ndarray:
    """Sampler output mapped into the problem's configuration space.

    Chain problems live on [-pi, pi)^d; unit-cube points u map to 2 pi u - pi.
    """
    pts = make_samples(spec, n).points
    if problem.env.chain is not None:
        pts = np.minimum(2.0 * math.pi * pts - math.pi, math.pi - 1e-12)
        # 2 pi u - pi lands on pi only for u = 1, which equals -pi on the torus.
        pts = np.where(pts >= math.pi, pts - 2.0 * math.pi, pts)
    return pts


def plan(problem: Problem, sampler: Optional[SamplerSpec], n: int, rule: RadiusRule = RadiusRule(),
         variant: str = "gprm", engine: str = "binary_heap", strict: bool = False,
         k: Optional[int] = None, knn_epsilon: Optional[float] = None,
         bucket_threshold: Optional[int] = DEFAULT_BUCKET_THRESHOLD,
         edge_resolution: int = DEFAULT_EDGE_RESOLUTION, workers: int = 1,
         samples=None) -> PlanResult:
    """Plan from x_init to the goal ball with ``n`` samples.

    ``strict`` drops the goal center from the vertex set, so only samples can
    reach the goal. ``samples`` overrides the sampler with explicit points.
    For ``knn`` give either ``k`` or ``knn_epsilon`` (k from the radius).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; use one of {VARIANTS}")
    if variant == "knn" and k is None and knn_epsilon is None:
        raise ValueError("knn variant needs k or knn_epsilon")
    if sampler is not None and sampler.dim != problem.dim:
        raise ValueError(f"sampler dimension {sampler.dim} does not match problem dimension {problem.dim}")
    if samples is None:
        if n <= 0:
            return PlanResult.failure(Stats(n_vertices=1), "no samples")
        if sampler is None:
            raise ValueError("need a sampler or explicit samples")
        pts = config_samples(problem, sampler, n)
    else:
        pts = samples.points if isinstance(samples, SampleSet) else np.asarray(samples, dtype=np.float64)
        if len(pts) == 0:
            return PlanResult.failure(Stats(n_vertices=1), "no samples")
    n_eff = max(len(pts), 2)
    r = connection_radius(n_eff, problem.dim, rule, problem.metric)
    include_goal = not strict
    if variant == "knn":
        kn = k if k is not None else knn_count(n_eff, problem.dim, r, knn_epsilon)
        n_vert = len(pts) + 1 + int(include_goal)
        rm = build_knn_roadmap(pts, problem, min(kn, n_vert - 1), include_goal, edge_resolution, workers)
        return shortest_path(rm, problem, engine, bucket_threshold, edge_resolution)
    lazy = variant in ("lazy", "fmt")
    rm = build_roadmap(pts, problem, r, lazy=lazy, include_goal=include_goal,
                       edge_resolution=edge_resolution, workers=workers)
    if variant == "fmt":
        return fmt_star(rm, problem, edge_resolution)
    return shortest_path(rm, problem, engine, bucket_threshold, edge_resolution)

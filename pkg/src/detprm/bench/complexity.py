"""Edge counts and distinct edge lengths across a sample-count schedule."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from detprm.core import Problem
from detprm.planner.radius import RadiusRule, connection_radius
from detprm.planner.roadmap import count_distinct_lengths, edges_free, radius_pairs
from detprm.sampling import SamplerSpec, make_samples


@dataclass(frozen=True)
class ComplexityRecord:
    n: int
    r_n: float
    edges: int
    edges_ratio: float
    distinct_lengths: int
    distinct_ratio: float

    def as_row(self) -> dict:
        return asdict(self)


def complexity_scan(problem: Problem, sampler: SamplerSpec, rule: RadiusRule, n_schedule) -> list[ComplexityRecord]:
    """Radius-graph size over the samples alone (start and goal not added).

    ``edges_ratio`` is edges / (n^2 r^d) and ``distinct_ratio`` is
    distinct_lengths / (n r^d), with n the number of generated samples.
    """
    d = problem.dim
    out = []
    for n_req in n_schedule:
        samples = make_samples(sampler, n_req)
        pts = samples.points[problem.env.configs_free(samples.points)]
        n = samples.n
        r = connection_radius(n, d, rule, problem.metric)
        i, j, length = radius_pairs(pts, r, problem.metric)
        if problem.env.obstacles:
            ok = edges_free(problem, pts[i], pts[j])
            length = length[ok]
        edges = len(length)
        distinct = count_distinct_lengths(length)
        out.append(ComplexityRecord(n, r, edges, edges / (n * n * r**d), distinct, distinct / (n * r**d)))
    return out


def lattice_distinct_lengths_oracle(k: int, r: float, d: int = 2) -> int:
    """Distinct squared norms of nonzero integer offsets that fit a k^d grid, below (r k)^2."""
    bound = (r * k) ** 2
    m = min(int(math.floor(r * k)), k - 1)
    norms = set()
    for off in np.ndindex(*(m + 1,) * d):
        s = sum(o * o for o in off)
        if 0 < s < bound:
            norms.add(s)
    return len(norms)

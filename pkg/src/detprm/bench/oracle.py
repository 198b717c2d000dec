"""Reference costs: fine-grid Dijkstra on an inflated environment, and brute-force roadmaps.

Both are independent of the planner's neighbor search and search engines;
scipy's csgraph Dijkstra does the shortest-path work.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from detprm.core import EUCLIDEAN, Problem, metric_distance
from detprm.environments.geometry import inflate, segment_collision_free, segments_collision_free

MAX_ORACLE_NODES = 5_000_000


@dataclass(frozen=True)
class OracleResult:
    cost: float
    resolution: int
    delta: float


def _grid_offsets(d: int) -> np.ndarray:
    """Half of the 3^d - 1 neighbor offsets (each undirected edge once)."""
    offs = [o for o in itertools.product((-1, 0, 1), repeat=d) if any(o)]
    half = [o for o in offs if next(x for x in o if x != 0) > 0]
    return np.array(half, dtype=np.int64)


def oracle_delta_cost(problem: Problem, delta: float, grid_resolution: int = 101) -> OracleResult:
    """Shortest grid path from x_init to the goal center in ``inflate(env, delta)``.

    Grid nodes are the resolution^d lattice of [0,1]^d including the boundary,
    joined to all 3^d - 1 neighbors (axis and diagonal moves) whose segment
    is free. Start and goal are snapped to their nearest free node and the
    snapping legs are added to the cost. Returns inf if either leg or the
    grid search fails.
    """
    if problem.env.chain is not None:
        raise ValueError("grid oracle covers point robots only")
    if problem.metric != EUCLIDEAN:
        raise ValueError("grid oracle uses the euclidean metric")
    d = problem.dim
    res = int(grid_resolution)
    total = res**d
    if total > MAX_ORACLE_NODES:
        raise ValueError(f"oracle grid {res}^{d} exceeds {MAX_ORACLE_NODES} nodes")
    env = inflate(problem.env, delta)
    h = 1.0 / (res - 1)
    idx = np.array(np.unravel_index(np.arange(total), (res,) * d)).T
    nodes = idx * h
    free = env.points_free(nodes)
    rows, cols, weights = [], [], []
    strides = np.array([res ** (d - 1 - j) for j in range(d)], dtype=np.int64)
    for off in _grid_offsets(d):
        tgt = idx + off
        ok = np.all((tgt >= 0) & (tgt < res), axis=1) & free
        src = np.nonzero(ok)[0]
        dst = tgt[src] @ strides
        keep = free[dst]
        src, dst = src[keep], dst[keep]
        seg_ok = segments_collision_free(nodes[src], nodes[dst], env)
        rows.append(src[seg_ok])
        cols.append(dst[seg_ok])
        weights.append(np.full(int(seg_ok.sum()), h * math.sqrt(float(np.sum(off * off)))))
    graph = coo_matrix((np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
                       shape=(total, total)).tocsr()

    def snap(x):
        cand = np.nonzero(free)[0]
        if len(cand) == 0:
            return None, math.inf
        dist = np.sqrt(np.sum((nodes[cand] - x) ** 2, axis=1))
        k = int(cand[np.argmin(dist)])
        if not segment_collision_free(x, nodes[k], env):
            return None, math.inf
        return k, float(np.min(dist))

    s, leg_s = snap(problem.x_init)
    g, leg_g = snap(problem.goal_center)
    if s is None or g is None:
        return OracleResult(math.inf, res, delta)
    dist = dijkstra(graph, directed=False, indices=s)
    return OracleResult(float(dist[g]) + leg_s + leg_g, res, delta)


def brute_force_cost(points: np.ndarray, problem: Problem, r: float) -> float:
    """Dijkstra over the all-pairs radius graph, built with scalar segment checks.

    ``points`` are the roadmap vertices with x_init first. O(n^2) checks, so
    meant for n up to a few hundred.
    """
    n = len(points)
    rows, cols, w = [], [], []
    for a in range(n):
        for b in range(a + 1, n):
            dab = metric_distance(points[a], points[b], problem.metric)
            if dab < r and segment_collision_free(points[a], points[b], problem.env):
                rows.append(a)
                cols.append(b)
                # csgraph treats explicit zeros as missing edges.
                w.append(max(dab, 1e-300))
    if not rows:
        return math.inf
    graph = coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
    dist = dijkstra(graph, directed=False, indices=0)
    goal = np.array([problem.in_goal(p) for p in points])
    return float(np.min(dist[goal])) if goal.any() else math.inf

"""FMT*: forward marching over the radius graph with lazy, single-shot connections."""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from detprm.core import PlanResult, Problem
from detprm.planner.roadmap import INVALID, UNCHECKED, VALID, Roadmap, edges_free
from detprm.planner.search import _result


def fmt_star(roadmap: Roadmap, problem: Problem, edge_resolution: int = 16) -> PlanResult:
    """Run FMT* on a lazy radius roadmap (all pairs closer than r_n, unchecked).

    Each unvisited neighbor x of the lowest-cost open vertex z tries one
    connection: to its best open neighbor by cost-to-come plus edge length.
    If that edge collides, x stays unvisited for now.
    """
    if not roadmap.lazy:
        raise ValueError("fmt_star expects a lazy roadmap (unchecked candidate edges)")
    t0 = time.perf_counter()
    indptr, nbr, eid = roadmap.adjacency()
    w = roadmap.lengths
    state = roadmap.edge_state
    pts = roadmap.points
    n = roadmap.n_vertices
    UNVISITED, OPEN, CLOSED = 0, 1, 2
    status = np.zeros(n, dtype=np.int8)
    cost = np.full(n, math.inf)
    parent = np.full(n, -1, dtype=np.int64)
    status[0] = OPEN
    cost[0] = 0.0
    heap = [(0.0, 0)]
    checks = 0
    goal = roadmap.goal_mask
    while heap:
        cz, z = heapq.heappop(heap)
        if status[z] != OPEN:
            continue
        if goal[z]:
            roadmap.stats.n_collision_checks += checks
            return _result(roadmap, parent, z, t0)
        newly_open = []
        for k in range(indptr[z], indptr[z + 1]):
            x = nbr[k]
            if status[x] != UNVISITED:
                continue
            best, best_e, best_c = -1, -1, math.inf
            for kk in range(indptr[x], indptr[x + 1]):
                y = nbr[kk]
                if status[y] != OPEN:
                    continue
                c = cost[y] + w[eid[kk]]
                if c < best_c or (c == best_c and y < best):
                    best, best_e, best_c = int(y), int(eid[kk]), c
            if state[best_e] == UNCHECKED:
                ok = edges_free(problem, pts[best][None, :], pts[x][None, :], edge_resolution)[0]
                state[best_e] = VALID if ok else INVALID
                checks += 1
            if state[best_e] == VALID:
                newly_open.append((best_c, int(x), best))
        for c, x, y in newly_open:
            status[x] = OPEN
            cost[x] = c
            parent[x] = y
            heapq.heappush(heap, (c, x))
        status[z] = CLOSED
    roadmap.stats.n_collision_checks += checks
    return _result(roadmap, parent, None, t0)

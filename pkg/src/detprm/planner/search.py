"""Shortest-path engines over a roadmap.

``binary_heap`` is Dijkstra with a binary heap. ``bucket`` exploits a small
number K of distinct edge lengths: settled vertices are kept in settling
order, and for each length class the next candidate is the earliest settled
vertex with an unsettled neighbor in that class, so each step is a minimum
over K class heads and the run costs O(m + nK). Both engines break key
ties toward the lower vertex index.

Lazy roadmaps are searched by pushing one heap entry per relaxed edge and
validating an edge only when its entry is extracted. The first valid entry
for a vertex settles it, so the search computes exactly the shortest path in
the subgraph of valid edges.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from typing import Optional

import numpy as np

from detprm.core import PathPolyline, PlanResult, Problem
from detprm.planner.roadmap import INVALID, UNCHECKED, VALID, Roadmap, edges_free, length_classes

log = logging.getLogger(__name__)

ENGINES = ("binary_heap", "bucket")
DEFAULT_BUCKET_THRESHOLD = 4096


def _result(roadmap: Roadmap, parent: np.ndarray, target: Optional[int], t0: float, note: str = "") -> PlanResult:
    stats = roadmap.stats
    stats.query_time = time.perf_counter() - t0
    if target is None:
        return PlanResult.failure(stats, note or "goal not reached")
    chain = [target]
    while parent[chain[-1]] >= 0:
        chain.append(int(parent[chain[-1]]))
    chain.reverse()
    path = PathPolyline(roadmap.points[chain].copy(), roadmap.metric)
    return PlanResult.from_path(path, stats, note)


def dijkstra_binary_heap(roadmap: Roadmap, source: int = 0):
    """Returns (dist, parent, goal vertex reached or None)."""
    indptr, nbr, eid = roadmap.adjacency()
    w = roadmap.lengths
    valid = roadmap.edge_state == VALID
    n = roadmap.n_vertices
    dist = np.full(n, math.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    goal = roadmap.goal_mask
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if goal[u]:
            return dist, parent, u
        for k in range(indptr[u], indptr[u + 1]):
            e = eid[k]
            if not valid[e]:
                continue
            v = nbr[k]
            if done[v]:
                continue
            nd = du + w[e]
            if nd < dist[v] or (nd == dist[v] and u < parent[v]):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, int(v)))
    return dist, parent, None


def dijkstra_bucket(roadmap: Roadmap, source: int = 0):
    """Dijkstra over K length classes with one FIFO cursor per class."""
    indptr, nbr, eid = roadmap.adjacency()
    valid = roadmap.edge_state == VALID
    cls_of_edge, rep = length_classes(roadmap.lengths)
    K = len(rep)
    n = roadmap.n_vertices
    w = roadmap.lengths

    # Per vertex, valid neighbors grouped by class: flat arrays sliced by
    # (vertex, class) offsets.
    src = np.repeat(np.arange(n), np.diff(indptr))
    keep = valid[eid]
    src, dst, e = src[keep], nbr[keep], eid[keep]
    c = cls_of_edge[e]
    order = np.lexsort((dst, c, src))
    src, dst, e, c = src[order], dst[order], e[order], c[order]
    key = src * K + c
    start = np.searchsorted(key, np.arange(n * K))
    stop = np.searchsorted(key, np.arange(n * K), side="right")

    dist = np.full(n, math.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    goal = roadmap.goal_mask
    settled = [source]
    done[source] = True
    dist[source] = 0.0
    if goal[source]:
        return dist, parent, source
    # Cursor per class: position in ``settled`` and offset into that vertex's class list.
    pos = [0] * K
    off = [-1] * K
    rep_l = rep.tolist()
    dst_l = dst.tolist()
    e_l = e.tolist()

    def head(k):
        """Advance class k's cursor to its first unsettled target; None if exhausted."""
        p, o = pos[k], off[k]
        while p < len(settled):
            u = settled[p]
            if o < 0:
                o = int(start[u * K + k])
            end = stop[u * K + k]
            while o < end:
                if not done[dst_l[o]]:
                    pos[k], off[k] = p, o
                    return u, o
                o += 1
            p += 1
            o = -1
        pos[k], off[k] = p, o
        return None

    while True:
        best = None
        for k in range(K):
            h = head(k)
            if h is None:
                continue
            u, o = h
            cand = (dist[u] + rep_l[k], dst_l[o], k, u, o)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None:
            return dist, parent, None
        _, v, k, u, o = best
        done[v] = True
        dist[v] = dist[u] + w[e_l[o]]
        parent[v] = u
        settled.append(v)
        if goal[v]:
            return dist, parent, v


def dijkstra_lazy(roadmap: Roadmap, problem: Problem, source: int = 0, edge_resolution: int = 16):
    """Dijkstra that validates each edge the first time a search entry uses it."""
    indptr, nbr, eid = roadmap.adjacency()
    w = roadmap.lengths
    state = roadmap.edge_state
    pts = roadmap.points
    n = roadmap.n_vertices
    dist = np.full(n, math.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    goal = roadmap.goal_mask
    heap = [(0.0, source, -1, -1)]
    checks = 0
    while heap:
        du, u, p, e = heapq.heappop(heap)
        if done[u]:
            continue
        if e >= 0:
            if state[e] == UNCHECKED:
                ok = edges_free(problem, pts[p][None, :], pts[u][None, :], edge_resolution)[0]
                state[e] = VALID if ok else INVALID
                checks += 1
            if state[e] == INVALID:
                continue
        done[u] = True
        dist[u] = du
        parent[u] = p
        if goal[u]:
            roadmap.stats.n_collision_checks += checks
            return dist, parent, u
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr[k]
            ek = eid[k]
            if done[v] or state[ek] == INVALID:
                continue
            heapq.heappush(heap, (du + w[ek], int(v), int(u), int(ek)))
    roadmap.stats.n_collision_checks += checks
    return dist, parent, None


def shortest_path(roadmap: Roadmap, problem: Problem, engine: str = "binary_heap",
                  bucket_threshold: Optional[int] = DEFAULT_BUCKET_THRESHOLD,
                  edge_resolution: int = 16) -> PlanResult:
    """Minimum-cost path from vertex 0 to any vertex inside the goal ball.

    ``bucket_threshold=None`` forces the bucket engine regardless of the
    number of distinct edge lengths.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; use one of {ENGINES}")
    t0 = time.perf_counter()
    if not roadmap.goal_mask.any():
        return _result(roadmap, None, None, t0, "no vertex inside the goal ball")
    note = ""
    if roadmap.lazy:
        if engine == "bucket":
            note = "lazy roadmap searched with binary_heap"
        dist, parent, target = dijkstra_lazy(roadmap, problem, edge_resolution=edge_resolution)
    elif engine == "bucket":
        k = roadmap.stats.n_distinct_edge_lengths
        if bucket_threshold is not None and k > bucket_threshold:
            log.info("bucket engine skipped: %d distinct lengths exceed threshold %d", k, bucket_threshold)
            note = f"bucket fallback to binary_heap ({k} distinct lengths)"
            dist, parent, target = dijkstra_binary_heap(roadmap)
        else:
            dist, parent, target = dijkstra_bucket(roadmap)
    else:
        dist, parent, target = dijkstra_binary_heap(roadmap)
    return _result(roadmap, parent, target, t0, note)

"""Roadmap construction: radius graphs (checked or lazy) and k-nearest graphs."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from detprm.core import ANGULAR_L1, EUCLIDEAN, DimensionMismatch, Problem, SampleSet, Stats, pairwise_distance
from detprm.environments.chain import DEFAULT_EDGE_RESOLUTION, chain_edges_collision_free
from detprm.environments.geometry import segments_collision_free

# Edge lengths closer than this (relative) are one length class. Lattice
# offsets that are equal in exact arithmetic differ only by rounding.
LENGTH_RTOL = 1e-9
_PAIR_CHUNK = 1 << 16
_BRUTE_CHUNK = 512

UNCHECKED, VALID, INVALID = 0, 1, -1


def length_classes(lengths: np.ndarray, rtol: float = LENGTH_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Group lengths into classes; returns (class id per length, representative per class).

    The representative is the smallest member. Ids are ordered by length.
    """
    lengths = np.asarray(lengths, dtype=np.float64)
    if len(lengths) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    order = np.argsort(lengths, kind="stable")
    s = lengths[order]
    new = np.empty(len(s), dtype=bool)
    new[0] = True
    new[1:] = np.diff(s) > rtol * np.maximum(s[1:], 1e-300)
    ids_sorted = np.cumsum(new) - 1
    ids = np.empty(len(s), dtype=np.int64)
    ids[order] = ids_sorted
    return ids, s[new]


def count_distinct_lengths(lengths: np.ndarray, rtol: float = LENGTH_RTOL) -> int:
    return len(length_classes(lengths, rtol)[1])


def edges_free(problem: Problem, A: np.ndarray, B: np.ndarray,
               resolution: int = DEFAULT_EDGE_RESOLUTION, workers: int = 1) -> np.ndarray:
    """Local-path collision test for rows of A and B (exact for point robots)."""
    env = problem.env

    def check(lo_hi):
        lo, hi = lo_hi
        if env.chain is not None:
            return chain_edges_collision_free(A[lo:hi], B[lo:hi], env, resolution)
        return segments_collision_free(A[lo:hi], B[lo:hi], env)

    bounds = [(s, min(s + _PAIR_CHUNK, len(A))) for s in range(0, len(A), _PAIR_CHUNK)]
    if not bounds:
        return np.zeros(0, dtype=bool)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(check, bounds))
    else:
        parts = [check(b) for b in bounds]
    return np.concatenate(parts)


def radius_pairs(points: np.ndarray, r: float, metric: str = EUCLIDEAN):
    """All unordered pairs (i < j) with metric distance strictly below r.

    Returns (i, j, length) sorted lexicographically by (i, j).
    """
    n = len(points)
    if metric == EUCLIDEAN:
        # The tree works with <=; query slightly wider and filter exactly.
        pairs = cKDTree(points).query_pairs(r * (1.0 + 1e-9) + 1e-300, output_type="ndarray")
        if len(pairs) == 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
        i = pairs.min(axis=1).astype(np.int64)
        j = pairs.max(axis=1).astype(np.int64)
        length = pairwise_distance(points[i], points[j], metric)
    else:
        ii, jj, ll = [], [], []
        for start in range(0, n, _BRUTE_CHUNK):
            rows = np.arange(start, min(start + _BRUTE_CHUNK, n))
            for a in rows:
                if a + 1 >= n:
                    continue
                d = pairwise_distance(np.broadcast_to(points[a], (n - a - 1, points.shape[1])), points[a + 1:], metric)
                hit = np.nonzero(d < r)[0]
                ii.append(np.full(len(hit), a))
                jj.append(hit + a + 1)
                ll.append(d[hit])
        if not ii:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
        i, j, length = np.concatenate(ii), np.concatenate(jj), np.concatenate(ll)
    keep = length < r
    i, j, length = i[keep], j[keep], length[keep]
    order = np.lexsort((j, i))
    return i[order], j[order], length[order]


@dataclass
class Roadmap:
    """Undirected weighted graph; vertex 0 is x_init.

    Edge arrays hold each unordered pair once with ``edge_i < edge_j``.
    In lazy mode ``edge_state`` starts UNCHECKED and search marks edges
    VALID or INVALID as it validates them.
    """

    points: np.ndarray
    metric: str
    edge_i: np.ndarray
    edge_j: np.ndarray
    lengths: np.ndarray
    goal_mask: np.ndarray
    stats: Stats
    r_n: Optional[float] = None
    k_n: Optional[int] = None
    lazy: bool = False
    edge_state: np.ndarray = None
    _csr: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.edge_state is None:
            fill = UNCHECKED if self.lazy else VALID
            self.edge_state = np.full(len(self.lengths), fill, dtype=np.int8)

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.lengths)

    def adjacency(self):
        """CSR view ``(indptr, neighbor, edge_id)``; neighbors sorted by index."""
        if self._csr is None:
            n = self.n_vertices
            src = np.concatenate([self.edge_i, self.edge_j])
            dst = np.concatenate([self.edge_j, self.edge_i])
            eid = np.concatenate([np.arange(self.n_edges)] * 2)
            order = np.lexsort((dst, src))
            src, dst, eid = src[order], dst[order], eid[order]
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            self._csr = (np.cumsum(indptr), dst, eid)
        return self._csr

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency()[0])


def roadmap_vertices(samples, problem: Problem, include_goal: bool = True):
    """x_init, the collision-free samples, and optionally the goal center, deduplicated."""
    pts = samples.points if isinstance(samples, SampleSet) else np.asarray(samples, dtype=np.float64)
    if pts.size and pts.shape[1] != problem.dim:
        raise DimensionMismatch(f"samples have dimension {pts.shape[1]}, problem has {problem.dim}")
    pts = pts.reshape(-1, problem.dim)
    free = pts[problem.env.configs_free(pts)] if len(pts) else pts
    parts = [problem.x_init[None, :], free]
    if include_goal:
        parts.append(problem.goal_center[None, :])
    allpts = np.vstack(parts)
    _, first = np.unique(allpts, axis=0, return_index=True)
    return allpts[np.sort(first)]


def _finish(points, problem, i, j, length, checked, stats, t0, r_n=None, k_n=None, lazy=False):
    stats.n_vertices = len(points)
    stats.n_edges = len(length)
    stats.n_collision_checks = checked
    stats.n_distinct_edge_lengths = count_distinct_lengths(length)
    stats.build_time = time.perf_counter() - t0
    return Roadmap(points, problem.metric, i, j, length, problem.goal_mask(points), stats,
                   r_n=r_n, k_n=k_n, lazy=lazy)


def build_roadmap(samples, problem: Problem, r_n: float, lazy: bool = False, include_goal: bool = True,
                  edge_resolution: int = DEFAULT_EDGE_RESOLUTION, workers: int = 1) -> Roadmap:
    """Radius graph: every pair closer than r_n, kept if its local path is free.

    Lazy mode stores all candidate pairs and leaves checking to the search.
    """
    if not r_n > 0:
        raise ValueError("r_n must be positive")
    t0 = time.perf_counter()
    points = roadmap_vertices(samples, problem, include_goal)
    i, j, length = radius_pairs(points, r_n, problem.metric)
    stats = Stats()
    if lazy:
        return _finish(points, problem, i, j, length, 0, stats, t0, r_n=r_n, lazy=True)
    ok = edges_free(problem, points[i], points[j], edge_resolution, workers)
    return _finish(points, problem, i[ok], j[ok], length[ok], len(ok), stats, t0, r_n=r_n)


def _knn_candidates(points: np.ndarray, k: int, metric: str) -> tuple[np.ndarray, np.ndarray]:
    """Index and distance of the k nearest other vertices, ties to the lower index."""
    n = len(points)
    nbr = np.empty((n, k), dtype=np.int64)
    for start in range(0, n, _BRUTE_CHUNK):
        rows = np.arange(start, min(start + _BRUTE_CHUNK, n))
        if metric == EUCLIDEAN:
            diff = points[rows, None, :] - points[None, :, :]
            dist = np.sqrt(np.sum(diff * diff, axis=2))
        else:
            dist = np.stack([pairwise_distance(np.broadcast_to(points[a], points.shape), points, metric)
                             for a in rows])
        dist[np.arange(len(rows)), rows] = np.inf
        # Sort by (distance, index): lexsort keys are last-major.
        idx = np.broadcast_to(np.arange(n), dist.shape)
        order = np.lexsort((idx, dist), axis=1)[:, :k]
        nbr[rows] = order
    return nbr


def build_knn_roadmap(samples, problem: Problem, k_n: int, include_goal: bool = True,
                      edge_resolution: int = DEFAULT_EDGE_RESOLUTION, workers: int = 1) -> Roadmap:
    """k-nearest graph, symmetrized by union, with collision-checked edges."""
    t0 = time.perf_counter()
    points = roadmap_vertices(samples, problem, include_goal)
    n = len(points)
    if not 1 <= k_n < n:
        raise ValueError(f"k_n must satisfy 1 <= k_n < {n} (number of vertices)")
    nbr = _knn_candidates(points, k_n, problem.metric)
    src = np.repeat(np.arange(n), k_n)
    dst = nbr.reshape(-1)
    i = np.minimum(src, dst)
    j = np.maximum(src, dst)
    key = np.unique(i * n + j)
    i, j = key // n, key % n
    length = pairwise_distance(points[i], points[j], problem.metric)
    ok = edges_free(problem, points[i], points[j], edge_resolution, workers)
    return _finish(points, problem, i[ok], j[ok], length[ok], len(ok), Stats(), t0, k_n=k_n)

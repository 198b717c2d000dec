"""Shared domain types and cost metrics.

Configurations are stored as read-only float64 numpy arrays. A single
configuration is a 1-D array of length ``d``; collections of
configurations are ``(n, d)`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from detprm.environments import Environment

EUCLIDEAN = "euclidean"
ANGULAR_L1 = "angular_l1"
METRICS = (EUCLIDEAN, ANGULAR_L1)

SAMPLE_KINDS = ("halton", "sukharev", "triangular", "iid", "transformed", "mixed")


class DimensionMismatch(ValueError):
    pass


def as_point(coords, dim: Optional[int] = None) -> np.ndarray:
    p = np.array(coords, dtype=np.float64).reshape(-1)
    if p.size == 0:
        raise ValueError("a point needs at least one coordinate")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite coordinates: {p}")
    if dim is not None and p.size != dim:
        raise DimensionMismatch(f"expected {dim} coordinates, got {p.size}")
    p.setflags(write=False)
    return p


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def wrap_angle(x):
    """Map angles into [-pi, pi)."""
    return np.mod(np.asarray(x, dtype=np.float64) + math.pi, 2.0 * math.pi) - math.pi


def angular_gap(diff):
    """Per-coordinate wrapped distance |wrap_angle(diff)|, computed from |diff| so it is symmetric in sign."""
    t = np.mod(np.abs(np.asarray(diff, dtype=np.float64)), 2.0 * math.pi)
    return np.minimum(t, 2.0 * math.pi - t)


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def metric_distance(a, b, metric: str = EUCLIDEAN) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    _check_metric(metric)
    if metric == EUCLIDEAN:
        return float(np.sqrt(np.sum((a - b) ** 2)))
    return float(np.sum(angular_gap(a - b)))


def pairwise_distance(a: np.ndarray, b: np.ndarray, metric: str = EUCLIDEAN) -> np.ndarray:
    """Row-wise distances between two equally shaped ``(m, d)`` arrays."""
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    if metric == EUCLIDEAN:
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))
    _check_metric(metric)
    return np.sum(angular_gap(diff), axis=1)


def distances_to(points: np.ndarray, q: np.ndarray, metric: str = EUCLIDEAN) -> np.ndarray:
    """Distances from every row of ``points`` to the single point ``q``."""
    diff = np.asarray(points, dtype=np.float64) - np.asarray(q, dtype=np.float64)[None, :]
    if metric == EUCLIDEAN:
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))
    _check_metric(metric)
    return np.sum(angular_gap(diff), axis=1)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Provenance:
    kind: str
    seed: Optional[int] = None
    per_dim_counts: Optional[tuple] = None
    # Lattice description used when a set is re-tiled by a transform:
    # generator matrix (rows are basis vectors) and one lattice point.
    lattice_basis: Optional[tuple] = None
    lattice_origin: Optional[tuple] = None
    note: str = ""


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray
    provenance: Provenance
    domain: str = "unit"  # "unit" for [0,1]^d, "angle" for [-pi,pi)^d

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValueError(f"a SampleSet needs a non-empty (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite sample coordinates")
        if self.provenance.kind not in SAMPLE_KINDS:
            raise ValueError(f"unknown sample kind {self.provenance.kind!r}")
        if self.domain == "unit":
            if pts.min() < 0.0 or pts.max() > 1.0:
                raise ValueError("samples must lie in the unit cube")
        elif self.domain == "angle":
            if pts.min() < -math.pi or pts.max() >= math.pi:
                raise ValueError("angle samples must lie in [-pi, pi)")
        else:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.provenance.kind == "sukharev" and self.provenance.per_dim_counts is not None:
            if int(np.prod(self.provenance.per_dim_counts)) != pts.shape[0]:
                raise ValueError("Sukharev set size must equal the product of per-dimension counts")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def head(self, m: int) -> "SampleSet":
        return SampleSet(self.points[:m].copy(), self.provenance, self.domain)


@dataclass(frozen=True)
class PathPolyline:
    vertices: np.ndarray
    metric: str = EUCLIDEAN

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2:
            raise DimensionMismatch("path vertices must share one dimension")
        if v.shape[0] < 2:
            raise ValueError("a path needs at least two vertices")
        _check_metric(self.metric)
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise ValueError("consecutive path vertices must differ")
        object.__setattr__(self, "vertices", _frozen(v))

    def segments(self):
        return self.vertices[:-1], self.vertices[1:]

    def reversed(self) -> "PathPolyline":
        return PathPolyline(self.vertices[::-1].copy(), self.metric)


def path_cost(path: PathPolyline) -> float:
    a, b = path.segments()
    return float(np.sum(pairwise_distance(a, b, path.metric)))


@dataclass
class Stats:
    n_vertices: int = 0
    n_edges: int = 0
    n_collision_checks: int = 0
    n_distinct_edge_lengths: int = 0
    build_time: float = 0.0
    query_time: float = 0.0


@dataclass(frozen=True)
class Problem:
    env: "Environment"
    x_init: np.ndarray
    goal_center: np.ndarray
    goal_radius: float
    metric: str = EUCLIDEAN
    name: str = ""

    def __post_init__(self):
        x0 = as_point(self.x_init, self.env.dim)
        g = as_point(self.goal_center, self.env.dim)
        object.__setattr__(self, "x_init", x0)
        object.__setattr__(self, "goal_center", g)
        _check_metric(self.metric)
        if not self.goal_radius > 0:
            raise ValueError("goal radius must be positive")
        if not self.env.config_free(x0):
            raise ValueError("x_init is in collision")
        if not self.env.config_free(g):
            raise ValueError("goal center is in collision")
        if self.in_goal(x0):
            raise ValueError("x_init already lies in the goal ball")

    @property
    def dim(self) -> int:
        return self.env.dim

    def in_goal(self, x) -> bool:
        return metric_distance(x, self.goal_center, self.metric) <= self.goal_radius

    def goal_mask(self, points: np.ndarray) -> np.ndarray:
        return distances_to(points, self.goal_center, self.metric) <= self.goal_radius


@dataclass
class PlanResult:
    success: bool
    path: Optional[PathPolyline]
    cost: float
    stats: Stats = field(default_factory=Stats)
    note: str = ""

    @classmethod
    def failure(cls, stats: Optional[Stats] = None, note: str = "") -> "PlanResult":
        return cls(False, None, math.inf, stats or Stats(), note)

    @classmethod
    def from_path(cls, path: PathPolyline, stats: Stats, note: str = "") -> "PlanResult":
        return cls(True, path, path_cost(path), stats, note)


def stack_points(points: Sequence) -> np.ndarray:
    return np.vstack([np.asarray(p, dtype=np.float64).reshape(1, -1) for p in points])

"""Obstacles, collision predicates and clearance.

Obstacles are closed sets: touching a box face or a sphere surface counts
as a collision. The faces of the unit cube are not obstacles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from detprm.core import DimensionMismatch, PathPolyline, as_point

_SEGMENT_CHUNK = 200_000


class _ValueEquality:
    """Equality and hashing by serialized value (fields hold numpy arrays)."""

    def __eq__(self, other):
        return type(self) is type(other) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(json.dumps(self.to_json(), sort_keys=True))


@dataclass(frozen=True, eq=False)
class AABox(_ValueEquality):
    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo, hi = as_point(self.min), as_point(self.max)
        if lo.shape != hi.shape:
            raise DimensionMismatch("box corners differ in dimension")
        if not np.all(lo < hi):
            raise ValueError(f"box needs min < max componentwise: {lo} {hi}")
        if np.any(hi < 0.0) or np.any(lo > 1.0):
            raise ValueError("box does not meet the unit cube")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def dim(self) -> int:
        return self.min.size

    def to_json(self) -> dict:
        return {"type": "aabb", "min": self.min.tolist(), "max": self.max.tolist()}


@dataclass(frozen=True, eq=False)
class Sphere(_ValueEquality):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_point(self.center)
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")
        nearest = np.clip(c, 0.0, 1.0)
        if np.linalg.norm(nearest - c) > self.radius:
            raise ValueError("sphere does not meet the unit cube")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def to_json(self) -> dict:
        return {"type": "sphere", "center": self.center.tolist(), "radius": self.radius}


Obstacle = Union[AABox, Sphere]


@dataclass(frozen=True, eq=False)
class Chain(_ValueEquality):
    base: np.ndarray
    link_length: float
    n_links: int

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base, 2))
        if not self.link_length > 0 or self.n_links < 1:
            raise ValueError("chain needs positive link length and at least one link")

    def to_json(self) -> dict:
        return {"base": self.base.tolist(), "link_length": self.link_length, "n_links": self.n_links}


@dataclass(frozen=True, eq=False)
class Environment(_ValueEquality):
    """Obstacle set over [0,1]^d, or a planar kinematic chain among 2-D obstacles."""

    dim: int
    obstacles: tuple = ()
    chain: Optional[Chain] = None
    _arrays: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        obstacles = tuple(self.obstacles)
        object.__setattr__(self, "obstacles", obstacles)
        wdim = 2 if self.chain is not None else self.dim
        if self.chain is not None and self.chain.n_links != self.dim:
            raise ValueError("chain configuration dimension must equal the number of links")
        for ob in obstacles:
            if ob.dim != wdim:
                raise DimensionMismatch(f"obstacle of dimension {ob.dim} in a {wdim}-D workspace")
        boxes = [o for o in obstacles if isinstance(o, AABox)]
        spheres = [o for o in obstacles if isinstance(o, Sphere)]
        arrays = {
            "box_lo": np.array([b.min for b in boxes]).reshape(len(boxes), wdim),
            "box_hi": np.array([b.max for b in boxes]).reshape(len(boxes), wdim),
            "sph_c": np.array([s.center for s in spheres]).reshape(len(spheres), wdim),
            "sph_r": np.array([s.radius for s in spheres], dtype=np.float64),
        }
        object.__setattr__(self, "_arrays", arrays)

    @property
    def workspace_dim(self) -> int:
        return 2 if self.chain is not None else self.dim

    @property
    def boxes(self):
        return self._arrays["box_lo"], self._arrays["box_hi"]

    @property
    def spheres(self):
        return self._arrays["sph_c"], self._arrays["sph_r"]

    def points_free(self, pts: np.ndarray) -> np.ndarray:
        """Workspace points not inside any (closed) obstacle."""
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, self.workspace_dim)
        free = np.ones(len(pts), dtype=bool)
        lo, hi = self.boxes
        for j in range(len(lo)):
            free &= ~np.all((pts >= lo[j]) & (pts <= hi[j]), axis=1)
        c, r = self.spheres
        for j in range(len(r)):
            free &= np.sum((pts - c[j]) ** 2, axis=1) > r[j] ** 2
        return free

    def config_free(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if self.chain is not None:
            from detprm.environments.chain import chain_config_free

            return bool(chain_config_free(x, self))
        return bool(self.points_free(x[None, :])[0])

    def configs_free(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64).reshape(-1, self.dim)
        if self.chain is not None:
            from detprm.environments.chain import chain_configs_free

            return chain_configs_free(X, self)
        return self.points_free(X)

    def to_json(self) -> dict:
        out = {"dim": self.dim, "obstacles": [o.to_json() for o in self.obstacles]}
        if self.chain is not None:
            out["chain"] = self.chain.to_json()
        return out


def _segment_hits_box(a, b, lo, hi) -> bool:
    t0, t1 = 0.0, 1.0
    for i in range(len(a)):
        u = b[i] - a[i]
        if u == 0.0:
            if a[i] < lo[i] or a[i] > hi[i]:
                return False
            continue
        ta, tb = (lo[i] - a[i]) / u, (hi[i] - a[i]) / u
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1:
            return False
    return True


def _point_segment_t(a, b, c) -> float:
    u = b - a
    uu = float(np.dot(u, u))
    if uu == 0.0:
        return 0.0
    return min(1.0, max(0.0, float(np.dot(c - a, u)) / uu))


def segment_collision_free(a, b, env: Environment) -> bool:
    """Exact test that the closed segment [a, b] meets no obstacle."""
    if env.chain is not None:
        raise ValueError("use chain_edge_collision_free for chain environments")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.size != env.dim:
        raise DimensionMismatch("segment endpoints must match the environment dimension")
    for ob in env.obstacles:
        if isinstance(ob, AABox):
            if _segment_hits_box(a, b, ob.min, ob.max):
                return False
        else:
            t = _point_segment_t(a, b, ob.center)
            q = a + t * (b - a)
            if float(np.sum((q - ob.center) ** 2)) <= ob.radius**2:
                return False
    return True


def _segments_free_chunk(A: np.ndarray, B: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                         sc: np.ndarray, sr: np.ndarray) -> np.ndarray:
    free = np.ones(len(A), dtype=bool)
    U = B - A
    seg_lo = np.minimum(A, B)
    seg_hi = np.maximum(A, B)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(len(lo)):
            cand = free & np.all((seg_hi >= lo[j]) & (seg_lo <= hi[j]), axis=1)
            idx = np.nonzero(cand)[0]
            if idx.size == 0:
                continue
            a, u = A[idx], U[idx]
            ta = (lo[j] - a) / u
            tb = (hi[j] - a) / u
            tmin = np.minimum(ta, tb)
            tmax = np.maximum(ta, tb)
            flat = u == 0.0
            # Axis-parallel direction: the bounding-box prefilter already
            # established lo <= a <= hi on that axis.
            tmin = np.where(flat, -np.inf, tmin)
            tmax = np.where(flat, np.inf, tmax)
            t0 = np.maximum(tmin.max(axis=1), 0.0)
            t1 = np.minimum(tmax.min(axis=1), 1.0)
            free[idx[t0 <= t1]] = False
        for j in range(len(sr)):
            cand = free & np.all((seg_hi >= sc[j] - sr[j]) & (seg_lo <= sc[j] + sr[j]), axis=1)
            idx = np.nonzero(cand)[0]
            if idx.size == 0:
                continue
            a, u = A[idx], U[idx]
            uu = np.einsum("ij,ij->i", u, u)
            t = np.einsum("ij,ij->i", sc[j] - a, u) / uu
            t = np.where(uu == 0.0, 0.0, np.clip(t, 0.0, 1.0))
            q = a + t[:, None] * u - sc[j]
            free[idx[np.einsum("ij,ij->i", q, q) <= sr[j] ** 2]] = False
    return free


def segments_collision_free(A: np.ndarray, B: np.ndarray, env: Environment) -> np.ndarray:
    """Vectorized :func:`segment_collision_free` over rows of ``A`` and ``B``."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise DimensionMismatch("segment endpoint arrays differ in shape")
    lo, hi = env.boxes
    sc, sr = env.spheres
    out = np.empty(len(A), dtype=bool)
    for s in range(0, len(A), _SEGMENT_CHUNK):
        e = min(s + _SEGMENT_CHUNK, len(A))
        out[s:e] = _segments_free_chunk(A[s:e], B[s:e], lo, hi, sc, sr)
    return out


def _segment_box_distance(a, b, lo, hi):
    """Exact minimum of the distance from a + t(b-a), t in [0,1], to a box.

    The squared distance is a convex piecewise quadratic in t with
    breakpoints where some coordinate crosses a face plane.
    """
    u = b - a
    ts = {0.0, 1.0}
    for i in range(len(a)):
        if u[i] != 0.0:
            for f in (lo[i], hi[i]):
                t = (f - a[i]) / u[i]
                if 0.0 < t < 1.0:
                    ts.add(float(t))
    ts = sorted(ts)
    best_t, best_sq = 0.0, math.inf

    def sq_at(t):
        p = a + t * u
        g = np.maximum(np.maximum(lo - p, 0.0), p - hi)
        return float(np.dot(g, g))

    for t0, t1 in zip(ts[:-1], ts[1:]):
        mid = a + 0.5 * (t0 + t1) * u
        q2 = q1 = 0.0
        for i in range(len(a)):
            if mid[i] < lo[i]:
                alpha, beta = lo[i] - a[i], -u[i]
            elif mid[i] > hi[i]:
                alpha, beta = a[i] - hi[i], u[i]
            else:
                continue
            q2 += beta * beta
            q1 += 2.0 * alpha * beta
        cands = [t0, t1]
        if q2 > 0.0:
            cands.append(min(t1, max(t0, -q1 / (2.0 * q2))))
        for t in cands:
            s = sq_at(t)
            if s < best_sq:
                best_sq, best_t = s, t
    return math.sqrt(best_sq), a + best_t * u


def _segment_sphere_distance(a, b, c, r):
    t = _point_segment_t(a, b, c)
    q = a + t * (b - a)
    return float(np.linalg.norm(q - c)) - r, q


@dataclass(frozen=True)
class ClearanceReport:
    min_clearance: float
    witness: Optional[np.ndarray]


class CollisionError(ValueError):
    pass


def segment_clearance(a, b, env: Environment) -> ClearanceReport:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    best, witness = math.inf, None
    for ob in env.obstacles:
        if isinstance(ob, AABox):
            dist, q = _segment_box_distance(a, b, ob.min, ob.max)
        else:
            dist, q = _segment_sphere_distance(a, b, ob.center, ob.radius)
        if dist < best:
            best, witness = dist, q
    return ClearanceReport(best, witness)


def min_clearance(path: PathPolyline, env: Environment) -> ClearanceReport:
    """Exact minimum distance from a collision-free polyline to the obstacle union."""
    if env.chain is not None:
        raise ValueError("clearance is defined for point-robot environments only")
    best = ClearanceReport(math.inf, None)
    a_all, b_all = path.segments()
    for a, b in zip(a_all, b_all):
        if not segment_collision_free(a, b, env):
            raise CollisionError(f"path segment {a} -> {b} is in collision")
        rep = segment_clearance(a, b, env)
        if rep.min_clearance < best.min_clearance:
            best = rep
    return best


def inflate(env: Environment, delta: float) -> Environment:
    """Grow every box by ``delta`` per face and every sphere radius by ``delta``."""
    if delta < 0:
        raise ValueError("inflation must be non-negative")
    if delta == 0:
        return env
    grown = []
    for ob in env.obstacles:
        if isinstance(ob, AABox):
            grown.append(AABox(ob.min - delta, ob.max + delta))
        else:
            grown.append(Sphere(ob.center, ob.radius + delta))
    return Environment(env.dim, tuple(grown), env.chain)


def make_environment(dim: int, obstacles: Sequence[Obstacle] = (), chain: Optional[Chain] = None) -> Environment:
    return Environment(dim, tuple(obstacles), chain)

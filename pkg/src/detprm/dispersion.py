"""Certified dispersion intervals.

The distance-to-set function g(x) = min_s ||s - x|| is 1-Lipschitz, so its
maximum over a uniform grid (boundary included) is a lower bound for the
dispersion, and adding the diameter of one grid cell gives an upper bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import cKDTree

from detprm.core import Interval, SampleSet
from detprm.sampling import rng_for

MAX_GRID_POINTS = 20_000_000
_CHUNK = 1 << 19
# Guards the interval against rounding in the distance evaluation.
_ROUNDING = 1e-12


class DispersionBudgetExceeded(ValueError):
    pass


def _points(samples) -> np.ndarray:
    if isinstance(samples, SampleSet):
        return samples.points
    pts = np.asarray(samples, dtype=np.float64)
    return pts.reshape(len(pts), -1)


def _p(norm: str) -> float:
    if norm == "l2":
        return 2.0
    if norm == "linf":
        return math.inf
    raise ValueError(f"unknown norm {norm!r}; use 'l2' or 'linf'")


def _grid_chunk(axis: np.ndarray, d: int, start: int, stop: int) -> np.ndarray:
    flat = np.arange(start, stop, dtype=np.int64)
    res = len(axis)
    cols = []
    for _ in range(d):
        cols.append(axis[flat % res])
        flat //= res
    return np.column_stack(cols[::-1])


def grid_max_distance(samples, resolution: int, norm: str = "l2", workers: int = 1, budget: int = MAX_GRID_POINTS) -> float:
    pts = _points(samples)
    d = pts.shape[1]
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    total = resolution**d
    if total > budget:
        raise DispersionBudgetExceeded(
            f"{resolution}^{d} = {total} grid points exceeds the budget of {budget}; "
            "use dispersion_lower_bound_mc for a Monte-Carlo lower bound (hi = inf)"
        )
    tree = cKDTree(pts)
    axis = np.linspace(0.0, 1.0, resolution)
    p = _p(norm)
    bounds = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]

    def chunk_max(b):
        dist, _ = tree.query(_grid_chunk(axis, d, *b), p=p)
        return float(dist.max())

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            maxima = list(ex.map(chunk_max, bounds))
    else:
        maxima = [chunk_max(b) for b in bounds]
    return max(maxima)


def dispersion_bounds(samples, resolution: int = 101, norm: str = "l2", workers: int = 1,
                      budget: int = MAX_GRID_POINTS, slack: str = "diameter") -> Interval:
    """Interval certified to contain the dispersion of ``samples`` over [0,1]^d.

    ``slack="diameter"`` pads the grid maximum by one cell diameter.
    ``slack="covering"`` pads by half of it, the distance from any point of
    the cube to its nearest grid node, which is also a valid bound and is
    twice as tight.
    """
    if slack not in ("diameter", "covering"):
        raise ValueError(f"unknown slack {slack!r}; use 'diameter' or 'covering'")
    pts = _points(samples)
    d = pts.shape[1]
    m = grid_max_distance(pts, resolution, norm, workers, budget)
    step = 1.0 / (resolution - 1)
    diameter = step * math.sqrt(d) if norm == "l2" else step
    pad = diameter if slack == "diameter" else 0.5 * diameter
    return Interval(m * (1.0 - _ROUNDING), m * (1.0 + _ROUNDING) + pad)


def dispersion_lower_bound_mc(samples, n_queries: int = 1_000_000, seed: int = 0, norm: str = "l2") -> Interval:
    """Lower bound from random query points, for dimensions where a grid is unaffordable."""
    pts = _points(samples)
    q = rng_for(seed).random((n_queries, pts.shape[1]))
    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * pts.shape[1], indexing="ij")).reshape(pts.shape[1], -1).T
    dist, _ = cKDTree(pts).query(np.vstack([q, corners]), p=_p(norm))
    return Interval(float(dist.max()) * (1.0 - _ROUNDING), math.inf)

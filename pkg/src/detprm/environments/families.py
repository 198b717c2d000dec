"""Benchmark problem families: mazes, rectangles, spheres and the planar chain.

The fixed geometries below are versioned constants. Changing any of them
changes benchmark numbers, so bump ``GEOMETRY_VERSION`` when you do.
"""

from __future__ import annotations

import math

import numpy as np

from detprm.core import ANGULAR_L1, EUCLIDEAN, Problem
from detprm.environments.geometry import AABox, Chain, Environment, Sphere

GEOMETRY_VERSION = 1
MAZE_GAP = 0.1
MAX_MAZE_DIM = 10
DEFAULT_SPHERE_COVERAGE = 0.3

# Serpentine maze: four horizontal walls, each with one interior gap of
# width MAZE_GAP, plus three vertical stubs. Boxes as (min, max).
MAZE2D_WALLS = (
    ((0.00, 0.18), (0.75, 0.22)),
    ((0.85, 0.18), (1.00, 0.22)),
    ((0.00, 0.38), (0.15, 0.42)),
    ((0.25, 0.38), (1.00, 0.42)),
    ((0.00, 0.58), (0.75, 0.62)),
    ((0.85, 0.58), (1.00, 0.62)),
    ((0.00, 0.78), (0.15, 0.82)),
    ((0.25, 0.78), (1.00, 0.82)),
    ((0.48, 0.22), (0.52, 0.28)),
    ((0.48, 0.52), (0.52, 0.58)),
    ((0.48, 0.62), (0.52, 0.68)),
)

# Base of the recursive maze: two vertical walls forming a serpentine,
# each leaving one gap of width MAZE_GAP, plus two horizontal stubs.
RECMAZE2D_WALLS = (
    ((0.28, 0.00), (0.32, 0.85)),
    ((0.28, 0.95), (0.32, 1.00)),
    ((0.63, 0.00), (0.67, 0.05)),
    ((0.63, 0.15), (0.67, 1.00)),
    ((0.32, 0.48), (0.50, 0.52)),
    ((0.80, 0.48), (1.00, 0.52)),
)

RECT2D_BOXES = (
    ((0.15, 0.10), (0.30, 0.55)),
    ((0.45, 0.35), (0.60, 0.85)),
    ((0.72, 0.05), (0.88, 0.50)),
    ((0.10, 0.68), (0.35, 0.82)),
    ((0.70, 0.62), (0.90, 0.78)),
)

RECT3D_BOXES = (
    ((0.15, 0.00, 0.10), (0.35, 0.60, 0.70)),
    ((0.45, 0.30, 0.25), (0.60, 1.00, 0.90)),
    ((0.70, 0.00, 0.00), (0.85, 0.55, 0.60)),
    ((0.65, 0.65, 0.40), (0.95, 0.80, 0.85)),
)

SPHERES2D = (
    ((0.25, 0.30), 0.12),
    ((0.55, 0.20), 0.10),
    ((0.45, 0.55), 0.14),
    ((0.80, 0.45), 0.11),
    ((0.20, 0.75), 0.10),
    ((0.70, 0.80), 0.12),
)

SPHERES3D = (
    ((0.30, 0.30, 0.30), 0.16),
    ((0.70, 0.30, 0.50), 0.15),
    ((0.35, 0.70, 0.60), 0.15),
    ((0.70, 0.70, 0.25), 0.14),
    ((0.50, 0.50, 0.80), 0.12),
    ((0.80, 0.80, 0.80), 0.09),
)

# Eight-link chain swinging from a pocket on the right into one on the left.
CHAIN8_BASE = (0.5, 0.5)
CHAIN8_LINK = 0.05
CHAIN8_OBSTACLES = (
    ((0.70, 0.38), (0.95, 0.44)),
    ((0.70, 0.56), (0.95, 0.62)),
    ((0.05, 0.38), (0.30, 0.44)),
    ((0.05, 0.56), (0.30, 0.62)),
    ((0.40, 0.05), (0.60, 0.20)),
)


def _boxes(spec) -> list:
    return [AABox(np.array(lo, dtype=float), np.array(hi, dtype=float)) for lo, hi in spec]


def maze2d() -> Environment:
    return Environment(2, tuple(_boxes(MAZE2D_WALLS)))


def opening_corner(d: int) -> tuple:
    """Corner (per coordinate: 0 = low, 1 = high) of the slab opening at level d >= 3."""
    if d < 3:
        raise ValueError("openings exist from d = 3 on")
    corner = (1, 0)
    for _ in range(4, d + 1):
        corner = tuple(1 - c for c in corner) + (1,)
    return corner


def _slab_pieces(d: int) -> list:
    """Boxes covering {x_d in [0.45, 0.55]} minus a corner cube of side MAZE_GAP."""
    w = MAZE_GAP
    corner = opening_corner(d)
    pieces = []
    for i in range(d - 1):
        lo = np.zeros(d)
        hi = np.ones(d)
        for j in range(i):
            lo[j], hi[j] = (1.0 - w, 1.0) if corner[j] else (0.0, w)
        lo[i], hi[i] = (0.0, 1.0 - w) if corner[i] else (w, 1.0)
        lo[d - 1], hi[d - 1] = 0.45, 0.55
        pieces.append(AABox(lo, hi))
    return pieces


def recursive_maze(d: int) -> Environment:
    """Two extruded copies of the (d-1)-maze separated by a slab with a corner opening.

    The 2-D base is :data:`RECMAZE2D_WALLS`, distinct from :func:`maze2d`.
    """
    if d < 2:
        raise ValueError("recursive maze needs d >= 2")
    if d > MAX_MAZE_DIM:
        raise ValueError(f"recursive maze limited to d <= {MAX_MAZE_DIM} (obstacle count grows as 2^d)")
    if d == 2:
        return Environment(2, tuple(_boxes(RECMAZE2D_WALLS)))
    prev = recursive_maze(d - 1)
    obstacles = []
    for lo_d, hi_d in ((0.0, 0.45), (0.55, 1.0)):
        for ob in prev.obstacles:
            obstacles.append(AABox(np.append(ob.min, lo_d), np.append(ob.max, hi_d)))
    obstacles.extend(_slab_pieces(d))
    return Environment(d, tuple(obstacles))


def rect_env(d: int) -> Environment:
    if d == 2:
        return Environment(2, tuple(_boxes(RECT2D_BOXES)))
    if d == 3:
        return Environment(3, tuple(_boxes(RECT3D_BOXES)))
    raise ValueError("fixed rectangular sets exist for d = 2 and 3")


def fixed_spheres(d: int) -> Environment:
    table = {2: SPHERES2D, 3: SPHERES3D}
    if d not in table:
        raise ValueError("fixed sphere sets exist for d = 2 and 3; use random_spheres")
    return Environment(d, tuple(Sphere(np.array(c), r) for c, r in table[d]))


def random_spheres(d: int, seed: int, coverage: float = DEFAULT_SPHERE_COVERAGE,
                   radius_range: tuple = (0.08, 0.2), keep_clear: float = 0.08,
                   n_probe: int = 20_000, max_spheres: int = 2000) -> Environment:
    """Random spheres added until the covered volume fraction reaches ``coverage``.

    Coverage is estimated on a fixed set of seeded probe points. Spheres
    that would come within ``keep_clear`` of the default start or goal are
    rejected.
    """
    from detprm.sampling import rng_for

    if not 0.0 <= coverage < 1.0:
        raise ValueError("coverage must lie in [0, 1)")
    rng = rng_for(seed)
    probes = rng.random((n_probe, d))
    covered = np.zeros(n_probe, dtype=bool)
    anchors = np.array([np.full(d, 0.05), np.full(d, 0.95)])
    spheres = []
    attempts = 0
    while covered.mean() < coverage and len(spheres) < max_spheres:
        attempts += 1
        if attempts > 100 * max_spheres:
            break
        c = rng.random(d)
        r = rng.uniform(*radius_range)
        if np.min(np.linalg.norm(anchors - c, axis=1)) < r + keep_clear:
            continue
        spheres.append(Sphere(c, r))
        covered |= np.sum((probes - c) ** 2, axis=1) <= r * r
    return Environment(d, tuple(spheres))


def chain_env(n_links: int = 8) -> Environment:
    chain = Chain(np.array(CHAIN8_BASE), CHAIN8_LINK * 8 / n_links, n_links)
    return Environment(n_links, tuple(_boxes(CHAIN8_OBSTACLES)), chain)


def corner_problem(env: Environment, name: str = "", goal_radius: float = 0.05) -> Problem:
    d = env.dim
    return Problem(env, np.full(d, 0.05), np.full(d, 0.95), goal_radius, EUCLIDEAN, name)


def chain_problem(n_links: int = 8, goal_radius: float = 0.5) -> Problem:
    env = chain_env(n_links)
    x_init = np.zeros(n_links)
    goal = np.zeros(n_links)
    goal[0] = -math.pi
    return Problem(env, x_init, goal, goal_radius, ANGULAR_L1, f"chain{n_links}")


def family_problem(family: str, dim: int = 2, seed: int = 0,
                   coverage: float = DEFAULT_SPHERE_COVERAGE) -> Problem:
    """Problem for a named family, e.g. ``maze2d`` or ``recursive-maze``."""
    if family == "maze2d":
        return corner_problem(maze2d(), "maze2d")
    if family == "recursive-maze":
        return corner_problem(recursive_maze(dim), f"recmaze{dim}")
    if family == "rect":
        return corner_problem(rect_env(dim), f"rect{dim}")
    if family == "spheres":
        if dim in (2, 3):
            return corner_problem(fixed_spheres(dim), f"spheres{dim}")
        return corner_problem(random_spheres(dim, seed, coverage), f"spheres{dim}-s{seed}")
    if family == "random-spheres":
        return corner_problem(random_spheres(dim, seed, coverage), f"spheres{dim}-s{seed}")
    if family == "free":
        return corner_problem(Environment(dim), f"free{dim}")
    if family == "chain":
        return chain_problem(dim if dim > 2 else 8)
    raise ValueError(f"unknown problem family {family!r}")

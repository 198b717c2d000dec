"""Low-dispersion and i.i.d. sample generators.

Every generator returns a :class:`~detprm.core.SampleSet` in the unit cube.
Lattice-type sets carry their generator matrix in the provenance so that
:func:`transform_lattice` can re-tile them after a rotation/offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from detprm.core import Provenance, SampleSet

MAX_SAMPLES = 5_000_000
# Fixed lattice rotation: 10*pi degrees in every consecutive coordinate plane.
LATTICE_ROTATION = math.radians(10.0 * math.pi)

_MAX_TRANSFORM_CANDIDATES = 50_000_000


class SampleBudgetExceeded(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2 or int(p) != p:
        return False
    p = int(p)
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def first_primes(d: int) -> list[int]:
    out, p = [], 2
    while len(out) < d:
        if is_prime(p):
            out.append(p)
        p += 1
    return out


def radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of non-negative integers."""
    i = np.array(indices, dtype=np.int64)
    out = np.zeros(i.shape, dtype=np.float64)
    f = 1.0 / base
    scale = f
    while np.any(i > 0):
        out += (i % base) * scale
        i //= base
        scale *= f
    return out


def halton_sequence(n: int, d: int, bases: Optional[Sequence[int]] = None) -> SampleSet:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_SAMPLES:
        raise SampleBudgetExceeded(f"n={n} exceeds the sample budget {MAX_SAMPLES}")
    if bases is None:
        bases = first_primes(d)
    bases = [int(b) for b in bases]
    if len(bases) != d:
        raise ValueError(f"need {d} bases, got {len(bases)}")
    if len(set(bases)) != d:
        raise ValueError(f"Halton bases must be distinct: {bases}")
    for b in bases:
        if not is_prime(b):
            raise ValueError(f"Halton base {b} is not prime")
    idx = np.arange(1, n + 1, dtype=np.int64)
    pts = np.column_stack([radical_inverse(idx, b) for b in bases])
    return SampleSet(pts, Provenance("halton", note="bases=" + ",".join(map(str, bases))))


def weighted_counts(n: int, d: int) -> tuple[int, ...]:
    """Largest per-dimension counts of the form (k-1)^m k^(d-m) not exceeding n.

    Starting from the cubic lattice, sides are incremented from the last
    dimension down.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    k = max(1, int(math.floor(n ** (1.0 / d))))
    while k**d > n:
        k -= 1
    while (k + 1) ** d <= n:
        k += 1
    counts = [k] * d
    for j in range(d - 1, -1, -1):
        trial = counts.copy()
        trial[j] += 1
        if math.prod(trial) <= n:
            counts = trial
        else:
            break
    return tuple(counts)


def sukharev_lattice(per_dim_counts: Sequence[int], max_samples: int = MAX_SAMPLES) -> SampleSet:
    counts = tuple(int(k) for k in per_dim_counts)
    if not counts or any(k < 1 for k in counts):
        raise ValueError(f"per-dimension counts must be >= 1: {per_dim_counts}")
    total = math.prod(counts)
    if total > max_samples:
        raise SampleBudgetExceeded(f"lattice of {total} points exceeds budget {max_samples}")
    axes = [(2.0 * np.arange(1, k + 1) - 1.0) / (2.0 * k) for k in counts]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.reshape(-1) for m in mesh])
    basis = tuple(tuple((1.0 / k) if i == j else 0.0 for j in range(len(counts))) for i, k in enumerate(counts))
    origin = tuple(0.5 / k for k in counts)
    return SampleSet(
        pts,
        Provenance("sukharev", per_dim_counts=counts, lattice_basis=basis, lattice_origin=origin),
    )


def _triangular_layout(h: float):
    """Basis, origin and cube-clipped points of the triangular lattice with spacing h.

    Lattice points lying outside the square by less than h/2 are projected
    onto its boundary, which keeps boundary coverage close to the interior
    covering radius h/sqrt(3).
    """
    v = math.sqrt(3.0) / 2.0 * h
    rows = int(math.floor(1.0 / v)) + 1
    cols = int(math.floor(1.0 / h)) + 1
    y0 = (1.0 - (rows - 1) * v) / 2.0
    x0 = (1.0 - (cols - 1) * h) / 2.0
    j = np.arange(-1, rows + 1)
    i = np.arange(-(rows // 2) - 3, cols + 3)
    J, I = np.meshgrid(j, i, indexing="ij")
    x = x0 + I * h + np.mod(J, 2) * (h / 2.0)
    y = y0 + J * v
    pts = np.column_stack([x.reshape(-1), y.reshape(-1)])
    outside = np.max(np.maximum(np.maximum(-pts, pts - 1.0), 0.0), axis=1)
    keep = outside < 0.5 * h * (1.0 - 1e-9)
    pts = np.clip(pts[keep], 0.0, 1.0)
    order = np.lexsort((pts[:, 0], pts[:, 1]))
    pts = _dedupe(pts[order])
    basis = ((h, 0.0), (h / 2.0, v))
    return basis, (x0, y0), pts


def _greedy_fill(pts: np.ndarray, n: int, spacing: float) -> np.ndarray:
    """Add points one at a time at the grid location farthest from the set."""
    if len(pts) >= n:
        return pts
    res = min(2001, int(math.ceil(4.0 / spacing)) + 1)
    g = np.linspace(0.0, 1.0, res)
    X, Y = np.meshgrid(g, g, indexing="ij")
    grid = np.column_stack([X.reshape(-1), Y.reshape(-1)])
    dist, _ = cKDTree(pts).query(grid)
    extra = []
    while len(pts) + len(extra) < n:
        k = int(np.argmax(dist))
        q = grid[k]
        extra.append(q)
        dist = np.minimum(dist, np.sqrt(np.sum((grid - q) ** 2, axis=1)))
    return np.vstack([pts, np.array(extra)])


def triangular_lattice_2d(n: int) -> SampleSet:
    """Equilateral-triangle tiling of the unit square with exactly n points.

    The spacing h is the smallest one whose clipped tiling has at most n
    points; any shortfall is filled by farthest-point insertion, so the
    result never has larger dispersion than the tiling it extends.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_SAMPLES:
        raise SampleBudgetExceeded(f"n={n} exceeds the sample budget {MAX_SAMPLES}")
    lo, hi = 1e-5, 4.0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if len(_triangular_layout(mid)[2]) <= n:
            hi = mid
        else:
            lo = mid
    basis, origin, pts = _triangular_layout(hi)
    pts = _greedy_fill(pts, n, hi)
    return SampleSet(
        pts,
        Provenance("triangular", lattice_basis=basis, lattice_origin=origin, note=f"h={hi!r}"),
    )


def givens_rotation(d: int, angles: Sequence[float]) -> np.ndarray:
    """Product of rotations in the planes (1,2), (2,3), ..., applied in that order."""
    angles = list(angles)
    if len(angles) != max(d - 1, 0):
        raise ValueError(f"need {max(d - 1, 0)} plane angles for d={d}, got {len(angles)}")
    R = np.eye(d)
    for p, theta in enumerate(angles):
        if not math.isfinite(theta):
            raise ValueError("rotation angles must be finite")
        G = np.eye(d)
        c, s = math.cos(theta), math.sin(theta)
        G[p, p], G[p, p + 1], G[p + 1, p], G[p + 1, p + 1] = c, -s, s, c
        R = G @ R
    return R


def _dedupe(pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if len(pts) < 2:
        return pts
    keys = np.round(pts / tol).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return pts[np.sort(first)]


def _integer_box(lo: np.ndarray, hi: np.ndarray):
    lo_i = np.floor(lo).astype(np.int64)
    hi_i = np.ceil(hi).astype(np.int64)
    return lo_i, hi_i


def transform_lattice(
    base: SampleSet,
    rotation_angles: Sequence[float],
    offset: Optional[Sequence[float]] = None,
    clip_mode: str = "clamp",
) -> SampleSet:
    """Rotate a lattice about the cube center, shift it, and re-clip it to the cube.

    The base set is extended to an infinite point set first: its own lattice
    when the provenance records one, otherwise periodic tiling by Z^d.
    ``clip_mode="drop"`` keeps only points inside the cube; ``"clamp"`` also
    projects points lying outside by less than half the shortest lattice
    vector onto the boundary.
    """
    d = base.dim
    angles = [float(a) for a in rotation_angles]
    off = np.zeros(d) if offset is None else np.asarray(offset, dtype=np.float64).reshape(-1)
    if off.shape != (d,):
        raise ValueError(f"offset must have {d} entries")
    if np.any(off < 0) or np.any(off > 1):
        raise ValueError("offset must lie in [0,1]^d")
    if clip_mode not in ("clamp", "drop"):
        raise ValueError(f"unknown clip_mode {clip_mode!r}")
    R = givens_rotation(d, angles)
    if not any(angles) and not np.any(off):
        return SampleSet(base.points.copy(), replace(base.provenance, kind="transformed", note=_note(base, "identity")))

    c = np.full(d, 0.5)
    prov = base.provenance
    if prov.lattice_basis is not None:
        B = np.asarray(prov.lattice_basis, dtype=np.float64)
        o = np.asarray(prov.lattice_origin, dtype=np.float64)
    else:
        B = np.eye(d)
        o = np.zeros(d)
    margin = 0.5 * float(np.min(np.linalg.norm(B, axis=1))) if clip_mode == "clamp" else 0.0

    # Preimage of the (margin-expanded) cube in the base frame, as lattice coordinates.
    corners = np.array(np.meshgrid(*[[-margin, 1.0 + margin]] * d, indexing="ij")).reshape(d, -1).T
    pre = (corners - c) @ R + c - off  # R^T (y - c) + c - off, row form
    Binv = np.linalg.inv(B)
    coords = (pre - o) @ Binv
    lo_i, hi_i = _integer_box(coords.min(axis=0), coords.max(axis=0))

    def image(x: np.ndarray) -> np.ndarray:
        return (x + off - c) @ R.T + c

    if prov.lattice_basis is not None:
        generators = [o]
    else:
        generators = list(base.points)
    spans = hi_i - lo_i + 1
    total = int(np.prod(spans)) * len(generators)
    if total > _MAX_TRANSFORM_CANDIDATES:
        raise SampleBudgetExceeded(f"transform would enumerate {total} candidates")

    kept = []
    first_axis = np.arange(lo_i[0], hi_i[0] + 1)
    rest = [np.arange(lo_i[j], hi_i[j] + 1) for j in range(1, d)]
    rest_idx = (
        np.array(np.meshgrid(*rest, indexing="ij")).reshape(d - 1, -1).T if d > 1 else np.zeros((1, 0), dtype=np.int64)
    )
    for a in first_axis:
        idx = np.column_stack([np.full(len(rest_idx), a), rest_idx])
        shift = idx @ B
        for g in generators:
            y = image(shift + g)
            outside = np.max(np.maximum(np.maximum(-y, y - 1.0), 0.0), axis=1)
            if clip_mode == "clamp":
                mask = outside < margin * (1.0 - 1e-9)
            else:
                mask = outside == 0.0
            if np.any(mask):
                kept.append(np.clip(y[mask], 0.0, 1.0))
    if not kept:
        raise ValueError("transformed lattice has no points inside the cube")
    pts = _dedupe(np.vstack(kept))
    new_basis = tuple(map(tuple, B @ R.T))
    new_origin = tuple(image(o[None, :])[0])
    return SampleSet(
        pts,
        Provenance(
            "transformed",
            seed=prov.seed,
            per_dim_counts=prov.per_dim_counts,
            lattice_basis=new_basis if prov.lattice_basis is not None else None,
            lattice_origin=new_origin if prov.lattice_basis is not None else None,
            note=_note(base, f"angles={angles}, offset={off.tolist()}, clip={clip_mode}"),
        ),
    )


def _note(base: SampleSet, extra: str) -> str:
    return f"base={base.provenance.kind}; {extra}"


def rng_for(seed: int) -> np.random.Generator:
    """The package's only random source: PCG64, which is platform independent."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def iid_uniform(n: int, d: int, seed: int) -> SampleSet:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_SAMPLES:
        raise SampleBudgetExceeded(f"n={n} exceeds the sample budget {MAX_SAMPLES}")
    pts = rng_for(seed).random((n, d))
    return SampleSet(pts, Provenance("iid", seed=int(seed)))


@dataclass(frozen=True)
class SamplerSpec:
    kind: str
    dim: int
    bases: Optional[tuple] = None
    counts: Optional[tuple] = None
    seed: Optional[int] = None
    # transformed: child spec plus rotation (radians per plane) and offset;
    # with random_transform the angles and offset are drawn from ``seed``.
    base: Optional["SamplerSpec"] = None
    rotation: Optional[tuple] = None
    offset: Optional[tuple] = None
    random_transform: bool = False
    clip_mode: str = "clamp"
    # mixed: (low-dispersion child, arbitrary child)
    children: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "transformed" and self.base is None:
            raise ValueError("transformed spec needs a base spec")
        if self.kind == "mixed":
            if self.children is None or len(self.children) != 2:
                raise ValueError("mixed spec needs exactly two child specs")
        if self.counts is not None and any(int(k) < 1 for k in self.counts):
            raise ValueError("per-dimension counts must be >= 1")
        if self.rotation is not None and not all(math.isfinite(a) for a in self.rotation):
            raise ValueError("rotation angles must be finite")

    @property
    def name(self) -> str:
        return self.label or self.kind

    @property
    def deterministic(self) -> bool:
        if self.kind == "iid":
            return False
        if self.kind == "transformed":
            return not self.random_transform and self.base.deterministic
        if self.kind == "mixed":
            return all(c.deterministic for c in self.children)
        return True

    def with_seed(self, seed: int) -> "SamplerSpec":
        """Copy with ``seed`` pushed into every random component."""
        base = self.base.with_seed(seed) if self.base is not None else None
        children = tuple(c.with_seed(seed) for c in self.children) if self.children else None
        s = seed if (self.kind == "iid" or self.random_transform) else self.seed
        return replace(self, seed=s, base=base, children=children)


def lattice_spec(dim: int, rotate: bool = True) -> SamplerSpec:
    """Triangular tiling in 2-D, weighted Sukharev grid otherwise; fixed rotation."""
    base = SamplerSpec("triangular" if dim == 2 else "sukharev", dim)
    if not rotate or dim == 1:
        return replace(base, label="lattice")
    return SamplerSpec(
        "transformed", dim, base=base, rotation=(LATTICE_ROTATION,) * (dim - 1), label="lattice"
    )


def random_lattice_spec(dim: int, seed: int = 0) -> SamplerSpec:
    base = SamplerSpec("sukharev", dim)
    return SamplerSpec("transformed", dim, base=base, random_transform=True, seed=seed, label="randlattice")


def mixed_sequence(spec: SamplerSpec, n: int) -> SampleSet:
    if spec.kind != "mixed":
        raise ValueError("mixed_sequence needs a mixed spec")
    low, other = spec.children
    n_low = (n + 1) // 2
    parts = [make_samples(low, n_low).points]
    if n - n_low > 0:
        parts.append(make_samples(other, n - n_low).points)
    return SampleSet(
        np.vstack(parts),
        Provenance("mixed", seed=spec.seed, note=f"{low.name}:{n_low}+{other.name}:{n - n_low}"),
    )


def _transformed_at_most(base_spec: SamplerSpec, n: int, angles, offset, clip_mode: str) -> SampleSet:
    """Transformed lattice with at most ``n`` points.

    Re-clipping a rotated lattice can gain boundary points, so the base size
    is shrunk in proportion to the overshoot until the output fits. A base
    with fixed per-dimension counts does not depend on n and is transformed
    as is. Below the smallest transformed configuration the m = 1 output
    is truncated to its first n points.
    """
    if base_spec.kind == "sukharev" and base_spec.counts is not None:
        return transform_lattice(make_samples(base_spec, n), angles, offset, clip_mode)
    m = n
    while True:
        out = transform_lattice(make_samples(base_spec, m), angles, offset, clip_mode)
        if out.n <= n:
            return out
        if m == 1:
            return SampleSet(out.points[:n].copy(), replace(out.provenance, note=out.provenance.note + f";truncated:{n}"))
        m = max(1, min(m - 1, int(m * n / out.n)))


def make_samples(spec: SamplerSpec, n: int) -> SampleSet:
    """Generate up to ``n`` points from ``spec``; exactly n except for lattices.

    Lattice kinds return the largest configuration that does not exceed n.
    """
    d = spec.dim
    kind = spec.kind
    if kind == "halton":
        return halton_sequence(n, d, spec.bases)
    if kind == "sukharev":
        return sukharev_lattice(spec.counts if spec.counts is not None else weighted_counts(n, d))
    if kind == "triangular":
        if d != 2:
            raise ValueError("the triangular lattice is two-dimensional")
        return triangular_lattice_2d(n)
    if kind == "iid":
        if spec.seed is None:
            raise ValueError("iid sampling needs a seed")
        return iid_uniform(n, d, spec.seed)
    if kind == "transformed":
        if spec.random_transform:
            if spec.seed is None:
                raise ValueError("random transform needs a seed")
            rng = rng_for(spec.seed)
            angles = tuple(rng.uniform(0.0, 2.0 * math.pi, size=d - 1))
            offset = tuple(rng.random(d))
        else:
            angles = spec.rotation if spec.rotation is not None else (0.0,) * (d - 1)
            offset = spec.offset
        return _transformed_at_most(spec.base, n, angles, offset, spec.clip_mode)
    if kind == "mixed":
        return mixed_sequence(spec, n)
    raise ValueError(f"unknown sampler kind {kind!r}")

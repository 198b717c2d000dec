"""Cost bound for a given dispersion and radius, and certified sample counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

# Relative slack when flooring (2 psi gamma / delta0)^d: a value that is an
# integer in exact arithmetic must not drop to the integer below.
_FLOOR_SLACK = 1e-12


def suboptimality_factor(D_n: float, r_n: float) -> float:
    """1 + 2 D_n / (r_n - 2 D_n): returned cost over the best delta-clear cost."""
    if D_n < 0:
        raise ValueError("dispersion must be nonnegative")
    if not r_n > 2.0 * D_n:
        raise ValueError(f"bound needs r_n > 2 D_n (got r_n={r_n}, D_n={D_n})")
    return 1.0 + 2.0 * D_n / (r_n - 2.0 * D_n)


@dataclass(frozen=True)
class CertificationQuery:
    psi: float
    delta0: float
    gamma: float
    d: int

    def __post_init__(self):
        if not self.psi > 1:
            raise ValueError("psi must exceed 1")
        if not self.delta0 > 0 or not self.gamma > 0:
            raise ValueError("delta0 and gamma must be positive")
        if self.d < 1:
            raise ValueError("d must be >= 1")


@dataclass(frozen=True)
class Certification:
    n_required: int
    factor_excess: float
    radius: float

    @property
    def cost_factor(self) -> float:
        return 1.0 + self.factor_excess


def certify_sample_count(q: CertificationQuery) -> Certification:
    """Smallest n with 2 psi gamma n^(-1/d) < delta0, for a sequence with D_n <= gamma n^(-1/d).

    Running with r_n = 2 psi gamma n^(-1/d) then keeps the returned cost within
    a factor 1 + 1/(psi - 1) of the best delta0-clear cost.
    """
    x = (2.0 * q.psi * q.gamma / q.delta0) ** q.d
    n = int(math.floor(x * (1.0 + _FLOOR_SLACK))) + 1
    radius = 2.0 * q.psi * q.gamma * n ** (-1.0 / q.d)
    return Certification(n, 1.0 / (q.psi - 1.0), radius)

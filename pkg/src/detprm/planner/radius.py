"""Connection-radius rules and the k-nearest neighbor count."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from detprm.core import ANGULAR_L1, EUCLIDEAN

RADIUS_KINDS = ("gamma_prm", "power", "explicit")
GROWTH_FUNCTIONS = {
    "loglog": lambda n: math.log(math.log(max(n, 3))),
    "log": lambda n: math.log(max(n, 2)),
    "one": lambda n: 1.0,
}


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def gamma_prm(d: int) -> float:
    return 2.2 * (1.0 + 1.0 / d) ** (1.0 / d) * (1.0 / unit_ball_volume(d)) ** (1.0 / d)


@dataclass(frozen=True)
class RadiusRule:
    """``gamma_prm``: multiplier * gamma_prm(d) * (ln n / n)^(1/d).

    ``power``: multiplier * n^(-1/d) * growth(n), growth one of
    :data:`GROWTH_FUNCTIONS` (default log log max(n, 3)).
    ``explicit``: the fixed ``value``.
    """

    kind: str = "gamma_prm"
    multiplier: float = 1.0
    growth: str = "loglog"
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in RADIUS_KINDS:
            raise ValueError(f"unknown radius rule {self.kind!r}; use one of {RADIUS_KINDS}")
        if self.kind == "explicit" and self.value is None:
            raise ValueError("explicit radius rule needs a value")
        if self.growth not in GROWTH_FUNCTIONS:
            raise ValueError(f"unknown growth function {self.growth!r}")

    @classmethod
    def explicit(cls, value: float) -> "RadiusRule":
        return cls("explicit", value=float(value))

    @classmethod
    def power(cls, c: float, growth: str = "loglog") -> "RadiusRule":
        return cls("power", multiplier=float(c), growth=growth)

    def describe(self) -> str:
        if self.kind == "explicit":
            return f"explicit:{self.value!r}"
        if self.kind == "power":
            return f"power:{self.multiplier!r}:{self.growth}"
        return f"gamma_prm:{self.multiplier!r}"

    @classmethod
    def parse(cls, text: str) -> "RadiusRule":
        """Inverse of :meth:`describe`, e.g. ``gamma_prm``, ``power:1.2``, ``explicit:0.1``."""
        parts = text.split(":")
        kind = parts[0]
        try:
            if kind == "explicit":
                return cls.explicit(float(parts[1]))
            if kind == "power":
                return cls.power(float(parts[1]), parts[2] if len(parts) > 2 else "loglog")
            if kind == "gamma_prm":
                return cls("gamma_prm", multiplier=float(parts[1]) if len(parts) > 1 else 1.0)
        except (IndexError, ValueError) as exc:
            raise ValueError(f"cannot parse radius rule {text!r}") from exc
        raise ValueError(f"unknown radius rule {text!r}")


def connection_radius(n: int, d: int, rule: RadiusRule, metric: str = EUCLIDEAN) -> float:
    if rule.kind == "explicit":
        r = float(rule.value)
    else:
        if n < 2:
            raise ValueError("radius rules need n >= 2")
        if rule.kind == "gamma_prm":
            r = rule.multiplier * gamma_prm(d) * (math.log(n) / n) ** (1.0 / d)
        else:
            r = rule.multiplier * n ** (-1.0 / d) * GROWTH_FUNCTIONS[rule.growth](n)
        if metric == ANGULAR_L1:
            r *= math.sqrt(d) * math.pi
    if not (r > 0 and math.isfinite(r)):
        raise ValueError(f"radius rule produced a nonpositive radius {r}")
    return r


def knn_count(n: int, d: int, r: float, epsilon: float = 0.1) -> int:
    """k_n = ceil((1 + epsilon) n zeta_d r^d), capped at n - 1."""
    k = math.ceil((1.0 + epsilon) * n * unit_ball_volume(d) * r**d)
    return max(1, min(k, n - 1))

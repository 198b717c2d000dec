"""Aggregate trial rows into per-n curves and the normalized summary table.

Everything here is a pure function of the trial records, so a summary can
be regenerated from a CSV alone.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from statistics import median
from typing import Optional

SUCCESS_LEVEL = 0.9
MEDIUM_N = 700


@dataclass(frozen=True)
class CurvePoint:
    n: int
    trials: int
    success_rate: float
    mean_cost: float  # over successful trials; inf if none


def curves(records) -> dict:
    """{(problem, sampler, variant): [CurvePoint sorted by n]}."""
    groups = defaultdict(lambda: defaultdict(list))
    for r in records:
        groups[(r.problem, r.sampler, r.variant)][r.n].append(r)
    out = {}
    for key, by_n in groups.items():
        pts = []
        for n in sorted(by_n):
            rows = by_n[n]
            ok = [r.cost for r in rows if r.success]
            pts.append(CurvePoint(n, len(rows), len(ok) / len(rows), math.fsum(ok) / len(ok) if ok else math.inf))
        out[key] = pts
    return out


def sustained_n(points, level: float = SUCCESS_LEVEL) -> Optional[int]:
    """Least n from which every later schedule point has success rate >= level."""
    best = None
    for p in reversed(points):
        if p.success_rate >= level:
            best = p.n
        else:
            break
    return best


def per_seed_sustained_n(records, problem: str, sampler: str, variant: str) -> list:
    """For a random sampler, the sustained-success n of each seed on its own (None if never)."""
    by_seed = defaultdict(dict)
    for r in records:
        if (r.problem, r.sampler, r.variant) == (problem, sampler, variant):
            by_seed[r.seed][r.n] = r.success
    out = []
    for seed in sorted(by_seed, key=lambda s: -1 if s is None else s):
        pts = [CurvePoint(n, 1, float(ok), 0.0) for n, ok in sorted(by_seed[seed].items())]
        out.append(sustained_n(pts, 1.0))
    return out


def median_sustained_n(values) -> float:
    """Median with "never" counted as +inf."""
    return median([math.inf if v is None else v for v in values])


def _cost_at(points, n: int) -> float:
    for p in points:
        if p.n == n:
            return p.mean_cost
    return math.inf


def medium_high(points) -> tuple[int, int]:
    ns = [p.n for p in points]
    medium = min(ns, key=lambda n: (abs(n - MEDIUM_N), n))
    return medium, max(ns)


@dataclass(frozen=True)
class SummaryRow:
    problem: str
    sampler: str
    variant: str
    n90: Optional[int]
    baseline_n90: Optional[float]
    n90_pct: Optional[float]
    medium_n: int
    medium_pct: Optional[float]
    high_n: int
    high_pct: Optional[float]


def _pct(a, b) -> Optional[float]:
    if a is None or b is None or not math.isfinite(a) or not math.isfinite(b) or b == 0:
        return None
    return 100.0 * a / b


def summary_table(records, baseline: str = "iid") -> list[SummaryRow]:
    """Each non-baseline sampler relative to the baseline, as percentages.

    Sample counts use sustained >= 90% success rate over the baseline's
    trials at each n; costs are mean costs over successful trials at the
    schedule point nearest 700 and at the schedule maximum.
    """
    cv = curves(records)
    rows = []
    for (prob, samp, var), pts in sorted(cv.items()):
        if samp == baseline:
            continue
        base = cv.get((prob, baseline, var))
        if base is None:
            continue
        med, high = medium_high(pts)
        n90 = sustained_n(pts)
        b90 = sustained_n(base)
        rows.append(SummaryRow(prob, samp, var, n90, b90, _pct(n90, b90), med,
                               _pct(_cost_at(pts, med), _cost_at(base, med)), high,
                               _pct(_cost_at(pts, high), _cost_at(base, high))))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def summary_csv(rows) -> str:
    cols = list(SummaryRow.__dataclass_fields__)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in cols])
    return buf.getvalue()


def gnuplot_blocks(records) -> str:
    """One data block per (problem, sampler, variant), separated by two blank lines."""
    out = []
    for (prob, samp, var), pts in sorted(curves(records).items()):
        lines = [f"# {prob} {samp} {var}", "# n success_rate mean_cost"]
        lines += [f"{p.n} {p.success_rate:.17g} {p.mean_cost:.17g}" for p in pts]
        out.append("\n".join(lines))
    return "\n\n\n".join(out) + "\n"

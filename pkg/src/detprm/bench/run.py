"""Run an experiment grid and write its trials as CSV."""

from __future__ import annotations

import csv
import io
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Union

from detprm.bench.config import ExperimentConfig
from detprm.bench.oracle import oracle_delta_cost
from detprm.core import Problem
from detprm.dispersion import dispersion_bounds
from detprm.planner.bounds import suboptimality_factor
from detprm.planner.plan import config_samples, plan
from detprm.planner.radius import connection_radius
from detprm.sampling import SamplerSpec

CSV_SCHEMA = 1


@dataclass(frozen=True)
class TrialRecord:
    schema: int
    problem: str
    sampler: str
    variant: str
    seed: Optional[int]
    n: int
    success: int
    cost: float
    n_vertices: int
    n_edges: int
    n_collision_checks: int
    n_distinct_edge_lengths: int
    r_n: float
    dispersion_hi: Optional[float]
    bound_factor: Optional[float]
    oracle_delta: Optional[float]
    oracle_cost_delta: Optional[float]
    note: str
    build_time: float = 0.0
    query_time: float = 0.0

    def sort_key(self):
        return (self.problem, self.sampler, self.variant, self.n, -1 if self.seed is None else self.seed)


CSV_FIELDS = [f.name for f in fields(TrialRecord) if f.name not in ("build_time", "query_time")]
TIMING_FIELDS = ["build_time", "query_time"]


@dataclass(frozen=True)
class TrialSpec:
    sampler: SamplerSpec
    variant: str
    n: int
    seed: Optional[int]


def trial_specs(config: ExperimentConfig) -> list[TrialSpec]:
    specs = []
    for s in config.samplers:
        for v in config.variants:
            for n in config.n_schedule:
                if s.deterministic:
                    specs.append(TrialSpec(s, v, n, None))
                else:
                    for rep in range(config.iid_repeats):
                        seed = config.seed + rep
                        specs.append(TrialSpec(s.with_seed(seed), v, n, seed))
    return specs


def _oracle_costs(config: ExperimentConfig, problem: Problem) -> dict:
    if config.oracle is None or problem.env.chain is not None:
        return {}
    return {d: oracle_delta_cost(problem, d, config.oracle.grid_resolution).cost for d in config.oracle.deltas}


def run_trial(config: ExperimentConfig, problem: Problem, spec: TrialSpec, oracle_costs: dict) -> TrialRecord:
    base = dict(schema=CSV_SCHEMA, problem=problem.name, sampler=spec.sampler.name, variant=spec.variant,
                seed=spec.seed, n=spec.n)
    try:
        pts = config_samples(problem, spec.sampler, spec.n) if spec.n > 0 else None
        res = plan(problem, spec.sampler, spec.n, config.rule, spec.variant, config.engine, config.strict,
                   knn_epsilon=0.1, samples=pts)
        n_eff = max(len(pts), 2) if pts is not None else 2
        r = connection_radius(n_eff, problem.dim, config.rule, problem.metric)
        disp_hi = bound = o_delta = o_cost = None
        if config.dispersion_resolution and pts is not None and problem.env.chain is None:
            disp_hi = dispersion_bounds(pts, config.dispersion_resolution).hi
            if r > 2 * disp_hi:
                bound = suboptimality_factor(disp_hi, r)
        if oracle_costs:
            # Tightest applicable clearance: the smallest configured delta above r.
            above = sorted(d for d in oracle_costs if d > r)
            if above:
                o_delta = above[0]
                o_cost = oracle_costs[o_delta]
        st = res.stats
        return TrialRecord(**base, success=int(res.success), cost=res.cost, n_vertices=st.n_vertices,
                           n_edges=st.n_edges, n_collision_checks=st.n_collision_checks,
                           n_distinct_edge_lengths=st.n_distinct_edge_lengths, r_n=r, dispersion_hi=disp_hi,
                           bound_factor=bound, oracle_delta=o_delta, oracle_cost_delta=o_cost, note=res.note,
                           build_time=st.build_time, query_time=st.query_time)
    except Exception as exc:  # a failing trial is recorded, the run continues
        note = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
        return TrialRecord(**base, success=0, cost=math.inf, n_vertices=0, n_edges=0, n_collision_checks=0,
                           n_distinct_edge_lengths=0, r_n=math.nan, dispersion_hi=None, bound_factor=None,
                           oracle_delta=None, oracle_cost_delta=None, note=note)


_WORKER_STATE = {}


def _init_worker(config: ExperimentConfig, oracle_costs: dict):
    _WORKER_STATE["config"] = config
    _WORKER_STATE["problem"] = config.load_problem()
    _WORKER_STATE["oracle"] = oracle_costs


def _run_in_worker(spec: TrialSpec) -> TrialRecord:
    return run_trial(_WORKER_STATE["config"], _WORKER_STATE["problem"], spec, _WORKER_STATE["oracle"])


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[TrialRecord]:
    """All trials of ``config``, sorted by (problem, sampler, variant, n, seed)."""
    problem = config.load_problem()
    oracle_costs = _oracle_costs(config, problem)
    specs = trial_specs(config)
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(config, oracle_costs)) as ex:
            records = list(ex.map(_run_in_worker, specs, chunksize=max(1, len(specs) // (4 * workers))))
    else:
        records = [run_trial(config, problem, s, oracle_costs) for s in specs]
    return sorted(records, key=TrialRecord.sort_key)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(v)


def records_to_csv(records, timings: bool = False) -> str:
    cols = CSV_FIELDS + (TIMING_FIELDS if timings else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        row = asdict(r)
        w.writerow([format_value(row[c]) for c in cols])
    return buf.getvalue()


def write_csv(records, path: Union[str, Path], timings: bool = False) -> None:
    Path(path).write_text(records_to_csv(records, timings))


def _parse(col: str, text: str):
    if col in ("problem", "sampler", "variant", "note"):
        return text
    if text == "":
        return None
    if col in ("schema", "n", "success", "n_vertices", "n_edges", "n_collision_checks", "n_distinct_edge_lengths", "seed"):
        return int(text)
    return float(text)


def read_csv(path_or_text: Union[str, Path]) -> list[TrialRecord]:
    text = path_or_text if isinstance(path_or_text, str) and "\n" in path_or_text else Path(path_or_text).read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        vals = {c: _parse(c, row[c]) for c in row}
        if vals.get("schema") != CSV_SCHEMA:
            raise ValueError(f"unsupported CSV schema {vals.get('schema')!r}")
        vals.setdefault("build_time", 0.0)
        vals.setdefault("query_time", 0.0)
        out.append(TrialRecord(**{k: (v if v is not None or k in _OPTIONAL else 0.0) for k, v in vals.items()}))
    return out


_OPTIONAL = {"seed", "dispersion_hi", "bound_factor", "oracle_delta", "oracle_cost_delta", "note"}

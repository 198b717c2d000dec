"""Experiment configuration: a JSON document with ``schema: 1``.

Example::

    {"schema": 1, "name": "maze2d",
     "problem": {"family": "maze2d"},            # or {"file": ...} / {"shipped": ...}
     "samplers": ["iid", "halton", "lattice"],
     "n_schedule": [100, 200, 400],
     "rule": "gamma_prm", "variants": ["gprm"], "engine": "binary_heap",
     "iid_repeats": 50, "seed": 0, "strict": false,
     "bound": {"dispersion_resolution": 201},   # optional
     "oracle": {"grid_resolution": 101, "deltas": [0.02, 0.04]}}   # optional

Sampler entries are names (``iid``, ``halton``, ``sukharev``, ``triangular``,
``lattice``, ``lattice-norot``, ``randlattice``, ``mixed``) or objects with
a ``kind`` field and kind-specific keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from detprm.core import Problem
from detprm.environments.families import DEFAULT_SPHERE_COVERAGE, family_problem
from detprm.environments.io import load_problem, load_shipped_problem
from detprm.planner.plan import VARIANTS
from detprm.planner.radius import RadiusRule
from detprm.planner.search import ENGINES
from detprm.sampling import SamplerSpec, lattice_spec, random_lattice_spec

CONFIG_SCHEMA = 1


class ConfigError(ValueError):
    pass


def sampler_from_json(entry, dim: int) -> SamplerSpec:
    if isinstance(entry, str):
        entry = {"kind": entry}
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(f"bad sampler entry {entry!r}")
    kind = entry["kind"]
    label = entry.get("label", "")
    if kind == "lattice":
        spec = lattice_spec(dim, rotate=True)
    elif kind == "lattice-norot":
        spec = lattice_spec(dim, rotate=False)
    elif kind == "randlattice":
        spec = random_lattice_spec(dim)
    elif kind == "mixed":
        children = entry.get("children", ["halton", "iid"])
        if len(children) != 2:
            raise ConfigError("mixed sampler needs two children")
        kids = tuple(sampler_from_json(c, dim) for c in children)
        spec = SamplerSpec("mixed", dim, children=kids, label=f"mixed({kids[0].name}+{kids[1].name})")
    elif kind in ("halton", "sukharev", "triangular", "iid"):
        try:
            spec = SamplerSpec(
                kind, dim,
                bases=tuple(entry["bases"]) if "bases" in entry else None,
                counts=tuple(entry["counts"]) if "counts" in entry else None,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        raise ConfigError(f"unknown sampler kind {kind!r}")
    if label:
        from dataclasses import replace

        spec = replace(spec, label=label)
    return spec


@dataclass(frozen=True)
class OracleConfig:
    grid_resolution: int = 101
    deltas: tuple = ()


@dataclass(frozen=True)
class ExperimentConfig:
    problem: dict
    samplers: tuple
    n_schedule: tuple
    rule: RadiusRule = RadiusRule()
    variants: tuple = ("gprm",)
    engine: str = "binary_heap"
    iid_repeats: int = 50
    seed: int = 0
    strict: bool = False
    name: str = ""
    dispersion_resolution: Optional[int] = None
    oracle: Optional[OracleConfig] = None
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        sched = list(self.n_schedule)
        if not sched or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("n_schedule must be nonempty and strictly increasing")
        if any(n < 0 for n in sched):
            raise ConfigError("sample counts must be nonnegative")
        if self.iid_repeats < 1:
            raise ConfigError("iid_repeats must be >= 1")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        if not self.samplers:
            raise ConfigError("at least one sampler is required")
        names = [s.name for s in self.samplers]
        if len(set(names)) != len(names):
            raise ConfigError(f"sampler names must be unique, got {names}")

    def load_problem(self) -> Problem:
        return problem_from_spec(self.problem, self.base_dir)


def problem_from_spec(spec: dict, base_dir: str = ".") -> Problem:
    try:
        if "file" in spec:
            p = Path(spec["file"])
            return load_problem(p if p.is_absolute() else Path(base_dir) / p)
        if "shipped" in spec:
            return load_shipped_problem(spec["shipped"])
        if "family" in spec:
            return family_problem(spec["family"], int(spec.get("dim", 2)), int(spec.get("seed", 0)),
                                  float(spec.get("coverage", DEFAULT_SPHERE_COVERAGE)))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load problem {spec!r}: {exc}") from exc
    raise ConfigError("problem needs one of 'file', 'shipped' or 'family'")


def problem_dim(spec: dict, base_dir: str = ".") -> int:
    return problem_from_spec(spec, base_dir).dim


def config_from_json(doc: dict, base_dir: str = ".") -> ExperimentConfig:
    if doc.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported config schema {doc.get('schema')!r}; expected {CONFIG_SCHEMA}")
    try:
        problem = dict(doc["problem"])
        dim = problem_dim(problem, base_dir)
        samplers = tuple(sampler_from_json(s, dim) for s in doc["samplers"])
        rule = RadiusRule.parse(doc.get("rule", "gamma_prm"))
        oracle = None
        if doc.get("oracle"):
            o = doc["oracle"]
            oracle = OracleConfig(int(o.get("grid_resolution", 101)), tuple(float(x) for x in o.get("deltas", ())))
        bound = doc.get("bound") or {}
        return ExperimentConfig(
            problem=problem,
            samplers=samplers,
            n_schedule=tuple(int(n) for n in doc["n_schedule"]),
            rule=rule,
            variants=tuple(doc.get("variants", ["gprm"])),
            engine=doc.get("engine", "binary_heap"),
            iid_repeats=int(doc.get("iid_repeats", 50)),
            seed=int(doc.get("seed", 0)),
            strict=bool(doc.get("strict", False)),
            name=doc.get("name", ""),
            dispersion_resolution=int(bound["dispersion_resolution"]) if "dispersion_resolution" in bound else None,
            oracle=oracle,
            base_dir=base_dir,
        )
    except KeyError as exc:
        raise ConfigError(f"config is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return config_from_json(doc, str(path.parent))

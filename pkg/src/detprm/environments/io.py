"""Problem files: JSON documents with a ``schema`` version field.

Layout (schema 1)::

    {"schema": 1, "name": "maze2d", "dim": 2,
     "obstacles": [{"type": "aabb", "min": [...], "max": [...]},
                   {"type": "sphere", "center": [...], "radius": r}],
     "x_init": [...], "goal": {"center": [...], "radius": r},
     "metric": "euclidean",
     "chain": {"base": [x, y], "link_length": L, "n_links": k}}   # optional
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np

from detprm.core import Problem
from detprm.environments.geometry import AABox, Chain, Environment, Sphere

PROBLEM_SCHEMA = 1


class ProblemFileError(ValueError):
    pass


def problem_to_json(problem: Problem) -> dict:
    env = problem.env.to_json()
    doc = {
        "schema": PROBLEM_SCHEMA,
        "name": problem.name,
        "dim": env["dim"],
        "obstacles": env["obstacles"],
        "x_init": problem.x_init.tolist(),
        "goal": {"center": problem.goal_center.tolist(), "radius": problem.goal_radius},
        "metric": problem.metric,
    }
    if "chain" in env:
        doc["chain"] = env["chain"]
    return doc


def problem_from_json(doc: dict) -> Problem:
    if doc.get("schema") != PROBLEM_SCHEMA:
        raise ProblemFileError(f"unsupported problem schema {doc.get('schema')!r}; expected {PROBLEM_SCHEMA}")
    try:
        dim = int(doc["dim"])
        obstacles = []
        for ob in doc.get("obstacles", []):
            if ob["type"] == "aabb":
                obstacles.append(AABox(np.array(ob["min"], float), np.array(ob["max"], float)))
            elif ob["type"] == "sphere":
                obstacles.append(Sphere(np.array(ob["center"], float), float(ob["radius"])))
            else:
                raise ProblemFileError(f"unknown obstacle type {ob['type']!r}")
        chain = None
        if doc.get("chain") is not None:
            c = doc["chain"]
            chain = Chain(np.array(c["base"], float), float(c["link_length"]), int(c["n_links"]))
        env = Environment(dim, tuple(obstacles), chain)
        return Problem(
            env,
            np.array(doc["x_init"], float),
            np.array(doc["goal"]["center"], float),
            float(doc["goal"]["radius"]),
            doc.get("metric", "euclidean"),
            doc.get("name", ""),
        )
    except KeyError as exc:
        raise ProblemFileError(f"problem file is missing field {exc}") from exc


def save_problem(problem: Problem, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(problem_to_json(problem), indent=1) + "\n")


def load_problem(path: Union[str, Path]) -> Problem:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: not valid JSON ({exc})") from exc
    return problem_from_json(doc)


def shipped_problem_names() -> list[str]:
    files = resources.files("detprm.environments").joinpath("data")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_shipped_problem(name: str) -> Problem:
    """One of the versioned problem files bundled with the package."""
    path = resources.files("detprm.environments").joinpath("data", f"{name}.json")
    if not path.is_file():
        raise ProblemFileError(f"no shipped problem {name!r}; available: {shipped_problem_names()}")
    return problem_from_json(json.loads(path.read_text()))

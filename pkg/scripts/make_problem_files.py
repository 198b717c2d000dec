"""Regenerate the problem files shipped in detprm/environments/data."""

from __future__ import annotations

import argparse
from pathlib import Path

from detprm.environments.families import family_problem
from detprm.environments.io import save_problem

SHIPPED = (
    ("maze2d", 2),
    ("recursive-maze", 2),
    ("recursive-maze", 3),
    ("rect", 2),
    ("rect", 3),
    ("spheres", 2),
    ("spheres", 3),
    ("spheres", 4),
    ("chain", 8),
)

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "detprm" / "environments" / "data"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=DATA_DIR)
    args = ap.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for family, dim in SHIPPED:
        problem = family_problem(family, dim)
        path = args.out_dir / f"{problem.name}.json"
        save_problem(problem, path)
        print(path)


if __name__ == "__main__":
    main()

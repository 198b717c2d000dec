"""Command-line entry point: ``detprm {sample,dispersion,env,plan,bench,summary}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from detprm.bench.config import ConfigError, load_config, sampler_from_json
from detprm.bench.run import format_value, read_csv, run_experiment, write_csv
from detprm.bench.summary import gnuplot_blocks, summary_csv, summary_table
from detprm.core import SampleSet
from detprm.dispersion import dispersion_bounds
from detprm.environments.families import DEFAULT_SPHERE_COVERAGE, family_problem
from detprm.environments.io import ProblemFileError, load_problem, save_problem
from detprm.planner.plan import VARIANTS, plan
from detprm.planner.radius import RadiusRule
from detprm.planner.search import ENGINES
from detprm.sampling import SamplerSpec, make_samples

EXIT_CONFIG = 2
PLAN_FIELDS = ["success", "cost", "n_vertices", "n_edges", "n_collision_checks", "n_distinct_edge_lengths", "note"]


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _points_csv(points: np.ndarray) -> str:
    return "".join(",".join("%.17g" % v for v in row) + "\n" for row in points)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sampler_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", default="halton",
                   help="halton, sukharev, triangular, iid, lattice, lattice-norot, randlattice, mixed")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--counts", type=_ints, help="per-dimension Sukharev counts, e.g. 4,4")
    p.add_argument("--rotate-deg", type=_floats,
                   help="rotation in degrees per coordinate plane (one value applies to all planes)")
    p.add_argument("--offset", type=_floats, help="translation in [0,1]^d, comma separated")


def _spec_from_args(args) -> SamplerSpec:
    entry = {"kind": args.kind}
    if args.counts:
        entry["counts"] = list(args.counts)
    spec = sampler_from_json(entry, args.dim).with_seed(args.seed)
    if args.rotate_deg or args.offset:
        d = args.dim
        rot = None
        if args.rotate_deg:
            deg = args.rotate_deg * (d - 1) if len(args.rotate_deg) == 1 else args.rotate_deg
            if len(deg) != d - 1:
                raise ConfigError(f"--rotate-deg needs 1 or {d - 1} values")
            rot = tuple(math.radians(x) for x in deg)
        spec = SamplerSpec("transformed", d, base=spec, rotation=rot, offset=args.offset)
    return spec


def cmd_sample(args) -> int:
    s = make_samples(_spec_from_args(args), args.n)
    _emit(_points_csv(s.points), args.out)
    return 0


def cmd_dispersion(args) -> int:
    if args.input:
        pts = np.loadtxt(args.input, delimiter=",", ndmin=2)
    else:
        pts = make_samples(_spec_from_args(args), args.n).points
    iv = dispersion_bounds(pts, args.resolution, args.norm, workers=args.workers)
    sys.stdout.write(f"{format_value(iv.lo)},{format_value(iv.hi)}\n")
    return 0


def cmd_env_gen(args) -> int:
    problem = family_problem(args.family, args.dim, args.seed, args.coverage)
    if args.out:
        save_problem(problem, args.out)
    else:
        from detprm.environments.io import problem_to_json

        sys.stdout.write(json.dumps(problem_to_json(problem), indent=1) + "\n")
    return 0


def cmd_plan(args) -> int:
    if args.problem:
        problem = load_problem(args.problem)
    elif args.family:
        problem = family_problem(args.family, args.dim)
    else:
        raise ConfigError("give --problem FILE or --family NAME")
    spec = sampler_from_json(args.sampler, problem.dim).with_seed(args.seed)
    rule = RadiusRule.parse(args.rule)
    res = plan(problem, spec, args.n, rule, args.variant, args.engine, args.strict, k=args.k,
               knn_epsilon=args.knn_epsilon if args.k is None else None)
    st = res.stats
    row = [int(res.success), res.cost, st.n_vertices, st.n_edges, st.n_collision_checks,
           st.n_distinct_edge_lengths, res.note]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLAN_FIELDS)
    w.writerow([format_value(v) for v in row])
    sys.stdout.write(buf.getvalue())
    if args.path_out and res.path is not None:
        Path(args.path_out).write_text(_points_csv(res.path.vertices))
    return 0


def cmd_bench(args) -> int:
    config = load_config(args.config)
    records = run_experiment(config, workers=args.workers)
    write_csv(records, args.out, timings=args.timings)
    return 0


def cmd_summary(args) -> int:
    records = read_csv(args.csv)
    _emit(summary_csv(summary_table(records, args.baseline)), args.out)
    if args.gnuplot:
        Path(args.gnuplot).write_text(gnuplot_blocks(records))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="detprm", description="Deterministic-sampling roadmap planning toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="generate a point set as CSV")
    _sampler_args(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("dispersion", help="certified l2 or linf dispersion interval, printed as lo,hi")
    _sampler_args(p)
    p.add_argument("--input", help="points CSV instead of generating them")
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--norm", choices=("l2", "linf"), default="l2")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("env", help="problem file tools")
    env_sub = p.add_subparsers(dest="env_command", required=True)
    g = env_sub.add_parser("gen", help="write a benchmark problem file")
    g.add_argument("--family", required=True,
                   choices=("maze2d", "recursive-maze", "rect", "spheres", "random-spheres", "free", "chain"))
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--coverage", type=float, default=DEFAULT_SPHERE_COVERAGE)
    g.add_argument("--out", help="output JSON (default stdout)")
    g.set_defaults(func=cmd_env_gen)

    p = sub.add_parser("plan", help="run one planning query; prints a CSV result row")
    p.add_argument("--problem", help="problem JSON file")
    p.add_argument("--family", help="problem family, instead of --problem")
    p.add_argument("--dim", type=int, default=2, help="dimension for --family")
    p.add_argument("--sampler", default="halton")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rule", default="gamma_prm", help="gamma_prm[:mult], power:c[:growth], explicit:r")
    p.add_argument("--variant", choices=VARIANTS, default="gprm")
    p.add_argument("--engine", choices=ENGINES, default="binary_heap")
    p.add_argument("--strict", action="store_true", help="do not add the goal center as a vertex")
    p.add_argument("--k", type=int, help="neighbor count for the knn variant")
    p.add_argument("--knn-epsilon", type=float, default=0.1)
    p.add_argument("--path-out", help="write the path vertices as CSV")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="append build/query times (breaks byte-identity)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("summary", help="normalized summary table from a bench CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out")
    p.add_argument("--baseline", default="iid")
    p.add_argument("--gnuplot", help="also write per-sampler curves in gnuplot block layout")
    p.set_defaults(func=cmd_summary)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ProblemFileError, ValueError, OSError) as exc:
        print(f"detprm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

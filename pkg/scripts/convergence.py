"""Free-space cost against n, with the worst-case bound from the dispersion."""

from __future__ import annotations

import argparse
import csv
import math
import sys

from detprm.core import Problem
from detprm.dispersion import dispersion_bounds
from detprm.environments import Environment
from detprm.planner import RadiusRule, connection_radius, plan, suboptimality_factor
from detprm.sampling import SamplerSpec, lattice_spec, make_samples


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samplers", nargs="+", default=["lattice", "halton", "iid"])
    ap.add_argument("--rule", default="power:1.2")
    ap.add_argument("--n", type=int, nargs="+", default=[256, 1024, 4096, 16384])
    ap.add_argument("--resolution", type=int, default=1001, help="dispersion grid per axis")
    args = ap.parse_args(argv)

    problem = Problem(Environment(2), [0.05, 0.05], [0.95, 0.95], 0.05)
    best = 0.9 * math.sqrt(2) - 0.05
    rule = RadiusRule.parse(args.rule)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["sampler", "n", "r_n", "dispersion_hi", "cost", "cost_ratio", "bound_factor"])
    for name in args.samplers:
        spec = lattice_spec(2) if name == "lattice" else SamplerSpec(name, 2, seed=0 if name == "iid" else None)
        for n in args.n:
            s = make_samples(spec, n)
            r = connection_radius(s.n, 2, rule)
            D = dispersion_bounds(s, args.resolution).hi
            res = plan(problem, None, s.n, rule, samples=s)
            bound = suboptimality_factor(D, r) if r > 2 * D else math.inf
            out.writerow([name, s.n, "%.6g" % r, "%.6g" % D, "%.6f" % res.cost,
                          "%.6f" % (res.cost / best), "%.6g" % bound])


if __name__ == "__main__":
    main()

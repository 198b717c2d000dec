"""Edge and distinct-length counts of the radius graph across a sample schedule."""

from __future__ import annotations

import argparse
import csv
import sys

from detprm.bench import complexity_scan
from detprm.environments import family_problem
from detprm.planner import RadiusRule
from detprm.sampling import SamplerSpec, lattice_spec


def sampler(name: str, dim: int) -> SamplerSpec:
    if name == "lattice":
        return lattice_spec(dim)
    return SamplerSpec(name, dim, seed=0 if name == "iid" else None)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="free")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--samplers", nargs="+", default=["sukharev", "lattice", "halton", "iid"])
    ap.add_argument("--rule", default="gamma_prm", help="gamma_prm[:m], power:c[:growth] or explicit:r")
    ap.add_argument("--n", type=int, nargs="+", default=[1024, 4096, 16384])
    args = ap.parse_args(argv)

    problem = family_problem(args.family, args.dim)
    rule = RadiusRule.parse(args.rule)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["sampler", "n", "r_n", "edges", "edges_ratio", "distinct_lengths", "distinct_ratio"])
    for name in args.samplers:
        for rec in complexity_scan(problem, sampler(name, args.dim), rule, args.n):
            out.writerow([name, rec.n, "%.6g" % rec.r_n, rec.edges, "%.4f" % rec.edges_ratio,
                          rec.distinct_lengths, "%.4f" % rec.distinct_ratio])


if __name__ == "__main__":
    main()

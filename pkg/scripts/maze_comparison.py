"""Sampler comparison on the shipped mazes: sustained-90% n and relative costs."""

from __future__ import annotations

import argparse
from pathlib import Path

from detprm.bench import config_from_json, run_experiment, summary_csv, summary_table, write_csv
from detprm.bench.summary import median_sustained_n, per_seed_sustained_n

SCHEDULE = [25, 50, 75, 100, 150, 200, 300, 400, 500, 700, 1000, 1500, 2000, 3000]
PROBLEMS = ("maze2d", "recmaze2", "recmaze3")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("results/maze_comparison"))
    ap.add_argument("--repeats", type=int, default=20, help="i.i.d. seeds per n")
    ap.add_argument("--workers", type=int, default=8)
    ap.add_argument("--problems", nargs="+", default=list(PROBLEMS))
    args = ap.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for name in args.problems:
        cfg = config_from_json({"schema": 1, "name": f"mazes-{name}", "problem": {"shipped": name},
                                "samplers": ["iid", "halton", "lattice"], "n_schedule": SCHEDULE,
                                "iid_repeats": args.repeats, "seed": 0})
        records = run_experiment(cfg, workers=args.workers)
        write_csv(records, args.out_dir / f"{name}.csv")
        seeds = median_sustained_n(per_seed_sustained_n(records, name, "iid", "gprm"))
        print(f"{name}: iid per-seed median sustained n = {seeds:g}")
        rows.extend(summary_table(records))

    text = summary_csv(rows)
    (args.out_dir / "summary.csv").write_text(text)
    print(text, end="")


if __name__ == "__main__":
    main()

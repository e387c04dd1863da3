"""Command-line front end for the experiment harness.

    shotline run <config.json> [--out DIR] [--seed N] [--jobs K]
    shotline compare <resultsdir> <armA> <armB> --at-shots S
    shotline regret <run.jsonl> --jstar X
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .engine import read_jsonl
from .harness import compare_arms, compute_regret, run_experiment


def _cmd_run(args) -> int:
    out = run_experiment(args.config, out_dir=args.out,
                         seed_override=args.seed, jobs=args.jobs)
    print(f"results written to {out}")
    return 0


def _cmd_compare(args) -> int:
    med_a, med_b, p = compare_arms(args.resultsdir, args.arm_a, args.arm_b,
                                   args.at_shots)
    print(f"{args.arm_a}: median regret {med_a!r}")
    print(f"{args.arm_b}: median regret {med_b!r}")
    print(f"rank-sum p-value: {p!r}")
    return 0


def _cmd_regret(args) -> int:
    curve = compute_regret(read_jsonl(args.run), args.jstar)
    print("shots,regret")
    for s, r in zip(curve.shots, curve.regret):
        print(f"{int(s)},{'' if np.isnan(r) else repr(float(r))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotline",
        description="Shot-budget-aware Bayesian optimization experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="path to the experiment JSON config")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel replication workers")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="rank-sum comparison of two arms")
    p_cmp.add_argument("resultsdir")
    p_cmp.add_argument("arm_a")
    p_cmp.add_argument("arm_b")
    p_cmp.add_argument("--at-shots", type=float, required=True,
                       help="cumulative-shot checkpoint")
    p_cmp.set_defaults(func=_cmd_compare)

    p_reg = sub.add_parser("regret", help="regret curve of one run log")
    p_reg.add_argument("run", help="path to a run JSONL log")
    p_reg.add_argument("--jstar", type=float, required=True,
                       help="ground-truth minimum")
    p_reg.set_defaults(func=_cmd_regret)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

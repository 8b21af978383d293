"""Command-line entry point.

Exit codes: 0 success, 1 at least one run failed, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError
from .experiment import compare_summaries, parse_config, run_experiment
from .optimizer import ALGORITHMS
from .problems import PROBLEMS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="misowild", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded experiments")
    run.add_argument("--config", help="flat JSON experiment file")
    run.add_argument("--problem", choices=sorted(PROBLEMS))
    run.add_argument("--algorithm", choices=ALGORITHMS)
    run.add_argument("--seed", type=int, help="single seed; replaces the configured list")
    run.add_argument("--out-dir", dest="output_dir")
    run.add_argument("--max-evals", dest="max_evaluations", type=int)
    run.add_argument("--budget", type=float)

    sub.add_parser("list-problems", help="print available problems")
    sub.add_parser("list-algorithms", help="print available algorithms")

    cmp = sub.add_parser("compare", help="pair a miso-wild summary with a baseline summary")
    cmp.add_argument("wild", type=Path)
    cmp.add_argument("cooling", type=Path)
    cmp.add_argument("--out", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-problems":
        print("\n".join(sorted(PROBLEMS)))
        return 0
    if args.command == "list-algorithms":
        print("\n".join(ALGORITHMS))
        return 0
    if args.command == "compare":
        try:
            wild = json.loads(args.wild.read_text(encoding="utf-8"))
            cooling = json.loads(args.cooling.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        report = json.dumps(compare_summaries(wild, cooling), indent=2) + "\n"
        if args.out:
            args.out.write_text(report, encoding="utf-8")
        sys.stdout.write(report)
        return 0

    overrides = {k: getattr(args, k) for k in
                 ("problem", "algorithm", "seed", "output_dir", "max_evaluations", "budget")}
    try:
        cfg = parse_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    summary = run_experiment(cfg)
    bv, tc = summary["best_value"], summary["total_cost"]
    print(f"{cfg.problem}/{cfg.algorithm}: {summary['n_runs']} runs, {summary['n_failed']} failed")
    if bv["mean"] is not None:
        print(f"  best_value {bv['mean']:.6g} +- {bv['std']:.3g}")
        print(f"  total_cost {tc['mean']:.6g} +- {tc['std']:.3g}")
    return 1 if summary["n_failed"] else 0


if __name__ == "__main__":
    sys.exit(main())

"""Run a batch of honest trials against every scheme and print success rates."""

from __future__ import annotations

import argparse

from lindecomp.cli import ExperimentConfig, run_experiment
from lindecomp.protocols import TAGS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    failed = 0
    for tag in TAGS:
        report = run_experiment(ExperimentConfig(tag, trials=args.trials, seed=args.seed))
        failed += not report.all_succeeded
        print(f"{tag:<18} {report.successes}/{len(report.records)}")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()

"""Time span closure on random two-action instances and fit the log-log slope."""

from __future__ import annotations

import argparse

from lindecomp.cli import closure_benchmark, loglog_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--frontier", action="store_true")
    args = ap.parse_args()
    rows = closure_benchmark(args.dims, n_actions=2, n_seeds=1, p=args.p, frontier=args.frontier)
    print(f"{'d':>6} {'rank':>6} {'field_ops':>14} {'ops/d^3':>9} {'seconds':>9}")
    for r in rows:
        print(f"{r['d']:>6} {r['rank']:>6} {r['field_ops']:>14} {r['ops_per_d3']:>9.2f} {r['seconds']:>9.3f}")
    print(f"log-log slope of field ops against d: {loglog_slope(rows):.3f}")


if __name__ == "__main__":
    main()

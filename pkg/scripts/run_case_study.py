#!/usr/bin/env python3
"""Parameter sweep: solve every (gamma, tau) setting under cases I-IV.

Prints a shortage-summary table (total / worst day / worst day-state per
setting and case) in the style of the published case study.  Defaults to
the small bundled fixture so it runs in seconds; point --instance and
--forecast at full-scale inputs to reproduce the real sweep (expect to
use --export-dir plus an external solver for that scale).
"""

import argparse
import itertools
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from ventalloc.pipeline import RunConfig, run
from ventalloc.solver import SolveLimits

ROOT = os.path.join(os.path.dirname(__file__), os.pardir)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instance", default=os.path.join(ROOT, "fixtures", "instance.json"))
    ap.add_argument("--forecast", default=os.path.join(ROOT, "fixtures", "forecast.csv"))
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.5, 0.6, 0.75])
    ap.add_argument("--taus", type=float, nargs="+", default=[0.0, 0.25, 0.5])
    ap.add_argument("--rho", type=float, default=1.5)
    ap.add_argument("--cases", nargs="+", default=["I", "II", "III", "IV"])
    ap.add_argument("--count", type=int, default=24, help="scenarios per case")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--time-limit", type=float, default=3600.0,
                    help="per-scenario solve limit, seconds")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    header = f"{'(gamma, tau)':<16} {'case':<5} {'total':>12} {'worst day (t)':>24} {'worst day-state (t, n)':>34}"
    print(header)
    print("-" * len(header))

    any_limited = False
    for gamma, tau in itertools.product(args.gammas, args.taus):
        for case in args.cases:
            config = RunConfig(
                instance_path=args.instance,
                forecast_path=args.forecast,
                case=case,
                scenario_count=args.count,
                seed=args.seed,
                strategy="per-scenario",
                max_workers=args.workers,
                limits=SolveLimits(time_limit=args.time_limit),
                overrides={"gamma": gamma, "tau": tau, "rho": args.rho},
            )
            try:
                report = run(config).report
            except Exception as exc:
                print(f"({gamma:.0%}, {tau:.0%})    {case:<5} failed: {exc}")
                continue
            statuses = {o.status for o in report.outcomes}
            flag = "" if statuses == {"Optimal"} else " *"
            any_limited = any_limited or bool(flag)
            print(
                f"({gamma:.0%}, {tau:.0%})".ljust(16)
                + f" {case:<5}"
                + f" {report.total:>12.2f}"
                + f" {report.worst_day_value:>12.2f} ({report.worst_day_date})"
                + f" {report.worst_day_state_value:>12.2f} "
                  f"({report.worst_day_state_date}, {report.worst_day_state_region})"
                + flag
            )
    if any_limited:
        print("\n* at least one scenario stopped at the time limit; "
              "values use the best incumbents found")
    return 0


if __name__ == "__main__":
    sys.exit(main())

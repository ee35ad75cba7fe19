#!/usr/bin/env python3
"""Run all three policies on a scenario and print a side-by-side comparison.

Example:
    python scripts/run_comparison.py --scenario table3-table4 --out results/
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from autotier.engine import POLICY_NAMES, run_scenario
from autotier.reporting import comparison_dict, migrations_dict, summary_dict, write_run_artifacts
from autotier.scenario import load_scenario


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default="table3-table4",
                        help="scenario path or bundled name")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None,
                        help="optional directory for per-policy run artifacts")
    args = parser.parse_args()

    scenario = load_scenario(args.scenario)
    summaries = []
    print(f"{'policy':12s} {'mean IOPS':>12s} {'mean MB/s':>10s} {'mean lat us':>12s} "
          f"{'migrations':>10s} {'distinct':>8s} {'moved GB':>9s}")
    for policy in POLICY_NAMES:
        result = run_scenario(scenario, policy, seed=args.seed)
        summary = summary_dict(result)
        moved = migrations_dict(result)
        summaries.append(summary)
        print(f"{policy:12s} {summary['total']['iops']['mean']:12.0f} "
              f"{summary['total']['mbps']['mean']:10.1f} "
              f"{summary['total']['meanLatencyUs']:12.1f} "
              f"{moved['migrationCount']:10d} {moved['distinctVmdksMigrated']:8d} "
              f"{moved['totalMigratedBytes'] / 1e9:9.1f}")
        if args.out:
            write_run_artifacts(result, Path(args.out) / policy)

    comparison = comparison_dict(summaries)
    print()
    for pair, ratios in comparison["ratios"].items():
        print(f"{pair}: IOPS x{ratios['iops']:.3f}, MB/s x{ratios['mbps']:.3f}")
    if args.out:
        path = Path(args.out) / "comparison.json"
        path.write_text(json.dumps(comparison, indent=2) + "\n", encoding="utf-8")
        print(f"\nwrote {path}")


if __name__ == "__main__":
    main()

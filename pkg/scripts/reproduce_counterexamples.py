"""Re-run every built-in counterexample fixture and print a result table.

Usage: python scripts/reproduce_counterexamples.py [--seed N]
"""

from __future__ import annotations

import argparse

from hypcenter.fixtures import REGISTRY, run_fixture


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    any_failed = False
    for name in sorted(REGISTRY):
        report = run_fixture(name, seed=args.seed)
        status = "ok " if report.ok else "FAIL"
        print(f"[{status}] {name}")
        for check in report.checks:
            mark = "+" if check.ok else "-"
            print(f"    {mark} {check.description}: {check.value:.6e} "
                  f"(bound {check.bound:.0e})")
        any_failed |= not report.ok
    return 1 if any_failed else 0


if __name__ == "__main__":
    raise SystemExit(main())

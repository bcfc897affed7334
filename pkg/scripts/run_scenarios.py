#!/usr/bin/env python3
"""Run every built-in scenario and print its report as a table.

Exit status is nonzero if any reference value fails to reproduce.
"""

import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from symdyn.scenarios import run_scenario

CASES = [
    ("example1", None),
    ("example2", Fraction(3, 2)),
    ("example3", Fraction(1, 2)),
    ("example3", Fraction(3, 2)),
    ("pickupsticks", None),
]


def main() -> int:
    failures = 0
    for name, h0 in CASES:
        report = run_scenario(name, h0)
        title = name if h0 is None else f"{name} (h0 = {h0})"
        print("=" * 60)
        print(title)
        print("=" * 60)
        print(report.to_table())
        print()
        if not report.all_passed:
            failures += 1
    if failures:
        print(f"{failures} scenario(s) diverged from their reference values")
        return 2
    print("all scenarios reproduce their reference values")
    return 0


if __name__ == "__main__":
    sys.exit(main())

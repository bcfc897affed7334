#!/usr/bin/env python3
"""Walk a window with a planted periodic block through the marker passes.

Prints the doubled-alphabet rendering after each stage and the final
invariant report, showing the period markers and stretching at work.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from symdyn.markers import (
    leftward_stretch,
    periodic_markers,
    place_krieger,
    upward_stretch,
    verify_invariants,
    window_from_rows,
)
from symdyn.randgen import random_aperiodic_window
from symdyn.specfiles import window_to_json


def show(stage, w, rows=None):
    print(f"--- {stage}")
    for k, line in enumerate(window_to_json(w, doubled=True)["rows_doubled"], start=1):
        if rows is None or k in rows:
            print(f"  row {k}: {line}")
    if w.flags:
        for f in w.flags:
            print(f"  flag: row {f.row} columns ({f.lo}, {f.hi}] period {f.period}")


def main() -> int:
    rng = random.Random(7)
    depth, width = 5, 96
    base = random_aperiodic_window(rng, width, depth, depth)
    rows = list(base.rows)
    for k in range(depth - 1):  # rows 1..4 carry a 3-periodic block
        pattern = ("011" * 40)[:width]
        rows[k] = rows[k][:30] + pattern[30:66] + rows[k][66:]
    w = window_from_rows(rows)
    show("input", w, rows={1, 5})
    for k in range(1, depth + 1):
        w = place_krieger(w, k, k)
    show("after placement (n = k per row)", w, rows={4, 5})
    for k in range(2, depth + 1):
        w = periodic_markers(w, k)
    show("after period markers", w, rows={3, 4})
    w = upward_stretch(w)
    w = leftward_stretch(w)
    show("after stretching", w)
    report = verify_invariants(w, ("D", "E"), max_long_per_row=1)
    for v in report.verdicts:
        mark = "PASS" if v.passed else f"FAIL {v.witnesses[:3]}"
        print(f"rule {v.rule}: {mark}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

"""Period tails of a concrete system: counts of selected periodic points
sharing a depthapped-row name.

For an array system truncated to R rows, the depth-k refining partition is
the cylinder partition of the top k rows, so two period-n points share a
depth-k name exactly when their top-k-row projections agree as sequences.
The tail value at a selected point is the normalized log-count of selected
points of the same minimal period with a matching projection; values on
rational mixtures are the weighted averages of the orbit values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .entropy import EntropyValue
from .errors import ArgumentError
from .sft import PeriodicOrbit, SftSpec, enumerate_periodic, rotations


def _project(word, k: int):
    return tuple(sym[:k] for sym in word)


@dataclass(frozen=True)
class PeriodTailSample:
    """Values (1/n) log2 #matches for each selected orbit and depth k <= K."""

    depth: int
    values: tuple  # ((orbit, tuple of EntropyValue per k=1..K) pairs)

    def value(self, orbit: PeriodicOrbit, k: int) -> EntropyValue:
        if not (1 <= k <= self.depth):
            raise ArgumentError(f"depth {k} outside 1..{self.depth}")
        for o, vals in self.values:
            if o == orbit:
                return vals[k - 1]
        raise ArgumentError(f"orbit {orbit.representative!r} not in the selection")

    def mixture_value(self, parts, k: int) -> EntropyValue:
        """Weighted average over (orbit, weight) pairs summing to 1."""
        total = sum((Fraction(w) for _, w in parts), Fraction(0))
        if total != 1:
            raise ArgumentError("mixture weights must sum to 1")
        acc = EntropyValue(0)
        for orbit, w in parts:
            acc = acc + self.value(orbit, k) * Fraction(w)
        return acc

    def orbits(self):
        return [o for o, _ in self.values]


def period_tail_from_system(
    sft: SftSpec,
    periods,
    K: int,
    selection: dict | None = None,
) -> PeriodTailSample:
    """Tail values for the selected periodic points of the system.

    periods: which minimal periods to select; selection optionally replaces
    the full enumeration with an explicit orbit list per period (it must be
    shift-invariant, which holds for any set of whole orbits).
    """
    if sft.rows is None:
        raise ArgumentError("period tails need an array system with row structure")
    R = len(sft.rows)
    if K < 1 or K > R:
        raise ArgumentError(f"depth must lie in 1..{R}")
    out = []
    for n in sorted(set(periods)):
        orbits = (
            selection.get(n, []) if selection is not None else enumerate_periodic(sft, n)
        )
        for o in orbits:
            if o.period != n:
                raise ArgumentError("selection lists an orbit under the wrong period")
        points = []
        for o in orbits:
            points.extend(rotations(o.representative))
        per_orbit = []
        for o in orbits:
            vals = []
            for k in range(1, K + 1):
                mine = _project(o.representative, k)
                count = sum(1 for p in points if _project(p, k) == mine)
                vals.append(EntropyValue.log2_of(count, n))
            per_orbit.append((o, tuple(vals)))
        out.extend(per_orbit)
    return PeriodTailSample(K, tuple(out))

"""Ornstein distance between periodic orbit measures, and its convexity bound.

For two periodic orbits the distance reduces to a minimum over relative
phases of the per-column disagreement density on the common period; this is
exact.  Between rational mixtures of orbit measures only the optimal-coupling
upper bound from the ergodic-decomposition convexity inequality is computed,
and it is reported as a bound, not as the distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import ArgumentError
from .sft import PeriodicOrbit


def dbar_periodic(a: PeriodicOrbit, b: PeriodicOrbit) -> Fraction:
    """Exact distance between the uniform measures on two periodic orbits."""
    ta = any(isinstance(s, tuple) for s in a.representative)
    tb = any(isinstance(s, tuple) for s in b.representative)
    if ta != tb:
        raise ArgumentError("orbit alphabets are incompatible")
    p, q = a.period, b.period
    L = p * q // gcd(p, q)
    wa = a.representative * (L // p)
    wb = b.representative * (L // q)
    best = None
    for r in range(L):
        mism = sum(1 for i in range(L) if wa[i] != wb[(i + r) % L])
        if best is None or mism < best:
            best = mism
            if best == 0:
                break
    return Fraction(best, L)


@dataclass(frozen=True)
class OrbitMixture:
    """A finite convex combination of periodic orbits with rational weights."""

    parts: tuple  # tuple of (PeriodicOrbit, Fraction) pairs

    def __post_init__(self):
        total = sum((w for _, w in self.parts), Fraction(0))
        if total != 1:
            raise ArgumentError(f"mixture weights sum to {total}, expected 1")
        if any(w < 0 for _, w in self.parts):
            raise ArgumentError("mixture weights must be nonnegative")

    @staticmethod
    def point(orbit: PeriodicOrbit) -> "OrbitMixture":
        return OrbitMixture(((orbit, Fraction(1)),))


def _negative_cycle(n: int, m: int, cost, flow):
    """A negative-cost residual cycle as [(i, j, forward?), ...], or None.

    Residual edges: L_i -> R_j at cost c_ij (always usable), R_j -> L_i at
    -c_ij whenever flow[i][j] > 0.  Bellman-Ford from all nodes at once.
    """
    V = n + m  # nodes: 0..n-1 left, n..n+m-1 right
    dist = [Fraction(0)] * V
    pred = [None] * V  # (node, edge) with edge = (i, j, forward?)
    last_updated = None
    for _ in range(V + 1):
        last_updated = None
        for i in range(n):
            for j in range(m):
                u, v = i, n + j
                if dist[u] + cost[i][j] < dist[v]:
                    dist[v] = dist[u] + cost[i][j]
                    pred[v] = (u, (i, j, True))
                    last_updated = v
                if flow[i][j] > 0 and dist[v] - cost[i][j] < dist[u]:
                    dist[u] = dist[v] - cost[i][j]
                    pred[u] = (v, (i, j, False))
                    last_updated = u
    if last_updated is None:
        return None
    node = last_updated
    for _ in range(V):  # walk back to guarantee landing on the cycle
        node = pred[node][0]
    cycle = []
    cur = node
    while True:
        prev, edge = pred[cur]
        cycle.append(edge)
        cur = prev
        if cur == node:
            break
    return cycle


def _min_cost_transport(supply: list, demand: list, cost: list) -> Fraction:
    """Exact min-cost transportation by cycle canceling.

    supply/demand are positive integers with equal totals; cost entries are
    Fractions.  Starts from the northwest-corner feasible flow and cancels
    negative residual cycles until none remain; instances here are tiny.
    """
    n, m = len(supply), len(demand)
    left, right = list(supply), list(demand)
    flow = [[0] * m for _ in range(n)]
    i = j = 0
    while i < n and j < m:
        t = min(left[i], right[j])
        flow[i][j] += t
        left[i] -= t
        right[j] -= t
        if left[i] == 0:
            i += 1
        if right[j] == 0:
            j += 1
    while True:
        cycle = _negative_cycle(n, m, cost, flow)
        if cycle is None:
            break
        bottleneck = min(flow[i][j] for i, j, fwd in cycle if not fwd)
        for i, j, fwd in cycle:
            flow[i][j] += bottleneck if fwd else -bottleneck
    return sum(
        flow[i][j] * cost[i][j] for i in range(n) for j in range(m) if flow[i][j]
    )


def dbar_mixture(mu: OrbitMixture, nu: OrbitMixture) -> Fraction:
    """Optimal-coupling upper bound between two rational orbit mixtures.

    Returns the minimum of sum w_i v_j d(a_i, b_j) over transport plans with
    the mixture weights as marginals.  This bounds the distance from above
    by the convexity inequality; for single orbits it is the exact distance.
    """
    orbits_a = [o for o, _ in mu.parts]
    orbits_b = [o for o, _ in nu.parts]
    weights_a = [w for _, w in mu.parts]
    weights_b = [w for _, w in nu.parts]
    denom = 1
    for w in weights_a + weights_b:
        denom = denom * w.denominator // gcd(denom, w.denominator)
    supply = [int(w * denom) for w in weights_a]
    demand = [int(w * denom) for w in weights_b]
    cost = [[dbar_periodic(a, b) for b in orbits_b] for a in orbits_a]
    total = _min_cost_transport(supply, demand, cost)
    return total / denom

"""Finite-type subshifts: words, periodic orbits, capacities, entropy brackets.

A subshift is given by an alphabet and a finite set of forbidden words.
Symbols are strings; for array systems truncated to K rows a symbol is a
K-tuple of per-row symbols and the spec carries the row structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .entropy import EntropyBracket, EntropyValue, max_entropy
from .errors import ArgumentError, ResourceCapError

Symbol = str | tuple
Word = tuple  # tuple of symbols

DEFAULT_PERIOD_CAP = 20


def word(text: str) -> Word:
    """A word from a string of single-character symbols."""
    return tuple(text)


def rotations(w: Word):
    for r in range(len(w)):
        yield w[r:] + w[:r]


def least_rotation(w: Word) -> Word:
    return min(rotations(w))


def minimal_period(w: Word) -> int:
    n = len(w)
    for d in range(1, n):
        if n % d == 0 and w == w[d:] + w[:d]:
            return d
    return n


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise ArgumentError("alphabet must have size >= 1")
        if len(set(self.symbols)) != len(self.symbols):
            raise ArgumentError("alphabet symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class SftSpec:
    """Alphabet plus forbidden words; optionally per-row alphabets."""

    alphabet: Alphabet
    forbidden: frozenset = frozenset()
    rows: tuple | None = None  # per-row alphabets for truncated array systems

    def __post_init__(self):
        for f in self.forbidden:
            if len(f) < 1:
                raise ArgumentError("forbidden words must be nonempty")
            for s in f:
                if s not in self.alphabet.symbols:
                    raise ArgumentError(f"forbidden word uses unknown symbol {s!r}")
        if self.rows is not None:
            expect = set(itertools.product(*[a.symbols for a in self.rows]))
            if not set(self.alphabet.symbols) <= expect:
                raise ArgumentError("alphabet inconsistent with row structure")

    @property
    def memory(self) -> int:
        """Max forbidden-word length L; local rules have window L."""
        return max((len(f) for f in self.forbidden), default=1)

    def admits(self, w: Word) -> bool:
        for f in self.forbidden:
            lf = len(f)
            for i in range(len(w) - lf + 1):
                if w[i : i + lf] == f:
                    return False
        return True

    def admits_cyclic(self, w: Word) -> bool:
        """Whether the bi-infinite repetition of w avoids all forbidden words."""
        n = len(w)
        if n == 0:
            return False
        reps = -(-(n + self.memory) // n)  # enough copies to see every window
        stretched = w * reps
        for f in self.forbidden:
            lf = len(f)
            if lf > len(stretched):
                continue
            for i in range(n):
                if stretched[i : i + lf] == f:
                    return False
        return True


def full_shift(symbols: str | tuple) -> SftSpec:
    syms = tuple(symbols)
    return SftSpec(Alphabet(syms))


def golden_mean() -> SftSpec:
    return SftSpec(Alphabet(("0", "1")), frozenset({word("11")}))


# ---------------------------------------------------------------------------
# transfer graph on (L-1)-blocks


def transfer_graph(sft: SftSpec):
    """Essential de Bruijn-style graph: states are admissible (L-1)-words.

    Returns (states, edges) with edges[state] a sorted tuple of successor
    states; states with no bi-infinite continuation are pruned.
    """
    m = max(sft.memory - 1, 0)
    if m == 0:
        # single state; one self-loop per admissible symbol (multiplicity kept)
        loops = tuple(() for s in sft.alphabet.symbols if sft.admits((s,)))
        if not loops:
            return [], {}
        return [()], {(): loops}
    states = [w for w in itertools.product(sft.alphabet.symbols, repeat=m) if sft.admits(w)]
    edges = {}
    for st in states:
        outs = []
        for s in sft.alphabet.symbols:
            nxt = st[1:] + (s,)
            if sft.admits(st + (s,)):
                outs.append(nxt)
        edges[st] = outs
    # essentialize: repeatedly drop states lacking successors or predecessors
    alive = set(states)
    changed = True
    while changed:
        changed = False
        indeg = {st: 0 for st in alive}
        for st in alive:
            for nx in edges[st]:
                if nx in alive:
                    indeg[nx] += 1
        for st in list(alive):
            outs = [nx for nx in edges[st] if nx in alive]
            if not outs or indeg[st] == 0:
                alive.discard(st)
                changed = True
    states = sorted(alive)
    edges = {st: tuple(sorted(nx for nx in edges[st] if nx in alive)) for st in states}
    return states, edges


def language_nonempty(sft: SftSpec) -> bool:
    states, _ = transfer_graph(sft)
    return len(states) > 0


def validate(sft: SftSpec) -> None:
    if not language_nonempty(sft):
        raise ArgumentError("subshift language is empty")


def words_of_length(sft: SftSpec, n: int):
    """All admissible words of length n, lexicographic, by depth-first walk."""
    if n == 0:
        yield ()
        return
    memory = sft.memory

    def extend(prefix):
        if len(prefix) == n:
            yield prefix
            return
        for s in sft.alphabet.symbols:
            cand = prefix + (s,)
            if sft.admits(cand[-memory:]):
                yield from extend(cand)

    yield from extend(())


def count_words(sft: SftSpec, n: int) -> int:
    """Number of admissible words of length n via transfer counts."""
    states, edges = transfer_graph(sft)
    if not states:
        return 0
    m = max(sft.memory - 1, 0)
    if n <= m:
        return sum(1 for _ in words_of_length(sft, n))
    idx = {st: i for i, st in enumerate(states)}
    vec = [1] * len(states)
    for _ in range(n - m):
        new = [0] * len(states)
        for st in states:
            i = idx[st]
            for nx in edges[st]:
                new[i] += vec[idx[nx]]
        vec = new
    return sum(vec)


# ---------------------------------------------------------------------------
# periodic orbits


@dataclass(frozen=True, order=True)
class PeriodicOrbit:
    """A periodic orbit, canonicalized by the lexicographically least rotation."""

    representative: Word

    @property
    def period(self) -> int:
        return len(self.representative)

    def points(self):
        return sorted(rotations(self.representative))

    @staticmethod
    def of(w: Word) -> "PeriodicOrbit":
        if minimal_period(w) != len(w):
            raise ArgumentError(f"word {w!r} does not have minimal period {len(w)}")
        return PeriodicOrbit(least_rotation(w))


def enumerate_periodic(sft: SftSpec, n: int, cap: int = DEFAULT_PERIOD_CAP) -> list[PeriodicOrbit]:
    """All orbits of minimal period n, sorted by representative.

    Walks only the admissible words of length n (the forbidden-word
    pruning makes this linear in the language, not the symbol cube), then
    filters for minimal period and cyclic admissibility.
    """
    if n < 1:
        raise ArgumentError("period must be >= 1")
    if n > cap:
        raise ResourceCapError(f"period {n} exceeds cap {cap}")
    seen = set()
    out = []
    for w in words_of_length(sft, n):
        if minimal_period(w) != n:
            continue
        canon = least_rotation(w)
        if canon in seen:
            continue
        seen.add(canon)
        if sft.admits_cyclic(canon):
            out.append(PeriodicOrbit(canon))
    out.sort()
    return out


@dataclass(frozen=True)
class PerTable:
    """counts[n] = number of points of minimal period n, for n = 1..N."""

    counts: tuple  # tuple of (n, count) pairs, n = 1..N

    def __post_init__(self):
        for n, c in self.counts:
            if c % n != 0:
                raise ArgumentError(f"count {c} at period {n} is not a multiple of {n}")

    @property
    def horizon(self) -> int:
        return max((n for n, _ in self.counts), default=0)

    def count(self, n: int) -> int:
        for m, c in self.counts:
            if m == n:
                return c
        raise ArgumentError(f"period {n} outside table range")


def per_table(sft: SftSpec, N: int, cap: int = DEFAULT_PERIOD_CAP) -> PerTable:
    if N < 1:
        raise ArgumentError("table horizon must be >= 1")
    pairs = []
    for n in range(1, N + 1):
        orbits = enumerate_periodic(sft, n, cap=cap)
        pairs.append((n, n * len(orbits)))
    return PerTable(tuple(pairs))


@dataclass(frozen=True)
class Capacities:
    p_sup: EntropyValue
    p_lim_estimate: EntropyValue
    window: tuple  # periods used for the limit estimate
    note: str = "p_lim is a finite-window estimate, not a certified limsup"


def capacities(table: PerTable, tail_window: int | None = None) -> Capacities:
    """Supremum and (estimated) limit growth rates of periodic-point counts.

    Periods with zero count contribute no term; an everywhere-zero table
    yields (0, 0).
    """
    if not table.counts:
        raise ArgumentError("empty period table")
    N = table.horizon
    if tail_window is None:
        tail_window = max(3, N // 3)
    tail_start = max(1, N - tail_window + 1)
    sup_terms = [EntropyValue(0)]
    lim_terms = [EntropyValue(0)]
    window = []
    for n, c in table.counts:
        if c == 0:
            continue
        term = EntropyValue.log2_of(c, n)
        sup_terms.append(term)
        if n >= tail_start:
            lim_terms.append(term)
            window.append(n)
    return Capacities(max_entropy(*sup_terms), max_entropy(*lim_terms), tuple(window))


# ---------------------------------------------------------------------------
# topological entropy bracket

DEFAULT_ENTROPY_TOL = Fraction(1, 100)
DEFAULT_ENTROPY_DEPTH_CAP = 160
_LOG_SCALE = 1024


def _log2_bracket(x: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= log2(x) <= hi with width 1/_LOG_SCALE, certified.

    2**b <= x**K < 2**(b+1) gives b/K <= log2(x) < (b+1)/K.
    """
    if x & (x - 1) == 0:  # power of two: exact
        e = x.bit_length() - 1
        return Fraction(e), Fraction(e)
    b = (x**_LOG_SCALE).bit_length() - 1
    return Fraction(b, _LOG_SCALE), Fraction(b + 1, _LOG_SCALE)


def top_entropy(
    sft: SftSpec,
    tolerance: Fraction = DEFAULT_ENTROPY_TOL,
    depth_cap: int = DEFAULT_ENTROPY_DEPTH_CAP,
) -> EntropyBracket:
    """A bracket around the topological entropy from transfer counts.

    For a nonnegative matrix with all row sums in [a, b] the spectral
    radius lies in [a, b]; applying this to powers of the transfer matrix
    gives brackets [log2(min rowsum)/n, log2(max rowsum)/n] whose
    intersection over n encloses the entropy.  Returns the widest-effort
    bracket with ``tolerance_met=False`` if the cap depth is reached first.
    """
    states, edges = transfer_graph(sft)
    if not states:
        raise ArgumentError("empty subshift has no entropy")
    idx = {st: i for i, st in enumerate(states)}
    size = len(states)
    vec = [1] * size  # A**n applied to the ones vector
    lo_best, hi_best = Fraction(0), None
    for n in range(1, depth_cap + 1):
        new = [0] * size
        for st in states:
            acc = 0
            for nx in edges[st]:
                acc += vec[idx[nx]]
            new[idx[st]] = acc
        vec = new
        lo_n = _log2_bracket(min(vec))[0] / n
        hi_n = _log2_bracket(max(vec))[1] / n
        lo_best = max(lo_best, lo_n)
        hi_best = hi_n if hi_best is None else min(hi_best, hi_n)
        if hi_best - lo_best <= tolerance:
            return EntropyBracket(lo_best, hi_best, True)
    return EntropyBracket(lo_best, hi_best, False)

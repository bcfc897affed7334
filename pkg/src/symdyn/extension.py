"""Prefix-allocated block families over a rectangle hierarchy, plus the
embedding selector, strip systems, and Hall matching of strips to words.

The construction proceeds level by level: level-1 rectangles get cylinder
families from a prefix partition of the alphabet power, deeper rectangles
refine concatenations of their children's families by fixing initial free
positions.  Budgets come from an oracle table whose values are normalized
to alphabet powers first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .entropy import EntropyValue
from .errors import ArgumentError, ConstructionError
from .sft import PeriodicOrbit, Word, minimal_period, rotations


# ---------------------------------------------------------------------------
# prefix allocation (canonical Kraft construction)


@dataclass(frozen=True)
class PrefixAllocation:
    alphabet_size: int
    length: int
    entries: tuple  # (prefix: tuple of digit ints, free_count) in input order


def _digits(value: int, base: int, width: int) -> tuple:
    out = []
    for _ in range(width):
        value, d = divmod(value, base)
        out.append(d)
    if value:
        raise ConstructionError("prefix index overflow")
    return tuple(reversed(out))


def prefix_allocate(s: int, n: int, exponents) -> PrefixAllocation:
    """Disjoint cylinders [C_i] of sizes s**n_i inside the s**n cube.

    Sorts the requested exponents descending, packs cylinders left to right
    (each start index is automatically aligned), and reports prefixes in the
    original request order.  Raises with the deficit when the sizes violate
    the packing inequality.
    """
    if s < 2 or n < 0:
        raise ArgumentError("need alphabet size >= 2 and length >= 0")
    exponents = list(exponents)
    if any(e < 0 or e > n for e in exponents):
        raise ArgumentError("every exponent must lie in [0, n]")
    total = sum(s**e for e in exponents)
    if total > s**n:
        raise ArgumentError(
            f"cylinder sizes sum to {total} > {s**n}: deficit {total - s**n}"
        )
    order = sorted(range(len(exponents)), key=lambda i: -exponents[i])
    start = 0
    prefixes = [None] * len(exponents)
    for i in order:
        e = exponents[i]
        size = s**e
        assert start % size == 0  # descending packing keeps starts aligned
        prefixes[i] = _digits(start // size, s, n - e)
        start += size
    return PrefixAllocation(s, n, tuple((p, exponents[i]) for i, p in enumerate(prefixes)))


# ---------------------------------------------------------------------------
# rectangle hierarchy and oracle


@dataclass(frozen=True)
class Rectangle:
    """Level-1: a word; level k >= 2: ordered children plus a bottom block."""

    rect_id: str
    level: int
    word: Word | None = None  # level 1 only
    children: tuple = ()  # level >= 2: child rectangle ids
    bottom: Word | None = None  # level >= 2


@dataclass(frozen=True)
class RectangleHierarchy:
    alphabet_size: int
    rects: tuple  # all rectangles, all levels

    def __post_init__(self):
        ids = [r.rect_id for r in self.rects]
        if len(set(ids)) != len(ids):
            raise ArgumentError("duplicate rectangle id")
        by_id = {r.rect_id: r for r in self.rects}
        for r in self.rects:
            if r.level == 1:
                if r.word is None:
                    raise ArgumentError(f"{r.rect_id}: level-1 rectangle needs a word")
            else:
                if len(r.children) < 2:
                    raise ArgumentError(
                        f"{r.rect_id}: a level-{r.level} rectangle needs >= 2 children"
                    )
                for c in r.children:
                    if c not in by_id or by_id[c].level != r.level - 1:
                        raise ArgumentError(f"{r.rect_id}: bad child {c!r}")
                if r.bottom is None or len(r.bottom) != self.width(r.rect_id):
                    raise ArgumentError(f"{r.rect_id}: bottom block width mismatch")

    def get(self, rect_id: str) -> Rectangle:
        for r in self.rects:
            if r.rect_id == rect_id:
                return r
        raise ArgumentError(f"unknown rectangle {rect_id!r}")

    def level_rects(self, level: int):
        return [r for r in self.rects if r.level == level]

    @property
    def depth(self) -> int:
        return max(r.level for r in self.rects)

    def width(self, rect_id: str) -> int:
        r = self.get(rect_id)
        if r.level == 1:
            return len(r.word)
        return sum(self.width(c) for c in r.children)

    @property
    def base_width(self) -> int:
        """p_min at level 1: the shortest level-1 rectangle."""
        return min(len(r.word) for r in self.level_rects(1))


@dataclass(frozen=True)
class OracleTable:
    """budgets[level][rect_id] -> positive integer; normalized = powers of s."""

    budgets: tuple  # tuple of (level, tuple of (rect_id, budget))
    normalized: bool = False

    def budget(self, level: int, rect_id: str) -> int:
        for lv, entries in self.budgets:
            if lv == level:
                for rid, b in entries:
                    if rid == rect_id:
                        return b
        raise ArgumentError(f"no budget for level {level} rectangle {rect_id!r}")


def oracle_from_dict(d: dict) -> OracleTable:
    budgets = tuple(
        (lv, tuple(sorted(d[lv].items()))) for lv in sorted(d)
    )
    return OracleTable(budgets)


def _ceil_log(base: int, x: int) -> int:
    e, v = 0, 1
    while v < x:
        v *= base
        e += 1
    return e


def _exact_log(base: int, x: int) -> int:
    e = _ceil_log(base, x)
    if base**e != x:
        raise ConstructionError(f"{x} is not a power of {base}")
    return e


def verify_oracle(table: OracleTable, s: int, hierarchy: RectangleHierarchy, slack: int = 0):
    """Check the level-1 sum bound and the per-parent product bounds.

    slack: the level-1 bound is s**(base_width - slack); raw tables are
    required to fit with slack 2 so that normalization cannot overflow.
    """
    p1 = hierarchy.base_width
    if p1 - slack < 0:
        raise ArgumentError("level-1 rectangles too short for the requested slack")
    lvl1 = sum(table.budget(1, r.rect_id) for r in hierarchy.level_rects(1))
    if lvl1 > s ** (p1 - slack):
        raise ConstructionError(
            f"level 1: budgets sum to {lvl1} > {s}**{p1 - slack}"
        )
    for level in range(2, hierarchy.depth + 1):
        groups = {}
        for r in hierarchy.level_rects(level):
            groups.setdefault(r.children, []).append(r)
        for children, rects in groups.items():
            allowed = 1
            for c in children:
                allowed *= table.budget(level - 1, c)
            used = sum(table.budget(level, r.rect_id) for r in rects)
            if used > allowed:
                raise ConstructionError(
                    f"level {level}, children {children}: budgets sum to "
                    f"{used} > product {allowed}"
                )


def normalize_oracle(table: OracleTable, s: int, hierarchy: RectangleHierarchy) -> OracleTable:
    """Round every budget up to s**(ceil(log_s budget) + 1) and re-verify.

    The raw table must satisfy the level-1 bound with slack 2; each value
    grows by a factor in [s, s**2] while every parent has at least two
    children, so the product bounds survive.  Verification failure after
    rounding is an error, never silent.
    """
    verify_oracle(table, s, hierarchy, slack=2)
    new = []
    for level, entries in table.budgets:
        new.append(
            (level, tuple((rid, s ** (_ceil_log(s, b) + 1)) for rid, b in entries))
        )
    out = OracleTable(tuple(new), normalized=True)
    verify_oracle(out, s, hierarchy, slack=0)
    return out


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Family:
    """All words agreeing with `fixed` and free elsewhere on [0, width)."""

    rect_id: str
    width: int
    fixed: tuple  # sorted (position, digit) pairs
    free: tuple  # sorted positions

    def __post_init__(self):
        covered = {p for p, _ in self.fixed} | set(self.free)
        if len({p for p, _ in self.fixed}) + len(self.free) != self.width or covered != set(
            range(self.width)
        ):
            raise ConstructionError(
                f"family for {self.rect_id}: positions must split into fixed and free"
            )

    def size(self, s: int) -> int:
        return s ** len(self.free)

    def words(self, s: int):
        base = [None] * self.width
        for pos, d in self.fixed:
            base[pos] = d
        for combo in itertools.product(range(s), repeat=len(self.free)):
            w = list(base)
            for pos, d in zip(self.free, combo):
                w[pos] = d
            yield tuple(w)


@dataclass(frozen=True)
class FamilyTable:
    alphabet_size: int
    families: tuple  # (level, tuple of Family)

    def family(self, level: int, rect_id: str) -> Family:
        for lv, fams in self.families:
            if lv == level:
                for f in fams:
                    if f.rect_id == rect_id:
                        return f
        raise ArgumentError(f"no family for level {level} rectangle {rect_id!r}")


def build_families(hierarchy: RectangleHierarchy, oracle: OracleTable, s: int) -> FamilyTable:
    """Assign disjoint block families matching the normalized oracle budgets.

    Level 1 allocates one prefix partition of the s**p_min cube across all
    level-1 rectangles, padding longer rectangles with terminal zeros.
    Level k fixes initial free positions of the children concatenation, one
    prefix partition per group of rectangles sharing a child sequence.
    """
    if not oracle.normalized:
        raise ArgumentError("build_families needs a normalized oracle")
    p1 = hierarchy.base_width
    lvl1 = hierarchy.level_rects(1)
    exps = [_exact_log(s, oracle.budget(1, r.rect_id)) for r in lvl1]
    if any(e > p1 for e in exps):
        raise ConstructionError("a level-1 budget exceeds its rectangle capacity")
    alloc = prefix_allocate(s, p1, exps)
    levels = []
    fams = []
    for r, (prefix, e) in zip(lvl1, alloc.entries):
        width = len(r.word)
        fixed = [(i, d) for i, d in enumerate(prefix)]
        fixed += [(i, 0) for i in range(p1, width)]  # terminal padding: zeros
        free = [i for i in range(len(prefix), p1)]
        fams.append(Family(r.rect_id, width, tuple(fixed), tuple(free)))
    levels.append((1, tuple(fams)))
    table = {(1, f.rect_id): f for f in fams}
    for level in range(2, hierarchy.depth + 1):
        groups = {}
        for r in hierarchy.level_rects(level):
            groups.setdefault(r.children, []).append(r)
        fams = []
        for children, rects in sorted(groups.items()):
            offset = 0
            fixed = []
            free = []
            for c in children:
                child = table[(level - 1, c)]
                fixed += [(offset + i, d) for i, d in child.fixed]
                free += [offset + i for i in child.free]
                offset += child.width
            rects = sorted(rects, key=lambda r: r.rect_id)
            exps = [_exact_log(s, oracle.budget(level, r.rect_id)) for r in rects]
            if any(e > len(free) for e in exps):
                raise ConstructionError(
                    f"level {level}: a budget exceeds the free positions of {children}"
                )
            alloc = prefix_allocate(s, len(free), exps)
            for r, (prefix, e) in zip(rects, alloc.entries):
                newly_fixed = [(free[i], d) for i, d in enumerate(prefix)]
                still_free = free[len(prefix) :]
                fams.append(
                    Family(
                        r.rect_id,
                        offset,
                        tuple(sorted(fixed + newly_fixed)),
                        tuple(still_free),
                    )
                )
        levels.append((level, tuple(fams)))
        for f in fams:
            table[(level, f.rect_id)] = f
    return FamilyTable(s, tuple(levels))


def embed_selector(rect_path, families: FamilyTable, hierarchy: RectangleHierarchy) -> tuple:
    """The distinguished preimage word for a nested rectangle choice.

    rect_path lists rectangle ids from level 1 up to the top level; each
    entry must be a child of the next.  The result fixes every family
    position of the top rectangle and fills the residual free positions
    with the zero symbol.
    """
    if not rect_path:
        raise ArgumentError("empty rectangle path")
    rects = [hierarchy.get(rid) for rid in rect_path]
    for lv, r in enumerate(rects, start=1):
        if r.level != lv:
            raise ArgumentError(f"{r.rect_id} is at level {r.level}, expected {lv}")
    for child, parent in zip(rects, rects[1:]):
        if child.rect_id not in parent.children:
            raise ArgumentError(f"{child.rect_id} is not a child of {parent.rect_id}")
    top = rects[-1]
    fam = families.family(top.level, top.rect_id)
    fixed = dict(fam.fixed)
    return tuple(fixed.get(i, 0) for i in range(fam.width))


def extension_alphabet_report(s: int, sup_e: EntropyValue) -> dict:
    """Alphabet accounting: marker bit times content alphabet, plus the
    recoding bound (reported, not performed)."""
    return {
        "built_alphabet": 2 * s,
        "recoding_bound": sup_e.floor_two_pow() + 1,
    }


# ---------------------------------------------------------------------------
# strips and Hall matching


@dataclass(frozen=True)
class Strip:
    """A width-n vertical block cut from a selected periodic point; the
    marker sits at the rightmost column of the bookkeeping row."""

    columns: Word

    @property
    def width(self) -> int:
        return len(self.columns)


def build_strips(orbits, n: int):
    """All n phases of every orbit, plus the concatenation-system entropy.

    Returns (strips sorted, h) with h = log2(#strips)/n; the strip count
    equals the number of selected points of minimal period n.
    """
    strips = set()
    for orbit in orbits:
        if not isinstance(orbit, PeriodicOrbit):
            raise ArgumentError("build_strips expects PeriodicOrbit inputs")
        if orbit.period != n or minimal_period(orbit.representative) != n:
            raise ArgumentError(
                f"orbit {orbit.representative!r} does not have minimal period {n}"
            )
        for rot in rotations(orbit.representative):
            strips.add(Strip(rot))
    count = len(strips)
    h = EntropyValue(0) if count == 0 else EntropyValue.log2_of(count, n)
    return sorted(strips, key=lambda s: s.columns), h


class HallInfeasible(ArgumentError):
    """No system of distinct representatives; carries a Hall violator."""

    def __init__(self, violator, neighborhood):
        self.violator = tuple(violator)
        self.neighborhood = tuple(neighborhood)
        super().__init__(
            f"{len(self.violator)} strips share only {len(self.neighborhood)} words"
        )


def hall_match(words_per_strip: dict) -> dict:
    """An injective choice of one word per strip, by augmenting paths.

    words_per_strip maps each strip (any hashable) to its admissible word
    set.  When no matching exists the raised HallInfeasible carries a
    witness set S with |union of words over S| < |S|, extracted from the
    alternating-reachability cut of the final matching.
    """
    strips = sorted(words_per_strip, key=repr)
    words = sorted({w for ws in words_per_strip.values() for w in ws}, key=repr)
    lengths = {len(w) for w in words if isinstance(w, tuple)}
    if len(lengths) > 1:
        raise ArgumentError("all candidate words must have equal length")
    adj = {s: sorted(words_per_strip[s], key=repr) for s in strips}
    match_word = {}  # word -> strip

    def augment(s, seen):
        for w in adj[s]:
            if w in seen:
                continue
            seen.add(w)
            if w not in match_word or augment(match_word[w], seen):
                match_word[w] = s
                return True
        return False

    unmatched = None
    for s in strips:
        if not augment(s, set()):
            unmatched = s
            break
    if unmatched is None:
        return {s: w for w, s in match_word.items()}
    # alternating reachability from the unmatched strip yields the violator
    reach_strips = {unmatched}
    reach_words = set()
    grew = True
    while grew:
        grew = False
        for s in list(reach_strips):
            for w in adj[s]:
                if w not in reach_words:
                    reach_words.add(w)
                    grew = True
                    if w in match_word and match_word[w] not in reach_strips:
                        reach_strips.add(match_word[w])
    raise HallInfeasible(sorted(reach_strips, key=repr), sorted(reach_words, key=repr))

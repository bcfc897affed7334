"""Finite-depth generator checks for block-coded partitions.

A partition of a subshift with finite coding radius is a sliding block
code from symbol windows to partition labels.  The two directions checked
here: how sharply the bilateral label name pins down the central symbols
(atom multiplicity), and what language the label names generate.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import ArgumentError, ResourceCapError
from .sft import SftSpec, Word, count_words, words_of_length

DEFAULT_WORD_CAP = 2_000_000


@dataclass(frozen=True)
class BlockCode:
    """A radius-r sliding block code: windows of length 2r+1 -> labels."""

    radius: int
    table: tuple  # sorted (window, label) pairs

    def __post_init__(self):
        for w, _ in self.table:
            if len(w) != 2 * self.radius + 1:
                raise ArgumentError("code window of wrong length")

    def as_dict(self) -> dict:
        return dict(self.table)


def block_code(radius: int, mapping: dict) -> BlockCode:
    return BlockCode(radius, tuple(sorted(mapping.items())))


def zero_coordinate_code(sft: SftSpec) -> BlockCode:
    """The radius-0 code reading off the symbol itself."""
    return block_code(0, {(s,): s for s in sft.alphabet.symbols})


def top_row_code(sft: SftSpec) -> BlockCode:
    """For product-alphabet systems: read the first row of the symbol."""
    return block_code(0, {(s,): s[0] for s in sft.alphabet.symbols})


def _check_total(code: BlockCode, sft: SftSpec):
    table = code.as_dict()
    missing = [
        w for w in words_of_length(sft, 2 * code.radius + 1) if w not in table
    ]
    if missing:
        raise ArgumentError(
            f"code not total on the language; uncovered: {missing[:5]}"
            + ("..." if len(missing) > 5 else "")
        )


def _capped_words(sft: SftSpec, length: int, cap: int):
    count = 0
    for w in words_of_length(sft, length):
        count += 1
        if count > cap:
            raise ResourceCapError(
                f"more than {cap} admissible words of length {length}"
            )
        yield w


@dataclass(frozen=True)
class GeneratorReport:
    """max atom multiplicity per name depth; the center block has radius
    center_radius and multiplicity counts distinct center blocks whose
    words share a full label name."""

    center_radius: int
    multiplicities: tuple  # (depth, max multiplicity) pairs


def extract_generator(
    sft: SftSpec,
    code: BlockCode,
    depth: int,
    center_radius: int = 0,
    word_cap: int = DEFAULT_WORD_CAP,
) -> GeneratorReport:
    """Pull the label partition back and measure how fast atoms shrink.

    For each n <= depth, words of length 2n+1 are grouped by their label
    name over positions [-n+r, n-r]; the multiplicity at n is the largest
    number of distinct central blocks within one group.  Multiplicity 1 at
    depth n means the name determines the center: the finite-depth shadow
    of a shrinking-diameter generator.
    """
    _check_total(code, sft)
    table = code.as_dict()
    r = code.radius
    c = center_radius
    mult = []
    for n in range(c, depth + 1):  # the center block must fit in the word
        L = 2 * n + 1
        groups = defaultdict(set)
        for w in _capped_words(sft, L, word_cap):
            lo, hi = r, L - r  # label positions computable inside the word
            name = tuple(table[w[i - r : i + r + 1]] for i in range(lo, hi))
            center = w[n - c : n + c + 1]
            groups[name].add(center)
        mult.append((n, max((len(v) for v in groups.values()), default=0)))
    return GeneratorReport(c, tuple(mult))


@dataclass(frozen=True)
class ImageLanguageReport:
    lengths: tuple  # (length, word count) pairs
    words_by_length: tuple  # (length, sorted words)
    decode_checked_depth: int
    decode_consistent: bool  # every word's center among its name's candidates
    decode_unique: bool  # every name at this depth pins down the center


def partition_to_extension(
    sft: SftSpec,
    code: BlockCode,
    depth: int,
    word_cap: int = DEFAULT_WORD_CAP,
) -> ImageLanguageReport:
    """The label-name image language to the given length, with a decode check.

    Also verifies on every admissible word that whenever a label name of
    maximal depth determines a unique consistent center symbol, that symbol
    is the word's own center (selecting back out of the image is the
    identity wherever it is determined at this depth).
    """
    _check_total(code, sft)
    table = code.as_dict()
    r = code.radius
    by_len = []
    counts = []
    for L in range(1, depth + 1):
        names = set()
        for w in _capped_words(sft, L + 2 * r, word_cap):
            names.add(tuple(table[w[i : i + 2 * r + 1]] for i in range(L)))
        by_len.append((L, tuple(sorted(names))))
        counts.append((L, len(names)))
    # decode check at the deepest length
    consistent, unique = True, True
    L = depth + 2 * r
    if L % 2 == 0:
        L += 1
    centers = defaultdict(set)
    if count_words(sft, L) <= word_cap:
        mid = L // 2
        all_words = list(words_of_length(sft, L))
        names = []
        for w in all_words:
            name = tuple(table[w[i : i + 2 * r + 1]] for i in range(L - 2 * r))
            names.append(name)
            centers[name].add(w[mid])
        for w, name in zip(all_words, names):
            if w[mid] not in centers[name]:
                consistent = False
            if len(centers[name]) != 1:
                unique = False
    return ImageLanguageReport(tuple(counts), tuple(by_len), depth, consistent, unique)

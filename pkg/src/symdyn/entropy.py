"""Exact entropy values in bits.

All entropies in this package are base-2 logarithms.  Finite values are
either exact rationals or exact log-forms log2(c)/n with integer c >= 1,
n >= 1; comparisons between the two are done by integer exponentiation,
never through floats.  Irrational entropies that cannot be pinned down
exactly (spectral radii) are reported as rational brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


def int_nthroot(x: int, n: int) -> int:
    """Floor of the n-th root of a nonnegative integer, exactly."""
    if x < 0 or n < 1:
        raise ValueError("int_nthroot requires x >= 0, n >= 1")
    if x in (0, 1) or n == 1:
        return x
    r = int(round(x ** (1.0 / n)))  # seed only; corrected below
    while r > 0 and r**n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def _log2_exact(c: int) -> int | None:
    """Exponent e with c == 2**e, or None if c is not a power of two."""
    if c >= 1 and c & (c - 1) == 0:
        return c.bit_length() - 1
    return None


@total_ordering
class EntropyValue:
    """An exact entropy: rational bits, log2(c)/n bits, or +infinity."""

    __slots__ = ("_kind", "_rat", "_c", "_n")

    def __init__(self, value: Fraction | int | str = 0):
        if isinstance(value, str):
            value = Fraction(value)
        self._kind = "rat"
        self._rat = Fraction(value)
        self._c = self._n = None

    @classmethod
    def infinity(cls) -> "EntropyValue":
        v = cls.__new__(cls)
        v._kind = "inf"
        v._rat = v._c = v._n = None
        return v

    @classmethod
    def log2_of(cls, c: int, n: int = 1) -> "EntropyValue":
        """The value (1/n) * log2(c), kept exact."""
        if c < 1 or n < 1:
            raise ValueError("log2_of requires c >= 1, n >= 1")
        e = _log2_exact(c)
        if e is not None:
            return cls(Fraction(e, n))
        v = cls.__new__(cls)
        v._kind = "log"
        v._rat = None
        v._c, v._n = c, n
        return v

    @property
    def is_infinite(self) -> bool:
        return self._kind == "inf"

    @property
    def is_rational(self) -> bool:
        return self._kind == "rat"

    def as_fraction(self) -> Fraction:
        if self._kind != "rat":
            raise ValueError(f"{self} is not an exact rational")
        return self._rat

    def approx(self) -> float:
        import math

        if self._kind == "inf":
            return math.inf
        if self._kind == "rat":
            return float(self._rat)
        return math.log2(self._c) / self._n

    # comparisons: rational p/q vs log2(c)/n  <=>  2**(p*n) vs c**q
    def _cmp(self, other: "EntropyValue") -> int:
        if self._kind == "inf" or other._kind == "inf":
            a = 1 if self._kind == "inf" else 0
            b = 1 if other._kind == "inf" else 0
            return a - b
        if self._kind == "rat" and other._kind == "rat":
            return (self._rat > other._rat) - (self._rat < other._rat)
        if self._kind == "log" and other._kind == "log":
            lhs = self._c ** other._n
            rhs = other._c ** self._n
            return (lhs > rhs) - (lhs < rhs)
        if self._kind == "rat":
            p, q = self._rat.numerator, self._rat.denominator
            if p < 0:
                return -1  # log form is always >= 0
            lhs = 2 ** (p * other._n)
            rhs = other._c ** q
            return (lhs > rhs) - (lhs < rhs)
        return -other._cmp(self)

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        return other is not None and self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        if self._kind == "rat":
            return hash(self._rat)
        if self._kind == "inf":
            return hash("entropy-inf")
        return hash(("entropy-log", self._c, self._n))

    def __add__(self, other) -> "EntropyValue":
        other = _coerce(other)
        if self._kind == "inf" or other._kind == "inf":
            return EntropyValue.infinity()
        if self._kind == "rat" and other._kind == "rat":
            return EntropyValue(self._rat + other._rat)
        if self._kind == "log" and other._kind == "log":
            # log2(c1)/n1 + log2(c2)/n2 = log2(c1^n2 * c2^n1) / (n1*n2)
            return EntropyValue.log2_of(
                self._c ** other._n * other._c ** self._n, self._n * other._n
            )
        rat, log = (self, other) if self._kind == "rat" else (other, self)
        p, q = rat._rat.numerator, rat._rat.denominator
        if p < 0:
            raise ValueError("cannot add a negative rational to a log form exactly")
        return EntropyValue.log2_of(2 ** (p * log._n) * log._c ** q, q * log._n)

    __radd__ = __add__

    def __mul__(self, other) -> "EntropyValue":
        """Scale by a nonnegative rational weight (harmonic averaging)."""
        w = Fraction(other)
        if w < 0:
            raise ValueError("entropy values scale by nonnegative weights only")
        if self._kind == "inf":
            return EntropyValue(0) if w == 0 else EntropyValue.infinity()
        if self._kind == "rat":
            return EntropyValue(self._rat * w)
        if w == 0:
            return EntropyValue(0)
        return EntropyValue.log2_of(self._c ** w.numerator, self._n * w.denominator)

    __rmul__ = __mul__

    def floor_two_pow(self) -> int:
        """floor(2**value) for a finite value, exactly."""
        if self._kind == "inf":
            raise ValueError("floor_two_pow of infinity")
        if self._kind == "rat":
            p, q = self._rat.numerator, self._rat.denominator
            if p < 0:
                return 0
            return int_nthroot(2**p, q)
        return int_nthroot(self._c, self._n)

    def render(self) -> str:
        if self._kind == "inf":
            return "inf"
        if self._kind == "rat":
            return f"{self._rat} ({self.approx():.6g})"
        return f"log2({self._c})/{self._n} ({self.approx():.6g})"

    def __repr__(self):
        return f"EntropyValue[{self.render()}]"


def _coerce(x) -> EntropyValue | None:
    if isinstance(x, EntropyValue):
        return x
    if isinstance(x, (int, Fraction)):
        return EntropyValue(x)
    return None


def max_entropy(*values: EntropyValue) -> EntropyValue:
    out = None
    for v in values:
        v = _coerce(v)
        if out is None or v > out:
            out = v
    if out is None:
        raise ValueError("max_entropy of nothing")
    return out


def optimal_alphabet_size(value: EntropyValue) -> int:
    """Smallest integer strictly greater than 2**value."""
    return value.floor_two_pow() + 1


@dataclass(frozen=True)
class EntropyBracket:
    """A certified enclosure lo <= h <= hi, in bits, with exact endpoints."""

    lo: Fraction
    hi: Fraction
    tolerance_met: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("bracket endpoints out of order")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: float | Fraction) -> bool:
        return float(self.lo) <= float(x) <= float(self.hi)

    def render(self) -> str:
        flag = "" if self.tolerance_met else " (tolerance not met)"
        return f"[{self.lo} ({float(self.lo):.6g}), {self.hi} ({float(self.hi):.6g})]{flag}"

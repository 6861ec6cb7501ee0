"""Exact nonnegative rationals, binary expansions and closed subintervals of [0, 1].

Values are plain :class:`fractions.Fraction` objects; the helpers here add the
nonnegativity checks, the dyadic bit extraction and the ``"num/den"`` wire
format used everywhere else in the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class DomainError(ValueError):
    """A value lies outside the domain an operation is defined on."""


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def rational(numerator: int, denominator: int = 1) -> Fraction:
    """Build a reduced nonnegative rational, rejecting negatives."""
    if denominator <= 0:
        raise DomainError(f"denominator must be positive, got {denominator}")
    if numerator < 0:
        raise DomainError(f"numerator must be nonnegative, got {numerator}")
    return Fraction(numerator, denominator)


def add(a: Fraction, b: Fraction) -> Fraction:
    return a + b


def compare(a: Fraction, b: Fraction) -> Ordering:
    if a < b:
        return Ordering.LESS
    if a > b:
        return Ordering.GREATER
    return Ordering.EQUAL


def bit_at(x: Fraction, n: int) -> int:
    """Return the ``n``-th bit (1-based) after the binary point of ``x``.

    Dyadic values use their terminating expansion, so ``bit_at(1/2, 2) == 0``.
    """
    if not 0 <= x < 1:
        raise DomainError(f"bit_at needs 0 <= x < 1, got {x}")
    if n < 1:
        raise DomainError(f"bit index must be >= 1, got {n}")
    return (x.numerator << n) // x.denominator & 1


def bits_of(x: Fraction, n: int) -> str:
    """First ``n`` bits of ``x`` as a '0'/'1' string."""
    if not 0 <= x < 1:
        raise DomainError(f"bits_of needs 0 <= x < 1, got {x}")
    if n == 0:
        return ""
    return format((x.numerator << n) // x.denominator, f"0{n}b")


def dyadic_value(bits: str) -> Fraction:
    """Value of the binary fraction ``0.b1 b2 ... bn``."""
    check_bitstring(bits)
    if not bits:
        return ZERO
    return Fraction(int(bits, 2), 1 << len(bits))


def check_bitstring(bits: str) -> str:
    if any(c not in "01" for c in bits):
        raise DomainError(f"not a bit string: {bits!r}")
    return bits


def to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into a nonnegative rational."""
    num, sep, den = text.strip().partition("/")
    try:
        value = rational(int(num), int(den) if sep else 1)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"not a rational: {text!r}") from None
    return value


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` inside ``[0, 1]``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= 1):
            raise DomainError(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self) -> list[str]:
        return [to_str(self.lo), to_str(self.hi)]

"""Diagonal reals, epsilon-coverings of listed reals, and the know-it-all real."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .enumeration import bitstring_at
from .machine import (DEFAULT_WIDTH, Kind, MachineConfig, Program, ResourceError,
                      decide_halting_exact, parse, program_from_bits, run)
from .rationals import DomainError, Interval, bit_at, to_str

STREAMS_VERSION = 1

DECIDED = "decided"
PROVISIONAL = "provisional"


class NotYetKnown:
    """Returned by a digit source that cannot produce a digit within its fuel."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOT_YET_KNOWN"


NOT_YET_KNOWN = NotYetKnown()


class LocalizationError(RuntimeError):
    """A listed real did not yield enough digits within the fuel given."""


class DigitSource:
    """A real in [0, 1] handed over one decimal digit at a time."""

    def digit(self, k: int, fuel: int) -> Union[int, NotYetKnown]:
        raise NotImplementedError

    def prefix(self, m: int, fuel: int) -> Optional[str]:
        digits = []
        for k in range(1, m + 1):
            d = self.digit(k, fuel)
            if d is NOT_YET_KNOWN:
                return None
            digits.append(str(d))
        return "".join(digits)


@dataclass(frozen=True)
class ExplicitDigits(DigitSource):
    """A terminating decimal ``0.value``; digits past the end are 0."""

    value: str

    def __post_init__(self):
        if not self.value.isdigit() and self.value != "":
            raise DomainError(f"not a digit string: {self.value!r}")

    def digit(self, k, fuel=0):
        return int(self.value[k - 1]) if k <= len(self.value) else 0

    def to_json(self):
        return {"kind": "digits", "value": self.value}


@dataclass(frozen=True)
class ConstantDigit(DigitSource):
    """The real ``0.ddd...``."""

    d: int

    def __post_init__(self):
        if not 0 <= self.d <= 9:
            raise DomainError(f"not a decimal digit: {self.d}")

    def digit(self, k, fuel=0):
        return self.d

    def to_json(self):
        return {"kind": "constant", "digit": self.d}


@dataclass(frozen=True)
class RuleDigits(DigitSource):
    """Digit ``k`` is ``rule(k)``; for streams defined by a formula."""

    rule: object

    def digit(self, k, fuel=0):
        return self.rule(k)


@dataclass(frozen=True)
class ProgramDigits(DigitSource):
    """The real whose digits a program prints, rerun from scratch per query.

    Once the program has halted its output is a terminating decimal and every
    later digit is 0.
    """

    program: Program

    def digit(self, k, fuel):
        outcome = run(self.program, MachineConfig.unbounded(fuel))
        if k <= len(outcome.output):
            return int(outcome.output[k - 1])
        if outcome.halted:
            return 0
        return NOT_YET_KNOWN

    def to_json(self):
        return {"kind": "program", "bits": self.program.bits}


def source_from_json(doc: dict) -> DigitSource:
    kind = doc.get("kind")
    if kind == "digits":
        return ExplicitDigits(str(doc["value"]))
    if kind == "constant":
        return ConstantDigit(int(doc["digit"]))
    if kind == "program":
        return ProgramDigits(program_from_bits(doc["bits"]))
    raise ValueError(f"unknown stream kind {kind!r}")


def load_streams(path) -> list[DigitSource]:
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        if doc.get("version") != STREAMS_VERSION:
            raise ValueError(f"unsupported streams version {doc.get('version')!r}")
        doc = doc["streams"]
    return [source_from_json(item) for item in doc]


@dataclass(frozen=True)
class DiagonalResult:
    digits: str
    status: tuple[str, ...]

    @property
    def provisional(self) -> list[int]:
        return [k for k, st in enumerate(self.status, start=1) if st == PROVISIONAL]

    def to_json(self) -> dict:
        return {"digits": self.digits, "status": list(self.status), "provisional": self.provisional}


def _flip(d) -> str:
    return "4" if d == 3 else "3"


def cantor_diagonal(streams: Sequence[DigitSource], n: int, fuel: int = 0) -> DiagonalResult:
    """Digit ``k`` is 4 where stream ``k`` has a 3 at position ``k``, else 3.

    A stream that cannot answer within ``fuel`` gets a provisional 3.
    """
    if len(streams) < n:
        raise ValueError(f"need {n} streams, got {len(streams)}")
    digits, status = [], []
    for k in range(1, n + 1):
        d = streams[k - 1].digit(k, fuel)
        digits.append(_flip(d))
        status.append(PROVISIONAL if d is NOT_YET_KNOWN else DECIDED)
    return DiagonalResult("".join(digits), tuple(status))


def turing_diagonal(n: int, fuel: int, oracle: Optional[str] = None,
                    width: int = DEFAULT_WIDTH) -> DiagonalResult:
    """Diagonalize over every bit string, read as a program.

    String ``k`` that is not a valid program, or whose program never prints a
    ``k``-th digit, or prints something other than 3 there, gives a 3; a 3
    gives a 4. Without an oracle a program still running when its fuel is
    spent leaves a provisional 3. With ``oracle="bounded"`` programs run on a
    bounded tape whose halting is settled by cycle detection.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if oracle not in (None, "bounded"):
        raise ValueError(f"unknown oracle {oracle!r}")
    digits, status = [], []
    for k in range(1, n + 1):
        parsed = parse(bitstring_at(k))
        if not isinstance(parsed, Program):
            digits.append("3")
            status.append(DECIDED)
            continue
        outcome = _diagonal_run(parsed, fuel, oracle, width)
        d = outcome.digit(k)
        if d is not None:
            digits.append(_flip(d))
            status.append(DECIDED)
        else:
            digits.append("3")
            status.append(DECIDED if outcome.digit_never_emitted(k) else PROVISIONAL)
    return DiagonalResult("".join(digits), tuple(status))


def _diagonal_run(program, fuel, oracle, width):
    if oracle is None:
        return run(program, MachineConfig.unbounded(fuel))
    outcome = run(program, MachineConfig.bounded_tape(width, fuel=fuel))
    if outcome.kind is Kind.OUT_OF_FUEL:
        try:
            outcome = decide_halting_exact(program, MachineConfig.bounded_tape(width))
        except ResourceError:
            pass
    return outcome


@dataclass(frozen=True)
class CoverResult:
    intervals: tuple[Interval, ...]
    total_length: Fraction
    prefixes: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "intervals": [iv.to_json() for iv in self.intervals],
            "prefixes": list(self.prefixes),
            "total_length": to_str(self.total_length),
        }


def prefix_length(epsilon: Fraction, i: int) -> int:
    """Least ``m`` with ``10**-m <= epsilon / 2**(i+1)``."""
    bound = epsilon / (1 << (i + 1))
    m = 0
    while Fraction(1, 10 ** m) > bound:
        m += 1
    return m


def truncation_interval(prefix: str) -> Interval:
    """Every real whose decimal expansion starts with ``prefix``."""
    m = len(prefix)
    lo = Fraction(int(prefix or "0"), 10 ** m)
    return Interval(lo, lo + Fraction(1, 10 ** m))


def cover(epsilon: Fraction, reals: Sequence[DigitSource], n: int, fuel: int = 0) -> CoverResult:
    """Cover the first ``n`` listed reals with intervals of length ``epsilon / 2**i``.

    Interval ``i`` starts at the real's decimal truncation to ``m_i`` digits,
    where ``10**-m_i <= epsilon / 2**(i+1)``, so it contains the whole
    truncation interval. When that would run past 1 it is slid left to end at 1.
    """
    if not 0 < epsilon <= 1:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    if len(reals) < n:
        raise ValueError(f"need {n} reals, got {len(reals)}")
    intervals, prefixes = [], []
    for i in range(1, n + 1):
        m = prefix_length(epsilon, i)
        prefix = reals[i - 1].prefix(m, fuel)
        if prefix is None:
            raise LocalizationError(f"real {i} gave fewer than {m} digits within fuel {fuel}")
        length = epsilon / (1 << i)
        lo = min(truncation_interval(prefix).lo, 1 - length)
        intervals.append(Interval(lo, lo + length))
        prefixes.append(prefix)
    total = sum((iv.length for iv in intervals), Fraction(0))
    return CoverResult(tuple(intervals), total, tuple(prefixes))


def borel_encode(answers: Sequence[int]) -> Fraction:
    """Pack yes/no answers (1/0) into the binary digits of a rational."""
    value = Fraction(0)
    for i, a in enumerate(answers, start=1):
        if a not in (0, 1):
            raise DomainError(f"answers must be 0 or 1, got {a!r}")
        value += Fraction(a, 1 << i)
    return value


def borel_answer(x: Fraction, n: int) -> int:
    """Answer to question ``n``: the ``n``-th binary digit of ``x``."""
    return bit_at(x, n)

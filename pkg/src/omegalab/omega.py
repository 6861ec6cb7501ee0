"""Exact bounds on the halting probability and two ways of deciding halting.

``omega_bounds`` sandwiches the halting probability of a dovetail session and
certifies as many leading bits as the sandwich allows. ``decode_halting_with_prefix``
settles halting for every program of at most ``n`` bits given the first ``n``
bits of a finite universe's halting probability, and ``decide_via_theorem_stream``
searches an enumerated list of sound halting verdicts.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .dovetail import HALTED, NEVER_HALTS, Session, stage_fuel
from .enumeration import iter_valid_programs, tail_mass_bound
from .machine import (DEFAULT_WIDTH, Kind, MachineConfig, Program, ResourceError,
                      decide_halting_exact, program_from_bits, run)
from . import rationals
from .rationals import ONE, ZERO, dyadic_value, to_str

UNIVERSE_VERSION = 1
DEFAULT_CERTIFY_BITS = 64


class Verdict(str, enum.Enum):
    HALTS = "halts"
    NEVER_HALTS = "never-halts"
    PREFIX_INSUFFICIENT = "prefix-insufficient"
    BUDGET_EXHAUSTED = "budget-exhausted"


class InconsistentUniverse(ValueError):
    """The halting mass found contradicts the claimed bits of omega."""


class ContradictionError(ValueError):
    """A theorem stream asserted both verdicts about one program."""


class DecodeBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OmegaBounds:
    lower: Fraction
    undecided: Fraction
    tail_bound: Fraction
    upper: Fraction
    certified_bits: str
    max_tokens: int
    stage: int

    def to_json(self) -> dict:
        return {
            "lower": to_str(self.lower),
            "undecided": to_str(self.undecided),
            "tail_bound": to_str(self.tail_bound),
            "upper": to_str(self.upper),
            "certified_bits": self.certified_bits,
            "max_tokens": self.max_tokens,
            "stage": self.stage,
        }


def certify_bits(lower: Fraction, upper: Fraction, max_bits: int = DEFAULT_CERTIFY_BITS) -> str:
    """Longest prefix ``b`` (up to ``max_bits``) with ``value(b) <= lower`` and
    ``upper < value(b) + 2**-len(b)``.

    Every real in ``[lower, upper]`` then starts with ``b``; the bin is closed
    on the left and open on the right, matching the terminating expansion of a
    dyadic value.
    """
    if not lower <= upper:
        raise ValueError("lower bound exceeds upper bound")
    bits = ""
    for n in range(1, max_bits + 1):
        if lower >= 1:
            break
        cell = (lower.numerator << n) // lower.denominator
        if not upper < Fraction(cell + 1, 1 << n):
            break
        bits = format(cell, f"0{n}b")
    return bits


def omega_bounds(session: Session, max_bits: int = DEFAULT_CERTIFY_BITS) -> OmegaBounds:
    """Sandwich the halting probability of everything ``session`` walks.

    The upper bound adds the mass of every enumerated program not yet decided
    and a bound on the mass of programs deeper than the enumeration reached.
    """
    depth = session.depth
    undecided = ZERO
    tail = ZERO
    for index, prog in enumerate(session.programs, start=1):
        if len(prog) > depth:
            if session.config.universe is not None:
                tail += Fraction(1, 1 << prog.bit_length)
            continue
        if session.status(index) not in (HALTED, NEVER_HALTS):
            undecided += Fraction(1, 1 << prog.bit_length)
    if session.config.universe is None:
        tail = tail_mass_bound(depth)
    upper = min(session.mass + undecided + tail, ONE)
    return OmegaBounds(
        lower=session.mass,
        undecided=undecided,
        tail_bound=tail,
        upper=upper,
        certified_bits=certify_bits(session.mass, upper, max_bits),
        max_tokens=session.config.max_tokens,
        stage=session.stage,
    )


@dataclass(frozen=True)
class UniverseMember:
    program: Program
    halts: bool
    output: str = ""


@dataclass(frozen=True)
class Universe:
    """A finite prefix-free program set with known halting behaviour."""

    members: tuple[UniverseMember, ...]
    tape_width: Optional[int] = DEFAULT_WIDTH

    def __post_init__(self):
        bits = [m.program.bits for m in self.members]
        if len(set(bits)) != len(bits):
            raise ValueError("universe programs must be distinct")
        ordered = sorted(bits)
        for a, b in zip(ordered, ordered[1:]):
            if b.startswith(a):
                raise ValueError(f"universe is not prefix-free: {a} prefixes {b}")

    @property
    def programs(self) -> list[Program]:
        return [m.program for m in self.members]

    @property
    def omega(self) -> Fraction:
        return sum((Fraction(1, 1 << m.program.bit_length) for m in self.members if m.halts), ZERO)

    def ground_truth(self, program: Program) -> bool:
        for m in self.members:
            if m.program == program:
                return m.halts
        raise KeyError(program.bits)

    @classmethod
    def from_oracle(cls, programs: Iterable[Program], width: int = DEFAULT_WIDTH) -> "Universe":
        cfg = MachineConfig.bounded_tape(width)
        members = []
        for prog in programs:
            outcome = decide_halting_exact(prog, cfg)
            members.append(UniverseMember(prog, outcome.halted,
                                          outcome.output if outcome.halted else ""))
        return cls(tuple(members), width)

    def to_json(self) -> dict:
        return {
            "version": UNIVERSE_VERSION,
            "tape_width": self.tape_width,
            "programs": [{"bits": m.program.bits, "halts": m.halts, "output": m.output}
                         for m in self.members],
        }

    @classmethod
    def from_json(cls, doc) -> "Universe":
        # bare member lists are accepted as well as the versioned document
        if isinstance(doc, list):
            doc = {"version": UNIVERSE_VERSION, "programs": doc}
        if doc.get("version") != UNIVERSE_VERSION:
            raise ValueError(f"unsupported universe version {doc.get('version')!r}")
        members = tuple(
            UniverseMember(program_from_bits(m["bits"]), bool(m["halts"]), m.get("output", ""))
            for m in doc["programs"]
        )
        return cls(members, doc.get("tape_width", DEFAULT_WIDTH))

    @classmethod
    def load(cls, path) -> "Universe":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def full_universe(max_tokens: int, width: int = DEFAULT_WIDTH) -> Universe:
    """Every valid program of at most ``max_tokens`` tokens, classified by the oracle."""
    return Universe.from_oracle((p for _, p in iter_valid_programs(max_tokens)), width)


def decode_halting_with_prefix(prefix: str, universe: Universe, query: Program,
                               max_stage: int = 16) -> Verdict:
    """Decide whether ``query`` halts from the first ``len(prefix)`` bits of omega.

    Members are dovetailed (stage ``s`` runs each with fuel ``4**s``) until the
    halting mass found reaches ``value(prefix)``. Any member of at most ``n``
    bits still running at that point never halts: its halting would push omega
    to at least ``value(prefix) + 2**-n``. Ground truth is never read.
    """
    rationals.check_bitstring(prefix)
    if not prefix:
        raise ValueError("omega prefix must have at least one bit")
    n = len(prefix)
    if query not in universe.programs:
        raise ValueError("query program is not a member of the universe")
    if query.bit_length > n:
        return Verdict.PREFIX_INSUFFICIENT
    target = dyadic_value(prefix)
    ceiling = target + Fraction(1, 1 << n)
    found = ZERO
    halted: set[Program] = set()
    programs = universe.programs
    stage = 0
    while found < target:
        stage += 1
        if stage > max_stage:
            raise DecodeBudgetExceeded(
                f"halting mass {found} still below {target} after {max_stage} stages")
        cfg = MachineConfig(width=universe.tape_width, fuel=stage_fuel(stage))
        for prog in programs:
            if prog in halted:
                continue
            if run(prog, cfg).kind is Kind.HALTED:
                halted.add(prog)
                found += Fraction(1, 1 << prog.bit_length)
                if found >= ceiling:
                    raise InconsistentUniverse(
                        f"halting mass {found} reaches {ceiling}; prefix {prefix} is wrong")
                if found >= target:
                    break
    return Verdict.HALTS if query in halted else Verdict.NEVER_HALTS


@dataclass(frozen=True)
class TheoremStatement:
    program: Program
    verdict: Verdict


def oracle_theorem_stream(max_tokens: Optional[int] = None,
                          width: int = DEFAULT_WIDTH) -> Iterator[TheoremStatement]:
    """Sound halting verdicts for valid programs in canonical order.

    Programs whose configuration graph is too large for the oracle's budget
    are skipped rather than guessed.
    """
    cfg = MachineConfig.bounded_tape(width)
    for _, prog in iter_valid_programs(max_tokens):
        try:
            outcome = decide_halting_exact(prog, cfg)
        except ResourceError:
            continue
        yield TheoremStatement(prog, Verdict.HALTS if outcome.halted else Verdict.NEVER_HALTS)


def decide_via_theorem_stream(stream: Iterable[TheoremStatement], query: Program,
                              budget: int) -> Verdict:
    """Return the first verdict the stream states about ``query``, looking at
    no more than ``budget`` statements."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    seen: dict[Program, Verdict] = {}
    for count, stmt in enumerate(stream, start=1):
        if count > budget:
            break
        prior = seen.setdefault(stmt.program, stmt.verdict)
        if prior is not stmt.verdict:
            raise ContradictionError(f"stream asserts both verdicts for {stmt.program}")
        if stmt.program == query:
            return stmt.verdict
    return Verdict.BUDGET_EXHAUSTED


def exact_bits(universe: Universe, n: int) -> str:
    """First ``n`` bits of the universe's exact halting probability."""
    return rationals.bits_of(universe.omega, n)

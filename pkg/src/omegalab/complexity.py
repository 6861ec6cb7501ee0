"""Upper bounds on program-size complexity of decimal digit strings.

The quantity computed is only ever an upper bound: the shortest program found
so far. Nothing here claims a lower bound.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .enumeration import programs_of_length
from .machine import Kind, MachineConfig, Program, Token, run

EXHAUSTIVE = "exhaustive-minimal"
LITERAL = "constructive-literal"


@dataclass(frozen=True)
class ComplexityEstimate:
    target: str
    bound_bits: int
    witness: Program
    method: str
    search_exhausted_through: int

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "bound_bits": self.bound_bits,
            "witness": self.witness.mnemonics,
            "witness_bits": self.witness.bits,
            "method": self.method,
            "search_exhausted_through": self.search_exhausted_through,
        }


def _check_target(target: str) -> str:
    if target and not target.isdigit():
        raise ValueError(f"target must be a decimal digit string, got {target!r}")
    return target


def literal_program(target: str) -> Program:
    """Straight-line program printing ``target``: for each digit, bump the cell
    up to it (mod 10) and print."""
    _check_target(target)
    tokens: list[Token] = []
    cell = 0
    for ch in target:
        d = int(ch)
        bumps = (d - cell) % 10
        tokens.extend([Token.INC] * bumps)
        cell += bumps
        tokens.append(Token.OUT)
    tokens.append(Token.END)
    return Program(tuple(tokens))


def literal_bound(target: str) -> int:
    """Bits of the worst-case literal program: ``3 * (10 * len + 1)``."""
    return 3 * (10 * len(target) + 1)


def _produces(program: Program, target: str, fuel: int) -> bool:
    outcome = run(program, MachineConfig.unbounded(fuel))
    return outcome.kind is Kind.HALTED and outcome.output == target


def _search_length(args) -> Optional[Program]:
    token_length, target, fuel = args
    for prog in programs_of_length(token_length):
        if _produces(prog, target, fuel):
            return prog
    return None


def h_upper(target: str, max_tokens: int, fuel: int, jobs: int = 1) -> ComplexityEstimate:
    """Smallest program of at most ``max_tokens`` tokens that prints ``target`` and halts.

    Programs are tried in canonical order, so among equally short witnesses
    the canonical-first one wins. Falls back to :func:`literal_program` when
    the search finds nothing. With ``jobs > 1`` each token length is searched
    in its own process; the shortest length with a witness still wins.
    """
    _check_target(target)
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    tasks = [(n, target, fuel) for n in range(1, max_tokens + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = list(pool.map(_search_length, tasks))
    else:
        found = []
        for task in tasks:
            found.append(_search_length(task))
            if found[-1] is not None:
                break
    for prog in found:
        if prog is not None:
            return ComplexityEstimate(target, prog.bit_length, prog, EXHAUSTIVE, len(prog) - 1)
    lit = literal_program(target)
    return ComplexityEstimate(target, lit.bit_length, lit, LITERAL, max_tokens)


@dataclass(frozen=True)
class ProbeReport:
    target: str
    literal_bits: int
    shortest_found_bits: Optional[int]
    witness: Optional[Program]
    exhausted_through: int

    @property
    def consistent_with_incompressibility(self) -> bool:
        """No program shorter than the literal one turned up inside the horizon.

        This is evidence only; the search horizon is finite.
        """
        return self.shortest_found_bits is None or self.shortest_found_bits >= self.literal_bits

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "literal_bits": self.literal_bits,
            "shortest_found_bits": self.shortest_found_bits,
            "witness": self.witness.mnemonics if self.witness else None,
            "exhausted_through": self.exhausted_through,
            "consistent_with_incompressibility": self.consistent_with_incompressibility,
        }


def incompressibility_probe(bits: str, max_tokens: int, fuel: int, jobs: int = 1) -> ProbeReport:
    """Search for short programs printing a 0/1 digit string, e.g. leading bits of omega."""
    if any(c not in "01" for c in bits):
        raise ValueError(f"probe target must be a 0/1 string, got {bits!r}")
    est = h_upper(bits, max_tokens, fuel, jobs=jobs)
    literal_bits = literal_program(bits).bit_length
    if est.method == EXHAUSTIVE:
        return ProbeReport(bits, literal_bits, est.bound_bits, est.witness,
                           est.search_exhausted_through)
    return ProbeReport(bits, literal_bits, None, None, max_tokens)

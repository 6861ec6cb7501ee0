"""Language L: an eight-instruction tape machine with self-delimiting encodings.

Every instruction is a 3-bit code and a program is valid only when it ends in
its one and only ``END``, so no valid program is a proper prefix of another.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

from .rationals import check_bitstring

CELL_MODULUS = 256
DEFAULT_WIDTH = 16
DEFAULT_VISIT_BUDGET = 2_000_000


class Token(enum.IntEnum):
    END = 0b000
    OUT = 0b001
    INC = 0b010
    DEC = 0b011
    RIGHT = 0b100
    LEFT = 0b101
    LOOP_OPEN = 0b110
    LOOP_CLOSE = 0b111

    @property
    def code(self) -> str:
        return format(self.value, "03b")


NEUTRAL = (Token.OUT, Token.INC, Token.DEC, Token.RIGHT, Token.LEFT)


class InvalidReason(str, enum.Enum):
    NOT_MULTIPLE_OF_3 = "not-multiple-of-3"
    NO_END = "no-end"
    EARLY_END = "early-end"
    UNBALANCED_LOOP = "unbalanced-loop"


class ParseError(ValueError):
    def __init__(self, reason: InvalidReason, source: str = ""):
        super().__init__(reason.value)
        self.reason = reason
        self.source = source


class ResourceError(RuntimeError):
    """A run or search exceeded its configured memory or step budget."""


@dataclass(frozen=True)
class Program:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        reason = _check_tokens(self.tokens)
        if reason is not None:
            raise ParseError(reason)

    @property
    def bit_length(self) -> int:
        return 3 * len(self.tokens)

    @property
    def bits(self) -> str:
        return "".join(t.code for t in self.tokens)

    @property
    def mnemonics(self) -> str:
        return " ".join(t.name for t in self.tokens)

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        return self.mnemonics

    @cached_property
    def jumps(self) -> dict[int, int]:
        """Map each bracket position to its partner."""
        table, stack = {}, []
        for i, tok in enumerate(self.tokens):
            if tok is Token.LOOP_OPEN:
                stack.append(i)
            elif tok is Token.LOOP_CLOSE:
                j = stack.pop()
                table[i], table[j] = j, i
        return table


def _check_tokens(tokens) -> Optional[InvalidReason]:
    ends = [i for i, t in enumerate(tokens) if t is Token.END]
    if not ends:
        return InvalidReason.NO_END
    if ends != [len(tokens) - 1]:
        return InvalidReason.EARLY_END
    depth = 0
    for tok in tokens:
        if tok is Token.LOOP_OPEN:
            depth += 1
        elif tok is Token.LOOP_CLOSE:
            depth -= 1
            if depth < 0:
                return InvalidReason.UNBALANCED_LOOP
    if depth:
        return InvalidReason.UNBALANCED_LOOP
    return None


def decode_tokens(bits: str) -> tuple[Token, ...]:
    """Split a bit string into tokens without checking program validity."""
    check_bitstring(bits)
    if len(bits) % 3:
        raise ParseError(InvalidReason.NOT_MULTIPLE_OF_3, bits)
    return tuple(Token(int(bits[i:i + 3], 2)) for i in range(0, len(bits), 3))


def parse(bits: str) -> Union[Program, InvalidReason]:
    """Decode ``bits`` into a program, or say why it is not one."""
    try:
        tokens = decode_tokens(bits)
    except ParseError as exc:
        return exc.reason
    reason = _check_tokens(tokens)
    if reason is not None:
        return reason
    return Program(tokens)


def parse_tokens(text: str) -> Program:
    """Parse mnemonics such as ``"INC INC OUT END"``; raises on invalid input."""
    try:
        tokens = tuple(Token[word.upper()] for word in text.split())
    except KeyError as exc:
        raise ValueError(f"unknown mnemonic {exc.args[0]!r}") from None
    return Program(tokens)


def program_from_bits(bits: str) -> Program:
    """Like :func:`parse` but raises :class:`ParseError` on invalid input."""
    result = parse(bits)
    if isinstance(result, InvalidReason):
        raise ParseError(result, bits)
    return result


@dataclass(frozen=True)
class MachineConfig:
    """``width=None`` is the two-way infinite tape; otherwise a circular tape."""

    width: Optional[int] = None
    fuel: Optional[int] = None  # None = unlimited, allowed only on a bounded tape
    visit_budget: int = DEFAULT_VISIT_BUDGET

    def __post_init__(self):
        if self.width is not None and self.width < 1:
            raise ValueError("bounded tape width must be >= 1")
        if self.fuel is not None and self.fuel < 0:
            raise ValueError("fuel must be nonnegative")
        if self.fuel is None and self.width is None:
            raise ValueError("infinite fuel requires a bounded tape")

    @property
    def bounded(self) -> bool:
        return self.width is not None

    @classmethod
    def unbounded(cls, fuel: int) -> "MachineConfig":
        return cls(width=None, fuel=fuel)

    @classmethod
    def bounded_tape(cls, width: int = DEFAULT_WIDTH, fuel: Optional[int] = None,
                     visit_budget: int = DEFAULT_VISIT_BUDGET) -> "MachineConfig":
        return cls(width=width, fuel=fuel, visit_budget=visit_budget)


class Kind(str, enum.Enum):
    HALTED = "halted"
    OUT_OF_FUEL = "out-of-fuel"
    NEVER_HALTS = "never-halts"


@dataclass(frozen=True)
class RunOutcome:
    kind: Kind
    output: str
    steps: int
    # step at which the repeated configuration was first seen (NEVER_HALTS only)
    cycle_start: Optional[int] = None
    cycle_step: Optional[int] = None
    # output length when the repeated configuration was first seen
    cycle_output_start: Optional[int] = None
    head_range: tuple[int, int] = field(default=(0, 0), compare=False)

    @property
    def halted(self) -> bool:
        return self.kind is Kind.HALTED

    def digit(self, k: int) -> Optional[int]:
        """The k-th output digit if this outcome determines it, else None.

        For a cycling run the output repeats the digits emitted around the
        cycle forever, so any position is determined once the cycle is known.
        """
        if k <= len(self.output):
            return int(self.output[k - 1])
        if self.kind is Kind.NEVER_HALTS:
            period = self.output[self.cycle_output_start:]
            if period:
                offset = (k - 1 - self.cycle_output_start) % len(period)
                return int(period[offset])
        return None

    def digit_never_emitted(self, k: int) -> bool:
        if k <= len(self.output):
            return False
        if self.kind is Kind.HALTED:
            return True
        return self.kind is Kind.NEVER_HALTS and len(self.output) == self.cycle_output_start

    def to_json(self) -> dict:
        doc = {"kind": self.kind.value, "output": self.output, "steps": self.steps}
        if self.cycle_step is not None:
            doc["cycle_step"] = self.cycle_step
        return doc


def run(program: Program, cfg: MachineConfig) -> RunOutcome:
    """Execute ``program`` until it halts or its fuel runs out."""
    if cfg.fuel is None:
        raise ValueError("run needs finite fuel; use decide_halting_exact for unlimited runs")
    return _execute(program, cfg, detect_cycles=False)


def decide_halting_exact(program: Program, cfg: Optional[MachineConfig] = None) -> RunOutcome:
    """Settle halting on a bounded tape by detecting a repeated configuration.

    The configuration space of a bounded machine is finite, so with unlimited
    fuel this always returns HALTED or NEVER_HALTS. Raises :class:`ResourceError`
    once more than ``cfg.visit_budget`` configurations have been recorded.
    """
    cfg = cfg or MachineConfig.bounded_tape()
    if not cfg.bounded:
        raise ValueError("exact halting decision needs a bounded tape")
    return _execute(program, cfg, detect_cycles=True)


def _execute(program: Program, cfg: MachineConfig, detect_cycles: bool) -> RunOutcome:
    tokens = program.tokens
    jumps = program.jumps
    width = cfg.width
    fuel = cfg.fuel
    tape: Union[bytearray, dict] = bytearray(width) if width else {}
    pc = head = steps = 0
    lo = hi = 0
    out: list[str] = []
    seen: dict = {}

    while True:
        if fuel is not None and steps >= fuel:
            return RunOutcome(Kind.OUT_OF_FUEL, "".join(out), steps, head_range=(lo, hi))
        tok = tokens[pc]
        if tok is Token.END:
            steps += 1
            return RunOutcome(Kind.HALTED, "".join(out), steps, head_range=(lo, hi))
        if detect_cycles:
            key = (pc, head, bytes(tape))
            first = seen.get(key)
            if first is not None:
                return RunOutcome(Kind.NEVER_HALTS, "".join(out), steps,
                                  cycle_start=first[0], cycle_step=steps,
                                  cycle_output_start=first[1], head_range=(lo, hi))
            if len(seen) >= cfg.visit_budget:
                raise ResourceError(f"visited-set budget {cfg.visit_budget} exceeded")
            seen[key] = (steps, len(out))
        steps += 1
        if tok is Token.INC:
            tape[head] = (tape[head] if width else tape.get(head, 0)) + 1 & 0xFF
        elif tok is Token.DEC:
            tape[head] = (tape[head] if width else tape.get(head, 0)) - 1 & 0xFF
        elif tok is Token.RIGHT:
            head += 1
            if width:
                head %= width
            elif head > hi:
                hi = head
        elif tok is Token.LEFT:
            head -= 1
            if width:
                head %= width
            elif head < lo:
                lo = head
        elif tok is Token.OUT:
            out.append(str((tape[head] if width else tape.get(head, 0)) % 10))
        else:
            cell = tape[head] if width else tape.get(head, 0)
            if tok is Token.LOOP_OPEN:
                if cell == 0:
                    pc = jumps[pc]
            elif cell != 0:
                pc = jumps[pc]
        pc += 1

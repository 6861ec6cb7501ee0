"""Size-then-lexicographic enumeration of bit strings and of valid programs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .machine import NEUTRAL, Program, Token, parse
from .rationals import check_bitstring

# Token order by opcode, so lexicographic order on bits equals order on tokens.
_BODY_TOKENS = tuple(t for t in Token if t is not Token.END)


@dataclass(frozen=True)
class LengthCensus:
    token_length: int
    valid_count: int

    @property
    def mass(self) -> Fraction:
        return Fraction(self.valid_count, 8 ** self.token_length)


def bitstring_index(bits: str) -> int:
    """1-based position of ``bits`` in the canonical enumeration (non-empty strings)."""
    check_bitstring(bits)
    if not bits:
        raise ValueError("the empty string is not enumerated")
    n = len(bits)
    return (1 << n) - 1 + int(bits, 2)


def bitstring_at(index: int) -> str:
    if index < 1:
        raise ValueError("enumeration indices start at 1")
    n = (index + 1).bit_length() - 1
    return format(index + 1 - (1 << n), f"0{n}b")


def bitstrings_canonical(from_index: int, count: int) -> list[str]:
    """``count`` bit strings starting at ``from_index``: "0", "1", "00", "01", ..."""
    return [bitstring_at(i) for i in range(from_index, from_index + count)]


def iter_bitstrings(max_length: int) -> Iterator[str]:
    for n in range(1, max_length + 1):
        for v in range(1 << n):
            yield format(v, f"0{n}b")


def programs_of_length(token_length: int) -> Iterator[Program]:
    """Valid programs with exactly ``token_length`` tokens, in canonical order.

    Generates balanced bodies directly rather than filtering all 8**n strings.
    """
    if token_length < 1:
        return
    body_len = token_length - 1

    def bodies(prefix: list, depth: int) -> Iterator[tuple]:
        remaining = body_len - len(prefix)
        if remaining == 0:
            if depth == 0:
                yield tuple(prefix)
            return
        for tok in _BODY_TOKENS:
            if tok is Token.LOOP_OPEN:
                if depth + 1 > remaining - 1:
                    continue
                new_depth = depth + 1
            elif tok is Token.LOOP_CLOSE:
                if depth == 0:
                    continue
                new_depth = depth - 1
            else:
                if depth > remaining - 1:
                    continue
                new_depth = depth
            prefix.append(tok)
            yield from bodies(prefix, new_depth)
            prefix.pop()

    for body in bodies([], 0):
        yield Program(body + (Token.END,))


def iter_valid_programs(max_tokens: int = None) -> Iterator[tuple[int, Program]]:
    """``(index, program)`` pairs in canonical order; endless if ``max_tokens`` is None."""
    index = 0
    lengths = itertools.count(1) if max_tokens is None else range(1, max_tokens + 1)
    for n in lengths:
        for prog in programs_of_length(n):
            index += 1
            yield index, prog


def valid_programs_canonical(from_index: int, count: int) -> list[tuple[int, Program]]:
    if from_index < 1:
        raise ValueError("enumeration indices start at 1")
    # skip whole lengths using the census instead of generating them
    skipped, n = 0, 1
    while skipped + count_valid(n).valid_count < from_index:
        skipped += count_valid(n).valid_count
        n += 1
    result = []
    index = skipped
    for length in itertools.count(n):
        for prog in programs_of_length(length):
            index += 1
            if index >= from_index:
                result.append((index, prog))
                if len(result) == count:
                    return result
    return result


def program_index(program: Program) -> int:
    """Canonical 1-based index of a valid program."""
    n = len(program)
    before = sum(count_valid(i).valid_count for i in range(1, n))
    for offset, prog in enumerate(programs_of_length(n), start=1):
        if prog == program:
            return before + offset
    raise AssertionError("valid program missing from its own length class")


@lru_cache(maxsize=None)
def count_valid(token_length: int) -> LengthCensus:
    """Exact number of valid programs with ``token_length`` tokens.

    Counts balanced bodies of length ``token_length - 1`` over 5 neutral tokens
    and a bracket pair by dynamic programming on nesting depth.
    """
    if token_length < 1:
        raise ValueError("token_length must be >= 1")
    ways = {0: 1}
    for _ in range(token_length - 1):
        nxt: dict[int, int] = {}
        for depth, w in ways.items():
            nxt[depth] = nxt.get(depth, 0) + w * len(NEUTRAL)
            nxt[depth + 1] = nxt.get(depth + 1, 0) + w
            if depth:
                nxt[depth - 1] = nxt.get(depth - 1, 0) + w
        ways = nxt
    return LengthCensus(token_length, ways.get(0, 0))


def count_valid_brute_force(token_length: int) -> int:
    """Reference count: parse every string of ``3 * token_length`` bits."""
    n = 3 * token_length
    return sum(isinstance(parse(format(v, f"0{n}b")), Program) for v in range(1 << n))


def tail_mass_bound(token_length: int) -> Fraction:
    """Upper bound ``(7/8)**t`` on the mass of all valid programs longer than ``t`` tokens.

    A program of ``s`` tokens has at most ``7**(s-1)`` choices before its END,
    and ``sum_{s>t} 7**(s-1) / 8**s == (7/8)**t``.
    """
    if token_length < 0:
        raise ValueError("token_length must be >= 0")
    return Fraction(7, 8) ** token_length

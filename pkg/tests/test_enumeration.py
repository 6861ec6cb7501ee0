from fractions import Fraction

import pytest

from omegalab.enumeration import (bitstring_at, bitstring_index, bitstrings_canonical,
                                  count_valid, count_valid_brute_force, iter_valid_programs,
                                  program_index, programs_of_length, tail_mass_bound,
                                  valid_programs_canonical)
from omegalab.machine import NEUTRAL, Program, Token, parse


def test_bitstrings_canonical():
    assert bitstrings_canonical(1, 3) == ["0", "1", "00"]
    assert bitstrings_canonical(7, 2) == ["000", "001"]
    assert bitstring_index("000") == 7


def test_bitstring_index_round_trip():
    for i in range(1, 2000):
        assert bitstring_index(bitstring_at(i)) == i


def test_first_valid_programs():
    progs = valid_programs_canonical(1, 6)
    assert progs[0] == (1, Program((Token.END,)))
    assert [p.tokens for _, p in progs[1:]] == [(t, Token.END) for t in NEUTRAL]


def test_valid_programs_match_parse_filter():
    # brute force: filter all strings of 3..12 bits through the parser
    expected = [p for n in range(1, 5) for v in range(8 ** n)
                if isinstance(p := parse(format(v, f"0{3 * n}b")), Program)]
    assert [p for _, p in iter_valid_programs(4)] == expected


def test_three_token_census():
    progs = list(programs_of_length(3))
    assert len(progs) == 26
    assert Program((Token.LOOP_OPEN, Token.LOOP_CLOSE, Token.END)) in progs


@pytest.mark.parametrize("n, count, mass", [
    (1, 1, Fraction(1, 8)),
    (2, 5, Fraction(5, 64)),
    (4, 140, Fraction(140, 4096)),
])
def test_count_valid(n, count, mass):
    census = count_valid(n)
    assert census.valid_count == count and census.mass == mass


def test_dp_matches_brute_force():
    for n in range(1, 7):
        assert count_valid(n).valid_count == count_valid_brute_force(n)


def test_generator_matches_dp():
    for n in range(1, 8):
        assert sum(1 for _ in programs_of_length(n)) == count_valid(n).valid_count


def test_enumeration_is_a_bijection():
    seen = set()
    for k, prog in iter_valid_programs(5):
        assert prog not in seen
        seen.add(prog)
        if k % 37 == 0 or k < 40:
            assert program_index(prog) == k
            assert valid_programs_canonical(k, 1) == [(k, prog)]


def test_kraft_partial_sums():
    total, prev = Fraction(0), Fraction(-1)
    for n in range(1, 13):
        total += count_valid(n).mass
        assert prev < total < 1
        prev = total


def test_tail_mass_bound():
    assert tail_mass_bound(1) == Fraction(7, 8)
    assert tail_mass_bound(4) == Fraction(2401, 4096)
    for t in range(1, 8):
        tail = sum(count_valid(s).mass for s in range(t + 1, t + 7))
        assert tail <= tail_mass_bound(t)

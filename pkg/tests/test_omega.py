import json
import random
from fractions import Fraction

import pytest

from omegalab.dovetail import DovetailConfig, advance, new_session
from omegalab.machine import parse_tokens
from omegalab.omega import (ContradictionError, InconsistentUniverse, TheoremStatement,
                            Universe, UniverseMember, Verdict, certify_bits,
                            decide_via_theorem_stream, decode_halting_with_prefix,
                            exact_bits, omega_bounds, oracle_theorem_stream)
from omegalab.rationals import bits_of, dyadic_value


def test_bounds_after_three_token_completion():
    session = new_session(DovetailConfig(3, 6))
    advance(session, 6)
    b = omega_bounds(session)
    assert b.lower == Fraction(65, 256)
    assert b.undecided == 0
    assert b.tail_bound == Fraction(343, 512)
    assert b.upper == Fraction(473, 512)
    assert b.certified_bits == ""


def test_bounds_of_empty_session():
    b = omega_bounds(new_session(DovetailConfig(3, 6)))
    assert (b.lower, b.upper, b.certified_bits, b.stage) == (0, 1, "", 0)


def test_certify_bits():
    assert certify_bits(Fraction(1, 4), Fraction(1, 4), 4) == "0100"
    assert certify_bits(Fraction(1, 4), Fraction(3, 8), 8) == "01"
    # an upper bound sitting on a bin edge must not certify that bin
    assert certify_bits(Fraction(1, 4), Fraction(1, 2), 8) == ""
    assert certify_bits(Fraction(1, 8), Fraction(3, 8), 8) == "0"
    assert certify_bits(Fraction(0), Fraction(1), 8) == ""


def test_fully_decided_universe_certifies_exact_expansion(universe4):
    cfg = DovetailConfig.for_universe(universe4.programs, 8, tape_width=16, oracle=True)
    session = new_session(cfg)
    advance(session, 5)
    b = omega_bounds(session, max_bits=40)
    assert b.lower == b.upper == universe4.omega == Fraction(589, 2048)
    assert b.certified_bits == bits_of(universe4.omega, 40)


def random_universe(rng, pool):
    members = rng.sample(pool, rng.randint(1, len(pool)))
    members.sort(key=lambda m: (len(m.program), m.program.bits))
    return Universe(tuple(members))


@pytest.mark.parametrize("oracle", [False, True])
def test_sandwich_soundness_on_random_universes(universe4, oracle):
    rng = random.Random(1234 + oracle)
    pool = list(universe4.members)
    for _ in range(10):
        uni = random_universe(rng, pool)
        truth = uni.omega
        cfg = DovetailConfig.for_universe(uni.programs, 6, tape_width=16, oracle=oracle)
        session = new_session(cfg)
        certified = ""
        for _stage in range(6):
            b = omega_bounds(session, max_bits=32)
            assert b.lower <= truth <= b.upper
            assert exact_bits(uni, len(b.certified_bits)) == b.certified_bits
            assert b.certified_bits.startswith(certified)
            certified = b.certified_bits
            advance(session, 1)


def test_universe_rejects_prefix_pairs():
    a = UniverseMember(parse_tokens("END"), True)
    with pytest.raises(ValueError):
        Universe((a, a))


def test_universe_json_round_trip(universe4, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps(universe4.to_json()))
    assert Universe.load(path) == universe4
    bare = tmp_path / "bare.json"
    bare.write_text(json.dumps(universe4.to_json()["programs"]))
    assert Universe.load(bare).omega == universe4.omega


def test_decoder_examples(universe4, inc_loop):
    prefix = exact_bits(universe4, 12)
    assert dyadic_value(prefix) == Fraction(589, 2048)
    assert decode_halting_with_prefix(prefix, universe4, inc_loop) is Verdict.NEVER_HALTS
    assert decode_halting_with_prefix(prefix, universe4, parse_tokens("END")) is Verdict.HALTS
    assert decode_halting_with_prefix(prefix[:3], universe4, inc_loop) is Verdict.PREFIX_INSUFFICIENT


class Sealed(UniverseMember):
    @property
    def halts(self):
        raise AssertionError("decoder read ground truth")


def test_decoder_never_reads_ground_truth(universe4):
    prefix = exact_bits(universe4, 12)
    members = []
    for real in universe4.members:
        hidden = object.__new__(Sealed)
        object.__setattr__(hidden, "program", real.program)
        object.__setattr__(hidden, "output", "")
        members.append(hidden)
    blind = object.__new__(Universe)
    object.__setattr__(blind, "members", tuple(members))
    object.__setattr__(blind, "tape_width", universe4.tape_width)
    for m in universe4.members:
        verdict = decode_halting_with_prefix(prefix, blind, m.program)
        assert verdict is (Verdict.HALTS if m.halts else Verdict.NEVER_HALTS)


def test_decoder_matches_ground_truth_on_random_universes(universe4):
    rng = random.Random(7)
    pool = list(universe4.members)
    for _ in range(10):
        uni = random_universe(rng, pool)
        n = max(m.program.bit_length for m in uni.members)
        prefix = exact_bits(uni, n)
        for m in uni.members:
            verdict = decode_halting_with_prefix(prefix, uni, m.program)
            assert verdict is (Verdict.HALTS if m.halts else Verdict.NEVER_HALTS)


def test_decoder_flags_false_prefix(universe4):
    # claims omega < 1/64, but [END] alone contributes 1/8
    with pytest.raises(InconsistentUniverse):
        decode_halting_with_prefix("0000001", universe4, parse_tokens("END"))


def test_decoder_rejects_outsiders(universe4):
    with pytest.raises(ValueError):
        decode_halting_with_prefix("0100", universe4, parse_tokens("INC INC INC INC END"))


def test_theorem_stream(dec_loop):
    verdict = decide_via_theorem_stream(oracle_theorem_stream(4), dec_loop, 1000)
    assert verdict is Verdict.NEVER_HALTS
    assert decide_via_theorem_stream(oracle_theorem_stream(4), parse_tokens("END"), 1) is Verdict.HALTS


def test_theorem_stream_budget(dec_loop):
    assert decide_via_theorem_stream(oracle_theorem_stream(), dec_loop, 20) is Verdict.BUDGET_EXHAUSTED


def test_theorem_stream_contradiction(dec_loop):
    end = parse_tokens("END")
    stream = [TheoremStatement(end, Verdict.HALTS), TheoremStatement(end, Verdict.NEVER_HALTS),
              TheoremStatement(dec_loop, Verdict.NEVER_HALTS)]
    with pytest.raises(ContradictionError):
        decide_via_theorem_stream(stream, dec_loop, 10)


def test_theorem_stream_is_sound(universe4):
    for stmt in oracle_theorem_stream(4):
        assert (stmt.verdict is Verdict.HALTS) == universe4.ground_truth(stmt.program)

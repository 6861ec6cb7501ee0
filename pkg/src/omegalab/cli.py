"""Command-line entry point.

Every subcommand writes exactly one JSON (or CSV) payload to stdout. Exit codes:
0 success, 2 bad usage, 3 domain error, 4 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import replace

from . import __version__
from . import complexity, constructions, dovetail, enumeration, machine, omega, rationals

log = logging.getLogger("omegalab")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_RESOURCE = 4

DEFAULT_FUEL = 10_000

DOMAIN_ERRORS = (
    machine.ParseError,
    rationals.DomainError,
    omega.InconsistentUniverse,
    omega.ContradictionError,
    dovetail.CheckpointError,
    ValueError,
    KeyError,
    OSError,
)
RESOURCE_ERRORS = (
    machine.ResourceError,
    dovetail.BudgetExceeded,
    omega.DecodeBudgetExceeded,
    constructions.LocalizationError,
)


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps subparser defaults from clobbering values given before the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="reserved; nothing is randomized")
    p.add_argument("--fuel", type=int, default=argparse.SUPPRESS)
    p.add_argument("--program-format", choices=("bits", "tokens"), default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="omegalab", parents=[common],
                                     description="Halting probability and diagonalization workbench.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list bit strings or valid programs")
    p.add_argument("--max-tokens", type=int, required=True)
    p.add_argument("--valid-only", action="store_true")

    p = sub.add_parser("run", parents=[common], help="run one program under fuel")
    p.add_argument("--program", required=True)
    p.add_argument("--tape-width", type=int)

    p = sub.add_parser("oracle", parents=[common],
                       help="decide halting exactly on a bounded tape, or write a universe file")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--program")
    target.add_argument("--max-tokens", type=int)
    p.add_argument("--tape-width", type=int, default=machine.DEFAULT_WIDTH)
    p.add_argument("--output", help="universe file to write (with --max-tokens)")

    p = sub.add_parser("omega", parents=[common], help="dovetail and bound omega")
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--stages", type=int, required=True, help="stage to run the session up to")
    p.add_argument("--checkpoint", help="write a checkpoint here after running")
    p.add_argument("--resume", help="continue from this checkpoint")
    p.add_argument("--oracle", choices=("bounded",))
    p.add_argument("--tape-width", type=int)
    p.add_argument("--step-budget", type=int)
    p.add_argument("--bits", type=int, default=omega.DEFAULT_CERTIFY_BITS,
                   help="most bits to certify")

    p = sub.add_parser("decode", parents=[common], help="decide halting from bits of omega")
    p.add_argument("--universe", required=True)
    p.add_argument("--omega-prefix", required=True)
    p.add_argument("--program", required=True)
    p.add_argument("--max-stage", type=int, default=16)

    p = sub.add_parser("theorem-stream", parents=[common],
                       help="search a stream of halting verdicts")
    p.add_argument("--program", required=True)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--max-tokens", type=int, help="stop the oracle stream after this length")
    p.add_argument("--stream", help="JSON file of {bits, verdict} statements instead of the oracle")
    p.add_argument("--tape-width", type=int, default=machine.DEFAULT_WIDTH)

    p = sub.add_parser("diagonal", parents=[common], help="diagonal reals")
    dsub = p.add_subparsers(dest="which", required=True)
    q = dsub.add_parser("cantor", parents=[common])
    q.add_argument("--streams", required=True)
    q.add_argument("--digits", type=int, required=True)
    q = dsub.add_parser("turing", parents=[common])
    q.add_argument("--digits", type=int, required=True)
    q.add_argument("--oracle", choices=("bounded",))
    q.add_argument("--tape-width", type=int, default=machine.DEFAULT_WIDTH)

    p = sub.add_parser("cover", parents=[common], help="cover listed reals with small intervals")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--streams", required=True)
    p.add_argument("--count", type=int, required=True)

    p = sub.add_parser("borel", parents=[common], help="the know-it-all real")
    bsub = p.add_subparsers(dest="which", required=True)
    q = bsub.add_parser("encode", parents=[common])
    q.add_argument("--answers", required=True, help="answers as a 0/1 string, e.g. 101")
    q = bsub.add_parser("ask", parents=[common])
    q.add_argument("--value", required=True)
    q.add_argument("--index", type=int, required=True)

    p = sub.add_parser("complexity", parents=[common], help="program-size upper bound")
    p.add_argument("--target", required=True)
    p.add_argument("--max-tokens", type=int, required=True)
    p.add_argument("--probe", action="store_true", help="report as an incompressibility probe")
    return parser


def _opt(args, name, default):
    return getattr(args, name, default)


def _program(args, text=None) -> machine.Program:
    text = args.program if text is None else text
    if _opt(args, "program_format", "bits") == "tokens":
        return machine.parse_tokens(text)
    return machine.program_from_bits(text.strip())


def _emit_json(payload) -> str:
    return json.dumps(payload, separators=(",", ":")) + "\n"


def _emit_csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _require_json(args, command):
    if _opt(args, "format", "json") != "json":
        raise UsageError(f"{command} supports only --format json")


def cmd_enumerate(args) -> str:
    rows = []
    if args.valid_only:
        for index, prog in enumeration.iter_valid_programs(args.max_tokens):
            rows.append({"index": index, "bits": prog.bits, "tokens": prog.mnemonics,
                         "valid": True})
    else:
        for bits in enumeration.iter_bitstrings(3 * args.max_tokens):
            parsed = machine.parse(bits)
            row = {"index": enumeration.bitstring_index(bits), "bits": bits}
            if len(bits) % 3 == 0:
                row["tokens"] = " ".join(t.name for t in machine.decode_tokens(bits))
            else:
                row["tokens"] = None
            row["valid"] = isinstance(parsed, machine.Program)
            if not row["valid"]:
                row["invalid_reason"] = parsed.value
            rows.append(row)
    if _opt(args, "format", "json") == "csv":
        return _emit_csv(rows, ["index", "bits", "tokens", "valid", "invalid_reason"])
    return _emit_json(rows)


def cmd_run(args) -> str:
    _require_json(args, "run")
    prog = _program(args)
    cfg = machine.MachineConfig(width=args.tape_width, fuel=_opt(args, "fuel", DEFAULT_FUEL))
    return _emit_json(machine.run(prog, cfg).to_json())


def cmd_oracle(args) -> str:
    _require_json(args, "oracle")
    if args.program is not None:
        cfg = machine.MachineConfig.bounded_tape(args.tape_width, fuel=_opt(args, "fuel", None))
        return _emit_json(machine.decide_halting_exact(_program(args), cfg).to_json())
    universe = omega.full_universe(args.max_tokens, args.tape_width)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(universe.to_json(), fh, indent=1)
            fh.write("\n")
    return _emit_json({
        "programs": len(universe.members),
        "halting": sum(m.halts for m in universe.members),
        "omega": rationals.to_str(universe.omega),
        "tape_width": universe.tape_width,
    })


def cmd_omega(args) -> str:
    jobs = _opt(args, "jobs", 1)
    if args.resume:
        with open(args.resume) as fh:
            session = dovetail.loads_checkpoint(fh.read())
        cfg = session.config
        if args.max_tokens is not None and args.max_tokens != cfg.max_tokens:
            raise UsageError(f"--max-tokens {args.max_tokens} disagrees with checkpoint "
                             f"({cfg.max_tokens})")
        if args.stages > cfg.max_stage:
            session.config = replace(cfg, max_stage=args.stages)
    else:
        if args.max_tokens is None:
            raise UsageError("omega needs --max-tokens unless resuming")
        width = args.tape_width
        if args.oracle and width is None:
            width = machine.DEFAULT_WIDTH
        cfg = dovetail.DovetailConfig(max_tokens=args.max_tokens, max_stage=args.stages,
                                      tape_width=width, oracle=bool(args.oracle),
                                      step_budget=args.step_budget)
        session = dovetail.new_session(cfg)
    log.info("advancing from stage %d to %d", session.stage, args.stages)
    dovetail.run_to_stage(session, args.stages, jobs=jobs)
    if args.checkpoint:
        with open(args.checkpoint, "w") as fh:
            fh.write(dovetail.dumps_checkpoint(session))
    if _opt(args, "format", "json") == "csv":
        rows = [e.to_row() for e in session.halting_events()]
        return _emit_csv(rows, ["index", "bits", "tokens", "steps", "output", "stage_detected"])
    return _emit_json(omega.omega_bounds(session, args.bits).to_json())


def cmd_decode(args) -> str:
    _require_json(args, "decode")
    universe = omega.Universe.load(args.universe)
    verdict = omega.decode_halting_with_prefix(args.omega_prefix, universe, _program(args),
                                               max_stage=args.max_stage)
    return _emit_json({"verdict": verdict.value})


def _load_statements(path):
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        if doc.get("version") != 1:
            raise ValueError(f"unsupported stream version {doc.get('version')!r}")
        doc = doc["statements"]
    for item in doc:
        yield omega.TheoremStatement(machine.program_from_bits(item["bits"]),
                                     omega.Verdict(item["verdict"]))


def cmd_theorem_stream(args) -> str:
    _require_json(args, "theorem-stream")
    query = _program(args)
    if args.stream:
        stream = _load_statements(args.stream)
    else:
        stream = omega.oracle_theorem_stream(args.max_tokens, args.tape_width)
    verdict = omega.decide_via_theorem_stream(stream, query, args.budget)
    return _emit_json({"verdict": verdict.value})


def cmd_diagonal(args) -> str:
    _require_json(args, "diagonal")
    fuel = _opt(args, "fuel", DEFAULT_FUEL)
    if args.which == "cantor":
        streams = constructions.load_streams(args.streams)
        result = constructions.cantor_diagonal(streams, args.digits, fuel)
    else:
        result = constructions.turing_diagonal(args.digits, fuel, args.oracle, args.tape_width)
    return _emit_json(result.to_json())


def cmd_cover(args) -> str:
    _require_json(args, "cover")
    streams = constructions.load_streams(args.streams)
    result = constructions.cover(rationals.parse(args.epsilon), streams, args.count,
                                 _opt(args, "fuel", DEFAULT_FUEL))
    return _emit_json(result.to_json())


def cmd_borel(args) -> str:
    _require_json(args, "borel")
    if args.which == "encode":
        answers = [int(c) for c in rationals.check_bitstring(args.answers)]
        return _emit_json({"value": rationals.to_str(constructions.borel_encode(answers))})
    value = rationals.parse(args.value)
    return _emit_json({"index": args.index,
                       "answer": constructions.borel_answer(value, args.index)})


def cmd_complexity(args) -> str:
    _require_json(args, "complexity")
    fuel = _opt(args, "fuel", DEFAULT_FUEL)
    jobs = _opt(args, "jobs", 1)
    if args.probe:
        report = complexity.incompressibility_probe(args.target, args.max_tokens, fuel, jobs)
        return _emit_json(report.to_json())
    return _emit_json(complexity.h_upper(args.target, args.max_tokens, fuel, jobs).to_json())


COMMANDS = {
    "enumerate": cmd_enumerate,
    "run": cmd_run,
    "oracle": cmd_oracle,
    "omega": cmd_omega,
    "decode": cmd_decode,
    "theorem-stream": cmd_theorem_stream,
    "diagonal": cmd_diagonal,
    "cover": cmd_cover,
    "borel": cmd_borel,
    "complexity": cmd_complexity,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=stderr, format="%(levelname)s: %(message)s")
    if _opt(args, "jobs", 1) < 1:
        print("omegalab: error: --jobs must be >= 1", file=stderr)
        return EXIT_USAGE
    try:
        payload = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"omegalab: error: {exc}", file=stderr)
        return EXIT_USAGE
    except RESOURCE_ERRORS as exc:
        print(f"omegalab: resource budget exceeded: {exc}", file=stderr)
        return EXIT_RESOURCE
    except DOMAIN_ERRORS as exc:
        print(f"omegalab: {exc}", file=stderr)
        return EXIT_DOMAIN
    stdout.write(payload)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

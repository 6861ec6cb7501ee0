"""Stage-by-stage dovetailing over the program enumeration.

Stage ``s`` reruns, from scratch and with fuel ``4**s``, every still-undecided
program of at most ``min(s, max_tokens)`` tokens. Programs that halt add
``2**-bit_length`` to the discovered mass, which is a lower bound on the
halting probability of whatever program set the session walks.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .enumeration import iter_valid_programs
from .machine import DEFAULT_VISIT_BUDGET, Kind, MachineConfig, Program, ResourceError, _execute, program_from_bits
from . import rationals

CHECKPOINT_VERSION = 1

UNDECIDED = "undecided"
HALTED = "halted"
NEVER_HALTS = "never-halts"


class BudgetExceeded(RuntimeError):
    pass


class CheckpointError(ValueError):
    pass


def stage_fuel(stage: int) -> int:
    return 4 ** stage


@dataclass(frozen=True)
class DovetailConfig:
    max_tokens: int
    max_stage: int
    tape_width: Optional[int] = None
    oracle: bool = False
    # cap on machine steps spent by a single advance() call
    step_budget: Optional[int] = None
    # explicit program list (bit strings) walked instead of the canonical enumeration
    universe: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.max_stage < 1:
            raise ValueError("max_stage must be >= 1")
        if self.oracle and self.tape_width is None:
            raise ValueError("the exact oracle needs a bounded tape")

    def machine(self, fuel: int) -> MachineConfig:
        return MachineConfig(width=self.tape_width, fuel=fuel)

    def to_json(self) -> dict:
        return {
            "max_tokens": self.max_tokens,
            "max_stage": self.max_stage,
            "tape_width": self.tape_width,
            "oracle": self.oracle,
            "step_budget": self.step_budget,
            "universe": list(self.universe) if self.universe is not None else None,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DovetailConfig":
        universe = doc.get("universe")
        return cls(
            max_tokens=doc["max_tokens"],
            max_stage=doc["max_stage"],
            tape_width=doc.get("tape_width"),
            oracle=doc.get("oracle", False),
            step_budget=doc.get("step_budget"),
            universe=tuple(universe) if universe is not None else None,
        )

    @classmethod
    def for_universe(cls, programs: Sequence[Program], max_stage: int, **kwargs) -> "DovetailConfig":
        bits = tuple(p.bits for p in programs)
        return cls(max_tokens=max(len(p) for p in programs), max_stage=max_stage,
                   universe=bits, **kwargs)


@dataclass(frozen=True)
class HaltingEvent:
    index: int
    program: Program
    steps: int
    output: str
    stage_detected: int

    def to_row(self) -> dict:
        return {
            "index": self.index,
            "bits": self.program.bits,
            "tokens": self.program.mnemonics,
            "steps": self.steps,
            "output": self.output,
            "stage_detected": self.stage_detected,
        }


@dataclass
class Session:
    config: DovetailConfig
    stage: int = 0
    # index -> (status, steps or None); only enumerated programs appear
    statuses: dict[int, tuple[str, Optional[int]]] = field(default_factory=dict)
    mass: Fraction = Fraction(0)

    def __post_init__(self):
        self._programs: Optional[list[Program]] = None

    @property
    def programs(self) -> list[Program]:
        """Programs walked by this session; position ``i`` holds index ``i + 1``."""
        if self._programs is None:
            if self.config.universe is not None:
                self._programs = [program_from_bits(b) for b in self.config.universe]
            else:
                self._programs = [p for _, p in iter_valid_programs(self.config.max_tokens)]
        return self._programs

    @property
    def depth(self) -> int:
        """Largest token length enumerated so far."""
        return min(self.stage, self.config.max_tokens)

    def status(self, index: int) -> str:
        return self.statuses.get(index, (UNDECIDED, None))[0]

    def halting_events(self) -> list[HaltingEvent]:
        """Rebuild every halting event so far from the status map alone."""
        events = []
        for index in sorted(self.statuses):
            status, steps = self.statuses[index]
            if status != HALTED:
                continue
            prog = self.programs[index - 1]
            outcome = _execute(prog, self.config.machine(steps), detect_cycles=False)
            events.append(HaltingEvent(index, prog, steps, outcome.output,
                                       detection_stage(len(prog), steps)))
        return events


def detection_stage(token_length: int, steps: int) -> int:
    """First stage whose schedule both enumerates the program and gives it enough fuel."""
    s = max(token_length, 1)
    while stage_fuel(s) < steps:
        s += 1
    return s


def new_session(config: DovetailConfig) -> Session:
    return Session(config)


def _run_one(task):
    bits, fuel, width, oracle = task
    prog = program_from_bits(bits)
    cfg = MachineConfig(width=width, fuel=fuel, visit_budget=min(fuel + 1, DEFAULT_VISIT_BUDGET))
    try:
        outcome = _execute(prog, cfg, detect_cycles=oracle)
    except ResourceError:
        return UNDECIDED, fuel, ""
    if outcome.kind is Kind.HALTED:
        return HALTED, outcome.steps, outcome.output
    if outcome.kind is Kind.NEVER_HALTS:
        return NEVER_HALTS, outcome.steps, outcome.output
    return UNDECIDED, outcome.steps, outcome.output


def advance(session: Session, stages: int, jobs: int = 1) -> list[HaltingEvent]:
    """Run ``stages`` more stages and return the new halting events in index order.

    The result does not depend on ``jobs``: runs are independent and their
    results are merged by program index before the session is touched.
    """
    cfg = session.config
    if stages < 1:
        raise ValueError("stages must be >= 1")
    if session.stage + stages > cfg.max_stage:
        raise ValueError(f"stage {session.stage} + {stages} exceeds max_stage {cfg.max_stage}")
    programs = session.programs
    events: list[HaltingEvent] = []
    spent = 0
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for s in range(session.stage + 1, session.stage + stages + 1):
            depth = min(s, cfg.max_tokens)
            fuel = stage_fuel(s)
            pending = [i for i, p in enumerate(programs, start=1)
                       if len(p) <= depth and session.status(i) == UNDECIDED]
            tasks = [(programs[i - 1].bits, fuel, cfg.tape_width, cfg.oracle) for i in pending]
            if pool is not None:
                results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
            else:
                results = [_run_one(t) for t in tasks]
            spent += sum(steps for _, steps, _ in results)
            if cfg.step_budget is not None and spent > cfg.step_budget:
                raise BudgetExceeded(f"step budget {cfg.step_budget} exceeded at stage {s}")
            for index, (status, steps, output) in zip(pending, results):
                prog = programs[index - 1]
                if status == HALTED:
                    session.statuses[index] = (HALTED, steps)
                    session.mass += Fraction(1, 1 << prog.bit_length)
                    events.append(HaltingEvent(index, prog, steps, output, s))
                elif status == NEVER_HALTS:
                    session.statuses[index] = (NEVER_HALTS, None)
                else:
                    session.statuses[index] = (UNDECIDED, None)
            session.stage = s
    finally:
        if pool is not None:
            pool.shutdown()
    return events


def run_to_stage(session: Session, stage: int, jobs: int = 1) -> list[HaltingEvent]:
    if stage <= session.stage:
        return []
    return advance(session, stage - session.stage, jobs=jobs)


def _checksum(body: dict) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def checkpoint(session: Session) -> dict:
    statuses = []
    for index in sorted(session.statuses):
        status, steps = session.statuses[index]
        statuses.append([index, status, steps] if status == HALTED else [index, status])
    body = {
        "version": CHECKPOINT_VERSION,
        "config": session.config.to_json(),
        "stage": session.stage,
        "statuses": statuses,
        "mass": rationals.to_str(session.mass),
    }
    return {**body, "checksum": _checksum(body)}


def restore(doc: dict) -> Session:
    if not isinstance(doc, dict):
        raise CheckpointError("checkpoint must be a JSON object")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {doc.get('version')!r}")
    body = {k: v for k, v in doc.items() if k != "checksum"}
    if doc.get("checksum") != _checksum(body):
        raise CheckpointError("checkpoint checksum mismatch")
    try:
        session = Session(DovetailConfig.from_json(doc["config"]), stage=doc["stage"])
        for entry in doc["statuses"]:
            index, status = entry[0], entry[1]
            steps = entry[2] if status == HALTED else None
            session.statuses[index] = (status, steps)
        mass = rationals.parse(doc["mass"])
        recomputed = sum((Fraction(1, 1 << session.programs[i - 1].bit_length)
                          for i, (st, _) in session.statuses.items() if st == HALTED),
                         Fraction(0))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise CheckpointError(f"malformed checkpoint: {exc}") from None
    if recomputed != mass:
        raise CheckpointError("checkpoint mass disagrees with its status map")
    session.mass = mass
    return session


def dumps_checkpoint(session: Session) -> str:
    return json.dumps(checkpoint(session), indent=1) + "\n"


def loads_checkpoint(text: str) -> Session:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"corrupted checkpoint: {exc}") from None
    return restore(doc)

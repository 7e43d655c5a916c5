"""Broadcast schedules: validation, forest extraction, text round-trip.

A schedule is a sequence of rounds; round k holds (sender, receiver) pairs.
Feasibility means: senders are informed before the round, every pair is an
edge, nobody sends twice in a round, every non-source receives exactly once,
and everyone ends up informed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .graph import Instance, ParseError


class ViolationKind(Enum):
    NOT_NEIGHBOR = "NotNeighbor"
    SENDER_UNINFORMED = "SenderUninformed"
    SENDER_BUSY = "SenderBusy"
    RECEIVER_REPEATED = "ReceiverRepeated"
    UNCOVERED = "Uncovered"
    SOURCE_RECEIVES = "SourceReceives"


@dataclass(frozen=True)
class ScheduleViolation:
    kind: ViolationKind
    round: int | None
    nodes: tuple[int, ...]

    def __str__(self) -> str:
        where = f" round {self.round}" if self.round is not None else ""
        return f"{self.kind.value}{where}: nodes {self.nodes}"


class InvalidScheduleError(ValueError):
    def __init__(self, violations: list[ScheduleViolation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass(frozen=True)
class BroadcastSchedule:
    rounds: tuple[frozenset[tuple[int, int]], ...]

    @classmethod
    def from_rounds(cls, rounds: Iterable[Iterable[tuple[int, int]]]) -> BroadcastSchedule:
        return cls(tuple(frozenset((int(u), int(v)) for u, v in r) for r in rounds))

    def __len__(self) -> int:
        return len(self.rounds)

    def receivers(self) -> set[int]:
        return {v for r in self.rounds for _, v in r}

    def parent_map(self) -> dict[int, int]:
        return {v: u for r in self.rounds for u, v in r}


EMPTY_SCHEDULE = BroadcastSchedule(())


def schedule_length(sched: BroadcastSchedule) -> int:
    return len(sched.rounds)


def validate_schedule(inst: Instance, sched: BroadcastSchedule) -> list[ScheduleViolation]:
    """Collect every violation; an empty list means the schedule is feasible."""
    graph = inst.graph
    sources = inst.source_set
    informed = set(sources)
    received: set[int] = set()
    violations: list[ScheduleViolation] = []
    for k, rnd in enumerate(sched.rounds, start=1):
        sends = Counter()
        for u, v in sorted(rnd):
            if not graph.has_edge(u, v):
                violations.append(ScheduleViolation(ViolationKind.NOT_NEIGHBOR, k, (u, v)))
            if u not in informed:
                violations.append(ScheduleViolation(ViolationKind.SENDER_UNINFORMED, k, (u,)))
            sends[u] += 1
            if v in sources:
                violations.append(ScheduleViolation(ViolationKind.SOURCE_RECEIVES, k, (v,)))
            elif v in received:
                violations.append(ScheduleViolation(ViolationKind.RECEIVER_REPEATED, k, (v,)))
            received.add(v)
        for u, count in sorted(sends.items()):
            if count > 1:
                violations.append(ScheduleViolation(ViolationKind.SENDER_BUSY, k, (u,)))
        # receivers count as informed from here on, even when the pair was bad,
        # so one malformed pair does not cascade into spurious sender errors
        informed.update(v for _, v in rnd)
    missing = tuple(v for v in graph.nodes() if v not in informed)
    if missing:
        violations.append(ScheduleViolation(ViolationKind.UNCOVERED, None, missing))
    return violations


def broadcast_forest(inst: Instance, sched: BroadcastSchedule) -> frozenset[tuple[int, int]]:
    """Arc set {(parent, child)} of a feasible schedule; one arborescence per source."""
    violations = validate_schedule(inst, sched)
    if violations:
        raise InvalidScheduleError(violations)
    return frozenset((u, v) for rnd in sched.rounds for u, v in rnd)


# --- text format -------------------------------------------------------------
# line k: round-k pairs as "u>v" tokens; '#' starts a comment; a blank line
# is an idle round; comment-only lines are skipped.

def format_schedule(sched: BroadcastSchedule) -> str:
    lines = [" ".join(f"{u}>{v}" for u, v in sorted(rnd)) for rnd in sched.rounds]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_schedule(text: str) -> BroadcastSchedule:
    rounds = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            continue
        body = raw.split("#", 1)[0].strip()
        if not body:
            rounds.append(frozenset())
            continue
        pairs = []
        for token in body.split():
            head, sep, tail = token.partition(">")
            if not sep:
                raise ParseError(f"bad pair token {token!r}", line_no)
            try:
                pairs.append((int(head), int(tail)))
            except ValueError:
                raise ParseError(f"bad pair token {token!r}", line_no) from None
        rounds.append(frozenset(pairs))
    return BroadcastSchedule(tuple(rounds))

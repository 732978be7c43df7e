"""Canonical in-memory event log model.

An event log is an ordered collection of traces, one per case. Each trace is
the timestamp-ordered sequence of events of that case. Traces are also viewed
through two derived lenses: the *trace variant* (the bare activity sequence
with its frequency) and the *relative representation* (start offset in days
plus inter-event cycle times in minutes) used for timestamp noise injection.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .errors import EpochAfterStart

SECONDS_PER_DAY = 86400.0
SECONDS_PER_MINUTE = 60.0


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    timestamp: datetime

    def __post_init__(self):
        if not self.case_id:
            raise ValueError("event case_id must be non-empty")
        if not self.activity:
            raise ValueError("event activity must be non-empty")


@dataclass(frozen=True)
class Trace:
    """Timestamp-ordered events of one case."""

    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")
        for e in self.events:
            if e.case_id != self.case_id:
                raise ValueError(
                    f"trace {self.case_id!r} contains event of case {e.case_id!r}"
                )
        for a, b in zip(self.events, self.events[1:]):
            if b.timestamp < a.timestamp:
                raise ValueError(f"trace {self.case_id!r} timestamps decrease")

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)

    @property
    def start(self) -> datetime:
        return self.events[0].timestamp

    def with_case_id(self, case_id: str) -> "Trace":
        """Clone of this trace under a new case identifier."""
        events = tuple(Event(case_id, e.activity, e.timestamp) for e in self.events)
        return Trace(case_id, events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ids = [t.case_id for t in self.traces]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise ValueError(f"duplicate case_id {dup!r} in log")

    @property
    def epoch(self) -> datetime | None:
        """Earliest event timestamp in the log; None when the log is empty."""
        if not self.traces:
            return None
        return min(t.start for t in self.traces)

    @property
    def case_count(self) -> int:
        return len(self.traces)

    @property
    def event_count(self) -> int:
        return sum(len(t.events) for t in self.traces)


@dataclass(frozen=True)
class TraceVariant:
    """A distinct activity sequence together with its frequency in a log."""

    activities: tuple[str, ...]
    frequency: int

    def __post_init__(self):
        if self.frequency < 0:
            raise ValueError("variant frequency must be non-negative")


@dataclass(frozen=True)
class RelativeTrace:
    """Trace re-expressed for noise injection.

    relative_start_days is the offset of the first event from a reference
    epoch; cycle_times_minutes[i] is the gap between event i and event i+1.
    """

    case_id: str
    variant: tuple[str, ...]
    relative_start_days: float
    cycle_times_minutes: tuple[float, ...]

    def __post_init__(self):
        if len(self.cycle_times_minutes) != len(self.variant) - 1:
            raise ValueError("cycle time count must be len(variant) - 1")
        if self.relative_start_days < 0:
            raise ValueError("relative start must be non-negative")
        if any(c < 0 for c in self.cycle_times_minutes):
            raise ValueError("cycle times must be non-negative")


def extract_variants(log: EventLog) -> list[TraceVariant]:
    """Distinct activity sequences with frequencies, most frequent first.

    Ties are broken lexicographically so the result is deterministic and
    invariant under trace reordering. Frequencies sum to the trace count.
    """
    counts = Counter(t.activities for t in log.traces)
    return [
        TraceVariant(seq, n)
        for seq, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    ]


def variant_set(log: EventLog) -> set[tuple[str, ...]]:
    return {t.activities for t in log.traces}


def to_relative(trace: Trace, epoch: datetime) -> RelativeTrace:
    """Express a trace as start offset (days) plus cycle times (minutes)."""
    if epoch > trace.start:
        raise EpochAfterStart(
            f"epoch {epoch} is after first event of case {trace.case_id!r}"
        )
    start_days = (trace.start - epoch).total_seconds() / SECONDS_PER_DAY
    cycles = tuple(
        (b.timestamp - a.timestamp).total_seconds() / SECONDS_PER_MINUTE
        for a, b in zip(trace.events, trace.events[1:])
    )
    return RelativeTrace(trace.case_id, trace.activities, start_days, cycles)


def from_relative(rel: RelativeTrace, epoch: datetime) -> Trace:
    """Inverse of to_relative: rebuild concrete timestamps by addition."""
    ts = epoch + timedelta(days=rel.relative_start_days)
    events = [Event(rel.case_id, rel.variant[0], ts)]
    for activity, cycle in zip(rel.variant[1:], rel.cycle_times_minutes):
        ts = ts + timedelta(minutes=cycle)
        events.append(Event(rel.case_id, activity, ts))
    return Trace(rel.case_id, tuple(events))

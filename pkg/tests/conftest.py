from datetime import datetime, timedelta

import pytest

from libra.log_model import Event, EventLog, Trace


def make_trace(case_id, activities, start, gaps_minutes=None):
    """Trace whose events begin at start and follow at the given gaps."""
    gaps_minutes = gaps_minutes if gaps_minutes is not None else [30] * (len(activities) - 1)
    ts = start
    events = [Event(case_id, activities[0], ts)]
    for activity, gap in zip(activities[1:], gaps_minutes):
        ts = ts + timedelta(minutes=gap)
        events.append(Event(case_id, activity, ts))
    return Trace(case_id, tuple(events))


def make_log(variant_counts, base=None, stagger_minutes=17):
    """Log with the requested number of traces per variant.

    variant_counts: list of (activities tuple, count). Case start times are
    staggered so every trace is distinct in time.
    """
    base = base or datetime(2021, 4, 8, 9, 0, 0)
    traces = []
    n = 0
    for activities, count in variant_counts:
        for _ in range(count):
            n += 1
            traces.append(make_trace(f"c{n:05d}", activities, base + timedelta(minutes=stagger_minutes * n)))
    return EventLog(tuple(traces))


@pytest.fixture
def clinic_log():
    """Five-case healthcare log: two triage cases, two surgery cases, one
    unique antibiotics case."""
    rows = [
        ("1", "Registration", datetime(2021, 4, 8, 10, 20)),
        ("1", "Triage", datetime(2021, 4, 8, 10, 50)),
        ("1", "Admission", datetime(2021, 4, 8, 16, 15)),
        ("2", "Registration", datetime(2021, 4, 8, 12, 37)),
        ("2", "Admission", datetime(2021, 4, 8, 14, 37)),
        ("2", "Surgery", datetime(2021, 4, 8, 15, 7)),
        ("2", "Release", datetime(2021, 4, 8, 20, 31)),
        ("3", "Registration", datetime(2021, 4, 9, 13, 30)),
        ("3", "Triage", datetime(2021, 4, 9, 13, 55)),
        ("3", "Admission", datetime(2021, 4, 9, 20, 55)),
        ("4", "Registration", datetime(2021, 4, 9, 15, 0)),
        ("4", "Admission", datetime(2021, 4, 9, 17, 0)),
        ("4", "Surgery", datetime(2021, 4, 9, 17, 40)),
        ("4", "Release", datetime(2021, 4, 9, 23, 5)),
        ("5", "Registration", datetime(2021, 4, 9, 17, 25)),
        ("5", "Antibiotics", datetime(2021, 4, 9, 17, 55)),
        ("5", "Release", datetime(2021, 4, 10, 23, 55)),
    ]
    traces = []
    for cid in ("1", "2", "3", "4", "5"):
        events = tuple(Event(c, a, t) for c, a, t in rows if c == cid)
        traces.append(Trace(cid, events))
    return EventLog(tuple(traces))


@pytest.fixture
def identity_log():
    """Fixture for the identity configuration: five variants each carrying a
    unique directly-follows pair, plus a repeated single-event variant so the
    log is not a collection of unique traces."""
    base = datetime(2021, 4, 8, 9, 0, 0)
    traces = [
        make_trace(f"u{i}", ("start", f"mid{i}", "end"), base + timedelta(hours=i), [10, 40])
        for i in range(5)
    ]
    for i in range(2):
        cid = f"z{i}"
        traces.append(Trace(cid, (Event(cid, "solo", base + timedelta(hours=9 + i)),)))
    return EventLog(tuple(traces))

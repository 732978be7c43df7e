"""Event log parsing and serialization (CSV and a minimal XES subset).

Only the three attributes of the attack model are read: case identifier,
activity label, and timestamp. Timestamps are normalized to naive UTC
instants; aware inputs are converted, naive inputs are taken as UTC.
The first CSV row is always treated as a header, including for index-based
schemas, so that serialize/parse round-trips under any schema.
"""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import (
    BadTimestamp,
    MalformedRow,
    MalformedXml,
    MissingAttribute,
    MissingColumn,
)
from .log_model import Event, EventLog, Trace

ISO_SECONDS = "%Y-%m-%d %H:%M:%S"


@dataclass(frozen=True)
class CsvSchema:
    """Column selection for delimited logs. Columns are names or 0-based indices."""

    case_column: str | int = "case_id"
    activity_column: str | int = "activity"
    timestamp_column: str | int = "timestamp"
    timestamp_format: str = ISO_SECONDS
    delimiter: str = ","

    def __post_init__(self):
        sel = (self.case_column, self.activity_column, self.timestamp_column)
        if len(set(sel)) != 3:
            raise ValueError(f"column selectors must be pairwise distinct: {sel}")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")


def _to_utc_naive(ts: datetime) -> datetime:
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


def _parse_instant(text: str, fmt: str, row: int) -> datetime:
    try:
        return _to_utc_naive(datetime.strptime(text.strip(), fmt))
    except ValueError as exc:
        raise BadTimestamp(row, f"cannot parse timestamp {text!r} with {fmt!r}") from exc


def _parse_iso_instant(text: str, row: int) -> datetime:
    # XES timestamps are ISO-8601, frequently with an offset or Z suffix.
    cleaned = text.strip()
    if cleaned.endswith(("Z", "z")):
        cleaned = cleaned[:-1] + "+00:00"
    try:
        return _to_utc_naive(datetime.fromisoformat(cleaned))
    except ValueError as exc:
        raise BadTimestamp(row, f"cannot parse timestamp {text!r}") from exc


def _column_index(header: list[str], selector: str | int) -> int:
    if isinstance(selector, int):
        if selector >= len(header) or selector < 0:
            raise MissingColumn(f"column index {selector} out of range for header {header}")
        return selector
    try:
        return header.index(selector)
    except ValueError:
        raise MissingColumn(f"column {selector!r} not found in header {header}") from None


def _as_text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _group_into_log(records: list[tuple[str, str, datetime]]) -> EventLog:
    """Group (case, activity, ts) records into traces.

    Traces keep first-appearance order; events within a trace are sorted by
    timestamp with input order breaking ties (stable sort).
    """
    by_case: dict[str, list[tuple[str, str, datetime]]] = {}
    for rec in records:
        by_case.setdefault(rec[0], []).append(rec)
    traces = []
    for case_id, recs in by_case.items():
        recs.sort(key=lambda r: r[2])
        events = tuple(Event(case_id, act, ts) for _, act, ts in recs)
        traces.append(Trace(case_id, events))
    return EventLog(tuple(traces))


def parse_csv(data: bytes | str, schema: CsvSchema | None = None) -> EventLog:
    """Parse a delimited event log into the canonical model.

    Raises MissingColumn, MalformedRow or BadTimestamp; row numbers are
    1-based positions in the file (the header is row 1).
    """
    schema = schema or CsvSchema()
    reader = csv.reader(io.StringIO(_as_text(data)), delimiter=schema.delimiter)
    rows = iter(reader)
    try:
        header = next(rows)
    except StopIteration:
        return EventLog()
    ci = _column_index(header, schema.case_column)
    ai = _column_index(header, schema.activity_column)
    ti = _column_index(header, schema.timestamp_column)
    width = len(header)

    records = []
    for rownum, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != width:
            raise MalformedRow(rownum, f"expected {width} fields, got {len(row)}")
        case_id, activity = row[ci].strip(), row[ai].strip()
        if not case_id or not activity:
            raise MalformedRow(rownum, "empty case id or activity")
        ts = _parse_instant(row[ti], schema.timestamp_format, rownum)
        records.append((case_id, activity, ts))
    return _group_into_log(records)


def serialize_csv(log: EventLog, schema: CsvSchema | None = None) -> bytes:
    """Render a log as delimited text; inverse of parse_csv at second precision."""
    schema = schema or CsvSchema()
    names = {}
    for pos, sel in enumerate(
        (schema.case_column, schema.activity_column, schema.timestamp_column)
    ):
        col = sel if isinstance(sel, int) else pos
        names[col] = sel if isinstance(sel, str) else f"col{sel}"
    width = max(names) + 1
    header = [names.get(i, f"col{i}") for i in range(width)]
    ci = schema.case_column if isinstance(schema.case_column, int) else header.index(schema.case_column)
    ai = schema.activity_column if isinstance(schema.activity_column, int) else header.index(schema.activity_column)
    ti = schema.timestamp_column if isinstance(schema.timestamp_column, int) else header.index(schema.timestamp_column)

    out = io.StringIO()
    writer = csv.writer(out, delimiter=schema.delimiter, lineterminator="\n")
    writer.writerow(header)
    for trace in log.traces:
        for event in trace.events:
            row = [""] * width
            row[ci] = event.case_id
            row[ai] = event.activity
            row[ti] = event.timestamp.strftime(schema.timestamp_format)
            writer.writerow(row)
    return out.getvalue().encode("utf-8")


def _local_tag(element: ET.Element) -> str:
    return element.tag.rsplit("}", 1)[-1]


def _xes_attr(event: ET.Element, key: str) -> str | None:
    for child in event:
        if child.get("key") == key:
            return child.get("value")
    return None


def parse_xes(data: bytes | str) -> EventLog:
    """Parse the minimal XES subset: trace elements holding events with
    concept:name and time:timestamp. Everything else is ignored."""
    try:
        root = ET.fromstring(_as_text(data))
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    records = []
    trace_no = 0
    for trace_el in root:
        if _local_tag(trace_el) != "trace":
            continue
        trace_no += 1
        case_id = _xes_attr(trace_el, "concept:name") or f"trace_{trace_no}"
        event_no = 0
        for event_el in trace_el:
            if _local_tag(event_el) != "event":
                continue
            event_no += 1
            where = f"trace {trace_no} event {event_no}"
            activity = _xes_attr(event_el, "concept:name")
            if activity is None:
                raise MissingAttribute(f"{where}: no concept:name")
            stamp = _xes_attr(event_el, "time:timestamp")
            if stamp is None:
                raise MissingAttribute(f"{where}: no time:timestamp")
            ts = _parse_iso_instant(stamp, event_no)
            records.append((case_id, activity, ts))
    return _group_into_log(records)

"""Contribution-event log serialization.

One JSON object per line, UTF-8, with the fields
{kind, engineer_id, file_path, timestamp_ms, magnitude, commit_ref}.
The log decouples ingestion from scoring: the engine can be driven from a
file without a live repository.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable

from .errors import InputDataError
from .model import ContributionEvent, EventKind

FIELDS = ("kind", "engineer_id", "file_path", "timestamp_ms", "magnitude", "commit_ref")


def event_to_record(event: ContributionEvent) -> dict:
    return {
        "kind": event.kind.value,
        "engineer_id": event.engineer_id,
        "file_path": event.file_path,
        "timestamp_ms": event.timestamp_ms,
        "magnitude": event.magnitude,
        "commit_ref": event.commit_ref,
    }


def write_event_log(events: Iterable[ContributionEvent], sink: IO[str] | str | Path) -> None:
    """Write events one record per line, in the order given."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            write_event_log(events, fh)
        return
    for event in events:
        sink.write(json.dumps(event_to_record(event), separators=(",", ":")))
        sink.write("\n")


def _field(record: dict, name: str, types, line_no: int):
    if name not in record:
        raise InputDataError(f"event log line {line_no}: missing field '{name}'")
    value = record[name]
    if not isinstance(value, types) or isinstance(value, bool):
        raise InputDataError(f"event log line {line_no}: field '{name}' has wrong type")
    return value


def read_event_log(source: IO[str] | str | Path) -> list[ContributionEvent]:
    """Read and validate an event log; malformed lines fail with their number."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_event_log(fh)

    events: list[ContributionEvent] = []
    first_authored: set[str] = set()
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputDataError(f"event log line {line_no}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise InputDataError(f"event log line {line_no}: record must be an object")

        kind_raw = _field(record, "kind", str, line_no)
        try:
            kind = EventKind(kind_raw)
        except ValueError:
            raise InputDataError(
                f"event log line {line_no}: field 'kind' has unknown value {kind_raw!r}"
            ) from None
        engineer = _field(record, "engineer_id", str, line_no)
        path = _field(record, "file_path", str, line_no)
        timestamp = _field(record, "timestamp_ms", int, line_no)
        magnitude = float(_field(record, "magnitude", (int, float), line_no))
        commit_ref = _field(record, "commit_ref", str, line_no)
        try:
            event = ContributionEvent(
                kind=kind,
                engineer_id=engineer,
                file_path=path,
                timestamp_ms=timestamp,
                magnitude=magnitude,
                commit_ref=commit_ref,
            )
        except ValueError as exc:
            raise InputDataError(f"event log line {line_no}: field 'magnitude' invalid: {exc}") from None
        if kind is EventKind.FIRST_AUTHORSHIP:
            if path in first_authored:
                raise InputDataError(
                    f"event log line {line_no}: field 'kind' duplicates first authorship "
                    f"for file {path!r}"
                )
            first_authored.add(path)
        events.append(event)
    return events

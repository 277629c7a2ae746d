"""Input validation helpers shared by the estimator and the CLI."""
from __future__ import annotations

from collections.abc import Mapping

from .errors import ConfigError, InputDataError
from .model import AlgorithmParams, ContributionEvent, EventKind

ALGORITHMS = ("multimodal", "baseline")


def check_algorithm(name: str) -> str:
    if name not in ALGORITHMS:
        raise ConfigError(
            f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}"
        )
    return name


def _field(record: Mapping, name: str, types, where: str):
    if name not in record:
        raise InputDataError(f"{where}: missing field {name!r}")
    value = record[name]
    if not isinstance(value, types) or isinstance(value, bool):
        raise InputDataError(f"{where}: field {name!r} has wrong type")
    return value


def event_from_mapping(record: Mapping, where: str = "event") -> ContributionEvent:
    kind_raw = _field(record, "kind", str, where)
    try:
        kind = EventKind(kind_raw)
    except ValueError:
        raise InputDataError(f"{where}: unknown event kind {kind_raw!r}") from None
    try:
        return ContributionEvent(
            kind=kind,
            engineer_id=_field(record, "engineer_id", str, where),
            file_path=_field(record, "file_path", str, where),
            timestamp_ms=_field(record, "timestamp_ms", int, where),
            magnitude=float(record.get("magnitude", 1.0)),
            commit_ref=str(record.get("commit_ref", "")),
        )
    except (TypeError, ValueError) as exc:
        raise InputDataError(f"{where}: {exc}") from None


def check_events(X) -> list[ContributionEvent]:
    """Normalize an event collection: ready-made events or mapping records.

    Rejects anything else, and rejects a second first-authorship event for
    the same file anywhere in the batch.
    """
    if X is None:
        raise InputDataError("expected a collection of contribution events, got None")
    events: list[ContributionEvent] = []
    first_authored: set[str] = set()
    for i, item in enumerate(X):
        if isinstance(item, ContributionEvent):
            event = item
        elif isinstance(item, Mapping):
            event = event_from_mapping(item, where=f"X[{i}]")
        else:
            raise InputDataError(
                f"X[{i}]: expected a ContributionEvent or a mapping, "
                f"got {type(item).__name__}"
            )
        if event.kind is EventKind.FIRST_AUTHORSHIP:
            if event.file_path in first_authored:
                raise InputDataError(
                    f"X[{i}]: duplicate first_authorship for file {event.file_path!r}"
                )
            first_authored.add(event.file_path)
        events.append(event)
    return events


def check_params(**overrides) -> AlgorithmParams:
    """Build validated algorithm parameters from keyword overrides."""
    return AlgorithmParams().replace(**overrides)

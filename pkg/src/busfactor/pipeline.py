"""End-to-end orchestration from a repository to a report document.

The report is a plain dict shaped for JSON serialization; ``to_json`` pins
the canonical byte form (sorted keys, two-space indent, UTF-8) so identical
inputs always produce identical bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .collab import (
    collect_actors,
    emit_meeting_events,
    emit_review_events,
    filter_meetings,
    filter_reviews,
    parse_meetings,
    parse_reviews,
)
from .engine import analyze
from .errors import ConfigError
from .eventlog import write_event_log
from .gitvcs import default_branch, emit_vcs_events, snapshot_branch, traverse_branch
from .identity import IdentityIndex, RawActor, merge_identities
from .model import AlgorithmParams, ContributionEvent, canonical_order, format_instant

ALGORITHM_CHOICES = ("multimodal", "baseline", "both")


@dataclass
class AnalysisRun:
    report: dict
    events: list[ContributionEvent]


def _report_doc(
    project: str,
    branch: str,
    as_of_ms: int,
    algorithm: str,
    table,
    result,
    params: AlgorithmParams,
    warnings: list[str],
) -> dict:
    files = []
    for path in table.files:
        files.append(
            {
                "path": path,
                "authors": list(result.authors.get(path, ())),
                "top_doa": table.file_max.get(path, 0.0),
            }
        )
    return {
        "project": project,
        "branch": branch,
        "as_of": format_instant(as_of_ms),
        "algorithm": algorithm,
        "bus_factor": result.bus_factor,
        "key_engineers": list(result.key_engineers),
        "coverage_trace": list(result.coverage_trace),
        "file_count": result.file_count,
        "files": files,
        "params": params.as_dict(),
        "warnings": list(warnings),
    }


def run_analysis(
    repo_path,
    branch: str | None = None,
    reviews_path=None,
    meetings_path=None,
    params: AlgorithmParams | None = None,
    algorithm: str = "multimodal",
    as_of_ms: int | None = None,
) -> AnalysisRun:
    """Ingest every requested channel, score, and assemble the report.

    ``as_of_ms`` defaults to the branch head commit's timestamp so repeated
    runs on an unchanged repository agree byte for byte. In ``both`` mode the
    two embedded result documents match what single-algorithm runs emit.
    """
    if algorithm not in ALGORITHM_CHOICES:
        raise ConfigError(
            f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHM_CHOICES)}"
        )
    if params is None:
        params = AlgorithmParams()

    ingest_warnings: list[str] = []
    branch_name = branch or default_branch(repo_path)
    commits = traverse_branch(repo_path, branch_name)
    snapshot = snapshot_branch(repo_path, branch_name)

    reviews = []
    if reviews_path is not None:
        reviews = filter_reviews(parse_reviews(reviews_path))
    meetings = []
    if meetings_path is not None:
        meetings = filter_meetings(
            parse_meetings(meetings_path), params.meeting_exclude_keywords
        )

    actors = [RawActor(name=c.author_name, email=c.author_email) for c in commits]
    actors.extend(collect_actors(reviews, meetings))
    identity = IdentityIndex(merge_identities(actors))

    vcs = emit_vcs_events(commits, identity, snapshot, warnings=ingest_warnings)
    events = list(vcs.events)
    events.extend(
        emit_review_events(reviews, vcs.commit_index, identity, warnings=ingest_warnings)
    )
    events.extend(
        emit_meeting_events(
            meetings,
            vcs.commit_index,
            identity,
            window_days=params.meeting_window_days,
            warnings=ingest_warnings,
        )
    )
    events = canonical_order(events)

    if as_of_ms is None:
        as_of_ms = commits[-1].timestamp_ms if commits else 0
    project = Path(repo_path).resolve().name

    def single(algo: str) -> dict:
        warnings = list(ingest_warnings)
        table, result = analyze(
            events,
            snapshot.live_files,
            params,
            as_of_ms=as_of_ms,
            algorithm=algo,
            warnings=warnings,
        )
        return _report_doc(
            project, branch_name, as_of_ms, algo, table, result, params, warnings
        )

    if algorithm == "both":
        report = {
            "project": project,
            "branch": branch_name,
            "as_of": format_instant(as_of_ms),
            "algorithm": "both",
            "results": {
                "multimodal": single("multimodal"),
                "baseline": single("baseline"),
            },
        }
    else:
        report = single(algorithm)
    return AnalysisRun(report=report, events=events)


def dump_events(run: AnalysisRun, sink) -> None:
    write_event_log(run.events, sink)


def to_json(document: dict) -> str:
    """Canonical JSON bytes for a report: parse and re-serialize round-trips."""
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _render_single(doc: dict, lines: list[str]) -> None:
    lines.append(f"algorithm:      {doc['algorithm']}")
    lines.append(f"bus factor:     {doc['bus_factor']}")
    keys = ", ".join(doc["key_engineers"]) or "(none)"
    lines.append(f"key engineers:  {keys}")
    trace = ", ".join(f"{value:.3f}" for value in doc["coverage_trace"])
    lines.append(f"coverage trace: {trace or '(empty)'}")
    lines.append(f"files analyzed: {doc['file_count']}")
    for warning in doc["warnings"]:
        lines.append(f"warning: {warning}")


def render_text(document: dict) -> str:
    lines = [
        f"project:        {document['project']}",
        f"branch:         {document['branch']}",
        f"as of:          {document['as_of']}",
    ]
    if document["algorithm"] == "both":
        for name in ("multimodal", "baseline"):
            lines.append("")
            _render_single(document["results"][name], lines)
    else:
        _render_single(document, lines)
    return "\n".join(lines) + "\n"


def render_evaluation_text(document: dict) -> str:
    lines = [
        f"projects scored: {document['project_count']}",
        f"MAE:             {document['mae']:.4f}",
        f"precision:       {document['precision']:.4f}",
        f"recall:          {document['recall']:.4f}",
        f"F1:              {document['f1']:.4f}",
    ]
    for row in document["projects"]:
        lines.append(
            f"  {row['name']}: predicted {row['predicted_bus_factor']}, "
            f"truth mean {row['truth_mean']:.2f}, error {row['absolute_error']:.2f}"
        )
    for warning in document.get("warnings", ()):
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"

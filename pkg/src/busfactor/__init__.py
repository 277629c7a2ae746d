"""Bus factor estimation from git history, code reviews, and meetings."""

from .collab import (
    emit_meeting_events,
    emit_review_events,
    filter_meetings,
    filter_reviews,
    parse_meetings,
    parse_reviews,
)
from .engine import (
    BusFactorResult,
    DoaTable,
    FileLedger,
    analyze,
    authorship,
    build_ledgers,
    bus_factor,
    doa_baseline,
    doa_multimodal,
    score_table,
)
from .errors import (
    BusFactorError,
    ClockSkewError,
    ConfigError,
    InputDataError,
    RepositoryError,
)
from .estimator import BusFactorEstimator
from .eventlog import read_event_log, write_event_log
from .gitvcs import (
    emit_vcs_events,
    ingest_repository,
    snapshot_branch,
    traverse_branch,
)
from .evaluate import evaluate_predictions, load_predictions, load_truth
from .identity import Engineer, IdentityIndex, RawActor, merge_identities
from .model import (
    AlgorithmParams,
    ContributionEvent,
    EventKind,
    FileKey,
    canonical_order,
    decay,
    format_instant,
    parse_instant,
)
from .pipeline import AnalysisRun, run_analysis, to_json

__version__ = "0.1.0"

__all__ = [
    "AlgorithmParams",
    "AnalysisRun",
    "BusFactorError",
    "BusFactorEstimator",
    "BusFactorResult",
    "ClockSkewError",
    "ConfigError",
    "ContributionEvent",
    "DoaTable",
    "Engineer",
    "EventKind",
    "FileKey",
    "FileLedger",
    "IdentityIndex",
    "InputDataError",
    "RawActor",
    "RepositoryError",
    "analyze",
    "authorship",
    "build_ledgers",
    "bus_factor",
    "canonical_order",
    "decay",
    "doa_baseline",
    "doa_multimodal",
    "emit_meeting_events",
    "emit_review_events",
    "emit_vcs_events",
    "evaluate_predictions",
    "filter_meetings",
    "filter_reviews",
    "format_instant",
    "ingest_repository",
    "load_predictions",
    "load_truth",
    "merge_identities",
    "parse_instant",
    "parse_meetings",
    "parse_reviews",
    "read_event_log",
    "run_analysis",
    "score_table",
    "snapshot_branch",
    "to_json",
    "traverse_branch",
    "write_event_log",
]

"""Transaction-graph fault diagnosis.

Model a design as a DAG of observable states (nodes) and functional blocks
(arcs), derive the (test, monitor) x block activation bit matrix, and use
it to localize faults, score diagnosability, synthesize tests/monitors/
logic functions, run fault-injection campaigns, and drive hierarchical
multi-level diagnosis.
"""

from .diagnosis import (
    Candidate,
    DiagnosisVerdict,
    VerdictKind,
    diagnose,
    diagnose_multiple,
    diagnose_single,
    load_responses,
    match_responses,
    parse_response_text,
    render_response_text,
    save_responses,
    xor_distance,
)
from .engine import (
    CostPolicy,
    DiagnosisTree,
    OutcomeKind,
    PolicyKind,
    TraceStep,
    TraversalOutcome,
    directory_provider,
    load_tree,
    make_tree,
    simulating_provider,
    traverse,
    verify_trace,
)
from .errors import (
    DuplicateRowKey,
    EmptyModel,
    EquivalentColumns,
    FormatError,
    InvalidPath,
    LengthMismatch,
    MonitorOffPath,
    ProviderLengthMismatch,
    ResponseMismatch,
    SearchBudgetExceeded,
    TxdiagError,
    UncoverableArc,
    UnknownBlock,
    UnknownMonitor,
    UnknownNode,
    UnknownTest,
    ZeroDenominator,
)
from .faultsim import CampaignResult, TrialRecord, campaign, simulate
from .graph import (
    Arc,
    StructuralFeatures,
    TestSegment,
    TransactionGraph,
    ValidationReport,
    Violation,
    blocks_on_path,
    enumerate_paths,
    load_graph,
    save_graph,
    structural_features,
    validate_graph,
)
from .matrix import (
    ActivationMatrix,
    MatrixAudit,
    RowKey,
    audit_matrix,
    build_matrix,
    default_assignment,
    load_matrix,
    save_matrix,
)
from .metrics import (
    CoverageRecord,
    DiagMetrics,
    coverage_ratio,
    detection_quality,
    metrics,
)
from .synthesis import (
    DiagnosisFunction,
    LogicMode,
    MonitorPlan,
    RuleReport,
    RuleResult,
    evaluate_function,
    rule_check,
    synth_logic,
    synth_monitors,
    synth_tests,
)
from .util import ceil_log2

__version__ = "0.1.0"

__all__ = [
    "ActivationMatrix",
    "Arc",
    "CampaignResult",
    "Candidate",
    "CostPolicy",
    "CoverageRecord",
    "DiagMetrics",
    "DiagnosisFunction",
    "DiagnosisTree",
    "DiagnosisVerdict",
    "DuplicateRowKey",
    "EmptyModel",
    "EquivalentColumns",
    "FormatError",
    "InvalidPath",
    "LengthMismatch",
    "LogicMode",
    "MatrixAudit",
    "MonitorOffPath",
    "MonitorPlan",
    "OutcomeKind",
    "PolicyKind",
    "ProviderLengthMismatch",
    "ResponseMismatch",
    "RowKey",
    "RuleReport",
    "RuleResult",
    "SearchBudgetExceeded",
    "StructuralFeatures",
    "TestSegment",
    "TraceStep",
    "TransactionGraph",
    "TraversalOutcome",
    "TrialRecord",
    "TxdiagError",
    "UncoverableArc",
    "UnknownBlock",
    "UnknownMonitor",
    "UnknownNode",
    "UnknownTest",
    "ValidationReport",
    "VerdictKind",
    "Violation",
    "ZeroDenominator",
    "audit_matrix",
    "blocks_on_path",
    "build_matrix",
    "campaign",
    "ceil_log2",
    "coverage_ratio",
    "default_assignment",
    "detection_quality",
    "diagnose",
    "diagnose_multiple",
    "diagnose_single",
    "directory_provider",
    "enumerate_paths",
    "evaluate_function",
    "load_graph",
    "load_matrix",
    "load_responses",
    "load_tree",
    "make_tree",
    "match_responses",
    "metrics",
    "parse_response_text",
    "render_response_text",
    "rule_check",
    "save_graph",
    "save_matrix",
    "save_responses",
    "simulate",
    "simulating_provider",
    "structural_features",
    "synth_logic",
    "synth_monitors",
    "synth_tests",
    "traverse",
    "validate_graph",
    "verify_trace",
    "xor_distance",
]

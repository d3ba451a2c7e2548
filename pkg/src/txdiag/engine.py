"""Hierarchical diagnosis engine.

A diagnosis tree stacks activation matrices: each block of a level's matrix
may own a child matrix that refines the fault location inside that block.
Traversal fetches the response vector observed at a node, finds the first
column that explains it exactly, and then either repairs the block or
descends into its child, depending on whether time or money is dearer.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field, replace

from .diagnosis import match_responses, parse_response_text, xor_distance
from .errors import FormatError, ProviderLengthMismatch, TxdiagError, UnknownBlock
from .faultsim import simulate
from .matrix import ActivationMatrix, load_matrix

ROOT_BRANCH = "root"


@dataclass(frozen=True)
class DiagnosisTree:
    matrix: ActivationMatrix
    children: dict[str, "DiagnosisTree"] = field(default_factory=dict)
    level: int = 0


def make_tree(matrix: ActivationMatrix, children: dict[str, DiagnosisTree] | None = None) -> DiagnosisTree:
    """Build a tree from the root down, assigning levels and checking that
    every child key is a column of its parent's matrix."""

    def relevel(t: DiagnosisTree, level: int) -> DiagnosisTree:
        kids = {b: relevel(c, level + 1) for b, c in t.children.items()}
        return replace(t, children=kids, level=level)

    root = DiagnosisTree(matrix, dict(children or {}), 0)
    _check_keys(root)
    return relevel(root, 0)


def _check_keys(t: DiagnosisTree) -> None:
    stray = sorted(set(t.children) - set(t.matrix.cols))
    if stray:
        raise UnknownBlock(
            "child entries for blocks not in the matrix: " + ", ".join(stray)
        )
    for c in t.children.values():
        _check_keys(c)


class PolicyKind(enum.Enum):
    TIME = "time"
    MONEY = "money"


@dataclass(frozen=True)
class CostPolicy:
    kind: PolicyKind = PolicyKind.MONEY
    max_depth: int | None = None  # deepest level the engine may enter

    def __post_init__(self) -> None:
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer or None")


class OutcomeKind(enum.Enum):
    FAULT_FREE = "fault-free"
    REPAIR = "repair"
    TEST_CORRECTION = "test-correction"


@dataclass(frozen=True)
class TraceStep:
    level: int
    branch: str
    column: str | None
    distance: int | None
    action: str  # "clean" | "scan" | "repair" | "descend" | "correct"
    ties: tuple[str, ...] = ()


@dataclass(frozen=True)
class TraversalOutcome:
    kind: OutcomeKind
    repair_path: tuple[str, ...]
    level: int | None
    branch: str | None
    trace: tuple[TraceStep, ...]
    xor_evals: int


def _fetch(node: DiagnosisTree, branch: str, provider) -> tuple[int, ...]:
    r = tuple(provider(node, branch))
    if len(r) != len(node.matrix.rows):
        raise ProviderLengthMismatch(
            f"provider returned {len(r)} bits for the {len(node.matrix.rows)}-row "
            f"matrix at {branch!r}"
        )
    for b in r:
        if b not in (0, 1):
            raise ValueError(f"provider bits must be 0 or 1, got {b!r}")
    return r


def traverse(
    tree: DiagnosisTree, provider, policy: CostPolicy = CostPolicy()
) -> TraversalOutcome:
    """Walk the tree from the root, deciding repair vs descend per level.

    A provider is a callable `(node, branch) -> response bits` for the
    node's own matrix.  An all-zero response at the root means fault-free;
    below the root it exonerates the subtree and the parent resumes its
    column scan.  A nonzero response with no distance-0 column means the
    tests at that node cannot explain what the monitors saw, so the
    traversal stops and asks for test correction there.
    """
    trace: list[TraceStep] = []
    evals = 0

    def visit(node: DiagnosisTree, branch: str, path: tuple[str, ...]):
        nonlocal evals
        r = _fetch(node, branch, provider)
        if not any(r):
            trace.append(TraceStep(node.level, branch, None, None, "clean"))
            return ("clean", None)
        m = node.matrix
        for col_id in m.cols:
            col = m.column(col_id)
            d = xor_distance(col, r)
            evals += len(m.rows)
            trace.append(TraceStep(node.level, branch, col_id, d, "scan"))
            if d:
                continue
            ties = tuple(
                c for c in m.cols if c != col_id and m.column(c) == col
            )
            child = node.children.get(col_id)
            at_floor = policy.max_depth is not None and node.level >= policy.max_depth
            if policy.kind is PolicyKind.TIME or child is None or at_floor:
                trace.append(TraceStep(node.level, branch, col_id, 0, "repair", ties))
                return ("repair", (*path, col_id))
            trace.append(TraceStep(node.level, branch, col_id, 0, "descend", ties))
            sub = visit(child, f"{branch}.{col_id}", (*path, col_id))
            if sub[0] == "clean":
                continue  # subtree exonerated; keep scanning this level
            return sub
        trace.append(TraceStep(node.level, branch, None, None, "correct"))
        return ("correct", (node.level, branch))

    tag, payload = visit(tree, ROOT_BRANCH, ())
    if tag == "clean":
        return TraversalOutcome(OutcomeKind.FAULT_FREE, (), None, None, tuple(trace), evals)
    if tag == "repair":
        return TraversalOutcome(
            OutcomeKind.REPAIR, payload, len(payload) - 1, None, tuple(trace), evals
        )
    level, branch = payload
    return TraversalOutcome(
        OutcomeKind.TEST_CORRECTION, (), level, branch, tuple(trace), evals
    )


def node_at(tree: DiagnosisTree, branch: str) -> DiagnosisTree:
    """Resolve a dotted branch label back to its tree node.

    Block ids may themselves contain dots, so child keys are matched
    longest-first.
    """
    if branch == ROOT_BRANCH:
        return tree
    prefix = ROOT_BRANCH + "."
    if not branch.startswith(prefix):
        raise UnknownBlock(f"branch {branch!r} does not start at the root")
    rest = branch[len(prefix):]
    node = tree
    while rest:
        for key in sorted(node.children, key=len, reverse=True):
            if rest == key:
                return node.children[key]
            if rest.startswith(key + "."):
                node = node.children[key]
                rest = rest[len(key) + 1:]
                break
        else:
            raise UnknownBlock(f"no tree node at branch {branch!r}")
    return node


def verify_trace(tree: DiagnosisTree, provider, outcome: TraversalOutcome) -> bool:
    """Replay every trace step against fresh provider responses.

    True when each recorded distance and decision still holds; a stale or
    tampered trace comes back False.
    """
    try:
        for step in outcome.trace:
            node = node_at(tree, step.branch)
            r = _fetch(node, step.branch, provider)
            if step.action == "clean":
                if any(r):
                    return False
            elif step.action in ("scan", "repair", "descend"):
                if step.column is None:
                    return False
                d = xor_distance(node.matrix.column(step.column), r)
                if d != step.distance:
                    return False
                if step.action != "scan" and d != 0:
                    return False
            elif step.action == "correct":
                if not any(r):
                    return False
                if any(
                    xor_distance(node.matrix.column(c), r) == 0
                    for c in node.matrix.cols
                ):
                    return False
            else:
                return False
    except TxdiagError:
        return False
    return True


# ---------------------------------------------------------------------------
# Providers


def simulating_provider(faults_by_branch: dict[str, tuple[str, ...]]):
    """Provider that injects the given faults at each branch (absent or
    empty entries respond all-clean)."""

    def provider(node: DiagnosisTree, branch: str) -> tuple[int, ...]:
        faults = tuple(faults_by_branch.get(branch, ()))
        if not faults:
            return (0,) * len(node.matrix.rows)
        return simulate(node.matrix, faults)

    return provider


def directory_provider(dirpath):
    """Provider that reads `<branch>.resp` response files from a directory."""

    def provider(node: DiagnosisTree, branch: str) -> tuple[int, ...]:
        path = os.path.join(dirpath, f"{branch}.resp")
        if not os.path.exists(path):
            raise FormatError(f"no response file for node {branch!r}: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            return match_responses(node.matrix, parse_response_text(fh.read()))

    return provider


# ---------------------------------------------------------------------------
# Tree files


def load_tree(path) -> DiagnosisTree:
    """Read a recursive tree file: {"matrix": <csv path>, "children":
    {<block>: <tree object | tree file path>}}.  Paths are resolved
    relative to the file that mentions them."""
    path = os.path.abspath(path)
    base = os.path.dirname(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"tree file {path} is not valid JSON: {e}") from e

    def build(obj, base: str, level: int) -> DiagnosisTree:
        if not isinstance(obj, dict) or "matrix" not in obj:
            raise FormatError("tree node must be an object with a 'matrix' path")
        m = load_matrix(os.path.join(base, obj["matrix"]))
        children = {}
        for block, sub in (obj.get("children") or {}).items():
            if isinstance(sub, str):
                sub_path = os.path.join(base, sub)
                loaded = load_tree(sub_path)
                children[block] = _relevel(loaded, level + 1)
            else:
                children[block] = build(sub, base, level + 1)
        node = DiagnosisTree(m, children, level)
        stray = sorted(set(children) - set(m.cols))
        if stray:
            raise FormatError(
                "tree children name blocks missing from the matrix: " + ", ".join(stray)
            )
        return node

    return build(obj, base, 0)


def _relevel(t: DiagnosisTree, level: int) -> DiagnosisTree:
    kids = {b: _relevel(c, level + 1) for b, c in t.children.items()}
    return replace(t, children=kids, level=level)

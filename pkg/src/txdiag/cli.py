"""Command-line interface.

Exit codes: 0 success, 1 domain verdicts and validation failures
(deficient tests, invalid graphs), 2 usage and file-format errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .diagnosis import (
    DEFAULT_BUDGET,
    DEFAULT_K_MAX,
    VerdictKind,
    diagnose,
    load_responses,
    render_response_text,
)
from .engine import (
    CostPolicy,
    OutcomeKind,
    PolicyKind,
    directory_provider,
    load_tree,
    traverse,
)
from .errors import FormatError, TxdiagError, UnknownMonitor
from .faultsim import DEFAULT_SAMPLES, campaign, simulate
from .graph import (
    TestSegment,
    enumerate_paths,
    load_graph,
    segment_from_obj,
    structural_features,
    validate_graph,
)
from .matrix import (
    audit_matrix,
    build_matrix,
    load_matrix,
    matrix_to_csv,
    matrix_to_csv_transposed,
)
from .metrics import metrics
from .synthesis import (
    LogicMode,
    logic_to_obj,
    render_logic_text,
    rule_check,
    synth_logic,
    synth_monitors,
    synth_tests,
)
from .util import frac_obj, frac_text, to_json


def render_matrix(m, style: str = "text") -> str:
    """Dot-for-zero table (`text`) or the strict interchange CSV (`csv`)."""
    if style == "csv":
        return matrix_to_csv(m)
    label = "row,monitor"
    row_labels = [f"{k.test},{k.monitor}" for k in m.rows]
    w0 = max(len(label), *(len(x) for x in row_labels)) if row_labels else len(label)
    header = label.ljust(w0) + "".join(" " + c for c in m.cols)
    lines = [header]
    for lab, row in zip(row_labels, m.bits):
        cells = "".join(
            " " + ("1" if bit else ".").rjust(len(c)) for c, bit in zip(m.cols, row)
        )
        lines.append(lab.ljust(w0) + cells)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Input loading


def _load_validated_graph(path):
    g, tests = load_graph(path)
    report = validate_graph(g)
    if not report.ok:
        detail = "; ".join(f"{v.kind}: {v.detail}" for v in report.violations)
        raise TxdiagError(f"invalid graph {path}: {detail}")
    return g, tests


def _load_tests(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"tests file {path} is not valid JSON: {e}") from e
    if isinstance(d, list):
        items = d
    elif isinstance(d, dict) and "tests" in d:
        items = d["tests"]
    else:
        raise FormatError(
            f"tests file {path} must be a JSON array or an object with a 'tests' key"
        )
    return tuple(segment_from_obj(o) for o in items)


def _split_list(text: str) -> tuple[str, ...]:
    return tuple(s for s in (part.strip() for part in text.split(",")) if s)


def _load_model(args):
    """Graph + tests + monitors, with per-flag overrides applied."""
    g, tests = _load_validated_graph(args.graph)
    if getattr(args, "tests", None):
        tests = _load_tests(args.tests)
    if getattr(args, "monitors", None):
        wanted = _split_list(args.monitors)
        unknown = sorted(set(wanted) - set(g.nodes))
        if unknown:
            raise UnknownMonitor("monitors are not graph nodes: " + ", ".join(unknown))
        g = g.with_monitors(wanted)
    return g, tests


def _classes_text(classes) -> str:
    merged = ["{" + ",".join(c) + "}" for c in classes if len(c) > 1]
    singles = sum(1 for c in classes if len(c) == 1)
    parts = merged + ([f"{singles} singletons"] if singles else [])
    return "; ".join(parts) if parts else "none"


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns (report text, exit code)


def _cmd_analyze(args):
    g, tests = _load_model(args)
    feats = structural_features(g)
    report = metrics(g, tests, g.monitors)
    if args.figure:
        from . import figures

        figures.save_graph_figure(g, args.figure)
    if _fmt(args) == "json":
        obj = {
            "n_blocks": report.n_blocks,
            "n_transit": report.n_transit,
            "d_structural": frac_obj(report.d_structural),
            "efficiency": frac_obj(report.efficiency),
            "quality": frac_obj(report.quality),
            "optimal": report.optimal,
            "warnings": list(report.warnings),
        }
        return to_json(obj), 0
    lines = [
        f"graph: {len(g.nodes)} nodes, {report.n_blocks} blocks, "
        f"{report.test_len} tests, {report.monitor_count} monitors",
        f"sources: {', '.join(feats.sources)}   sinks: {', '.join(feats.sinks)}   "
        f"transit: {', '.join(feats.transit_nodes) or 'none'}",
        f"D (structural diagnosability) = {frac_text(report.d_structural)}",
        f"E (test efficiency)           = {frac_text(report.efficiency)}",
        f"Q (diagnosis quality)         = {frac_text(report.quality)}",
        "optimal: " + ("yes" if report.optimal else "no"),
    ]
    lines += [f"warning: {w}" for w in report.warnings]
    return "\n".join(lines) + "\n", 0


def _cmd_paths(args):
    g, _ = _load_validated_graph(args.graph)
    feats = structural_features(g)
    start_nodes = (args.src,) if args.src else feats.sources
    targets = _split_list(args.to) if args.to else feats.sinks
    found = []
    for s in start_nodes:
        found.extend(enumerate_paths(g, s, targets))
    found = [TestSegment(f"P{i + 1}", p.path, p.arcs) for i, p in enumerate(found)]
    if _fmt(args) == "json":
        obj = {
            "paths": [
                {"id": p.id, "path": list(p.path), "arcs": list(p.arcs or ())}
                for p in found
            ]
        }
        return to_json(obj), 0
    lines = [
        f"{p.id}: {' '.join(p.path)}  via {','.join(p.arcs or ())}" for p in found
    ]
    return ("\n".join(lines) + "\n") if lines else "no paths\n", 0


def _cmd_matrix(args):
    g, tests = _load_model(args)
    m = build_matrix(g, tests)
    if args.figure:
        from . import figures

        figures.save_matrix_figure(m, args.figure)
    if _fmt(args) == "json":
        obj = {
            "rows": [{"test": k.test, "monitor": k.monitor} for k in m.rows],
            "cols": list(m.cols),
            "bits": [list(r) for r in m.bits],
        }
        return to_json(obj), 0
    if args.style == "text":
        return render_matrix(m, "text"), 0
    return (matrix_to_csv_transposed(m) if args.transpose else matrix_to_csv(m)), 0


def _cmd_audit(args):
    m = load_matrix(args.matrix, transpose=args.transpose)
    audit = audit_matrix(m)
    if _fmt(args) == "json":
        obj = {
            "row_count": audit.row_count,
            "col_count": len(m.cols),
            "coverage_ok": audit.coverage_ok,
            "uncovered": list(audit.uncovered),
            "duplicate_rows": [
                [{"test": k.test, "monitor": k.monitor} for k in grp]
                for grp in audit.duplicate_rows
            ],
            "equivalence_classes": [list(c) for c in audit.equivalence_classes],
            "ceil_log2_cols": audit.ceil_log2_cols,
            "log2_bound_ok": audit.log2_bound_ok,
        }
        return to_json(obj), 0
    dup = (
        "; ".join(
            " = ".join(f"({k.test},{k.monitor})" for k in grp)
            for grp in audit.duplicate_rows
        )
        or "none"
    )
    lines = [
        f"rows: {audit.row_count}  cols: {len(m.cols)}",
        "coverage: "
        + ("ok, every block activated" if audit.coverage_ok
           else "MISSING " + ", ".join(audit.uncovered)),
        f"duplicate rows: {dup}",
        f"classes: {_classes_text(audit.equivalence_classes)}",
        f"log2 bound: ceil(log2 {len(m.cols)}) = {audit.ceil_log2_cols} "
        + ("<=" if audit.log2_bound_ok else ">")
        + f" {audit.row_count} rows: "
        + ("ok" if audit.log2_bound_ok else "VIOLATED"),
    ]
    return "\n".join(lines) + "\n", 0


def _cmd_diagnose(args):
    m = load_matrix(args.matrix, transpose=args.transpose)
    r = load_responses(args.responses, m)
    verdict = diagnose(m, r, k_max=args.k_max, budget=args.budget)
    if args.figure:
        from . import figures

        figures.save_candidates_figure(verdict.candidates, args.figure)
    code = 1 if verdict.kind is VerdictKind.TEST_DEFICIENT else 0
    if _fmt(args) == "json":
        obj = {
            "kind": verdict.kind.value,
            "note": verdict.note,
            "candidates": [
                {"blocks": list(c.blocks), "distance": c.distance}
                for c in verdict.candidates
            ],
            "covers": [list(c) for c in verdict.covers],
        }
        return to_json(obj), code
    lines = [f"verdict: {verdict.kind.value}", verdict.note]
    if verdict.candidates:
        lines.append("candidates (block class, xor distance):")
        lines += [
            f"  {'/'.join(c.blocks)}  distance {c.distance}"
            for c in verdict.candidates
        ]
    if verdict.covers:
        lines.append("minimal multi-fault covers:")
        lines += ["  {" + ", ".join(c) + "}" for c in verdict.covers]
    return "\n".join(lines) + "\n", code


def _cmd_simulate(args):
    g, tests = _load_model(args)
    m = build_matrix(g, tests)
    r = simulate(m, _split_list(args.fault))
    if _fmt(args) == "json":
        obj = {
            "responses": [
                {"test": k.test, "monitor": k.monitor, "bit": bit}
                for k, bit in zip(m.rows, r)
            ]
        }
        return to_json(obj), 0
    return render_response_text(m, r), 0


def _cmd_campaign(args):
    g, tests = _load_model(args)
    result = campaign(
        g,
        tests,
        None,
        args.k,
        seed=args.seed,
        samples=args.samples,
    )
    if args.figure:
        from . import figures

        figures.save_campaign_figure(result, args.figure)
    if _fmt(args) == "json":
        obj = {
            "k": result.k,
            "mode": result.mode,
            "seed": result.seed,
            "n_total": result.n_total,
            "n_detected": result.n_detected,
            "n_unique": result.n_unique,
            "n_subsumed": result.n_subsumed,
            "detection_rate": frac_obj(result.detection_rate),
        }
        if args.details:
            obj["records"] = [
                {
                    "faults": list(t.faults),
                    "detected": t.detected,
                    "unique": t.unique,
                    "subsumed": t.subsumed,
                    "covers": [list(c) for c in t.covers],
                }
                for t in result.records
            ]
        return to_json(obj), 0
    lines = [
        f"fault campaign: k={result.k} ({result.mode}"
        + (f", seed={result.seed}" if result.seed is not None else "")
        + ")",
        f"fault sets: {result.n_total}  detected: {result.n_detected}  "
        f"unique: {result.n_unique}  subsumed: {result.n_subsumed}",
        f"detection rate: {frac_text(result.detection_rate)}",
    ]
    if args.details:
        for t in result.records:
            status = (
                ("detected" if t.detected else "missed")
                + (" unique" if t.unique else "")
                + (" subsumed" if t.subsumed else "")
            )
            lines.append(f"  {{{','.join(t.faults)}}}: {status}")
    return "\n".join(lines) + "\n", 0


def _cmd_synth_tests(args):
    g, _ = _load_validated_graph(args.graph)
    tests = synth_tests(g)
    if _fmt(args) == "json":
        obj = {
            "tests": [
                {"id": t.id, "path": list(t.path), "arcs": list(t.arcs or ())}
                for t in tests
            ]
        }
        return to_json(obj), 0
    lines = [
        f"{t.id}: {' '.join(t.path)}  via {','.join(t.arcs or ())}" for t in tests
    ]
    return ("\n".join(lines) + "\n") if lines else "no tests needed\n", 0


def _cmd_synth_monitors(args):
    g, tests = _load_validated_graph(args.graph)
    if getattr(args, "tests", None):
        tests = _load_tests(args.tests)
    if not tests:
        tests = synth_tests(g)
    plan = synth_monitors(g, tests)
    if _fmt(args) == "json":
        obj = {
            "base_monitors": list(plan.base_monitors),
            "added_monitors": list(plan.added_monitors),
            "monitors": list(plan.monitors),
            "resulting_classes": [list(c) for c in plan.resulting_classes],
            "all_singleton": plan.all_singleton,
        }
        return to_json(obj), 0
    lines = [
        "base monitors: " + (", ".join(plan.base_monitors) or "none"),
        "added monitors: " + (", ".join(plan.added_monitors) or "none"),
        f"classes: {_classes_text(plan.resulting_classes)}",
    ]
    return "\n".join(lines) + "\n", 0


def _cmd_synth_logic(args):
    m = load_matrix(args.matrix, transpose=args.transpose)
    funcs = synth_logic(m, LogicMode(args.mode))
    if _fmt(args) == "json":
        return to_json(logic_to_obj(funcs)), 0
    return render_logic_text(funcs), 0


def _cmd_rules(args):
    g, tests = _load_model(args)
    report = rule_check(g, tests, g.monitors)
    if _fmt(args) == "json":
        obj = {
            "ok": report.ok,
            "rules": [
                {
                    "rule": r.rule,
                    "title": r.title,
                    "status": r.status,
                    "advisory": r.advisory,
                    "evidence": r.evidence,
                }
                for r in report.results
            ],
        }
        return to_json(obj), 0
    lines = []
    for r in report.results:
        flag = f"[{r.status}]" + (" (advisory)" if r.advisory else "")
        lines.append(f"rule {r.rule} {flag} {r.title}: {r.evidence}")
    lines.append("report: " + ("ok" if report.ok else "binding rule failures"))
    return "\n".join(lines) + "\n", 0


def _cmd_tree_diagnose(args):
    tree = load_tree(args.tree)
    provider = directory_provider(args.responses)
    policy = CostPolicy(PolicyKind(args.policy), args.max_depth)
    outcome = traverse(tree, provider, policy)
    code = 1 if outcome.kind is OutcomeKind.TEST_CORRECTION else 0
    if _fmt(args) == "json":
        obj = {
            "kind": outcome.kind.value,
            "repair_path": list(outcome.repair_path),
            "level": outcome.level,
            "branch": outcome.branch,
            "xor_evals": outcome.xor_evals,
            "trace": [
                {
                    "level": s.level,
                    "branch": s.branch,
                    "column": s.column,
                    "distance": s.distance,
                    "action": s.action,
                    "ties": list(s.ties),
                }
                for s in outcome.trace
            ],
        }
        return to_json(obj), code
    lines = [f"outcome: {outcome.kind.value}"]
    if outcome.kind is OutcomeKind.REPAIR:
        lines.append("repair path: " + " > ".join(outcome.repair_path))
    if outcome.kind is OutcomeKind.TEST_CORRECTION:
        lines.append(f"correction needed at level {outcome.level}, branch {outcome.branch}")
    lines.append(f"xor evaluations: {outcome.xor_evals}")
    lines.append("trace:")
    for s in outcome.trace:
        bits = [f"  L{s.level} {s.branch}  {s.action}"]
        if s.column is not None:
            bits.append(f" {s.column}")
        if s.distance is not None:
            bits.append(f" distance={s.distance}")
        if s.ties:
            bits.append("  (class ties: " + ", ".join(s.ties) + ")")
        lines.append("".join(bits))
    return "\n".join(lines) + "\n", code


# ---------------------------------------------------------------------------
# Parser

_DEFAULT_FORMAT = {"campaign": "json"}


def _fmt(args) -> str:
    return args.format or _DEFAULT_FORMAT.get(args.command, "text")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="txdiag",
        description="Transaction-graph fault diagnosis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--format", choices=("text", "json"), default=None,
                       help="report format (default: text)")
        p.add_argument("-o", "--output", default=None, help="write the report to a file")
        return p

    p = add("analyze", _cmd_analyze, "structural features and diagnosability metrics")
    p.add_argument("graph")
    p.add_argument("--tests", help="JSON file overriding the graph's tests")
    p.add_argument("--monitors", help="comma-separated monitor nodes (overrides the graph)")
    p.add_argument("--figure", help="also render the graph drawing to this file")

    p = add("paths", _cmd_paths, "enumerate simple source-to-sink paths")
    p.add_argument("graph")
    p.add_argument("--from", dest="src", default=None, help="start node (default: every source)")
    p.add_argument("--to", default=None, help="comma-separated target nodes (default: sinks)")

    p = add("matrix", _cmd_matrix, "build the activation matrix (CSV by default)")
    p.add_argument("graph")
    p.add_argument("--tests", help="JSON file overriding the graph's tests")
    p.add_argument("--monitors", help="comma-separated monitor nodes (overrides the graph)")
    p.add_argument("--style", choices=("csv", "text"), default="csv",
                   help="csv interchange or dot-for-zero table")
    p.add_argument("--transpose", action="store_true", help="emit blocks as rows")
    p.add_argument("--figure", help="also render the bit grid to this file")

    p = add("audit", _cmd_audit, "coverage, duplicate rows and equivalence classes")
    p.add_argument("matrix")
    p.add_argument("--transpose", action="store_true", help="input CSV has blocks as rows")

    p = add("diagnose", _cmd_diagnose, "locate faults from observed responses")
    p.add_argument("matrix")
    p.add_argument("responses")
    p.add_argument("--transpose", action="store_true", help="input CSV has blocks as rows")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX,
                   help="largest multi-fault cover searched")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="subset enumeration budget")
    p.add_argument("--figure", help="also render the candidate chart to this file")

    p = add("simulate", _cmd_simulate, "response of a given fault set")
    p.add_argument("graph")
    p.add_argument("--tests", help="JSON file overriding the graph's tests")
    p.add_argument("--monitors", help="comma-separated monitor nodes (overrides the graph)")
    p.add_argument("--fault", required=True, help="comma-separated faulty blocks")

    p = add("campaign", _cmd_campaign, "inject all fault sets of size k and tally recovery")
    p.add_argument("graph")
    p.add_argument("--tests", help="JSON file overriding the graph's tests")
    p.add_argument("--monitors", help="comma-separated monitor nodes (overrides the graph)")
    p.add_argument("-k", type=int, required=True, help="fault multiplicity")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                   help="sample size above the exhaustive limit")
    p.add_argument("--details", action="store_true", help="include per-fault-set records")
    p.add_argument("--figure", help="also render the counter chart to this file")

    p = add("synth-tests", _cmd_synth_tests, "minimum path-cover test set")
    p.add_argument("graph")

    p = add("synth-monitors", _cmd_synth_monitors, "monitor placement splitting fault classes")
    p.add_argument("graph")
    p.add_argument("--tests", help="JSON file with the test set (default: graph's, else synthesized)")

    p = add("synth-logic", _cmd_synth_logic, "per-block diagnosis logic functions")
    p.add_argument("matrix")
    p.add_argument("--mode", choices=("positive", "minterm"), default="positive")
    p.add_argument("--transpose", action="store_true", help="input CSV has blocks as rows")

    p = add("rules", _cmd_rules, "check the eight design-for-diagnosis rules")
    p.add_argument("graph")
    p.add_argument("--tests", help="JSON file overriding the graph's tests")
    p.add_argument("--monitors", help="comma-separated monitor nodes (overrides the graph)")

    p = add("tree-diagnose", _cmd_tree_diagnose, "traverse a hierarchical diagnosis tree")
    p.add_argument("tree")
    p.add_argument("--responses", required=True,
                   help="directory of <branch>.resp files (root.resp, root.B4.resp, ...)")
    p.add_argument("--policy", choices=("time", "money"), default="money")
    p.add_argument("--max-depth", type=int, default=None,
                   help="deepest level the engine may enter")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        text, code = args.handler(args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TxdiagError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

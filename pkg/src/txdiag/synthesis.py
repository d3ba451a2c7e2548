"""Synthesis of diagnosable models.

Three generators — a minimal path-cover test set, a monitor placement that
breaks block equivalence classes, and per-block diagnosis logic functions —
plus a structural report of eight design-for-diagnosis rules.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .errors import EquivalentColumns, UncoverableArc
from .graph import (
    TestSegment,
    TransactionGraph,
    blocks_on_path,
    degrees,
    enumerate_paths,
    out_arcs,
    structural_features,
)
from .matrix import ActivationMatrix, RowKey, audit_matrix, build_matrix
from .util import ceil_log2


@dataclass(frozen=True)
class MonitorPlan:
    base_monitors: tuple[str, ...]
    added_monitors: tuple[str, ...]
    resulting_classes: tuple[tuple[str, ...], ...]

    @property
    def monitors(self) -> tuple[str, ...]:
        return self.base_monitors + self.added_monitors

    @property
    def all_singleton(self) -> bool:
        return all(len(c) == 1 for c in self.resulting_classes)


class LogicMode(enum.Enum):
    POSITIVE_ONLY = "positive"
    FULL_MINTERM = "minterm"


@dataclass(frozen=True)
class DiagnosisFunction:
    block: str
    positive_literals: tuple[RowKey, ...]
    negative_literals: tuple[RowKey, ...] = ()


@dataclass(frozen=True)
class RuleResult:
    rule: int
    title: str
    status: str  # "pass" | "fail" | "not-applicable"
    advisory: bool
    evidence: str


@dataclass(frozen=True)
class RuleReport:
    results: tuple[RuleResult, ...]

    @property
    def ok(self) -> bool:
        """True when no binding (non-advisory) rule fails."""
        return all(r.status != "fail" or r.advisory for r in self.results)


# ---------------------------------------------------------------------------
# Test synthesis: minimum path cover of the arcs

EXACT_COVER_LIMIT = 64


def _all_paths(g: TransactionGraph) -> list[TestSegment]:
    feats = structural_features(g)
    raw: list[TestSegment] = []
    for s in feats.sources:
        raw.extend(enumerate_paths(g, s, feats.sinks))
    return [p for p in raw if p.arcs]


def _min_cover_flow(
    g: TransactionGraph, seed: list[TestSegment]
) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Minimum-cardinality set of source-to-sink paths covering every arc.

    Every arc carries one unit of mandatory flow.  The seed cover provides a
    feasible routing; a reverse max-flow pass cancels surplus path volume
    (which cannot drop any arc below its unit demand); the surviving flow
    then decomposes into the returned (nodes, arc ids) paths.  Polynomial
    time, deterministic: decomposition walks sources in declaration order
    and takes the smallest-id arc with remaining flow at each step.
    """
    feats = structural_features(g)
    idx = {v: i + 2 for i, v in enumerate(g.nodes)}
    sigma, tau = 0, 1

    adj: list[list[int]] = [[] for _ in range(len(g.nodes) + 2)]
    eto: list[int] = []
    ecap: list[int] = []

    def add_edge(u: int, v: int, cap_uv: int, cap_vu: int) -> int:
        eto.append(v)
        ecap.append(cap_uv)
        adj[u].append(len(eto) - 1)
        eto.append(u)
        ecap.append(cap_vu)
        adj[v].append(len(eto) - 1)
        return len(eto) - 2

    flow = {a.id: 0 for a in g.arcs}
    head = dict.fromkeys(feats.sources, 0)
    tail = dict.fromkeys(feats.sinks, 0)
    for t in seed:
        for b in t.arcs or ():
            flow[b] += 1
        head[t.path[0]] += 1
        tail[t.path[-1]] += 1

    big = 1 << 30
    # Residual edges for the cancelling pass, which pushes sink-to-source:
    # backwards over an edge it may reclaim flow down to the lower bound,
    # forwards it may add flow without limit.
    arc_edge = {
        a.id: add_edge(idx[a.dst], idx[a.src], flow[a.id] - 1, big) for a in g.arcs
    }
    head_edge = {s: add_edge(idx[s], sigma, head[s], big) for s in feats.sources}
    tail_edge = {t: add_edge(tau, idx[t], tail[t], big) for t in feats.sinks}

    while True:
        parent = [-1] * len(adj)
        parent[tau] = -2
        queue = deque([tau])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                if ecap[e] > 0 and parent[eto[e]] == -1:
                    parent[eto[e]] = e
                    queue.append(eto[e])
        if parent[sigma] == -1:
            break
        delta = big
        v = sigma
        while v != tau:
            e = parent[v]
            delta = min(delta, ecap[e])
            v = eto[e ^ 1]
        v = sigma
        while v != tau:
            e = parent[v]
            ecap[e] -= delta
            ecap[e ^ 1] += delta
            v = eto[e ^ 1]

    for a in g.arcs:
        flow[a.id] = 1 + ecap[arc_edge[a.id]]
    for s in feats.sources:
        head[s] = ecap[head_edge[s]]
    for t in feats.sinks:
        tail[t] = ecap[tail_edge[t]]

    adj_out = out_arcs(g)
    paths: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    for s in feats.sources:
        while head[s] > 0:
            head[s] -= 1
            nodes, arcs = [s], []
            while True:
                a = next((a for a in adj_out[nodes[-1]] if flow[a.id] > 0), None)
                if a is None:
                    tail[nodes[-1]] -= 1
                    break
                flow[a.id] -= 1
                arcs.append(a.id)
                nodes.append(a.dst)
            paths.append((tuple(nodes), tuple(arcs)))
    return paths


def _min_cover_greedy(masks: list[int], full: int) -> list[int]:
    chosen: list[int] = []
    covered = 0
    while covered != full:
        gain, pick = 0, -1
        for i, mask in enumerate(masks):
            g = (mask & ~covered).bit_count()
            if g > gain:
                gain, pick = g, i
        chosen.append(pick)
        covered |= masks[pick]
    return sorted(chosen)


def synth_tests(g: TransactionGraph) -> tuple[TestSegment, ...]:
    """A minimum-cardinality set of source-to-sink paths covering every arc.

    Exact (minimum flow over unit arc demands) up to 64 arcs; greedy (most
    new arcs first, earliest path on ties) beyond.  Order is deterministic
    either way; segments are relabelled T1, T2, ...
    """
    paths = _all_paths(g)
    arc_index = {a.id: j for j, a in enumerate(g.arcs)}
    masks = []
    for p in paths:
        mask = 0
        for b in p.arcs or ():
            mask |= 1 << arc_index[b]
        masks.append(mask)

    full = (1 << len(g.arcs)) - 1
    reachable = 0
    for mask in masks:
        reachable |= mask
    if reachable != full:
        missing = [a.id for j, a in enumerate(g.arcs) if not reachable >> j & 1]
        raise UncoverableArc(
            "no source-to-sink path covers: " + ", ".join(missing)
        )
    if not g.arcs:
        return ()

    greedy = [paths[i] for i in _min_cover_greedy(masks, full)]
    if len(g.arcs) <= EXACT_COVER_LIMIT:
        chosen = _min_cover_flow(g, greedy)
    else:
        chosen = [(p.path, p.arcs) for p in greedy]
    return tuple(
        TestSegment(f"T{k + 1}", nodes, arcs)
        for k, (nodes, arcs) in enumerate(chosen)
    )


# ---------------------------------------------------------------------------
# Monitor synthesis: break equivalence classes at transit nodes


def synth_monitors(g: TransactionGraph, tests: tuple[TestSegment, ...]) -> MonitorPlan:
    """Sink monitors, then greedy transit-node additions until all block
    classes are singletons (or no candidate splits anything more).

    Each step adds the transit node whose extra rows split the most
    non-singleton classes; ties go to the smallest node id.
    """
    feats = structural_features(g)
    base = feats.sinks

    def classes_for(monitors: tuple[str, ...]):
        m = build_matrix(g.with_monitors(monitors), tests)
        return audit_matrix(m).equivalence_classes

    on_some_path = set()
    for t in tests:
        on_some_path.update(t.path)
    candidates = sorted(
        v for v in feats.transit_nodes if v not in base and v in on_some_path
    )

    monitors = base
    added: list[str] = []
    current = classes_for(monitors)
    while any(len(c) > 1 for c in current):
        nonsingle = [c for c in current if len(c) > 1]
        best_node, best_count = None, 0
        for v in candidates:
            if v in monitors:
                continue
            trial = classes_for(monitors + (v,))
            member_class = {b: i for i, cls in enumerate(trial) for b in cls}
            count = sum(
                1 for cls in nonsingle if len({member_class[b] for b in cls}) > 1
            )
            if count > best_count:
                best_node, best_count = v, count
        if best_node is None:
            break
        monitors = monitors + (best_node,)
        added.append(best_node)
        current = classes_for(monitors)

    return MonitorPlan(base, tuple(added), current)


# ---------------------------------------------------------------------------
# Logic synthesis


def synth_logic(
    m: ActivationMatrix, mode: LogicMode = LogicMode.POSITIVE_ONLY
) -> tuple[DiagnosisFunction, ...]:
    """Per-block detection functions over the response bits.

    Positive-only mode is the conjunction of the rows that activate the
    block, and requires all columns distinct; full-minterm mode adds negated
    literals for the remaining rows, so the function is true exactly for
    the block's own single-fault response.
    """
    if mode is LogicMode.POSITIVE_ONLY:
        clashes = [
            cls for cls in audit_matrix(m).equivalence_classes if len(cls) > 1
        ]
        if clashes:
            groups = "; ".join("{" + ", ".join(cls) + "}" for cls in clashes)
            raise EquivalentColumns(
                f"indistinguishable columns: {groups}; "
                "add monitors or use full-minterm mode"
            )

    funcs = []
    for block in m.cols:
        col = m.column(block)
        positive = tuple(k for k, bit in zip(m.rows, col) if bit)
        negative = (
            tuple(k for k, bit in zip(m.rows, col) if not bit)
            if mode is LogicMode.FULL_MINTERM
            else ()
        )
        funcs.append(DiagnosisFunction(block, positive, negative))
    return tuple(funcs)


def evaluate_function(f: DiagnosisFunction, m: ActivationMatrix, r) -> bool:
    """Truth value of a diagnosis function on a response vector."""
    index = {k: i for i, k in enumerate(m.rows)}
    vec = tuple(r)
    return all(vec[index[k]] == 1 for k in f.positive_literals) and all(
        vec[index[k]] == 0 for k in f.negative_literals
    )


def render_logic_text(funcs) -> str:
    lines = []
    for f in funcs:
        terms = [f"({k.test},{k.monitor})=1" for k in f.positive_literals]
        terms += [f"({k.test},{k.monitor})=0" for k in f.negative_literals]
        lines.append(f"{f.block} = " + " & ".join(terms) if terms else f"{f.block} =")
    return "\n".join(lines) + "\n"


def logic_to_obj(funcs) -> dict:
    return {
        "functions": [
            {
                "block": f.block,
                "positive": [{"test": k.test, "monitor": k.monitor} for k in f.positive_literals],
                "negative": [{"test": k.test, "monitor": k.monitor} for k in f.negative_literals],
            }
            for f in funcs
        ]
    }


# ---------------------------------------------------------------------------
# Rule report


def _transit_chains(g: TransactionGraph) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Maximal runs of serially connected blocks joined by transit nodes.

    Returns (interior nodes, blocks) per chain; a chain of n blocks has
    n - 1 interior transit nodes.
    """
    transit = set(structural_features(g).transit_nodes)
    in_arc = {}
    out_arc = {}
    for a in g.arcs:
        if a.dst in transit:
            in_arc[a.dst] = a
        if a.src in transit:
            out_arc[a.src] = a

    chains = []
    seen: set[str] = set()
    for v in g.nodes:
        if v not in transit or v in seen or v not in in_arc or v not in out_arc:
            continue
        start = v
        while in_arc[start].src in transit and in_arc[start].src in out_arc:
            start = in_arc[start].src
        nodes = [start]
        while out_arc[nodes[-1]].dst in transit and out_arc[nodes[-1]].dst in in_arc:
            nodes.append(out_arc[nodes[-1]].dst)
        seen.update(nodes)
        blocks = [in_arc[nodes[0]].id] + [out_arc[u].id for u in nodes]
        chains.append((tuple(nodes), tuple(blocks)))
    return chains


def rule_check(g: TransactionGraph, tests, monitors) -> RuleReport:
    """Structural check of the eight design-for-diagnosis rules.

    Rules 4 and 5 are heuristics over branch and chain structure and are
    marked advisory; a failing advisory rule does not fail the report.
    """
    tests = tuple(tests)
    monitor_set = set(monitors)
    feats = structural_features(g)
    indeg, outdeg = degrees(g)
    path_blocks = {t.id: set(blocks_on_path(g, t)) for t in tests}
    covered_arcs = set().union(*path_blocks.values()) if path_blocks else set()
    covered_nodes = set().union(*(set(t.path) for t in tests)) if tests else set()

    results = []

    # 1: the tests exercise every block and every node.
    missing_arcs = sorted(a.id for a in g.arcs if a.id not in covered_arcs)
    missing_nodes = sorted(n for n in g.nodes if n not in covered_nodes)
    if missing_arcs or missing_nodes:
        ev = []
        if missing_arcs:
            ev.append("uncovered blocks: " + ", ".join(missing_arcs))
        if missing_nodes:
            ev.append("unreached nodes: " + ", ".join(missing_nodes))
        results.append(RuleResult(1, "tests cover every block and node", "fail", False, "; ".join(ev)))
    else:
        results.append(RuleResult(
            1, "tests cover every block and node", "pass", False,
            f"{len(tests)} tests cover {len(g.arcs)} blocks and {len(g.nodes)} nodes",
        ))

    # 2: a monitor at every sink.
    missing_sinks = sorted(s for s in feats.sinks if s not in monitor_set)
    results.append(RuleResult(
        2, "monitors at every sink", "fail" if missing_sinks else "pass", False,
        "unmonitored sinks: " + ", ".join(missing_sinks) if missing_sinks
        else "sinks " + ", ".join(feats.sinks) + " all monitored",
    ))

    # 3: transit nodes offer extra monitor sites when classes remain merged.
    m = build_matrix(g.with_monitors(tuple(monitor_set)), tests)
    classes = audit_matrix(m).equivalence_classes
    merged = [cls for cls in classes if len(cls) > 1]
    open_sites = sorted(v for v in feats.transit_nodes if v not in monitor_set)
    if not feats.transit_nodes:
        results.append(RuleResult(3, "transit nodes offer monitor sites", "not-applicable", False, "graph has no transit nodes"))
    elif not merged:
        results.append(RuleResult(
            3, "transit nodes offer monitor sites", "pass", False,
            "all block classes already singletons",
        ))
    else:
        groups = "; ".join("{" + ", ".join(cls) + "}" for cls in merged)
        results.append(RuleResult(
            3, "transit nodes offer monitor sites", "fail", False,
            f"merged classes {groups}; candidate monitor nodes: " + ", ".join(open_sites)
            if open_sites else f"merged classes {groups}; no transit node left to add",
        ))

    # 4 (advisory): every branch out of a fork is exercised by some test.
    forks = [n for n in g.nodes if outdeg[n] >= 2]
    if not forks:
        results.append(RuleResult(4, "each parallel branch exercised", "not-applicable", True, "no branching nodes"))
    else:
        missing = sorted(
            a.id for a in g.arcs if outdeg[a.src] >= 2 and a.id not in covered_arcs
        )
        results.append(RuleResult(
            4, "each parallel branch exercised",
            "fail" if missing else "pass", True,
            "branches without a test: " + ", ".join(missing) if missing
            else f"all branches of {', '.join(forks)} exercised",
        ))

    # 5 (advisory): serial chains carry interior monitors.
    chains = _transit_chains(g)
    if not chains:
        results.append(RuleResult(5, "serial chains carry interior monitors", "not-applicable", True, "no serial chains"))
    else:
        complaints = []
        for nodes, blocks in chains:
            have = sum(1 for v in nodes if v in monitor_set)
            if have < len(nodes):
                want = len(nodes)
                complaints.append(
                    f"chain {'-'.join(blocks)} needs {want} interior "
                    f"monitor{'s' if want != 1 else ''}, has {have}"
                )
        results.append(RuleResult(
            5, "serial chains carry interior monitors",
            "fail" if complaints else "pass", True,
            "; ".join(complaints) if complaints
            else f"{len(chains)} chain(s) fully monitored",
        ))

    # 6: degree-asymmetric nodes delimit self-diagnosable sections.
    uneven = [n for n in g.nodes if indeg[n] != outdeg[n]]
    results.append(RuleResult(
        6, "degree-asymmetric nodes delimit sections",
        "pass" if uneven else "not-applicable", False,
        "section boundaries: " + ", ".join(uneven) if uneven
        else "every node has equal in/out degree",
    ))

    # 7: every node is reached by some test.
    results.append(RuleResult(
        7, "every node reached by some test",
        "fail" if missing_nodes else "pass", False,
        "unreached: " + ", ".join(missing_nodes) if missing_nodes
        else f"all {len(g.nodes)} nodes reached",
    ))

    # 8: the response bits suffice to name any block.
    if not g.arcs:
        results.append(RuleResult(8, "response bits suffice to name a block", "not-applicable", False, "no blocks"))
    else:
        need = ceil_log2(len(g.arcs))
        have = len(tests) * len(monitor_set)
        results.append(RuleResult(
            8, "response bits suffice to name a block",
            "pass" if have >= need else "fail", False,
            f"ceil(log2 {len(g.arcs)}) = {need} vs |T|x|A| = {have}"
            + ("; equal, hence optimal" if need == have else ""),
        ))

    return RuleReport(tuple(results))

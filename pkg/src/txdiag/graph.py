"""Transaction-graph model.

A transaction graph is a DAG whose nodes are observable states of a design
and whose arcs are functional blocks (the units of fault localization).
A subset of nodes carries assertion monitors.  Test segments are simple
source-to-sink activation paths; applying a test activates every block on
its path.

All types are immutable and all operations are pure functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import FormatError, InvalidPath, UnknownNode


@dataclass(frozen=True)
class Arc:
    """A functional block: one directed arc between two states."""

    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class TestSegment:
    """One activation path through the graph.

    `arcs`, when present, names the block taken at each step; it is required
    to disambiguate parallel arcs and has length len(path) - 1.
    """

    id: str
    path: tuple[str, ...]
    arcs: tuple[str, ...] | None = None

    def prefix_to(self, node: str) -> "TestSegment":
        """The sub-segment from the start of the path up to `node` inclusive."""
        if node not in self.path:
            raise InvalidPath(f"node {node!r} is not on the path of test {self.id!r}")
        i = self.path.index(node)
        return TestSegment(
            self.id,
            self.path[: i + 1],
            None if self.arcs is None else self.arcs[:i],
        )


@dataclass(frozen=True)
class TransactionGraph:
    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]
    monitors: tuple[str, ...] = ()

    def with_monitors(self, monitors) -> "TransactionGraph":
        return replace(self, monitors=tuple(monitors))


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class StructuralFeatures:
    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    transit_nodes: tuple[str, ...]
    n_arcs: int
    n_transit: int


def out_arcs(g: TransactionGraph) -> dict[str, list[Arc]]:
    """Outgoing arcs per node, each list sorted by arc id."""
    adj: dict[str, list[Arc]] = {n: [] for n in g.nodes}
    for a in g.arcs:
        if a.src in adj:
            adj[a.src].append(a)
    for lst in adj.values():
        lst.sort(key=lambda a: a.id)
    return adj


def degrees(g: TransactionGraph) -> tuple[dict[str, int], dict[str, int]]:
    indeg = {n: 0 for n in g.nodes}
    outdeg = {n: 0 for n in g.nodes}
    for a in g.arcs:
        if a.src in outdeg:
            outdeg[a.src] += 1
        if a.dst in indeg:
            indeg[a.dst] += 1
    return indeg, outdeg


def validate_graph(g: TransactionGraph) -> ValidationReport:
    """Collect every invariant violation; an empty report means well-formed.

    Never raises: validation reports, it does not abort.
    """
    found: list[Violation] = []

    seen_nodes: set[str] = set()
    for n in g.nodes:
        if not n:
            found.append(Violation("empty-node-id", "node with empty identifier"))
        if n in seen_nodes:
            found.append(Violation("duplicate-node", f"node {n!r} declared twice"))
        seen_nodes.add(n)

    seen_blocks: set[str] = set()
    for a in g.arcs:
        if not a.id:
            found.append(Violation("empty-block-id", f"arc {a.src!r}->{a.dst!r} with empty block id"))
        if a.id in seen_blocks:
            found.append(Violation("duplicate-block", f"block {a.id!r} declared twice"))
        seen_blocks.add(a.id)
        for endpoint in (a.src, a.dst):
            if endpoint not in seen_nodes:
                found.append(
                    Violation("dangling-endpoint", f"arc {a.id!r} references undeclared node {endpoint!r}")
                )

    for m in g.monitors:
        if m not in seen_nodes:
            found.append(Violation("monitor-not-a-node", f"monitor {m!r} is not a declared node"))

    # Kahn's algorithm on the well-anchored arcs; leftovers are cyclic.
    indeg = {n: 0 for n in g.nodes}
    adj: dict[str, list[str]] = {n: [] for n in g.nodes}
    for a in g.arcs:
        if a.src in indeg and a.dst in indeg:
            adj[a.src].append(a.dst)
            indeg[a.dst] += 1
    queue = [n for n in g.nodes if indeg[n] == 0]
    done = 0
    while queue:
        v = queue.pop(0)
        done += 1
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if done < len(indeg):
        cyclic = sorted(n for n, d in indeg.items() if d > 0)
        found.append(Violation("cycle", "nodes on a cycle: " + ", ".join(cyclic)))

    return ValidationReport(tuple(found))


def structural_features(g: TransactionGraph) -> StructuralFeatures:
    """Sources, sinks and transit nodes (exactly one arc in, one arc out)."""
    indeg, outdeg = degrees(g)
    sources = tuple(n for n in g.nodes if indeg[n] == 0)
    sinks = tuple(n for n in g.nodes if outdeg[n] == 0)
    transit = tuple(n for n in g.nodes if indeg[n] == 1 and outdeg[n] == 1)
    return StructuralFeatures(sources, sinks, transit, len(g.arcs), len(transit))


def enumerate_paths(g: TransactionGraph, start: str, targets) -> list[TestSegment]:
    """Every simple directed path from `start` to any node of `targets`.

    Order is lexicographic by the sequence of arc ids; parallel arcs yield
    one segment per arc, with the arc named explicitly.  Segments are
    labelled P1, P2, ... in order.
    """
    node_set = set(g.nodes)
    if start not in node_set:
        raise UnknownNode(f"unknown node {start!r}")
    target_set = set(targets)
    for t in target_set:
        if t not in node_set:
            raise UnknownNode(f"unknown node {t!r}")

    adj = out_arcs(g)
    results: list[tuple[tuple[str, ...], tuple[str, ...]]] = []

    def walk(node: str, nodes_so_far: list[str], arcs_so_far: list[str], visited: set[str]) -> None:
        if node in target_set:
            results.append((tuple(nodes_so_far), tuple(arcs_so_far)))
        for a in adj[node]:
            if a.dst in visited:
                continue
            nodes_so_far.append(a.dst)
            arcs_so_far.append(a.id)
            visited.add(a.dst)
            walk(a.dst, nodes_so_far, arcs_so_far, visited)
            visited.discard(a.dst)
            arcs_so_far.pop()
            nodes_so_far.pop()

    walk(start, [start], [], {start})
    return [
        TestSegment(f"P{i + 1}", nodes, arcs) for i, (nodes, arcs) in enumerate(results)
    ]


def blocks_on_path(g: TransactionGraph, t: TestSegment) -> tuple[str, ...]:
    """The blocks traversed by a segment, in path order.

    With explicit arc annotations each (from, block, to) triple is checked
    against the graph; otherwise each consecutive node pair must have exactly
    one arc (parallel arcs make the plain form ambiguous).
    """
    if not t.path:
        raise InvalidPath(f"test {t.id!r} has an empty path")
    node_set = set(g.nodes)
    for n in t.path:
        if n not in node_set:
            raise InvalidPath(f"test {t.id!r} visits unknown node {n!r}")
    if len(set(t.path)) != len(t.path):
        raise InvalidPath(f"test {t.id!r} visits a node twice")

    pairs = list(zip(t.path, t.path[1:]))
    if t.arcs is not None:
        if len(t.arcs) != len(pairs):
            raise InvalidPath(
                f"test {t.id!r} names {len(t.arcs)} arcs for {len(pairs)} steps"
            )
        by_id = {a.id: a for a in g.arcs}
        for (u, v), block in zip(pairs, t.arcs):
            arc = by_id.get(block)
            if arc is None or arc.src != u or arc.dst != v:
                raise InvalidPath(
                    f"test {t.id!r}: no arc {block!r} from {u!r} to {v!r}"
                )
        return t.arcs

    out: list[str] = []
    for u, v in pairs:
        matching = [a.id for a in g.arcs if a.src == u and a.dst == v]
        if not matching:
            raise InvalidPath(f"test {t.id!r}: no arc from {u!r} to {v!r}")
        if len(matching) > 1:
            raise InvalidPath(
                f"test {t.id!r}: parallel arcs from {u!r} to {v!r} "
                f"({', '.join(sorted(matching))}); name the arc explicitly"
            )
        out.append(matching[0])
    return tuple(out)


# ---------------------------------------------------------------------------
# JSON interchange


def _segment_obj(g: TransactionGraph, t: TestSegment) -> dict:
    # Plain node list whenever it is unambiguous; triples otherwise.
    plain = True
    if t.arcs is not None:
        for (u, v), block in zip(zip(t.path, t.path[1:]), t.arcs):
            matching = [a.id for a in g.arcs if a.src == u and a.dst == v]
            if matching != [block]:
                plain = False
                break
    if plain:
        return {"id": t.id, "path": list(t.path)}
    steps = [
        {"from": u, "block": b, "to": v}
        for (u, v), b in zip(zip(t.path, t.path[1:]), t.arcs or ())
    ]
    return {"id": t.id, "path": steps}


def segment_from_obj(obj) -> TestSegment:
    if not isinstance(obj, dict) or "id" not in obj or "path" not in obj:
        raise FormatError("test entry must be an object with 'id' and 'path'")
    sid = obj["id"]
    raw = obj["path"]
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"test {sid!r}: 'path' must be a non-empty array")
    if all(isinstance(e, str) for e in raw):
        return TestSegment(sid, tuple(raw))
    nodes = []
    arcs = []
    for i, step in enumerate(raw):
        if not isinstance(step, dict) or not {"from", "block", "to"} <= set(step):
            raise FormatError(f"test {sid!r}: step {i} must be a {{from, block, to}} triple")
        if i == 0:
            nodes.append(step["from"])
        elif step["from"] != nodes[-1]:
            raise FormatError(
                f"test {sid!r}: step {i} starts at {step['from']!r}, expected {nodes[-1]!r}"
            )
        nodes.append(step["to"])
        arcs.append(step["block"])
    return TestSegment(sid, tuple(nodes), tuple(arcs))


def graph_to_dict(g: TransactionGraph, tests: tuple[TestSegment, ...] = ()) -> dict:
    d = {
        "nodes": list(g.nodes),
        "arcs": [{"id": a.id, "from": a.src, "to": a.dst} for a in g.arcs],
        "monitors": list(g.monitors),
    }
    if tests:
        d["tests"] = [_segment_obj(g, t) for t in tests]
    return d


def graph_from_dict(d) -> tuple[TransactionGraph, tuple[TestSegment, ...]]:
    if not isinstance(d, dict):
        raise FormatError("graph file must hold a JSON object")
    for key in ("nodes", "arcs", "monitors"):
        if key not in d:
            raise FormatError(f"graph file missing key {key!r}")
    try:
        arcs = tuple(Arc(a["id"], a["from"], a["to"]) for a in d["arcs"])
    except (TypeError, KeyError) as e:
        raise FormatError("each arc must be an object with 'id', 'from', 'to'") from e
    g = TransactionGraph(tuple(d["nodes"]), arcs, tuple(d["monitors"]))
    tests = tuple(segment_from_obj(o) for o in d.get("tests", []))
    return g, tests


def dumps_graph(g: TransactionGraph, tests: tuple[TestSegment, ...] = ()) -> str:
    return json.dumps(graph_to_dict(g, tests), indent=2) + "\n"


def loads_graph(text: str) -> tuple[TransactionGraph, tuple[TestSegment, ...]]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"graph file is not valid JSON: {e}") from e
    return graph_from_dict(d)


def load_graph(path) -> tuple[TransactionGraph, tuple[TestSegment, ...]]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_graph(fh.read())


def save_graph(path, g: TransactionGraph, tests: tuple[TestSegment, ...] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_graph(g, tests))

"""File-based figure rendering for reports.

Everything draws through the Agg backend straight to a file, with fixed
metadata and hash salt so that rendering the same object twice produces
byte-identical output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .faultsim import CampaignResult  # noqa: E402
from .graph import TransactionGraph, out_arcs  # noqa: E402
from .matrix import ActivationMatrix  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "txdiag"

_MONITOR_COLOR = "#ffd166"
_NODE_COLOR = "#cfe8ef"


def _save(fig, path) -> None:
    text = str(path)
    if text.endswith(".svg"):
        metadata = {"Date": None}
    elif text.endswith(".png"):
        metadata = {"Software": "txdiag"}
    else:
        metadata = None
    fig.savefig(text, metadata=metadata)
    plt.close(fig)


def _layers(g: TransactionGraph) -> dict[str, int]:
    """Longest-path layer per node (sources at layer 0)."""
    indeg = {n: 0 for n in g.nodes}
    for a in g.arcs:
        indeg[a.dst] += 1
    adj = out_arcs(g)
    layer = {n: 0 for n in g.nodes}
    queue = [n for n in g.nodes if indeg[n] == 0]
    while queue:
        v = queue.pop(0)
        for a in adj[v]:
            layer[a.dst] = max(layer[a.dst], layer[v] + 1)
            indeg[a.dst] -= 1
            if indeg[a.dst] == 0:
                queue.append(a.dst)
    return layer


def save_graph_figure(g: TransactionGraph, path) -> None:
    """Layered drawing of the graph: states as circles (monitors filled
    differently), blocks as labelled arrows."""
    layer = _layers(g)
    by_layer: dict[int, list[str]] = {}
    for n in g.nodes:
        by_layer.setdefault(layer[n], []).append(n)

    pos: dict[str, tuple[float, float]] = {}
    for lx, members in sorted(by_layer.items()):
        for i, n in enumerate(members):
            pos[n] = (float(lx), i - (len(members) - 1) / 2.0)

    width = max(6.0, 1.8 * (max(by_layer) + 1))
    height = max(3.0, 1.2 * max(len(v) for v in by_layer.values()))
    fig, ax = plt.subplots(figsize=(width, height))

    seen_pairs: dict[tuple[str, str], int] = {}
    for a in g.arcs:
        x0, y0 = pos[a.src]
        x1, y1 = pos[a.dst]
        k = seen_pairs.get((a.src, a.dst), 0)
        seen_pairs[(a.src, a.dst)] = k + 1
        rad = 0.0 if k == 0 else 0.25 * ((k + 1) // 2) * (-1) ** k
        ax.annotate(
            "",
            xy=(x1, y1),
            xytext=(x0, y0),
            arrowprops={
                "arrowstyle": "-|>",
                "color": "#555555",
                "shrinkA": 14,
                "shrinkB": 14,
                "connectionstyle": f"arc3,rad={rad}",
            },
        )
        ax.text(
            (x0 + x1) / 2,
            (y0 + y1) / 2 + rad * 0.8 + 0.08,
            a.id,
            ha="center",
            fontsize=9,
            color="#333333",
        )

    monitor_set = set(g.monitors)
    for n, (x, y) in pos.items():
        color = _MONITOR_COLOR if n in monitor_set else _NODE_COLOR
        ax.scatter([x], [y], s=700, c=color, edgecolors="#333333", zorder=3)
        ax.text(x, y, n, ha="center", va="center", fontsize=9, zorder=4)

    ax.set_axis_off()
    ax.set_title("transaction graph" + (" (monitors highlighted)" if monitor_set else ""))
    fig.tight_layout()
    _save(fig, path)


def save_matrix_figure(m: ActivationMatrix, path) -> None:
    """Activation bits as a black-and-white grid."""
    fig, ax = plt.subplots(
        figsize=(max(4.0, 0.45 * len(m.cols) + 2), max(2.5, 0.4 * len(m.rows) + 1.5))
    )
    ax.imshow([list(r) for r in m.bits], cmap="Greys", aspect="auto", vmin=0, vmax=1)
    ax.set_xticks(range(len(m.cols)), m.cols, rotation=90, fontsize=8)
    ax.set_yticks(
        range(len(m.rows)), [f"{k.test},{k.monitor}" for k in m.rows], fontsize=8
    )
    ax.set_xticks([x - 0.5 for x in range(1, len(m.cols))], minor=True)
    ax.set_yticks([y - 0.5 for y in range(1, len(m.rows))], minor=True)
    ax.grid(which="minor", color="#bbbbbb", linewidth=0.5)
    ax.tick_params(which="minor", length=0)
    ax.set_title("activation matrix")
    fig.tight_layout()
    _save(fig, path)


def save_candidates_figure(candidates, path) -> None:
    """XOR distances of the ranked block classes, nearest first."""
    cands = list(candidates)
    labels = ["/".join(c.blocks) for c in cands]
    values = [c.distance for c in cands]
    colors = ["#2a9d8f" if v == 0 else "#9a9a9a" for v in values]
    fig, ax = plt.subplots(figsize=(6.0, max(2.0, 0.35 * len(cands) + 1.2)))
    ax.barh(range(len(cands)), values, color=colors)
    ax.set_yticks(range(len(cands)), labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("XOR distance to response")
    ax.set_title("fault candidates")
    fig.tight_layout()
    _save(fig, path)


def save_campaign_figure(result: CampaignResult, path) -> None:
    """Aggregate fault-campaign counters."""
    labels = ["total", "detected", "unique", "subsumed"]
    values = [result.n_total, result.n_detected, result.n_unique, result.n_subsumed]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    bars = ax.bar(labels, values, color=["#888888", "#2a9d8f", "#1d6fa5", "#e76f51"])
    ax.bar_label(bars)
    ax.set_ylabel("fault sets")
    ax.set_title(f"fault campaign, k={result.k} ({result.mode})")
    fig.tight_layout()
    _save(fig, path)

"""Shared builders: the branching demo graph, its six tests, the
function-list matrix, and a seeded random-DAG generator for sweeps."""

from __future__ import annotations

import random

import pytest

from txdiag import (
    ActivationMatrix,
    Arc,
    RowKey,
    TestSegment,
    TransactionGraph,
    build_matrix,
)


def branching_graph() -> TransactionGraph:
    """Ten states, fourteen blocks, two fork points, one sink monitor."""
    nodes = tuple(f"S{i}" for i in range(10))
    arcs = (
        Arc("B1", "S0", "S1"),
        Arc("B2", "S0", "S2"),
        Arc("B3", "S1", "S3"),
        Arc("B4", "S1", "S4"),
        Arc("B5", "S1", "S5"),
        Arc("B6", "S2", "S4"),
        Arc("B7", "S2", "S5"),
        Arc("B8", "S2", "S6"),
        Arc("B9", "S3", "S7"),
        Arc("B10", "S4", "S8"),
        Arc("B11", "S5", "S7"),
        Arc("B12", "S6", "S8"),
        Arc("B13", "S7", "S9"),
        Arc("B14", "S8", "S9"),
    )
    return TransactionGraph(nodes, arcs, ("S9",))


def branching_tests() -> tuple[TestSegment, ...]:
    """The six source-to-sink paths of the branching graph."""
    paths = (
        ("S0", "S1", "S3", "S7", "S9"),
        ("S0", "S1", "S4", "S8", "S9"),
        ("S0", "S1", "S5", "S7", "S9"),
        ("S0", "S2", "S4", "S8", "S9"),
        ("S0", "S2", "S5", "S7", "S9"),
        ("S0", "S2", "S6", "S8", "S9"),
    )
    return tuple(TestSegment(f"T{i + 1}", p) for i, p in enumerate(paths))


# Fourteen single-monitor tests and the blocks each one activates.  F8 reads
# tests 2, 4, 6, 8: the even-test pattern of its family fixes the third
# literal as test 6.
FUNCTION_ROWS: dict[str, tuple[int, ...]] = {
    "F7": (1, 3, 5, 7),
    "F8": (2, 4, 6, 8),
    "F9": (1, 3, 6, 11),
    "F10": (4, 5, 6, 12),
    "F12": (1, 3, 5, 9, 13),
    "F13": (2, 4, 6, 10, 14),
    "F2": (1,),
    "F3": (2,),
}


def function_list_matrix() -> ActivationMatrix:
    """14 tests x 8 blocks, reconstructed from FUNCTION_ROWS."""
    rows = tuple(RowKey(f"T{i}", "out") for i in range(1, 15))
    cols = tuple(FUNCTION_ROWS)
    bits = tuple(
        tuple(1 if i in FUNCTION_ROWS[b] else 0 for b in cols)
        for i in range(1, 15)
    )
    return ActivationMatrix(rows, cols, bits)


def random_dag(rng: random.Random) -> TransactionGraph:
    """Forward-ordered DAG, <= 12 nodes and <= 20 arcs, parallel arcs allowed."""
    n = rng.randint(2, 12)
    nodes = tuple(f"N{i}" for i in range(n))
    arcs = []
    for k in range(rng.randint(1, 20)):
        i = rng.randrange(0, n - 1)
        j = rng.randrange(i + 1, n)
        arcs.append(Arc(f"A{k + 1}", nodes[i], nodes[j]))
    return TransactionGraph(nodes, tuple(arcs))


@pytest.fixture
def fixture_graph() -> TransactionGraph:
    return branching_graph()


@pytest.fixture
def fixture_tests() -> tuple[TestSegment, ...]:
    return branching_tests()


@pytest.fixture
def sink_matrix() -> ActivationMatrix:
    """6x14 matrix of the branching graph observed at S9 only."""
    return build_matrix(branching_graph(), branching_tests())


@pytest.fixture
def refined_matrix() -> ActivationMatrix:
    """8x14 matrix with the two transit monitors added (S3, S6, S9)."""
    g = branching_graph().with_monitors(("S3", "S6", "S9"))
    return build_matrix(g, branching_tests())

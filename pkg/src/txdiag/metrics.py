"""Diagnosability metrics.

All ratios are exact rationals (fractions.Fraction); any decimal rendering
is presentation only.  N counts functional blocks (arcs), N_n counts
transit nodes — states with exactly one arc in and one arc out, which are
where extra monitors can split indistinguishable blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyModel, ZeroDenominator
from .graph import TestSegment, TransactionGraph, structural_features
from .util import ceil_log2


@dataclass(frozen=True)
class DiagMetrics:
    n_blocks: int
    n_transit: int
    d_structural: Fraction
    test_len: int
    monitor_count: int
    efficiency: Fraction
    quality: Fraction
    optimal: bool
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class CoverageRecord:
    node: str
    reached_states: int
    potential_states: int

    def __post_init__(self) -> None:
        if self.reached_states < 0 or self.potential_states < 0:
            raise ValueError("state counts must be non-negative")
        if self.reached_states > self.potential_states:
            raise ValueError(
                f"node {self.node!r}: reached {self.reached_states} exceeds "
                f"potential {self.potential_states}"
            )


def metrics(g: TransactionGraph, tests, monitors) -> DiagMetrics:
    """Structural diagnosability D, test efficiency E and quality Q = E * D.

    D = (N - N_n)/N rates how much of the graph is free of transit nodes;
    E = ceil(log2 N)/(|T| * |A|) compares the minimum bits needed to name a
    block against the bits one test round actually produces.  The model is
    optimal when those two bit counts coincide.
    """
    n = len(g.arcs)
    n_tests = len(tuple(tests))
    n_monitors = len(tuple(monitors))
    if n == 0 or n_tests == 0 or n_monitors == 0:
        raise EmptyModel(
            f"metrics need blocks, tests and monitors (got {n}, {n_tests}, {n_monitors})"
        )

    n_transit = structural_features(g).n_transit
    bits_needed = ceil_log2(n)
    bits_available = n_tests * n_monitors

    d = Fraction(n - n_transit, n)
    e = Fraction(bits_needed, bits_available)
    q = e * d

    warnings = []
    if bits_needed == 0:
        warnings.append("single block: ceil(log2 N) = 0, efficiency degenerates to 0")
    if e > 1:
        warnings.append(
            "fewer response bits than needed to name a block "
            f"({bits_available} < {bits_needed}); diagnosis cannot be complete"
        )

    return DiagMetrics(
        n_blocks=n,
        n_transit=n_transit,
        d_structural=d,
        test_len=n_tests,
        monitor_count=n_monitors,
        efficiency=e,
        quality=q,
        optimal=bits_needed == bits_available,
        warnings=tuple(warnings),
    )


def detection_quality(
    n_detected: int, n_total: int, test_len: int, monitor_count: int
) -> Fraction:
    """Quality with the detected-block count in place of the structural term:

        ceil(log2 n_total)/(test_len * monitor_count) * n_detected/n_total
    """
    if n_total < 1:
        raise ZeroDenominator("n_total must be >= 1")
    if not 0 <= n_detected <= n_total:
        raise ValueError(f"n_detected must lie in [0, {n_total}], got {n_detected}")
    if test_len * monitor_count == 0:
        raise ZeroDenominator("test_len * monitor_count must be nonzero")
    return Fraction(ceil_log2(n_total), test_len * monitor_count) * Fraction(
        n_detected, n_total
    )


def coverage_ratio(records) -> Fraction:
    """Aggregate reached/potential state ratio over per-node counts.

    1 means the tests drive every node through its full state space.
    """
    recs = tuple(records)
    reached = sum(r.reached_states for r in recs)
    potential = sum(r.potential_states for r in recs)
    if potential == 0:
        raise ZeroDenominator("total potential state count is zero")
    return Fraction(reached, potential)

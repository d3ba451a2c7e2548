"""Fault injection.

A faulty block trips every monitor row that activates it, so a fault set's
response is the OR of the corresponding matrix columns.  The campaign driver
injects every fault set of a given size (or a seeded sample when there are
too many), diagnoses each response, and tallies how many sets the matrix
can actually pin down.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .diagnosis import DEFAULT_BUDGET, diagnose_multiple
from .graph import TestSegment, TransactionGraph
from .matrix import ActivationMatrix, audit_matrix, build_matrix

MAX_EXHAUSTIVE = 100_000
DEFAULT_SAMPLES = 1_000


def simulate(m: ActivationMatrix, blocks) -> tuple[int, ...]:
    """Response observed when every block in `blocks` is faulty."""
    fault_set = tuple(blocks)
    if not fault_set:
        raise ValueError("fault set must be non-empty")
    acc = [0] * len(m.rows)
    for b in fault_set:
        for i, bit in enumerate(m.column(b)):
            acc[i] |= bit
    return tuple(acc)


@dataclass(frozen=True)
class TrialRecord:
    faults: tuple[str, ...]
    detected: bool
    unique: bool
    subsumed: bool
    covers: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class CampaignResult:
    k: int
    mode: str  # "exhaustive" or "sampled"
    seed: int | None
    n_total: int
    n_detected: int
    n_unique: int
    n_subsumed: int
    records: tuple[TrialRecord, ...]

    @property
    def detection_rate(self) -> Fraction:
        return Fraction(self.n_detected, self.n_total) if self.n_total else Fraction(0)


def _unrank_combination(index: int, n: int, k: int) -> tuple[int, ...]:
    """The `index`-th k-subset of range(n) in lexicographic order."""
    out = []
    x = 0
    for slot in range(k):
        while True:
            below = comb(n - x - 1, k - slot - 1)
            if index < below:
                out.append(x)
                x += 1
                break
            index -= below
            x += 1
    return tuple(out)


def campaign(
    g: TransactionGraph,
    tests: tuple[TestSegment, ...],
    monitors,
    k: int,
    seed: int = 0,
    max_exhaustive: int = MAX_EXHAUSTIVE,
    samples: int = DEFAULT_SAMPLES,
    budget: int = DEFAULT_BUDGET,
) -> CampaignResult:
    """Inject every size-k fault set and check what diagnosis recovers.

    A set counts as detected when its class-representative form appears
    among the inclusion-minimal OR-covers of its own response; it counts
    as subsumed when a proper subset already explains the response (the
    extra faults are masked).  Unique means the diagnosis narrowed down to
    exactly the injected blocks: a single cover, all classes singletons.

    Above `max_exhaustive` candidate sets, a deterministic sample of
    `samples` sets is drawn with the given seed.
    """
    if k < 1:
        raise ValueError(f"fault multiplicity must be >= 1, got {k}")
    gm = g.with_monitors(monitors) if monitors is not None else g
    m = build_matrix(gm, tests)

    classes = audit_matrix(m).equivalence_classes
    rep_of: dict[str, str] = {}
    class_size: dict[str, int] = {}
    for cls in classes:
        for b in cls:
            rep_of[b] = cls[0]
        class_size[cls[0]] = len(cls)

    universe = m.cols
    total = comb(len(universe), k)
    if total <= max_exhaustive:
        mode = "exhaustive"
        picked_seed = None
        indices = range(total)
        n_total = total
    else:
        mode = "sampled"
        picked_seed = seed
        rng = random.Random(seed)
        n_total = min(samples, total)
        indices = sorted(rng.sample(range(total), n_total))

    records: list[TrialRecord] = []
    n_detected = n_unique = n_subsumed = 0
    for idx in indices:
        faults = tuple(universe[i] for i in _unrank_combination(idx, len(universe), k))
        r = simulate(m, faults)
        injected = tuple(sorted({rep_of[b] for b in faults}))
        covers = (
            diagnose_multiple(m, r, k_max=len(injected), budget=budget)
            if any(r)
            else ()
        )
        detected = injected in covers
        subsumed = not detected and any(set(c) < set(injected) for c in covers)
        unique = (
            detected
            and len(covers) == 1
            and all(class_size[rep] == 1 for rep in injected)
        )
        n_detected += detected
        n_unique += unique
        n_subsumed += subsumed
        records.append(TrialRecord(faults, detected, unique, subsumed, covers))

    return CampaignResult(
        k, mode, picked_seed, n_total, n_detected, n_unique, n_subsumed, tuple(records)
    )

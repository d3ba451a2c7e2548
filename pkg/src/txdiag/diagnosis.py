"""Fault localization from observed pass/fail responses.

Single-fault localization ranks blocks by XOR distance between their matrix
column and the response vector; distance zero is an exact explanation.
Multi-fault localization searches for inclusion-minimal block sets whose
OR-ed columns reproduce the response exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import FormatError, LengthMismatch, ResponseMismatch, SearchBudgetExceeded
from .matrix import ActivationMatrix, RowKey, audit_matrix

DEFAULT_K_MAX = 3
DEFAULT_BUDGET = 1_000_000


class VerdictKind(enum.Enum):
    FAULT_FREE = "fault-free"
    CANDIDATES = "candidates"
    TEST_DEFICIENT = "test-deficient"


@dataclass(frozen=True)
class Candidate:
    """One indistinguishable block class with its XOR distance to the response."""

    blocks: tuple[str, ...]
    distance: int


@dataclass(frozen=True)
class DiagnosisVerdict:
    kind: VerdictKind
    candidates: tuple[Candidate, ...]
    covers: tuple[tuple[str, ...], ...] = ()
    note: str = ""


def _check_vector(m: ActivationMatrix, r) -> tuple[int, ...]:
    vec = tuple(r)
    if len(vec) != len(m.rows):
        raise LengthMismatch(
            f"response has {len(vec)} bits for a {len(m.rows)}-row matrix"
        )
    for b in vec:
        if b not in (0, 1):
            raise ValueError(f"response bits must be 0 or 1, got {b!r}")
    return vec


def xor_distance(column, response) -> int:
    return sum(c ^ b for c, b in zip(column, response))


def diagnose_single(m: ActivationMatrix, r) -> tuple[Candidate, ...]:
    """All block classes ranked by XOR distance, nearest first.

    Blocks with identical columns form one candidate; ties between classes
    break on the first block id.
    """
    vec = _check_vector(m, r)
    classes = audit_matrix(m).equivalence_classes
    scored = [
        Candidate(cls, xor_distance(m.column(cls[0]), vec)) for cls in classes
    ]
    scored.sort(key=lambda c: (c.distance, c.blocks[0]))
    return tuple(scored)


def diagnose_multiple(
    m: ActivationMatrix,
    r,
    k_max: int = DEFAULT_K_MAX,
    budget: int = DEFAULT_BUDGET,
) -> tuple[tuple[str, ...], ...]:
    """Inclusion-minimal sets of up to `k_max` blocks whose OR equals `r`.

    The search runs over one representative per column class (sorted by
    block id), so members of a returned cover stand for their whole class.
    Raises SearchBudgetExceeded before enumerating more than `budget`
    subsets.
    """
    vec = _check_vector(m, r)
    reps = sorted(cls[0] for cls in audit_matrix(m).equivalence_classes)

    total = sum(comb(len(reps), k) for k in range(1, k_max + 1))
    if total > budget:
        raise SearchBudgetExceeded(
            f"{total} candidate subsets exceed the budget of {budget}"
        )

    masks = {}
    for b in reps:
        mask = 0
        for i, bit in enumerate(m.column(b)):
            if bit:
                mask |= 1 << i
        masks[b] = mask
    target = 0
    for i, bit in enumerate(vec):
        if bit:
            target |= 1 << i

    found: list[tuple[str, ...]] = []
    found_sets: list[frozenset[str]] = []
    for k in range(1, k_max + 1):
        for combo in combinations(reps, k):
            combo_set = frozenset(combo)
            if any(s <= combo_set for s in found_sets):
                continue
            acc = 0
            for b in combo:
                acc |= masks[b]
            if acc == target:
                found.append(combo)
                found_sets.append(combo_set)
    return tuple(found)


def diagnose(
    m: ActivationMatrix,
    r,
    k_max: int = DEFAULT_K_MAX,
    budget: int = DEFAULT_BUDGET,
) -> DiagnosisVerdict:
    """Combined verdict: fault-free, ranked candidates, or test deficiency.

    A test-deficient verdict means no OR-combination of up to `k_max` block
    classes reproduces the observed responses, so the current test set cannot
    explain the outcome.
    """
    vec = _check_vector(m, r)
    if not any(vec):
        return DiagnosisVerdict(
            VerdictKind.FAULT_FREE, (), note="every monitored response passed"
        )

    ranked = diagnose_single(m, vec)
    exact = tuple(c for c in ranked if c.distance == 0)
    if exact:
        blocks = ", ".join("/".join(c.blocks) for c in exact)
        return DiagnosisVerdict(
            VerdictKind.CANDIDATES,
            ranked,
            note=f"exact single-fault match: {blocks}",
        )

    covers = diagnose_multiple(m, vec, k_max=k_max, budget=budget)
    if covers:
        return DiagnosisVerdict(
            VerdictKind.CANDIDATES,
            ranked,
            covers=covers,
            note=f"no single block matches; {len(covers)} minimal multi-fault cover(s)",
        )
    return DiagnosisVerdict(
        VerdictKind.TEST_DEFICIENT,
        ranked,
        note=(
            f"no combination of up to {k_max} blocks reproduces the responses; "
            "the test set cannot explain this outcome"
        ),
    )


# ---------------------------------------------------------------------------
# Response text format: one "test,monitor,bit" line per row, order-free.


def parse_response_text(text: str) -> dict[tuple[str, str], int]:
    out: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise FormatError(f"response line {lineno}: expected 'test,monitor,bit'")
        test, monitor, bit = parts
        if bit not in ("0", "1"):
            raise FormatError(f"response line {lineno}: bit must be 0 or 1, got {bit!r}")
        key = (test, monitor)
        if key in out:
            raise ResponseMismatch(f"duplicate response for ({test!r}, {monitor!r})")
        out[key] = int(bit)
    return out


def match_responses(m: ActivationMatrix, responses: dict[tuple[str, str], int]) -> tuple[int, ...]:
    """Order the keyed responses into the matrix's row order."""
    wanted = {(k.test, k.monitor) for k in m.rows}
    missing = sorted(wanted - set(responses))
    extra = sorted(set(responses) - wanted)
    problems = []
    if missing:
        problems.append("missing " + ", ".join(f"({t},{mo})" for t, mo in missing))
    if extra:
        problems.append("extra " + ", ".join(f"({t},{mo})" for t, mo in extra))
    if problems:
        raise ResponseMismatch("responses do not match matrix rows: " + "; ".join(problems))
    return tuple(responses[(k.test, k.monitor)] for k in m.rows)


def render_response_text(m: ActivationMatrix, r) -> str:
    vec = _check_vector(m, r)
    lines = [f"{k.test},{k.monitor},{bit}" for k, bit in zip(m.rows, vec)]
    return "\n".join(lines) + "\n"


def load_responses(path, m: ActivationMatrix) -> tuple[int, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        return match_responses(m, parse_response_text(fh.read()))


def save_responses(path, m: ActivationMatrix, r) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_response_text(m, r))

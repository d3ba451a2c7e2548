"""Activation matrices.

Rows are (test, monitor) pairs, columns are blocks; a bit is one exactly
when the block lies on the test's path prefix ending at the monitor.  The
matrix is the complete static model the diagnosis step works from.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import (
    DuplicateRowKey,
    FormatError,
    MonitorOffPath,
    UnknownBlock,
    UnknownMonitor,
    UnknownTest,
)
from .graph import TestSegment, TransactionGraph, blocks_on_path
from .util import ceil_log2


@dataclass(frozen=True)
class RowKey:
    test: str
    monitor: str


@dataclass(frozen=True)
class ActivationMatrix:
    rows: tuple[RowKey, ...]
    cols: tuple[str, ...]
    bits: tuple[tuple[int, ...], ...]

    def column(self, block: str) -> tuple[int, ...]:
        try:
            j = self.cols.index(block)
        except ValueError:
            raise UnknownBlock(f"unknown block {block!r}") from None
        return tuple(row[j] for row in self.bits)

    def row(self, key: RowKey) -> tuple[int, ...]:
        for i, k in enumerate(self.rows):
            if k == key:
                return self.bits[i]
        raise DuplicateRowKey(f"no row ({key.test!r}, {key.monitor!r})")  # pragma: no cover


@dataclass(frozen=True)
class MatrixAudit:
    uncovered: tuple[str, ...]
    duplicate_rows: tuple[tuple[RowKey, ...], ...]
    equivalence_classes: tuple[tuple[str, ...], ...]
    ceil_log2_cols: int
    row_count: int

    @property
    def coverage_ok(self) -> bool:
        return not self.uncovered

    @property
    def log2_bound_ok(self) -> bool:
        return self.ceil_log2_cols <= self.row_count


def default_assignment(g: TransactionGraph, tests: tuple[TestSegment, ...]) -> tuple[RowKey, ...]:
    """One row per test and per monitor lying on that test's path.

    Tests keep their given order; within a test, monitors follow the node
    declaration order of the graph.
    """
    keys = []
    for t in tests:
        on_path = set(t.path)
        for m in g.nodes:
            if m in g.monitors and m in on_path:
                keys.append(RowKey(t.id, m))
    return tuple(keys)


def build_matrix(
    g: TransactionGraph,
    tests: tuple[TestSegment, ...],
    assignment: tuple[RowKey, ...] | None = None,
) -> ActivationMatrix:
    """Bit matrix over the given (test, monitor) rows; columns in arc order."""
    by_id = {t.id: t for t in tests}
    if len(by_id) != len(tests):
        dupes = sorted({t.id for t in tests if sum(u.id == t.id for u in tests) > 1})
        raise UnknownTest("duplicate test ids: " + ", ".join(dupes))

    if assignment is None:
        assignment = default_assignment(g, tests)

    seen: set[tuple[str, str]] = set()
    cols = tuple(a.id for a in g.arcs)
    col_index = {b: j for j, b in enumerate(cols)}
    monitor_set = set(g.monitors)

    rows: list[tuple[int, ...]] = []
    for key in assignment:
        pair = (key.test, key.monitor)
        if pair in seen:
            raise DuplicateRowKey(f"row ({key.test!r}, {key.monitor!r}) assigned twice")
        seen.add(pair)
        t = by_id.get(key.test)
        if t is None:
            raise UnknownTest(f"unknown test {key.test!r}")
        if key.monitor not in monitor_set:
            raise UnknownMonitor(f"node {key.monitor!r} is not a monitor")
        if key.monitor not in t.path:
            raise MonitorOffPath(
                f"monitor {key.monitor!r} is not on the path of test {key.test!r}"
            )
        active = blocks_on_path(g, t.prefix_to(key.monitor))
        bits = [0] * len(cols)
        for b in active:
            bits[col_index[b]] = 1
        rows.append(tuple(bits))

    return ActivationMatrix(tuple(assignment), cols, tuple(rows))


def audit_matrix(m: ActivationMatrix) -> MatrixAudit:
    """Coverage, duplicate rows, column-distinguishability classes, size bound."""
    n_rows, n_cols = len(m.rows), len(m.cols)

    covered = [0] * n_cols
    for row in m.bits:
        for j, bit in enumerate(row):
            covered[j] |= bit
    uncovered = tuple(m.cols[j] for j in range(n_cols) if not covered[j])

    row_groups: dict[tuple[int, ...], list[RowKey]] = {}
    for key, row in zip(m.rows, m.bits):
        row_groups.setdefault(row, []).append(key)
    duplicate_rows = tuple(
        tuple(keys) for keys in row_groups.values() if len(keys) > 1
    )

    col_groups: dict[tuple[int, ...], list[str]] = {}
    for j, block in enumerate(m.cols):
        col = tuple(row[j] for row in m.bits)
        col_groups.setdefault(col, []).append(block)
    classes = tuple(tuple(blocks) for blocks in col_groups.values())

    log_bound = ceil_log2(n_cols) if n_cols else 0
    return MatrixAudit(uncovered, duplicate_rows, classes, log_bound, n_rows)


# ---------------------------------------------------------------------------
# CSV interchange

_ROW_FIELD = "row"
_MONITOR_FIELD = "monitor"


def matrix_to_csv(m: ActivationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([_ROW_FIELD, _MONITOR_FIELD, *m.cols])
    for key, row in zip(m.rows, m.bits):
        w.writerow([key.test, key.monitor, *row])
    return buf.getvalue()


def matrix_to_csv_transposed(m: ActivationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["block", *(f"{k.test},{k.monitor}" for k in m.rows)])
    for j, block in enumerate(m.cols):
        w.writerow([block, *(row[j] for row in m.bits)])
    return buf.getvalue()


def _parse_bit(text: str, where: str) -> int:
    if text not in ("0", "1"):
        raise FormatError(f"{where}: bit must be 0 or 1, got {text!r}")
    return int(text)


def matrix_from_csv(text: str, transpose: bool = False) -> ActivationMatrix:
    try:
        records = list(csv.reader(io.StringIO(text)))
    except csv.Error as e:
        raise FormatError(f"bad CSV: {e}") from e
    records = [r for r in records if r]
    if not records:
        raise FormatError("matrix CSV is empty")

    if transpose:
        header, *body = records
        if not header or header[0] != "block":
            raise FormatError("transposed matrix CSV must start with a 'block' column")
        keys = []
        for cell in header[1:]:
            parts = cell.split(",")
            if len(parts) != 2:
                raise FormatError(f"row header {cell!r} is not 'test,monitor'")
            keys.append(RowKey(parts[0], parts[1]))
        cols = []
        col_bits = []
        for rec in body:
            if len(rec) != len(keys) + 1:
                raise FormatError(f"block row {rec[0]!r} has {len(rec) - 1} bits, expected {len(keys)}")
            cols.append(rec[0])
            col_bits.append([_parse_bit(c, f"block {rec[0]!r}") for c in rec[1:]])
        bits = tuple(
            tuple(col_bits[j][i] for j in range(len(cols))) for i in range(len(keys))
        )
        m = ActivationMatrix(tuple(keys), tuple(cols), bits)
    else:
        header, *body = records
        if len(header) < 2 or header[0] != _ROW_FIELD or header[1] != _MONITOR_FIELD:
            raise FormatError("matrix CSV must start with 'row,monitor' columns")
        cols = tuple(header[2:])
        keys = []
        bits = []
        for rec in body:
            if len(rec) != len(cols) + 2:
                raise FormatError(
                    f"row {rec[0]!r} has {max(len(rec) - 2, 0)} bits, expected {len(cols)}"
                )
            keys.append(RowKey(rec[0], rec[1]))
            bits.append(tuple(_parse_bit(c, f"row {rec[0]!r}") for c in rec[2:]))
        m = ActivationMatrix(tuple(keys), cols, tuple(bits))

    seen: set[tuple[str, str]] = set()
    for k in m.rows:
        pair = (k.test, k.monitor)
        if pair in seen:
            raise FormatError(f"duplicate row ({k.test!r}, {k.monitor!r}) in matrix CSV")
        seen.add(pair)
    dup_cols = sorted({b for b in m.cols if m.cols.count(b) > 1})
    if dup_cols:
        raise FormatError("duplicate block columns: " + ", ".join(dup_cols))
    return m


def load_matrix(path, transpose: bool = False) -> ActivationMatrix:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return matrix_from_csv(fh.read(), transpose=transpose)


def save_matrix(path, m: ActivationMatrix, transpose: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(matrix_to_csv_transposed(m) if transpose else matrix_to_csv(m))

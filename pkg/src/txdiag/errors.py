"""Exception types shared across the package.

Everything raised on bad domain input derives from TxdiagError; file/format
problems derive from FormatError so the CLI can map them to a distinct exit
code.
"""


class TxdiagError(Exception):
    """Base class for domain errors."""


class FormatError(TxdiagError):
    """Malformed input file (JSON/CSV/response text)."""


class UnknownNode(TxdiagError):
    pass


class UnknownBlock(TxdiagError):
    pass


class UnknownTest(TxdiagError):
    pass


class UnknownMonitor(TxdiagError):
    pass


class InvalidPath(TxdiagError):
    """A node sequence that is not a path of the graph (missing or ambiguous arcs)."""


class MonitorOffPath(TxdiagError):
    """Row key whose monitor node does not lie on its test's path."""


class DuplicateRowKey(TxdiagError):
    pass


class LengthMismatch(TxdiagError):
    """Response vector length differs from the matrix row count."""


class ProviderLengthMismatch(LengthMismatch):
    """A response provider returned a vector of the wrong length."""


class ResponseMismatch(TxdiagError):
    """Response file rows do not match the matrix rows (missing/extra/duplicate keys)."""


class SearchBudgetExceeded(TxdiagError):
    """Exact multi-fault search would enumerate more subsets than the budget allows."""


class UncoverableArc(TxdiagError):
    """An arc lies on no source-to-sink path, so no test set can cover it."""


class EquivalentColumns(TxdiagError):
    """Positive-literal logic synthesis requires all matrix columns to be distinct."""


class ZeroDenominator(TxdiagError):
    pass


class EmptyModel(TxdiagError):
    """Metrics need at least one block, one test and one monitor."""

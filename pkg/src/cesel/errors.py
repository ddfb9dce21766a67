"""Exception types raised across the toolkit.

Grouped loosely by origin: script/data parsing problems, degenerate
numerical inputs, and pipeline-level failures. All inherit from
:class:`CeselError` so callers can catch everything from this package
with one handler.
"""


class CeselError(Exception):
    """Base class for all toolkit errors."""


# --- modeling-language / graph errors -------------------------------------

class UnknownSymbol(CeselError):
    """A script token is not a keyword and not present in the symbol table."""

    def __init__(self, symbol: str, position: int = -1):
        self.symbol = symbol
        self.position = position
        super().__init__(f"unknown symbol {symbol!r} at token {position}")


class StructureError(CeselError):
    """Script violates the begin/end frame or block nesting rules."""

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"structure error at token {position}: {reason}")


class EmptyGraph(CeselError):
    """A graph carries no symbols at all, so it has no comparable cells."""


class EmptyCell(CeselError):
    """A cell handed to the dependence comparison was empty."""


# --- independency errors ---------------------------------------------------

class DuplicateAlgorithmId(CeselError):
    """Two graph arrays with the same algorithm ID in one matrix."""


class UnknownAlgorithm(CeselError):
    """An algorithm ID is missing from the independency matrix."""


class DimensionMismatch(CeselError):
    """Basic-parameter matrices with incompatible shapes or IDs."""


class CommitteeTooSmall(CeselError):
    """Fewer than two usable committee entries."""


# --- data / clustering errors ----------------------------------------------

class ParseError(CeselError):
    """A CSV cell could not be interpreted; message names row and column."""


class AllMissingColumn(CeselError):
    """A feature column has no observed values, so it cannot be imputed."""


class DegenerateSpectrum(CeselError):
    """The spectral embedding has fewer usable directions than clusters."""


class EmptyCommittee(CeselError):
    """An operation that needs at least one committee member got none."""


class WeightMismatch(CeselError):
    """Weight vector length does not match the committee."""


class InvalidK(CeselError):
    """Requested cluster count is outside [1, n]."""


class LengthMismatch(CeselError):
    """Two per-sample arrays have different lengths."""

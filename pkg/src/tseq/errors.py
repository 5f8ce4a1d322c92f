"""Exception types raised by the tseq engine.

Every data-dependent failure maps to one of these classes so callers (and the
CLI, which turns them into exit code 2) can tell usage mistakes apart from bad
input data.
"""


class TseqError(Exception):
    """Base class for all tseq data errors."""


class EncodingOverflow(TseqError):
    """A phenX id is too large to occupy its seven-digit slot."""


class DecodingOutOfRange(TseqError):
    """A sequence id cannot be split into two seven-digit phenX ids."""


class PackOverflow(TseqError):
    """Requested duration-bucket width would push the packed value past 64 bits."""


class MissingColumn(TseqError):
    """A required dbmart column is absent from the input header."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"required column {column!r} not found in header")


class MalformedDate(TseqError):
    """A date cell does not parse as an ISO 8601 calendar date."""

    def __init__(self, row: int, text: str):
        self.row = row
        self.text = text
        super().__init__(f"row {row}: {text!r} is not an ISO 8601 date (YYYY-MM-DD)")


class PhenxOverflow(TseqError):
    """More distinct phenX codes than the seven-digit id space can hold."""


class UnknownId(TseqError):
    """A numeric id has no entry in the lookup tables."""


class CapacityExceeded(TseqError):
    """Predicted sequence count will not fit in memory; mine in chunks instead."""


class IoFailure(TseqError):
    """A file-based mining step failed; carries path and cause."""

    def __init__(self, path, cause: BaseException):
        self.path = path
        self.cause = cause
        super().__init__(f"{path}: {cause}")


class ArithmeticOverflow(TseqError):
    """A predicted count does not fit in an unsigned 64-bit integer."""


class PatientExceedsLimit(TseqError):
    """A single patient's pair count is larger than the chunk budget."""

    def __init__(self, patient: int, count: int, limit: int):
        self.patient = patient
        self.count = count
        self.limit = limit
        super().__init__(
            f"patient {patient} alone yields {count} sequences, above the "
            f"chunk limit of {limit}"
        )


class DegenerateCohort(TseqError):
    """Fewer than two patients; correlation is undefined."""

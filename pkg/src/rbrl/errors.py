"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end so
that parse, validation and numeric failures map to distinct process codes.
"""

from __future__ import annotations


class RBRLError(Exception):
    exit_code = 1


# -- data / parsing ----------------------------------------------------------


class DataError(RBRLError):
    exit_code = 3


class ParseError(DataError):
    """Malformed input file; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(f"ParseError: {where}{message}")


class LabelOutOfRange(DataError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        prefix = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"LabelOutOfRange: {prefix}{message}")


class InconsistentWidth(DataError):
    pass


class VersionMismatch(DataError):
    pass


# -- validation ---------------------------------------------------------------


class ValidationError(RBRLError):
    exit_code = 4


class DatasetError(ValidationError):
    """Dataset invariant violation. ``rows`` lists offending row indices."""

    def __init__(self, message: str, rows=()):
        self.rows = list(rows)
        super().__init__(message)


class BadLabelValue(DatasetError):
    pass


class NonFiniteFeature(DatasetError):
    pass


class EmptyDataset(DatasetError):
    pass


class ShapeMismatch(ValidationError):
    pass


class AsymmetricKernel(ValidationError):
    pass


class TooFewRows(ValidationError):
    pass


class NoUsableRows(ValidationError):
    pass


# -- numerics -----------------------------------------------------------------


class NumericalError(RBRLError):
    exit_code = 5


class NonFiniteObjective(NumericalError):
    pass


class SvdFailure(NumericalError):
    pass

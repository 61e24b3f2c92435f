"""Exception hierarchy.

``InputError`` subclasses map to CLI exit code 2, ``ConfigError`` subclasses
to exit code 3.
"""


class CiuGraphError(Exception):
    pass


class InputError(CiuGraphError):
    """Problem with a transcript or data file being processed."""


class ConfigError(CiuGraphError):
    """Problem with a lexicon, coordinate table, rule file or metadata schema."""


class MalformedChat(InputError):
    pass


class SchemaError(ConfigError):
    pass


class UnknownCiuId(SchemaError):
    pass


class ConflictingEntry(SchemaError):
    pass


class GraphSchemaError(InputError, SchemaError):
    """Malformed graph or sequence JSON given as pipeline input."""


class OutOfBounds(ValueError, CiuGraphError):
    pass


class MissingCoordinate(KeyError, CiuGraphError):
    pass


class DomainError(ValueError, CiuGraphError):
    pass


class RankDeficient(CiuGraphError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"design matrix is rank deficient at column {column!r}")


class TooFewRows(CiuGraphError):
    pass


class InsufficientData(CiuGraphError):
    pass


class SpecError(ConfigError):
    pass

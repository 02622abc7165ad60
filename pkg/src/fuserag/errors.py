"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for usage/config
problems, 2 for data/format problems, 3 for transport failures.
"""


class FuseragError(Exception):
    exit_code = 2


class ConfigError(FuseragError):
    exit_code = 1


class DataError(FuseragError):
    exit_code = 2


class MalformedInputError(DataError):
    """Input text is not valid UTF-8 (or contains lone surrogates)."""


class EmptyQueryError(DataError):
    """Text normalizes to zero tokens."""


class FormatError(DataError):
    """A persisted artifact has the wrong magic, version or layout."""


class FingerprintMismatchError(DataError):
    pass


class DimensionMismatchError(DataError):
    pass


class DuplicateIdError(DataError):
    def __init__(self, ident: str, what: str = "id"):
        super().__init__(f"duplicate {what}: {ident!r}")
        self.ident = ident


class EmptyIndexError(DataError):
    pass


class SchemaError(DataError):
    pass


class KindConflictError(SchemaError):
    pass


class UnknownEntityError(DataError):
    pass


class NoAnchorError(DataError):
    """Query has no recognized entity to anchor a graph pattern."""


class BatchEmbeddingError(DataError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"embedding failed at index {index}: {cause}")
        self.index = index
        self.cause = cause
        # a transport failure inside a batch keeps its transport exit code
        self.exit_code = getattr(cause, "exit_code", self.exit_code)


class RecordError(DataError):
    """Malformed line in a line-delimited input file."""

    def __init__(self, path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no


class TransportError(FuseragError):
    exit_code = 3


class ResponseSchemaError(TransportError):
    pass


class ResponseTooLargeError(TransportError):
    pass


class FingerprintMismatchWarning(UserWarning):
    """A persisted index was built with a different embedder than the one configured."""

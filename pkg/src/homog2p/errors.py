"""Exception hierarchy.

The CLI maps each family to a fixed exit code: ``ValidationError`` -> 2,
``StorageError`` -> 3, ``InvariantViolation`` -> 4.
"""

from __future__ import annotations


class HomoG2PError(Exception):
    pass


class ValidationError(HomoG2PError, ValueError):
    """Input data or configuration that violates a documented contract."""


class MalformedLineError(ValidationError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class RecordValidationError(MalformedLineError):
    """A corpus record violates one of the record invariants."""


class UnknownSymbolError(ValidationError):
    def __init__(self, symbol: str, position: int):
        super().__init__(f"unknown phoneme symbol {symbol!r} at token {position}")
        self.symbol = symbol
        self.position = position


class MissingEzafeVowelError(ValidationError):
    def __init__(self, word_index: int):
        super().__init__(f"word {word_index} has no trailing linking vowel 'e'")
        self.word_index = word_index


class UnknownHomographError(ValidationError):
    pass


class UnknownPronunciationError(ValidationError):
    pass


class HomographNotInDbError(ValidationError, KeyError):
    def __str__(self) -> str:
        return f"homograph not in context database: {self.args[0]!r}"


class ConfigError(ValidationError):
    pass


class FingerprintMismatchError(ConfigError):
    pass


class RepresentationMismatchError(ValidationError):
    pass


class AlignmentError(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class NoAllowedBoundaryError(PreconditionError):
    pass


class EmptyFillersError(PreconditionError):
    pass


class MissingPlaceholderError(ValidationError):
    pass


class MissingDecisionError(ValidationError):
    def __init__(self, record_id: str, homograph: str):
        super().__init__(f"record {record_id!r}: no decision logged for homograph {homograph!r}")
        self.record_id = record_id
        self.homograph = homograph


class EmptyBenchmarkError(ValidationError):
    pass


class StorageError(HomoG2PError):
    """Unreadable or corrupt persisted artifact."""


class VersionMismatchError(StorageError):
    pass


class ChecksumError(StorageError):
    pass


class InvariantViolation(HomoG2PError, AssertionError):
    pass

"""Exception hierarchy for libpin.

Every error carries the process exit code the command-line interface maps it
to: 2 for bad input, 3 for inconsistent on-disk state.
"""

INPUT_ERROR = 2
STATE_ERROR = 3


class LibpinError(Exception):
    """Base class for all libpin errors."""

    exit_code = INPUT_ERROR


class MalformedDocument(LibpinError, ValueError):
    """A document is not syntactically valid (bad UTF-8 or JSON)."""


class SchemaViolation(LibpinError, ValueError):
    """A document or model object breaks a structural invariant."""


class DuplicateName(SchemaViolation):
    """A class name or method key appears twice where it must be unique."""


class DuplicateId(LibpinError):
    """The same (library, version) pair was supplied twice."""


class LevelUnavailable(LibpinError):
    """A code-level signature was requested for a class-level profile."""


class CodeLevelUnavailable(LibpinError):
    """Code-level features are required but a profile only has class metadata."""


class UnknownVersion(LibpinError):
    """A library version is not part of the database."""


class EmptyProfile(LibpinError):
    """A ratio was requested over a profile without classes."""


class InfeasibleSpec(LibpinError):
    """A corpus specification cannot be realized."""


class TruthMismatch(LibpinError):
    """A benchmark truth file does not line up with the app profiles."""


class IoFailure(LibpinError):
    """A persisted artifact could not be read or written."""

    exit_code = STATE_ERROR


class StaleIndex(LibpinError):
    """An index file was built from a different database."""

    exit_code = STATE_ERROR

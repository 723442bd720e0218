"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class PatternLabError(Exception):
    exit_code = 3


class ParseError(PatternLabError, ValueError):
    """Malformed text input (multiset, partition, pattern, config)."""

    exit_code = 2


class DomainError(PatternLabError, ValueError):
    """Arguments outside an operation's mathematical domain."""

    exit_code = 3


class SizeLimitError(PatternLabError):
    """An enumeration was asked to go beyond its configured cap."""

    exit_code = 4


class PrecisionError(PatternLabError, ArithmeticError):
    """The requested tail bound cannot be certified at working precision."""

    exit_code = 4


class BoundViolation(PatternLabError):
    """A cumulant is nonzero on a bag whose induced graph is disconnected."""

    exit_code = 3

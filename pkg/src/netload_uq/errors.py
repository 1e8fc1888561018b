"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class NetloadError(Exception):
    """Base class for all errors raised by netload_uq."""


class InvalidProfile(NetloadError, ValueError):
    """A time series violates the profile invariants (length, dt, finiteness)."""


class NonIntegerStepsPerDay(NetloadError, ValueError):
    pass


class EmptyPartition(NetloadError, ValueError):
    """No full calendar day is contained in the profile."""


class EmptyInput(NetloadError, ValueError):
    pass


class IncompatibleResolution(NetloadError, ValueError):
    pass


class TooShort(NetloadError, ValueError):
    pass


class AllDaysDegenerate(NetloadError, ValueError):
    """Every day has zero spread, so standardized moments are undefined."""


class MismatchedPartitions(NetloadError, ValueError):
    pass


class LengthMismatch(NetloadError, ValueError):
    pass


class UndefinedKLD(NetloadError, ArithmeticError):
    """KL divergence hits a bin where the base has mass and the net load has none.

    The offending counts are carried on the exception so callers can report
    them instead of the (infinite) value.
    """

    def __init__(self, problem_bins: int, infinite_bins: int, days_affected: int):
        self.problem_bins = problem_bins
        self.infinite_bins = infinite_bins
        self.days_affected = days_affected
        super().__init__(
            f"KL divergence undefined: {infinite_bins} bin(s) with base mass but no "
            f"net-load mass on {days_affected} day(s) "
            f"({problem_bins} one-sided zero bin(s) in total)"
        )


class InvalidParams(NetloadError, ValueError):
    pass


class AlignmentError(NetloadError, ValueError):
    pass


class ZeroVariance(NetloadError, ArithmeticError):
    """The metric is constant over the whole design, so indices are undefined."""


class NearZeroDenominator(NetloadError, ArithmeticError):
    pass


class TooFewLevels(NetloadError, ValueError):
    pass


class ParseError(NetloadError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NonUniformSpacing(ParseError):
    pass


class NonFiniteValue(ParseError):
    pass


class ConfigError(NetloadError, ValueError):
    pass

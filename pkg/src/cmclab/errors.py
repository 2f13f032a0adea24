"""Exception hierarchy shared by the library and the CLI."""


class CMCLabError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigError(CMCLabError):
    exit_code = 2


class MetricError(CMCLabError):
    """The metric cannot be used as an exterior region."""

    exit_code = 3


class DomainError(MetricError):
    pass


class PositivityError(MetricError):
    pass


class NoHorizon(MetricError):
    pass


class NotOutermost(MetricError):
    def __init__(self, message, radii=()):
        super().__init__(message)
        self.radii = tuple(radii)


class NonConvergence(MetricError):
    pass


class OutOfRange(CMCLabError):
    exit_code = 4


class BarrierViolation(OutOfRange):
    pass


class OracleMismatch(CMCLabError):
    exit_code = 5

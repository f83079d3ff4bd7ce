"""
Exception hierarchy.

Library code raises these; the montecarlo runner turns the numerical ones
into recorded trial outcomes and the cli turns all of them into exit codes.
"""


class DelayCalError(Exception):
    """Base class for every error raised by delaycal."""

    exit_code = 1


class ArgumentError(DelayCalError, ValueError):
    """An argument violates an operation's precondition."""

    exit_code = 2


class ConfigError(DelayCalError):
    """Experiment configuration is missing or fails validation."""

    exit_code = 2


class ReportInputError(DelayCalError):
    """A stored batch directory is empty or incomplete."""

    exit_code = 2


class CoverageError(DelayCalError):
    """The control stream does not cover a requested time span."""


class NumericalFailureError(DelayCalError):
    """A variance or covariance that must be positive is not."""


class DivergenceError(DelayCalError):
    """The filter state became non-finite or left the divergence cap."""


class ConstructionError(DelayCalError):
    """An indistinguishable pair cannot be built from the given inputs."""

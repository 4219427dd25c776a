"""Exception vocabulary shared across the package.

Everything raised on purpose derives from :class:`StochAvgError`, so callers
can catch one base class at the CLI boundary and map it to an exit code.
"""

from __future__ import annotations


class StochAvgError(Exception):
    """Base class for all errors raised by this package."""


class NonFinite(StochAvgError):
    """An input or intermediate quantity contains NaN or infinity."""


class NotSymmetric(StochAvgError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class DimensionMismatch(StochAvgError):
    """Array shapes are inconsistent with each other or with the agent count."""


class NegativeWeights(StochAvgError):
    """An operation requiring nonnegative edge weights saw a negative one."""


class RowSumViolation(StochAvgError):
    """A matrix required to have (near-)zero row sums violates that."""


class NotStochastic(StochAvgError):
    """A transition matrix has negative entries or rows not summing to one."""


class NoUniqueStationary(StochAvgError):
    """A transition matrix has no unique stationary distribution."""


class Divergent(StochAvgError):
    """A requested infinite series does not converge."""


class BoundOverflow(StochAvgError):
    """An exponential inside a bound exceeds the representable float range."""


class MissingInput(StochAvgError):
    """A bound was requested without the inputs that variant needs."""


class InsufficientTrials(StochAvgError):
    """Too few trials to form the requested statistic."""


class StrideTooCoarse(StochAvgError):
    """An operation needs every-step samples but the record stride skipped some."""


class DivergenceError(StochAvgError):
    """A simulated trajectory left the finite guard region.

    Carries which trial and which step went bad so ensemble drivers can
    report the offender.
    """

    def __init__(self, trial_index: int, step: int, message: str | None = None):
        self.trial_index = trial_index
        self.step = step
        super().__init__(
            message
            or f"trajectory diverged in trial {trial_index} at step {step}"
        )


class ConfigError(StochAvgError):
    """A configuration file or override is malformed or inconsistent."""

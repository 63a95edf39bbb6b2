"""Exception types shared across the package."""


class ResilSimError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(ResilSimError, ValueError):
    """An argument violates a documented precondition."""


class InsufficientDataError(InvalidInputError):
    """Not enough observations to estimate anything."""


class MissingOracleInputError(InvalidInputError):
    """The oracle predictor was asked to predict without the true next state."""


class NonErgodicError(ResilSimError):
    """The chain has no unique stationary distribution (reducible or periodic)."""


class UnterminatedWindowError(InvalidInputError):
    """A metric requiring a completed recovery was given an open disruption window."""


class DegenerateRecoveryError(ResilSimError):
    """The service integral over a recovery window is zero; the CRF is undefined."""


class NoRouteError(ResilSimError):
    """No path exists that avoids the disruption region.

    Deliberately not a subclass of :class:`InvalidInputError`: the inputs are
    valid, the network simply cannot route around the region.
    """


class ConfigError(InvalidInputError):
    """A scenario or topology config is malformed. Carries the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")

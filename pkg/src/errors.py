"""Exception types shared by every module"""


class InvalidParameter(ValueError):
    """A value violates a type invariant. ``field`` names the offending input."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class PoleError(InvalidParameter):
    """Gamma function or hypergeometric series evaluated at a pole."""


class BoundaryError(InvalidParameter):
    """Density requested at gamma = 0, where it is not defined."""


class NumericalFailure(RuntimeError):
    """An evaluation could not reach the requested accuracy.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (condition estimates, term magnitudes, achieved tolerance).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConvergenceError(NumericalFailure):
    """A t-series reached t_max before the truncation rule was met."""

    def __init__(self, message, partial_value, terms_used, diagnostics=None):
        super().__init__(message, diagnostics)
        self.partial_value = partial_value
        self.terms_used = terms_used


class QuadratureError(NumericalFailure):
    """Moment-based construction of a quadrature rule broke down."""


class ProbabilityRangeError(NumericalFailure):
    """A computed probability fell outside [0, 1] by more than the clamp margin."""

"""Exception types shared across the package."""


class PeakSchedError(ValueError):
    """Base class for all errors raised by this package."""


class StructuralError(PeakSchedError):
    """Inputs have incompatible shapes or lengths."""


class ValidationError(PeakSchedError):
    """A data invariant is violated (bad price, demand, or schedule)."""


class DomainError(PeakSchedError):
    """An argument lies outside the documented domain of an operation."""


class InfeasibleError(PeakSchedError):
    """No feasible schedule exists for the given instance."""


class UndefinedRatioError(PeakSchedError):
    """A ratio was requested against a zero denominator."""


class NumericError(PeakSchedError):
    """A numerical routine failed to reach its accuracy target.

    The achieved tolerance is carried in ``achieved``.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved

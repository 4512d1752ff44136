"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for bad input and
:class:`NumericalError` for problems that surface during a solve. The CLI maps
them to distinct exit codes.
"""


class P2PError(Exception):
    """Base class for all package errors."""


class ValidationError(P2PError, ValueError):
    pass


class InvalidSizeError(ValidationError):
    pass


class InvalidEdgeError(ValidationError):
    pass


class NotConnectedError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class NonSquareError(ValidationError):
    pass


class NotSymmetricError(ValidationError):
    pass


class NotPositiveDefiniteError(ValidationError):
    pass


class NonPositiveMeanError(ValidationError):
    pass


class WrongArityError(ValidationError):
    pass


class InapplicableCriterionError(ValidationError):
    pass


class TooLargeError(ValidationError):
    pass


class NumericalError(P2PError, ArithmeticError):
    pass


class SingularSystemError(NumericalError):
    def __init__(self, message: str, rcond: float | None = None):
        super().__init__(message)
        self.rcond = rcond


class RankDeficiencyError(NumericalError):
    pass


class InconsistencyError(NumericalError):
    pass


class DegenerateDenominatorError(NumericalError):
    pass


class FeasibilityError(NumericalError):
    pass

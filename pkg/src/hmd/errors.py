"""Exception hierarchy.

Validation problems derive from ``ValidationError`` (CLI exit code 2);
numerical trouble derives from ``NumericalError`` (exit code 3).
"""


class HMDError(Exception):
    pass


class ValidationError(HMDError, ValueError):
    pass


class EmptyEdge(ValidationError):
    pass


class NonPositiveEdgeWeight(ValidationError):
    pass


class BetaSumMismatch(ValidationError):
    pass


class NegativeBeta(ValidationError):
    pass


class IsolatedVertex(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class TrivialSet(ValidationError):
    pass


class EmptyClass(ValidationError):
    pass


class SingleVertex(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class NotTwoUniform(ValidationError):
    pass


class NotOrthogonal(ValidationError):
    pass


class AllZero(ValidationError):
    pass


class NumericalError(HMDError, ArithmeticError):
    pass


class StepTooLarge(NumericalError):
    pass


class NotDifferentiableHere(NumericalError):
    pass


class NotConverged(NumericalError):
    pass

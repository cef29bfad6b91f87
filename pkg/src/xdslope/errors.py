"""Exception hierarchy.

Two roots: ``ValidationError`` for bad inputs or violated preconditions and
``NumericalError`` for failures of the numerical machinery itself. The CLI
maps them to exit codes 2 and 3.
"""


class XDError(Exception):
    pass


class ValidationError(XDError, ValueError):
    pass


class NumericalError(XDError, ArithmeticError):
    pass


class DomainError(ValidationError):
    pass


class InvalidScale(ValidationError):
    pass


class EmptySupport(ValidationError):
    pass


class UnsupportedOrder(ValidationError):
    pass


class UnknownFamily(ValidationError):
    pass


class MissingParameter(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class ExponentialCase(ValidationError):
    pass


class NotMonotone(ValidationError):
    pass


class RateOutOfDomain(ValidationError):
    pass


class OutOfSupport(ValidationError):
    pass


class NotCensored(ValidationError):
    pass


class DomainTooSmall(ValidationError):
    pass


class NotCensorable(ValidationError):
    pass


class UnboundedSupport(ValidationError):
    pass


class NegativityViolation(ValidationError):
    pass


class DomainViolation(ValidationError):
    pass


class DomainNotFull(ValidationError):
    pass


class InvalidSlope(ValidationError):
    pass


class InvalidVarianceFunction(ValidationError):
    pass


class NonpositiveSlope(ValidationError):
    pass


class WindowOutOfDomain(ValidationError):
    pass


class NoPowerAsymptotics(ValidationError):
    pass


class ExponentialDomain(ValidationError):
    pass


class NoExponentialAsymptotics(ValidationError):
    pass


class DivergentIntegral(NumericalError):
    """Improper integral diverges; ``direction`` names the offending endpoint."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class IntegrationFailure(NumericalError):
    pass


class ExpressionError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass

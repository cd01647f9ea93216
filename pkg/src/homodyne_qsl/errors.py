"""Exception types raised across the package."""


class QsltError(Exception):
    """Base class for all errors raised by homodyne_qsl."""


class DomainError(QsltError, ValueError):
    """An argument lies outside its admissible range."""


class NonHermitianInput(QsltError, ValueError):
    pass


class DegenerateModel(QsltError, ArithmeticError):
    """Gamma = 0: the analytic coefficients divide by zero."""


class PositivityViolation(QsltError, ArithmeticError):
    pass


class StepRejected(QsltError, ArithmeticError):
    """An RK4 step produced a non-positive state; `time` is where it happened."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class QuadratureUnderflow(QsltError, ArithmeticError):
    pass


class UnknownPreset(QsltError, KeyError):
    pass

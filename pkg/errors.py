class QfiError(Exception):
    """Base class for every error raised by the library"""


class DomainError(QfiError, ValueError):
    pass


class InvalidStateError(QfiError, ValueError):
    pass


class NumericError(QfiError, ArithmeticError):
    pass


class PureStateBoundaryError(QfiError, ArithmeticError):
    """
    Purity term of the Gaussian QFI requested at P = 1 with dP != 0
    """


class NoSteadyStateError(QfiError, ValueError):
    pass


class UnsupportedRegimeError(QfiError, ValueError):
    pass


class StepSizeError(QfiError, ValueError):
    pass


class TruncationError(QfiError):
    """
    Fock truncation too small for the requested state
    suggested_dim holds a dimension that should pass the tail check
    """

    def __init__(self, message, suggested_dim=None):
        super().__init__(message)
        self.suggested_dim = suggested_dim

"""Exception types raised by the numerical routines."""


class NumericalError(ArithmeticError):
    """Base class for failures detected during a computation."""


class SingularMatrixError(NumericalError):
    """A triangular solve hit a zero or subnormal diagonal entry.

    The offending 0-based diagonal index is available as ``index``.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        if message is None:
            message = f"triangular factor is singular at diagonal index {self.index}"
        super().__init__(message)


class RankDeficiencyError(NumericalError):
    """A solver found the matrix numerically rank deficient.

    ``index`` is the 0-based diagonal position whose magnitude fell under
    the relative threshold.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        if message is None:
            message = f"numerical rank deficiency detected at diagonal index {self.index}"
        super().__init__(message)


class ConvergenceError(NumericalError):
    """An iteration exhausted its sweep budget before reaching tolerance."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)

"""Exception types raised across the package."""


class QetCoolError(ValueError):
    """Base class for all domain errors."""


class NotHermitian(QetCoolError):
    pass


class BadIndex(QetCoolError):
    pass


class DimensionMismatch(QetCoolError):
    pass


class WrongDimension(QetCoolError):
    pass


class InvalidState(QetCoolError):
    """A matrix failed the trace / Hermiticity / positivity checks."""


class IncompletePovm(QetCoolError):
    pass


class DegenerateBranch(QetCoolError):
    """A measurement outcome has p_A = q_A = 0, so no rotation angle is defined."""


class NoConvergence(QetCoolError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class BadLength(QetCoolError):
    pass

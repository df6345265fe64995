"""Exception hierarchy shared by all mpcurve modules."""


class MpcError(Exception):
    """Base class for every error raised by mpcurve."""


class InvalidSpec(MpcError, ValueError):
    pass


class DimensionMismatch(MpcError, ValueError):
    pass


class DomainError(MpcError, ValueError):
    pass


class InsufficientData(MpcError, ValueError):
    pass


class ZeroMean(MpcError, ValueError):
    pass


class DegenerateInputs(MpcError, ValueError):
    """All abscissae (or all points) coincide."""


DegenerateData = DegenerateInputs


class SingularSystem(MpcError, ArithmeticError):
    pass


class NonFiniteObjective(MpcError, ArithmeticError):
    pass


class SingularMetric(MpcError, ArithmeticError):
    pass


class NonFinite(MpcError, ArithmeticError):
    pass


class NoConvergence(MpcError, ArithmeticError):
    pass


class IoError(MpcError, OSError):
    pass


class ParseError(MpcError, ValueError):
    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class RaggedRows(MpcError, ValueError):
    pass

"""
Exception hierarchy shared by all solver modules
"""


class MomentMeasureError(Exception):
    """Base class for every error raised by the solver library"""


class InvalidMeasureError(MomentMeasureError, ValueError):
    """A measure, test case id or discretization parameter is invalid"""


class DegenerateSupportError(MomentMeasureError):
    """Fewer than three affinely independent points: no planar diagram exists"""


class DivergentIntegralError(MomentMeasureError):
    """An exponential integral over an unbounded cell or ray does not converge"""


class SingularSystemError(MomentMeasureError):
    """The Newton system could not be solved to the requested residual"""


class DampingFailedError(MomentMeasureError):
    """No step 2^-i keeps the iterate inside U"""


class MaxIterationsExceededError(MomentMeasureError):
    """The Newton loop hit its iteration limit before reaching the tolerance"""


class TableFormatError(MomentMeasureError, ValueError):
    """A result table does not follow the expected space-separated layout"""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RateFitError(MomentMeasureError, ValueError):
    """Too few or degenerate samples for a log-log rate fit"""

"""Exception types raised across the package."""


class GraphError(ValueError):
    """Invalid node id or query against a Graph."""


class IngestError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, message, path=None, line_no=None):
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = f"{path}:"
        if line_no is not None:
            where += f"{line_no}:"
        super().__init__(f"{where} {message}" if where else message)


class StreamError(ValueError):
    """An edge arrived that the NES state machine cannot accept."""


class UndefinedEstimateError(ArithmeticError):
    """A sample-side estimate has a zero denominator (sample too small)."""


class CorrectionOverflowError(ArithmeticError):
    """1 + RB_hat <= 0, so the bias correction cannot be applied."""


class UnreachableTargetError(ValueError):
    """No sampling probability in (0, 1] attains the requested RSE."""


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""

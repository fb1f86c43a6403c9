"""Exception hierarchy shared by every module of the toolkit."""


class SbtError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SbtError, ValueError):
    """A text file (permutation, 3DT, DIMACS, trace) could not be parsed."""


class InvalidPermutation(SbtError, ValueError):
    pass


class InvalidTransposition(SbtError, ValueError):
    pass


class InvalidInstance(SbtError, ValueError):
    pass


class NotWellOrdered(SbtError, ValueError):
    pass


class SpanMismatch(SbtError, ValueError):
    pass


class BudgetExhausted(SbtError):
    """A search hit its node budget before reaching a definite answer."""

    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


class DepthExceeded(SbtError):
    pass


class SpanTooLarge(SbtError, ValueError):
    pass


class ArityError(SbtError, ValueError):
    pass


class AssemblyError(SbtError, ValueError):
    """Variables are not wired as a perfect matching, or a variable is invalid."""


class DecompositionError(SbtError):
    """A step would leave the block decomposition undefined."""


class NotNormalized(SbtError, ValueError):
    pass


class UnsatisfiedAssignment(SbtError, ValueError):
    pass


class IncompleteTrace(SbtError, ValueError):
    pass


class LayoutError(SbtError, ValueError):
    pass

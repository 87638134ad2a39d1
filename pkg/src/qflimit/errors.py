"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front-end:
1 for bad usage/parameters, 2 for input/parse problems, 3 for numeric failures.
"""


class QFLimitError(Exception):
    exit_code = 3


class InvalidParameter(QFLimitError, ValueError):
    exit_code = 1


class InvalidThreshold(InvalidParameter):
    pass


class IndexOutOfRange(InvalidParameter, IndexError):
    pass


class GraphError(QFLimitError, ValueError):
    exit_code = 2


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class RandomGraphEmpty(EmptyGraph):
    """A random ensemble produced no edges; retry with another seed."""


class LengthMismatch(InvalidParameter):
    pass


class EmptySample(InvalidParameter):
    pass


class NoClosedForm(QFLimitError):
    exit_code = 1


class TooLarge(QFLimitError):
    pass


class TooLargeForOracle(TooLarge):
    pass


class ConvergenceFailure(QFLimitError):
    pass


class DegenerateTruncation(QFLimitError):
    pass


class InfiniteFourthMoment(QFLimitError):
    pass


class InvalidSpec(QFLimitError):
    pass


class ResidualClampWarning(UserWarning):
    """The estimated residual variance fell outside [0, 1] and was clamped."""

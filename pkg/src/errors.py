"""
Error Types

Every failure raised by the solver derives from AsaptError, which is a
ValueError so callers that already guard against bad input keep working.
"""

from typing import Optional, Tuple


class AsaptError(ValueError):
    """Base class for all solver errors."""


class GraphError(AsaptError):
    """Invalid arc list passed to graph_core.build()."""

    def __init__(self, message: str, arc: Optional[Tuple[int, int]] = None):
        self.arc = arc
        super().__init__(message)


class SelfLoop(GraphError):
    pass


class TwoCycle(GraphError):
    pass


class DuplicateArc(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class EmptySet(AsaptError):
    pass


class FullSet(AsaptError):
    pass


class NotPermutation(AsaptError):
    pass


class NotConnected(AsaptError):
    pass


class TooLarge(AsaptError):
    pass


class NotTournament(AsaptError):
    pass


class NotTriangle(AsaptError):
    pass


class NotLeafBlock(AsaptError):
    pass


class NotForestOfCliques(AsaptError):
    pass


class InvalidPlan(AsaptError):
    pass


class PreconditionViolated(AsaptError):
    """A reduction rule was applied where its conditions do not hold."""


class TraceMismatch(AsaptError):
    """A witness or trace does not fit the graph it is replayed on."""


class ReductionStalled(AsaptError):
    """No reduction rule applies to a connected graph with at least one arc."""


class InstanceParseError(AsaptError):
    """Malformed instance or report file."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)

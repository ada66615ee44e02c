"""Exception hierarchy shared by every module of the package."""


class AdvectionError(Exception):
    """Base class for all errors raised by graph_advection."""


class GraphError(AdvectionError, ValueError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class NonPositiveLength(GraphError):
    pass


class IndexOutOfRange(GraphError, IndexError):
    pass


class NoPotential(GraphError):
    """Raised when edge lengths cannot be realised as differences of a potential."""


class DifferentComponents(GraphError):
    pass


class ParseError(AdvectionError, ValueError):
    pass


class DimensionMismatch(AdvectionError, ValueError):
    pass


class NonFiniteInput(AdvectionError, ValueError):
    pass


class NotASuccessor(AdvectionError, ValueError):
    pass


class ZeroDiagonal(AdvectionError, ValueError):
    pass


class NotSimpleGraph(AdvectionError, ValueError):
    pass


class TargetUnreachable(AdvectionError, ValueError):
    pass


class UnknownNode(AdvectionError, KeyError):
    pass

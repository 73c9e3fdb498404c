"""Exception hierarchy shared by all walkloss modules."""


class WalklossError(Exception):
    """Base class for every error raised by this package."""


class GraphError(WalklossError, ValueError):
    """Invalid graph data or an operation that does not fit the graph."""


class MalformedLine(GraphError):
    pass


class MalformedEntry(GraphError):
    pass


class UnsupportedHeader(GraphError):
    pass


class SelfLoop(GraphError):
    def __init__(self, node):
        super().__init__(f"self-loop at node {node}")
        self.node = node


class IndexOutOfRange(GraphError):
    pass


class TooManyEdges(GraphError):
    pass


class InvalidParameters(GraphError):
    pass


class MissingElement(GraphError):
    def __init__(self, element, trace=None):
        super().__init__(f"element {element!r} is not present in the graph")
        self.element = element
        # partial results gathered before the failure (sequential driver)
        self.trace = trace


class EmptyGraph(GraphError):
    pass


class IsolatedNode(GraphError):
    def __init__(self, node):
        super().__init__(f"node {node} is isolated")
        self.node = node


class DimensionMismatch(WalklossError, ValueError):
    pass


class InvalidDepth(WalklossError, ValueError):
    pass


class IntegerOverflow(WalklossError, ArithmeticError):
    pass


class NumericalError(WalklossError, ArithmeticError):
    """Iterative method failed."""


class NoConvergence(NumericalError):
    def __init__(self, max_iter, detail=""):
        msg = f"no convergence within {max_iter} iterations"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.max_iter = max_iter


class NotPositiveDefinite(NumericalError):
    pass

"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (CLI exit status 2),
numerical failures from :class:`NumericalError` (exit status 3).
"""


class FracsobError(Exception):
    """Base class for all package errors."""


class ValidationError(FracsobError, ValueError):
    """Inputs violate an operation's preconditions."""


class NumericalError(FracsobError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy value."""


class GraphError(ValidationError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class NonPositiveWeight(GraphError):
    pass


class DisconnectedGraph(GraphError):
    pass


class InvalidVertex(GraphError):
    pass


class GraphFileError(ValidationError):
    pass


class EmptyDomain(ValidationError):
    pass


class SizeCapExceeded(ValidationError):
    pass


class InsufficientRoom(ValidationError):
    """The requested neighborhood touches the truncation frontier."""


class BallTooLarge(ValidationError):
    pass


class GenerationTooSmall(ValidationError):
    pass


class TooFewSamples(ValidationError):
    pass


class ZeroGradient(NumericalError):
    pass


class ZeroField(ValidationError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, iterations=None, best=None):
        super().__init__(message)
        self.iterations = iterations
        self.best = best

"""Exception hierarchy shared by all modules."""


class NetWeightError(Exception):
    """Base class for every error raised by the package."""


class GraphError(NetWeightError, ValueError):
    pass


class ParseError(GraphError):
    """Edge-list or weights file could not be read. Carries ``line`` (1-based)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedLine(ParseError):
    pass


class SelfLoop(ParseError):
    pass


class DuplicateEdge(ParseError):
    pass


class EmptyGraph(GraphError):
    pass


class TooLarge(NetWeightError):
    pass


class WeightError(NetWeightError, ValueError):
    pass


class LengthMismatch(WeightError):
    pass


class NegativeWeight(WeightError):
    pass


class NotADistribution(WeightError):
    pass


class NotAMatching(WeightError):
    pass


class ZeroVector(WeightError):
    pass


class DeltaOutOfRange(NetWeightError, ValueError):
    pass


class SolverError(NetWeightError):
    pass


class Infeasible(SolverError):
    pass


class Unbounded(SolverError):
    pass


class DimensionMismatch(SolverError, ValueError):
    pass


class InfeasibleA(SolverError):
    pass


class NotConverged(SolverError):
    pass


class BadResolution(SolverError, ValueError):
    pass


class NotSymmetric(NetWeightError, ValueError):
    pass


class EmptyHypothesisSet(NetWeightError, ValueError):
    pass


class NotConvergedWarning(UserWarning):
    """Issued when a solve returns an uncertified result instead of raising."""

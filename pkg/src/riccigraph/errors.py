"""Domain errors raised by the curvature engine.

Every error callers are expected to catch has its own class; anything else
(internal invariant breakage) surfaces as a plain AssertionError.
"""

from __future__ import annotations


class RicciGraphError(Exception):
    """Base class for all domain errors."""


# graph construction / queries

class SelfLoop(RicciGraphError):
    pass


class DuplicateEdge(RicciGraphError):
    pass


class NonpositiveWeight(RicciGraphError):
    pass


class MalformedLine(RicciGraphError):
    def __init__(self, line_no: int, text: str):
        super().__init__(f"line {line_no}: {text!r}")
        self.line_no = line_no
        self.text = text


class NotAnEdge(RicciGraphError):
    pass


class NotAnArc(RicciGraphError):
    pass


class DirectedUnsupported(RicciGraphError):
    pass


class InvalidProbability(RicciGraphError):
    pass


# measures

class IsolatedVertex(RicciGraphError):
    pass


class SinkVertex(RicciGraphError):
    pass


class DirectedGraphUseYamada(RicciGraphError):
    pass


class MeasureInvalid(RicciGraphError):
    pass


# transport

class InfeasibleTransport(RicciGraphError):
    pass


class MismatchedProblem(RicciGraphError):
    pass


class DenominatorMismatch(RicciGraphError):
    pass


class NotConverged(RicciGraphError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"no convergence after {iterations} iterations "
                         f"(marginal violation {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class UnreachableMass(RicciGraphError):
    pass


# curvature

class SameVertex(RicciGraphError):
    pass


class UnreachablePair(RicciGraphError):
    pass


class LimitNotStabilized(RicciGraphError):
    def __init__(self, k_max: int):
        super().__init__(f"limit quotient did not stabilize within {k_max} "
                         f"doubling steps")
        self.k_max = k_max


class Disconnected(RicciGraphError):
    pass


# directed

class NotACycle(RicciGraphError):
    pass


class AmbiguousBidirectedEdge(RicciGraphError):
    pass


class FeasibilityViolated(RicciGraphError):
    pass


class Infeasible(RicciGraphError):
    pass


# network algorithms

class EmptyGraph(RicciGraphError):
    pass


class LengthMismatch(RicciGraphError):
    pass

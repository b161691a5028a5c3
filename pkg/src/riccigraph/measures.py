"""Probability measures attached to vertices: lazy random walks and the
measure-level operators the curvature theorems act on.

Everything here is exact rational; no floating point touches a mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import (
    DirectedGraphUseYamada,
    IsolatedVertex,
    MeasureInvalid,
    SinkVertex,
)
from .graph import Graph

_ZERO = Fraction(0)
_ONE = Fraction(1)


def as_alpha(alpha) -> Fraction:
    """Coerce an exact laziness parameter in [0,1].  Floats are rejected:
    the limit procedure needs exact alpha arithmetic."""
    if isinstance(alpha, float):
        raise TypeError("alpha must be an exact rational (Fraction, int or "
                        "string), not float")
    a = Fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError(f"alpha must lie in [0,1], got {a}")
    return a


@dataclass(frozen=True)
class VertexMeasure:
    """Finitely supported probability measure with exact rational masses.

    masses is sorted by vertex, holds no zero entries, and sums to 1.
    """

    masses: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        total = _ZERO
        prev = -1
        for v, m in self.masses:
            if v <= prev:
                raise MeasureInvalid("support not sorted / contains repeats")
            if m <= 0:
                raise MeasureInvalid(f"nonpositive mass {m} at vertex {v}")
            prev = v
            total += m
        if total != 1:
            raise MeasureInvalid(f"masses sum to {total}, not 1")

    @staticmethod
    def of(mapping: dict[int, Fraction] | Iterable[tuple[int, Fraction]]
           ) -> "VertexMeasure":
        items = mapping.items() if isinstance(mapping, dict) else mapping
        cleaned = sorted((v, Fraction(m)) for v, m in items if m != 0)
        return VertexMeasure(tuple(cleaned))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.masses)

    def mass(self, v: int) -> Fraction:
        for u, m in self.masses:
            if u == v:
                return m
        return _ZERO

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.masses)

    def to_json(self) -> dict[str, str]:
        return {str(v): str(m) for v, m in self.masses}


def dirac(x: int) -> VertexMeasure:
    """Unit mass at x."""
    return VertexMeasure(((x, _ONE),))


def lly_measure(g: Graph, x: int, alpha) -> VertexMeasure:
    """Lazy-walk step measure on an undirected graph: mass alpha stays at x,
    the rest spreads uniformly over the neighbors."""
    a = as_alpha(alpha)
    if g.directed:
        raise DirectedGraphUseYamada(
            "lly_measure is undirected-only; use yamada_measure")
    if a == 1:
        return dirac(x)
    d = g.degree(x)
    if d == 0:
        raise IsolatedVertex(f"vertex {x} has no neighbors and alpha={a} < 1")
    share = (1 - a) / d
    items = [(v, share) for v in g.neighbors(x)]
    if a > 0:
        items.append((x, a))
    return VertexMeasure.of(items)


def yamada_measure(g: Graph, x: int, alpha) -> VertexMeasure:
    """Directed step measure: mass alpha stays at x, the rest spreads
    uniformly over the out-neighbors."""
    a = as_alpha(alpha)
    if a == 1:
        return dirac(x)
    d = g.out_degree(x)
    if d == 0:
        raise SinkVertex(f"vertex {x} has no out-neighbors and alpha={a} < 1")
    share = (1 - a) / d
    items = [(v, share) for v in g.out_neighbors(x)]
    if a > 0:
        items.append((x, a))
    return VertexMeasure.of(items)


StepProvider = Callable[[Graph, int, Fraction], VertexMeasure]


def step_measure(g: Graph, x: int, alpha) -> VertexMeasure:
    """The walk family matching the graph kind (Yamada when directed)."""
    return yamada_measure(g, x, alpha) if g.directed else lly_measure(g, x, alpha)


def pushforward(g: Graph, mu: VertexMeasure, alpha,
                step: StepProvider | None = None) -> VertexMeasure:
    """Image of mu under one walk step: the mixture sum_x mu(x) m_x.

    `step` swaps in a different step-measure family; the default follows
    the graph kind.
    """
    a = as_alpha(alpha)
    provider = step if step is not None else step_measure
    mixed: dict[int, Fraction] = {}
    for x, m in mu.masses:
        try:
            sx = provider(g, x, a)
        except (IsolatedVertex, SinkVertex) as exc:
            raise type(exc)(f"support vertex {x}: {exc}") from None
        for v, p in sx.masses:
            mixed[v] = mixed.get(v, _ZERO) + m * p
    return VertexMeasure.of(mixed)


def jump(g: Graph, x: int, alpha) -> Fraction:
    """Expected step length of the walk at x: W1 between the Dirac at x and
    the step measure."""
    from .transport import wasserstein1  # local import; transport sits above
    from .graph import GraphMetric, UNREACHABLE

    a = as_alpha(alpha)
    cost, _ = wasserstein1(dirac(x), step_measure(g, x, a), GraphMetric(g))
    if cost is UNREACHABLE:
        # cannot occur: every step target is one arc away from x
        raise AssertionError("jump transport infeasible")
    return cost

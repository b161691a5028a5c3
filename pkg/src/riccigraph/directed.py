"""Directed-graph curvature machinery: Yamada-walk curvature per arc,
effective cycle length, the directed 3-cycle transport bounds, the
phase-structured heuristic transport plan, and branching-tree
classification.

Directed W1 uses shortest-dipath ground distance, so it is asymmetric and
may be blocked outright; blocked transport yields kappa = None, a value
rather than an exception.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curvature import CurvatureRecord
from .errors import (
    AmbiguousBidirectedEdge,
    DirectedUnsupported,
    FeasibilityViolated,
    Infeasible,
    NotACycle,
    NotAnArc,
    RicciGraphError,
)
from .graph import Graph, GraphMetric, UNREACHABLE, is_finite
from .measures import as_alpha, yamada_measure
from .transport import TransportPlan, _ssp_solve, max_routable_mass

_ZERO = Fraction(0)


@dataclass(frozen=True)
class CycleOrientationProfile:
    """Arc orientation census around a traversed cycle; effective length is
    |forward - backward|, so it matches the cycle length modulo 2."""

    cycle: tuple[int, ...]
    forward_count: int
    backward_count: int
    effective_length: int

    def to_json(self) -> dict:
        return {"cycle": list(self.cycle), "forward": self.forward_count,
                "backward": self.backward_count,
                "effective_length": self.effective_length}


def effective_length(g: Graph, cycle: Sequence[int]) -> CycleOrientationProfile:
    """Count arcs agreeing with the traversal order versus opposing it
    (wraparound included).  Bidirected pairs on the cycle are ambiguous."""
    verts = tuple(cycle)
    if len(verts) < 3 or len(set(verts)) != len(verts):
        raise NotACycle(f"{verts} is not a simple cycle")
    fwd = bwd = 0
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        ab, ba = g.has_arc(a, b), g.has_arc(b, a)
        if ab and ba:
            raise AmbiguousBidirectedEdge(f"both arcs present between {a} "
                                          f"and {b}")
        if ab:
            fwd += 1
        elif ba:
            bwd += 1
        else:
            raise NotACycle(f"no arc joins {a} and {b}")
    return CycleOrientationProfile(cycle=verts, forward_count=fwd,
                                   backward_count=bwd,
                                   effective_length=abs(fwd - bwd))


# -- directed curvature --------------------------------------------------------

def directed_orc(g: Graph, x: int, y: int, alpha,
                 metric: GraphMetric | None = None,
                 want_plan: bool = False) -> CurvatureRecord:
    """Curvature of the arc x -> y under the Yamada walk and shortest-dipath
    ground distance.  directed_orc(x, y) and directed_orc(y, x) are
    independent quantities; blocked transport gives kappa None."""
    a = as_alpha(alpha)
    if not g.directed:
        raise DirectedUnsupported("directed_orc needs a digraph")
    if not g.has_arc(x, y):
        raise NotAnArc(f"arc ({x},{y}) not in digraph")
    mx = yamada_measure(g, x, a)
    my = yamada_measure(g, y, a)
    metric = metric if metric is not None else GraphMetric(g)
    dxy = metric(x, y)
    from .transport import wasserstein1
    w1, plan = wasserstein1(mx, my, metric)
    kappa = None if not is_finite(w1) else 1 - Fraction(w1) / Fraction(dxy)
    return CurvatureRecord(x=x, y=y, alpha=a, distance=dxy, w1=w1, kappa=kappa,
                           directed=True, plan=plan if want_plan else None)


def directed_sweep(g: Graph, alpha, want_plan: bool = False
                   ) -> list[CurvatureRecord]:
    """directed_orc per arc, deterministic order, errors kept per-record."""
    a = as_alpha(alpha)
    metric = GraphMetric(g)
    records = []
    for u, v, _ in g.edges():
        try:
            records.append(directed_orc(g, u, v, a, metric=metric,
                                        want_plan=want_plan))
        except RicciGraphError as exc:
            records.append(CurvatureRecord(
                x=u, y=v, alpha=a, distance=None, w1=None, kappa=None,
                directed=True, error=f"{type(exc).__name__}: {exc}"))
    return records


# -- heuristic transport plan --------------------------------------------------

@dataclass(frozen=True)
class PlanMovement:
    phase: int
    source: int
    target: int
    mass: Fraction
    unit_cost: Fraction


@dataclass(frozen=True)
class HeuristicPlan:
    plan: TransportPlan
    movements: tuple[PlanMovement, ...]

    @property
    def cost(self) -> Fraction:
        return self.plan.cost


def directed_heuristic_plan(g: Graph, x: int, y: int, alpha) -> HeuristicPlan:
    """Feasible (not necessarily optimal) directed plan in three phases:
    cancel overlap in place, push surplus at y to y's out-neighbours, fill
    demand at x from x's out-neighbours, then complete the remainder over
    shortest-dipath costs.  Early phases only commit movements that keep the
    remainder routable, so the result is feasible whenever exact transport
    is, and its cost is an upper bound on the exact W1."""
    a = as_alpha(alpha)
    if not g.directed:
        raise DirectedUnsupported("directed_heuristic_plan needs a digraph")
    if not g.has_arc(x, y):
        raise NotAnArc(f"arc ({x},{y}) not in digraph")
    mu = yamada_measure(g, x, a)
    nu = yamada_measure(g, y, a)
    metric = GraphMetric(g)
    supply = mu.as_dict()
    demand = nu.as_dict()
    movements: list[PlanMovement] = []

    def remainder_feasible() -> bool:
        sup = [(v, m) for v, m in sorted(supply.items()) if m > 0]
        dem = [(v, m) for v, m in sorted(demand.items()) if m > 0]
        ok = [[is_finite(metric(s, t)) for t, _ in dem] for s, _ in sup]
        total = sum((m for _, m in sup), _ZERO)
        return max_routable_mass([m for _, m in sup],
                                 [m for _, m in dem], ok) == total

    if not remainder_feasible():
        raise Infeasible(f"some mass of m_{x} has no finite-cost destination "
                         f"in m_{y}")

    def commit(phase: int, s: int, t: int) -> None:
        m = min(supply.get(s, _ZERO), demand.get(t, _ZERO))
        if m <= 0:
            return
        c = metric(s, t)
        if not is_finite(c):
            return
        supply[s] -= m
        demand[t] -= m
        if phase in (1, 2) and not remainder_feasible():
            supply[s] += m
            demand[t] += m
            return
        c = Fraction(c)
        if g.is_unweighted:
            # the paper's claimed unit costs, checked where they really hold
            if phase == 1:
                assert c == 1, "move y -> out-neighbour must cost 1"
            if phase == 2 and g.has_arc(s, x):
                assert c == 1, "move in-neighbour -> x must cost 1"
        movements.append(PlanMovement(phase, s, t, m, c))

    # phase 0: overlapping mass never moves (safe: dipath triangle inequality)
    for v in sorted(set(supply) & set(demand)):
        commit(0, v, v)
    # phase 1: surplus sitting at y feeds y's own out-neighbours
    for t in g.out_neighbors(y):
        if supply.get(y, _ZERO) <= 0:
            break
        commit(1, y, t)
    # phase 2: demand at x (if any) drains x's out-neighbours
    for s in g.out_neighbors(x):
        if demand.get(x, _ZERO) <= 0:
            break
        commit(2, s, x)
    # phase 3: exact completion of the remainder over dipath costs
    rem_sup = [(v, m) for v, m in sorted(supply.items()) if m > 0]
    rem_dem = [(v, m) for v, m in sorted(demand.items()) if m > 0]
    if rem_sup:
        costm = []
        for s, _ in rem_sup:
            row = []
            for t, _ in rem_dem:
                c = metric(s, t)
                row.append(Fraction(c) if is_finite(c) else None)
            costm.append(row)
        flow = _ssp_solve([m for _, m in rem_sup], [m for _, m in rem_dem],
                          costm)
        for i, (s, _) in enumerate(rem_sup):
            for j, (t, _) in enumerate(rem_dem):
                if flow[i][j] > 0:
                    movements.append(PlanMovement(3, s, t, flow[i][j],
                                                  costm[i][j]))

    merged: dict[tuple[int, int], Fraction] = {}
    cost = _ZERO
    for mv in movements:
        key = (mv.source, mv.target)
        merged[key] = merged.get(key, _ZERO) + mv.mass
        cost += mv.mass * mv.unit_cost
    plan = TransportPlan(tuple((s, t, m) for (s, t), m in sorted(merged.items())),
                         cost)
    assert plan.mu_marginal() == mu.as_dict()
    assert plan.nu_marginal() == nu.as_dict()
    return HeuristicPlan(plan=plan, movements=tuple(movements))


# -- 3-cycle transport bounds --------------------------------------------------

def directed_3cycle_w1_bound(d_x_in: int, d_y_out: int, sharp: int,
                             case: str) -> Fraction:
    """W1 upper estimate from the enumerated directed 3-cycle transport
    plans; `case` is "forward" (the arc lies on the cycle) or "reverse"
    (the opposite arc does).  Callers derive kappa >= 1 - bound at
    distance 1."""
    if case not in ("forward", "reverse"):
        raise ValueError(f"case must be 'forward' or 'reverse', got {case!r}")
    if d_x_in < 1 or d_y_out < 1:
        raise ValueError("d_x_in and d_y_out must be positive")
    dxi = Fraction(d_x_in)
    dyo = Fraction(d_y_out)
    s = Fraction(sharp)
    slack = 1 - 1 / dxi - 1 / dyo - s / min(dxi, dyo)
    if slack < 0:
        raise FeasibilityViolated(
            f"plan needs 1 - 1/{d_x_in} - 1/{d_y_out} - "
            f"{sharp}/min >= 0, got {slack}")
    if case == "forward":
        return 3 - 2 / dxi - 2 / dyo - s / dyo - 2 * s / dxi
    return 4 - 3 / dxi - 3 / dyo - s / dyo - 3 * s / dxi


# -- branching classification --------------------------------------------------

class BranchingKind(enum.Enum):
    OUT_BRANCHING = "out-branching"
    IN_BRANCHING = "in-branching"
    MIXED = "mixed"
    NOT_A_TREE = "not-a-tree"


@dataclass(frozen=True)
class BranchingClass:
    kind: BranchingKind
    root: int | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "root": self.root}


def classify_tree(g: Graph) -> BranchingClass:
    """Classify a digraph whose underlying undirected graph is a tree as
    out-branching (all arcs away from a root), in-branching (all arcs toward
    it), or mixed; anything else is not a tree.  A directed path is both, and
    reports as out-branching."""
    if g.n == 0:
        return BranchingClass(BranchingKind.NOT_A_TREE)
    und_edges = set()
    for u in range(g.n):
        for v, _ in g.out_adj[u]:
            und_edges.add((min(u, v), max(u, v)))
    from .graph import is_connected
    if len(und_edges) != g.n - 1 or not is_connected(g):
        return BranchingClass(BranchingKind.NOT_A_TREE)
    in_roots = [v for v in range(g.n) if g.in_degree(v) == 0]
    if len(in_roots) == 1 and all(g.in_degree(v) == 1 for v in range(g.n)
                                  if v != in_roots[0]):
        return BranchingClass(BranchingKind.OUT_BRANCHING, root=in_roots[0])
    out_roots = [v for v in range(g.n) if g.out_degree(v) == 0]
    if len(out_roots) == 1 and all(g.out_degree(v) == 1 for v in range(g.n)
                                   if v != out_roots[0]):
        return BranchingClass(BranchingKind.IN_BRANCHING, root=out_roots[0])
    return BranchingClass(BranchingKind.MIXED)

"""Ollivier-Ricci and Lin-Lu-Yau curvature on undirected graphs, plus the
combinatorial bounds and global theorems realized as executable checks.

Everything is exact: curvature values are rationals obtained from the exact
transport solver, and every check compares rationals with zero tolerance.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    DirectedGraphUseYamada,
    Disconnected,
    LimitNotStabilized,
    NotAnEdge,
    RicciGraphError,
    SameVertex,
    UnreachablePair,
)
from .graph import Graph, GraphMetric, UNREACHABLE, is_connected, is_finite
from .measures import as_alpha, dirac, jump, lly_measure, pushforward
from .transport import TransportPlan, wasserstein1

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class CurvatureRecord:
    """One curvature evaluation: (x, y, alpha, d(x,y), W1, kappa).

    kappa is None when transport is blocked (directed graphs) or when the
    evaluation failed inside a sweep; `error` then names the failure.  The
    optional `lly` field carries the limit curvature on lly-mode sweeps, and
    `plan` the optimal coupling when the caller asked for it.
    """

    x: int
    y: int
    alpha: Fraction
    distance: object          # int | Fraction | UNREACHABLE | None
    w1: object                # Fraction | UNREACHABLE | None
    kappa: Fraction | None
    directed: bool = False
    lly: Fraction | None = None
    error: str | None = None
    plan: TransportPlan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kappa is not None and is_finite(self.w1) and self.w1 is not None:
            assert self.kappa == 1 - Fraction(self.w1) / Fraction(self.distance)
            assert self.kappa <= 1

    def to_json(self, floats: bool = False, include_plan: bool = False) -> dict:
        def frac(v):
            return None if v is None else str(v)

        doc = {
            "u": self.x,
            "v": self.y,
            "alpha": str(self.alpha),
            "d": (None if self.distance is None
                  else "unreachable" if not is_finite(self.distance)
                  else int(self.distance) if Fraction(self.distance).denominator == 1
                  else str(self.distance)),
            "w1": (None if self.w1 is None
                   else "unreachable" if not is_finite(self.w1)
                   else str(self.w1)),
            "kappa": frac(self.kappa),
        }
        if self.directed:
            doc["directed"] = True
        if self.lly is not None:
            doc["lly"] = str(self.lly)
        if self.error is not None:
            doc["error"] = self.error
        if floats:
            if self.kappa is not None:
                doc["kappa_float"] = float(self.kappa)
            if self.w1 is not None and is_finite(self.w1):
                doc["w1_float"] = float(self.w1)
            if self.lly is not None:
                doc["lly_float"] = float(self.lly)
        if include_plan and self.plan is not None:
            doc["plan"] = self.plan.to_json()
        return doc


def orc_alpha(g: Graph, x: int, y: int, alpha, metric: GraphMetric | None = None,
              want_plan: bool = False) -> CurvatureRecord:
    """alpha-lazy Ollivier-Ricci curvature between two distinct vertices of
    an undirected graph: 1 - W1(m_x, m_y)/d(x, y)."""
    a = as_alpha(alpha)
    if g.directed:
        raise DirectedGraphUseYamada("orc_alpha is undirected-only; "
                                     "see directed_orc")
    if x == y:
        raise SameVertex(f"curvature needs two distinct vertices, got {x}")
    metric = metric if metric is not None else GraphMetric(g)
    dxy = metric(x, y)
    if not is_finite(dxy):
        raise UnreachablePair(f"no path between {x} and {y}")
    mx = lly_measure(g, x, a)
    my = lly_measure(g, y, a)
    w1, plan = wasserstein1(mx, my, metric)
    assert is_finite(w1)  # supports live in the component of x and y
    kappa = 1 - Fraction(w1) / Fraction(dxy)
    return CurvatureRecord(x=x, y=y, alpha=a, distance=dxy, w1=w1, kappa=kappa,
                           plan=plan if want_plan else None)


def lly_curvature_steps(g: Graph, x: int, y: int, k_max: int = 12,
                        metric: GraphMetric | None = None
                        ) -> tuple[Fraction, int]:
    """Limit curvature lim kappa_alpha/(1-alpha) with its stabilization step.

    Evaluates phi(alpha) at alpha = 1 - 2^-k; two equal consecutive values
    certify the limit exactly (kappa_alpha is concave piecewise linear,
    vanishes at alpha=1, and phi is nondecreasing, so agreement on two points
    pins the final linear segment)."""
    metric = metric if metric is not None else GraphMetric(g)
    prev = None
    for k in range(1, k_max + 1):
        a = Fraction((1 << k) - 1, 1 << k)
        rec = orc_alpha(g, x, y, a, metric=metric)
        phi = rec.kappa / (1 - a)
        if prev is not None and phi == prev:
            return phi, k
        prev = phi
    raise LimitNotStabilized(k_max)


def lly_curvature(g: Graph, x: int, y: int, k_max: int = 12,
                  metric: GraphMetric | None = None) -> Fraction:
    """Lin-Lu-Yau limit curvature of the pair (x, y)."""
    value, _ = lly_curvature_steps(g, x, y, k_max=k_max, metric=metric)
    return value


def _sweep_one(g: Graph, u: int, v: int, a: Fraction, mode: str,
               metric: GraphMetric, want_plan: bool) -> CurvatureRecord:
    try:
        if mode == "lly":
            value, k = lly_curvature_steps(g, u, v, metric=metric)
            alpha_star = Fraction((1 << k) - 1, 1 << k)
            rec = orc_alpha(g, u, v, alpha_star, metric=metric,
                            want_plan=want_plan)
            return CurvatureRecord(x=u, y=v, alpha=alpha_star,
                                   distance=rec.distance, w1=rec.w1,
                                   kappa=rec.kappa, lly=value, plan=rec.plan)
        return orc_alpha(g, u, v, a, metric=metric, want_plan=want_plan)
    except RicciGraphError as exc:
        return CurvatureRecord(x=u, y=v, alpha=a, distance=None, w1=None,
                               kappa=None,
                               error=f"{type(exc).__name__}: {exc}")


def curvature_sweep(g: Graph, alpha=0, mode: str = "orc", threads: int = 1,
                    want_plan: bool = False) -> list[CurvatureRecord]:
    """One record per edge, deterministic (u, v) order regardless of the
    worker count; per-edge failures land in the record's error slot."""
    if mode not in ("orc", "lly"):
        raise ValueError(f"mode must be 'orc' or 'lly', got {mode!r}")
    if g.directed:
        raise DirectedGraphUseYamada("use riccigraph.directed.directed_sweep")
    a = as_alpha(alpha)
    metric = GraphMetric(g)
    edges = [(u, v) for u, v, _ in g.edges()]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(
                lambda e: _sweep_one(g, e[0], e[1], a, mode, metric, want_plan),
                edges))
    else:
        records = [_sweep_one(g, u, v, a, mode, metric, want_plan)
                   for u, v in edges]
    return records


# -- combinatorial bounds -----------------------------------------------------

def jost_liu_lower_bound(g: Graph, x: int, y: int) -> Fraction:
    """Degree-only lower bound for kappa_0 on an edge:
    -2 (1 - 1/d_x - 1/d_y)_+ ."""
    if g.directed:
        raise DirectedGraphUseYamada("bound is undirected-only")
    if not g.has_arc(x, y):
        raise NotAnEdge(f"({x},{y}) not in graph")
    dx, dy = g.degree(x), g.degree(y)
    gap = 1 - Fraction(1, dx) - Fraction(1, dy)
    return -2 * max(gap, _ZERO)


def jost_liu_triangle_lower_bound(g: Graph, x: int, y: int) -> Fraction:
    """Triangle-refined lower bound for kappa_0 on an edge, with the positive
    part applied to both middle terms (the unclipped second term would
    contradict the K3 worked value)."""
    if g.directed:
        raise DirectedGraphUseYamada("bound is undirected-only")
    if not g.has_arc(x, y):
        raise NotAnEdge(f"({x},{y}) not in graph")
    dx, dy = g.degree(x), g.degree(y)
    shared = len(g.neighbor_set(x) & g.neighbor_set(y))
    lo, hi = min(dx, dy), max(dx, dy)
    base = 1 - Fraction(1, dx) - Fraction(1, dy)
    t_min = max(base - Fraction(shared, lo), _ZERO)
    t_max = max(base - Fraction(shared, hi), _ZERO)
    return -t_min - t_max + Fraction(shared, hi)


def lly_upper_bound(distance, alpha) -> Fraction:
    """kappa_alpha <= (1 - alpha) * 2 / d(x,y)."""
    a = as_alpha(alpha)
    dist = Fraction(distance)
    if dist <= 0:
        raise ValueError(f"distance must be positive, got {dist}")
    return (1 - a) * 2 / dist


# -- global theorem checks ----------------------------------------------------

@dataclass(frozen=True)
class DiameterReport:
    mode: str
    k_min: Fraction
    diameter: object
    bound: Fraction | None
    holds: bool | None
    vacuous: bool            # nonpositive curvature: bound carries no content

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "k_min": str(self.k_min),
            "diameter": str(self.diameter),
            "bound": None if self.bound is None else str(self.bound),
            "holds": self.holds,
            "vacuous": self.vacuous,
        }


def diameter_bound_check(g: Graph, mode: str = "lly",
                         alpha=None) -> DiameterReport:
    """Bonnet-Myers style diameter bound: diam <= 2/k (lly mode) or
    diam <= 2 sup_x J(x) / k (orc mode at the given alpha)."""
    if g.directed:
        raise DirectedGraphUseYamada("diameter bound is undirected-only")
    if not is_connected(g):
        raise Disconnected("diameter bound needs a connected graph")
    if mode not in ("lly", "orc"):
        raise ValueError(f"mode must be 'lly' or 'orc', got {mode!r}")
    metric = GraphMetric(g)
    diam = max(metric(u, v) for u in range(g.n) for v in range(g.n))
    if mode == "lly":
        k_min = min(lly_curvature(g, u, v, metric=metric)
                    for u, v, _ in g.edges())
    else:
        a = as_alpha(alpha if alpha is not None else 0)
        k_min = min(orc_alpha(g, u, v, a, metric=metric).kappa
                    for u, v, _ in g.edges())
    if k_min <= 0:
        return DiameterReport(mode=mode, k_min=k_min, diameter=diam,
                              bound=None, holds=None, vacuous=True)
    if mode == "lly":
        bound = 2 / k_min
    else:
        j_sup = max(jump(g, x, a) for x in range(g.n))
        bound = 2 * j_sup / k_min
    return DiameterReport(mode=mode, k_min=k_min, diameter=diam, bound=bound,
                          holds=diam <= bound, vacuous=False)


@dataclass(frozen=True)
class PropagationReport:
    k_edge: Fraction
    k_pair: Fraction
    holds: bool

    def to_json(self) -> dict:
        return {"k_edge": str(self.k_edge), "k_pair": str(self.k_pair),
                "holds": self.holds}


def geodesic_propagation_check(g: Graph, alpha) -> PropagationReport:
    """Edge-level curvature bounds propagate to all pairs on a connected
    graph (graphs are 1-geodesic): min over pairs >= min over edges."""
    if g.directed:
        raise DirectedGraphUseYamada("propagation check is undirected-only")
    if not is_connected(g):
        raise Disconnected("propagation check needs a connected graph")
    a = as_alpha(alpha)
    metric = GraphMetric(g)
    k_edge = min(orc_alpha(g, u, v, a, metric=metric).kappa
                 for u, v, _ in g.edges())
    k_pair = min(orc_alpha(g, u, v, a, metric=metric).kappa
                 for u in range(g.n) for v in range(u + 1, g.n))
    return PropagationReport(k_edge=k_edge, k_pair=k_pair,
                             holds=k_pair >= k_edge)


@dataclass(frozen=True)
class ContractionReport:
    k: Fraction
    w1_base: Fraction
    w1_pushed: Fraction
    bound: Fraction
    holds: bool

    def to_json(self) -> dict:
        return {"k": str(self.k), "w1_base": str(self.w1_base),
                "w1_pushed": str(self.w1_pushed), "bound": str(self.bound),
                "holds": self.holds}


def contraction_check(g: Graph, alpha, mu, nu) -> ContractionReport:
    """One walk step contracts W1 by (1 - k), k the min pair curvature:
    W1(mu*m, nu*m) <= (1 - k) W1(mu, nu), evaluated exactly."""
    a = as_alpha(alpha)
    k = geodesic_propagation_check(g, a).k_pair
    metric = GraphMetric(g)
    base, _ = wasserstein1(mu, nu, metric)
    pushed, _ = wasserstein1(pushforward(g, mu, a), pushforward(g, nu, a),
                             metric)
    assert is_finite(base) and is_finite(pushed)
    bound = (1 - k) * base
    return ContractionReport(k=k, w1_base=base, w1_pushed=pushed, bound=bound,
                             holds=pushed <= bound)


@dataclass(frozen=True)
class ConcavityReport:
    alphas: tuple[Fraction, ...]
    kappas: tuple[Fraction, ...]
    chord_holds: bool
    phi_nondecreasing: bool
    violations: tuple[str, ...]

    @property
    def holds(self) -> bool:
        return self.chord_holds and self.phi_nondecreasing

    def to_json(self) -> dict:
        return {
            "alphas": [str(a) for a in self.alphas],
            "kappas": [str(k) for k in self.kappas],
            "chord_holds": self.chord_holds,
            "phi_nondecreasing": self.phi_nondecreasing,
            "holds": self.holds,
            "violations": list(self.violations),
        }


def concavity_check(g: Graph, x: int, y: int,
                    grid: Sequence) -> ConcavityReport:
    """Chord test for concavity of kappa_alpha over the grid, plus
    monotonicity of phi(alpha) = kappa_alpha/(1-alpha) on grid points < 1."""
    alphas = tuple(as_alpha(a) for a in grid)
    if any(alphas[i] >= alphas[i + 1] for i in range(len(alphas) - 1)):
        raise ValueError("grid must be strictly increasing within [0,1]")
    metric = GraphMetric(g)
    kappas = tuple(orc_alpha(g, x, y, a, metric=metric).kappa for a in alphas)
    violations: list[str] = []
    n = len(alphas)
    chord_ok = True
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                al, be, ga = alphas[i], alphas[j], alphas[k]
                lam = (ga - be) / (ga - al)
                chord = lam * kappas[i] + (1 - lam) * kappas[k]
                if kappas[j] < chord:
                    chord_ok = False
                    violations.append(
                        f"chord fails at ({al},{be},{ga}): "
                        f"{kappas[j]} < {chord}")
    phi_ok = True
    phis = [kappas[i] / (1 - alphas[i]) for i in range(n) if alphas[i] < 1]
    for i in range(len(phis) - 1):
        if phis[i + 1] < phis[i]:
            phi_ok = False
            violations.append(f"phi decreases: {phis[i]} -> {phis[i + 1]}")
    return ConcavityReport(alphas=alphas, kappas=kappas, chord_holds=chord_ok,
                           phi_nondecreasing=phi_ok,
                           violations=tuple(violations))

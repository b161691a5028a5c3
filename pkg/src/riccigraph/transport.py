"""Exact 1-Wasserstein distance between finitely supported measures.

The primal is solved as a transportation problem on the support x support
bipartite graph by successive shortest augmenting paths in rational
arithmetic; a max-flow feasibility pre-check over finite-cost pairs makes
"Unreachable" a routine return value rather than an exception.  Dual
potentials come from a difference-constraint solve against the optimal plan,
so primal cost = dual value holds exactly on every finite instance.

Two verification routes live alongside the solver: unit_split_oracle (an
independent exact assignment solve over unit atoms) and sinkhorn_approx
(float-only entropic approximation, never used inside curvature results).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush
from typing import Callable

import numpy as np

from .errors import (
    DenominatorMismatch,
    InfeasibleTransport,
    MeasureInvalid,
    MismatchedProblem,
    NotConverged,
)
from .graph import UNREACHABLE, is_finite
from .measures import VertexMeasure

_ZERO = Fraction(0)

GroundDistance = Callable[[int, int], "int | Fraction | object"]


@dataclass(frozen=True)
class TransportPlan:
    """Sparse coupling: (source, target, mass) entries plus total cost.

    Row sums reproduce the source measure exactly and column sums the target
    measure; entries are kept in lexicographic (source, target) order.
    """

    entries: tuple[tuple[int, int, Fraction], ...]
    cost: Fraction

    @staticmethod
    def from_entries(entries, d: GroundDistance) -> "TransportPlan":
        """Build a plan from raw entries, recosting each movement with d."""
        cleaned = sorted((s, t, Fraction(m)) for s, t, m in entries if m != 0)
        cost = _ZERO
        for s, t, m in cleaned:
            if m < 0:
                raise MeasureInvalid(f"negative mass {m} on ({s},{t})")
            dist = d(s, t)
            if not is_finite(dist):
                raise InfeasibleTransport(f"pair ({s},{t}) is unreachable")
            cost += m * dist
        return TransportPlan(tuple(cleaned), cost)

    def mu_marginal(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for s, _, m in self.entries:
            out[s] = out.get(s, _ZERO) + m
        return out

    def nu_marginal(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for _, t, m in self.entries:
            out[t] = out.get(t, _ZERO) + m
        return out

    def to_json(self) -> dict:
        return {
            "cost": str(self.cost),
            "entries": [{"s": s, "t": t, "mass": str(m)}
                        for s, t, m in self.entries],
        }


@dataclass(frozen=True)
class DualCertificate:
    """Kantorovich potential f: value = sum f * (mu - nu) equals the primal
    cost at optimality; f(s) - f(t) <= d(s,t) on every relevant pair."""

    potentials: dict[int, Fraction]
    value: Fraction
    mu: VertexMeasure
    nu: VertexMeasure

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "potentials": {str(v): str(p)
                           for v, p in sorted(self.potentials.items())},
        }


def _check_measure(m) -> VertexMeasure:
    if not isinstance(m, VertexMeasure):
        raise MeasureInvalid(f"expected VertexMeasure, got {type(m).__name__}")
    return m


def _cost_matrix(mu: VertexMeasure, nu: VertexMeasure, d: GroundDistance):
    """Fraction costs for finite pairs, None for unreachable ones."""
    rows = []
    for s, _ in mu.masses:
        row = []
        for t, _ in nu.masses:
            dist = d(s, t)
            if is_finite(dist):
                dist = Fraction(dist)
                if dist < 0:
                    raise MeasureInvalid(
                        f"ground distance d({s},{t}) = {dist} is negative")
                row.append(dist)
            else:
                row.append(None)
        rows.append(row)
    return rows


def max_routable_mass(supplies: list[Fraction], demands: list[Fraction],
                      edge_ok: list[list[bool]]) -> Fraction:
    """Max-flow on the bipartite feasibility graph (Edmonds-Karp, exact).

    Returns how much total mass can be routed from supplies to demands using
    only the allowed pairs; equality with sum(supplies) means feasible.
    """
    ns, nt = len(supplies), len(demands)
    n_nodes = ns + nt + 2
    src, snk = n_nodes - 2, n_nodes - 1
    cap = [[_ZERO] * n_nodes for _ in range(n_nodes)]
    big = sum(supplies, _ZERO) + 1
    for i in range(ns):
        cap[src][i] = Fraction(supplies[i])
    for j in range(nt):
        cap[ns + j][snk] = Fraction(demands[j])
    for i in range(ns):
        row = edge_ok[i]
        for j in range(nt):
            if row[j]:
                cap[i][ns + j] = big
    flow = _ZERO
    while True:
        parent = [-1] * n_nodes
        parent[src] = src
        q = deque([src])
        while q and parent[snk] == -1:
            u = q.popleft()
            cu = cap[u]
            for v in range(n_nodes):
                if parent[v] == -1 and cu[v] > 0:
                    parent[v] = u
                    q.append(v)
        if parent[snk] == -1:
            return flow
        bottleneck = None
        v = snk
        while v != src:
            u = parent[v]
            c = cap[u][v]
            bottleneck = c if bottleneck is None else min(bottleneck, c)
            v = u
        v = snk
        while v != src:
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
            v = u
        flow += bottleneck


def _ssp_solve(supplies: list[Fraction], demands: list[Fraction],
               costm: list[list[Fraction | None]]) -> list[list[Fraction]]:
    """Min-cost transportation by successive shortest augmenting paths with
    Johnson potentials.  Assumes the instance is feasible and costs >= 0."""
    ns, nt = len(supplies), len(demands)
    supply = [Fraction(s) for s in supplies]
    demand = [Fraction(t) for t in demands]
    flow = [[_ZERO] * nt for _ in range(ns)]
    pot = [_ZERO] * (ns + nt)
    fwd = [[j for j in range(nt) if costm[i][j] is not None] for i in range(ns)]
    rev = [[i for i in range(ns) if costm[i][j] is not None] for j in range(nt)]
    remaining = sum(supply, _ZERO)
    while remaining > 0:
        dist: list[Fraction | None] = [None] * (ns + nt)
        parent = [-1] * (ns + nt)
        heap: list[tuple[Fraction, int]] = []
        for i in range(ns):
            if supply[i] > 0:
                dist[i] = _ZERO
                heappush(heap, (_ZERO, i))
        while heap:
            d_u, node = heappop(heap)
            if dist[node] is None or d_u > dist[node]:
                continue
            if node < ns:
                i = node
                for j in fwd[i]:
                    t = ns + j
                    nd = d_u + costm[i][j] + pot[i] - pot[t]
                    if dist[t] is None or nd < dist[t]:
                        dist[t] = nd
                        parent[t] = i
                        heappush(heap, (nd, t))
            else:
                j = node - ns
                for i in rev[j]:
                    if flow[i][j] > 0:
                        nd = d_u - costm[i][j] + pot[node] - pot[i]
                        if dist[i] is None or nd < dist[i]:
                            dist[i] = nd
                            parent[i] = node
                            heappush(heap, (nd, i))
        best = None
        for j in range(nt):
            if demand[j] > 0 and dist[ns + j] is not None:
                cand = (dist[ns + j], j)
                if best is None or cand < best:
                    best = cand
        if best is None:
            raise AssertionError("augmenting path missing on feasible instance")
        d_best, bj = best
        for node in range(ns + nt):
            pot[node] += d_best if dist[node] is None else min(dist[node], d_best)
        path = []
        node = ns + bj
        while parent[node] != -1:
            path.append((parent[node], node))
            node = parent[node]
        start = node
        bottleneck = min(supply[start], demand[bj])
        for a, b in path:
            if a >= ns:  # backward arc undoes flow on (b, a-ns)
                bottleneck = min(bottleneck, flow[b][a - ns])
        supply[start] -= bottleneck
        demand[bj] -= bottleneck
        for a, b in path:
            if a < ns:
                flow[a][b - ns] += bottleneck
            else:
                flow[b][a - ns] -= bottleneck
        remaining -= bottleneck
    return flow


def wasserstein1(mu: VertexMeasure, nu: VertexMeasure, d: GroundDistance):
    """Exact W1 under ground distance d (possibly asymmetric).

    Returns (cost, plan) with rational cost, or (UNREACHABLE, None) when
    every coupling must place mass on an unreachable pair.
    """
    mu = _check_measure(mu)
    nu = _check_measure(nu)
    sources = mu.masses
    targets = nu.masses
    costm = _cost_matrix(mu, nu, d)
    supplies = [m for _, m in sources]
    demands = [m for _, m in targets]
    edge_ok = [[c is not None for c in row] for row in costm]
    if max_routable_mass(supplies, demands, edge_ok) < 1:
        return UNREACHABLE, None
    flow = _ssp_solve(supplies, demands, costm)
    entries = []
    cost = _ZERO
    for i, (s, _) in enumerate(sources):
        for j, (t, _) in enumerate(targets):
            m = flow[i][j]
            if m > 0:
                entries.append((s, t, m))
                cost += m * costm[i][j]
    return cost, TransportPlan(tuple(sorted(entries)), cost)


def wasserstein1_dual(mu: VertexMeasure, nu: VertexMeasure,
                      d: GroundDistance) -> DualCertificate:
    """Optimal Kantorovich potential, extracted from the optimal plan via a
    difference-constraint solve (Bellman-Ford); normalized to min 0."""
    cost, plan = wasserstein1(mu, nu, d)
    if cost is UNREACHABLE:
        raise InfeasibleTransport("no finite-cost coupling exists")
    nodes = sorted(set(mu.support) | set(nu.support))
    # f(s) - f(t) <= d(s,t) becomes the edge t -> s with weight d(s,t);
    # positive plan mass forces equality via the reverse edge at -d(s,t).
    edges: list[tuple[int, int, Fraction]] = []
    for s, _ in mu.masses:
        for t, _ in nu.masses:
            dist = d(s, t)
            if is_finite(dist):
                edges.append((t, s, Fraction(dist)))
    for s, t, _ in plan.entries:
        edges.append((s, t, -Fraction(d(s, t))))
    f = {v: _ZERO for v in nodes}
    for _ in range(len(nodes)):
        changed = False
        for u, v, w in edges:
            cand = f[u] + w
            if cand < f[v]:
                f[v] = cand
                changed = True
        if not changed:
            break
    for u, v, w in edges:
        assert f[u] + w >= f[v], "negative cycle: plan is not optimal"
    low = min(f.values())
    f = {v: p - low for v, p in f.items()}
    value = _ZERO
    for v in nodes:
        value += f[v] * (mu.mass(v) - nu.mass(v))
    assert value == cost, "strong duality violated"
    return DualCertificate(potentials=f, value=value, mu=mu, nu=nu)


def duality_gap(plan: TransportPlan, cert: DualCertificate) -> Fraction:
    """plan.cost - cert.value for a matching problem; 0 at joint optimality."""
    if plan.mu_marginal() != cert.mu.as_dict() or \
            plan.nu_marginal() != cert.nu.as_dict():
        raise MismatchedProblem("plan marginals do not match the certificate's "
                                "measures")
    return plan.cost - cert.value


# -- independent verification oracle -----------------------------------------

def _hungarian(cost: list[list[Fraction]]) -> list[int]:
    """Exact square assignment (shortest-augmenting-path Hungarian).
    Returns col_of[row]."""
    n = len(cost)
    big = sum(sum(row) for row in cost) + 1
    u = [_ZERO] * (n + 1)
    v = [_ZERO] * (n + 1)
    p = [0] * (n + 1)      # p[j] = row matched to column j (1-based)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [big] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = big
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            col_of[p[j] - 1] = j - 1
    return col_of


def unit_split_oracle(mu: VertexMeasure, nu: VertexMeasure, d: GroundDistance,
                      denom: int):
    """Brute-force W1: split both measures into denom atoms of mass 1/denom
    and solve the assignment problem exactly.  Equals wasserstein1 on every
    instance whose masses are multiples of 1/denom."""
    mu = _check_measure(mu)
    nu = _check_measure(nu)
    if denom < 1:
        raise DenominatorMismatch(f"denom must be >= 1, got {denom}")

    def atoms(measure: VertexMeasure) -> list[int]:
        out: list[int] = []
        for vtx, m in measure.masses:
            count = m * denom
            if count.denominator != 1:
                raise DenominatorMismatch(
                    f"mass {m} at vertex {vtx} is not a multiple of 1/{denom}")
            out.extend([vtx] * count.numerator)
        return out

    src = atoms(mu)
    dst = atoms(nu)
    finite: list[Fraction] = []
    raw: list[list[Fraction | None]] = []
    for s in src:
        row = []
        for t in dst:
            dist = d(s, t)
            if is_finite(dist):
                dist = Fraction(dist)
                finite.append(dist)
                row.append(dist)
            else:
                row.append(None)
        raw.append(row)
    big = (max(finite, default=_ZERO) * denom) + 1
    cost = [[big if c is None else c for c in row] for row in raw]
    col_of = _hungarian(cost)
    total = _ZERO
    for i, j in enumerate(col_of):
        if raw[i][j] is None:
            return UNREACHABLE
        total += raw[i][j]
    return total / denom


# -- float-only entropic approximation ----------------------------------------

@dataclass(frozen=True)
class SinkhornResult:
    cost: float
    iterations: int
    marginal_violation: float


def sinkhorn_approx(mu: VertexMeasure, nu: VertexMeasure, d: GroundDistance,
                    reg: float = 1e-2, max_iters: int = 10_000,
                    tol: float = 1e-9) -> SinkhornResult:
    """Entropically regularized transport cost (log-domain Sinkhorn).

    Approaches the exact W1 as reg -> 0.  Advisory only: float throughout,
    never used inside curvature results.  Unreachable pairs are excluded by
    a large-cost feasibility mask.
    """
    mu = _check_measure(mu)
    nu = _check_measure(nu)
    if reg <= 0:
        raise ValueError("reg must be positive")
    costm = _cost_matrix(mu, nu, d)
    finite = [c for row in costm for c in row if c is not None]
    big = 10.0 * (1.0 + float(max(finite, default=_ZERO)))
    c_arr = np.array([[big if c is None else float(c) for c in row]
                      for row in costm])
    a = np.array([float(m) for _, m in mu.masses])
    b = np.array([float(m) for _, m in nu.masses])
    log_a = np.log(a)
    log_b = np.log(b)
    f = np.zeros(len(a))
    g = np.zeros(len(b))

    def _lse(m: np.ndarray, axis: int) -> np.ndarray:
        mx = np.max(m, axis=axis, keepdims=True)
        return (mx + np.log(np.sum(np.exp(m - mx), axis=axis,
                                   keepdims=True))).squeeze(axis)

    violation = float("inf")
    for it in range(1, max_iters + 1):
        f = f + reg * (log_a - _lse((f[:, None] + g[None, :] - c_arr) / reg, 1))
        g = g + reg * (log_b - _lse((f[:, None] + g[None, :] - c_arr) / reg, 0))
        plan = np.exp((f[:, None] + g[None, :] - c_arr) / reg)
        violation = max(float(np.abs(plan.sum(axis=1) - a).max()),
                        float(np.abs(plan.sum(axis=0) - b).max()))
        if violation <= tol:
            return SinkhornResult(cost=float((plan * c_arr).sum()),
                                  iterations=it,
                                  marginal_violation=violation)
    raise NotConverged(max_iters, violation)

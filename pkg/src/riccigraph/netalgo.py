"""Curvature-informed network algorithms: Ricci-flow clustering, negative
edge removal clustering, curvature-guided rewiring, and the evaluation
metrics (modularity, adjusted Rand index).

The flow and the removal loop are exact-state machines over rationals;
modularity and ARI are the only float boundaries.
"""

from __future__ import annotations

import random
import statistics
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .curvature import curvature_sweep, orc_alpha
from .errors import (
    Disconnected,
    DirectedUnsupported,
    EmptyGraph,
    LengthMismatch,
    NonpositiveWeight,
)
from .graph import Graph, GraphMetric, is_connected
from .measures import as_alpha

_ZERO = Fraction(0)

Edge = "tuple[int, int]"


@dataclass(frozen=True)
class FlowParams:
    """Ricci-flow hyperparameters: step size nu in (0,1) (exact rational),
    acceptance tolerance eps, relative-drop threshold eps_d, iteration count
    T, and walk laziness alpha."""

    nu: Fraction
    eps: float = 0.0
    eps_d: float = 0.0
    T: int = 10
    alpha: Fraction = _ZERO

    def __post_init__(self):
        if isinstance(self.nu, float):
            raise TypeError("nu must be an exact rational, not float")
        object.__setattr__(self, "nu", Fraction(self.nu))
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        if not 0 < self.nu < 1:
            raise ValueError(f"nu must lie in (0,1), got {self.nu}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.eps < 0 or self.eps_d < 0:
            raise ValueError("eps and eps_d must be >= 0")


@dataclass(frozen=True)
class CommunityAssignment:
    """Vertex labels (dense ids from 0) plus quality scores."""

    labels: tuple[int, ...]
    modularity: float
    num_communities: int
    ari: float | None = None

    def to_json(self) -> dict:
        doc = {
            "labels": {str(v): lab for v, lab in enumerate(self.labels)},
            "modularity": self.modularity,
            "num_communities": self.num_communities,
        }
        if self.ari is not None:
            doc["ari"] = self.ari
        return doc


@dataclass(frozen=True)
class RewireParams:
    heuristic: bool = False
    h: int = 0
    l: int = 0
    alpha: Fraction = _ZERO
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        if self.h < 0 or self.l < 0:
            raise ValueError("h and l must be >= 0")


@dataclass(frozen=True)
class RewireResult:
    graph: Graph
    added: tuple[tuple[int, int], ...]
    removed: tuple[tuple[int, int], ...]
    disconnected: bool       # removals are allowed to disconnect; recorded


# -- helpers -------------------------------------------------------------------

def _component_labels(n: int, edges) -> tuple[int, ...]:
    """Dense component labels, components ordered by smallest vertex."""
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ra, rb = find(u), find(v)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots: dict[int, int] = {}
    labels = []
    for v in range(n):
        r = find(v)
        if r not in roots:
            roots[r] = len(roots)
        labels.append(roots[r])
    return tuple(labels)


def modularity(g: Graph, labels) -> float:
    """Newman-Girvan Q = sum_c (e_c/m - (deg_c / 2m)^2), exact rationals up
    to the final float."""
    if g.directed:
        raise DirectedUnsupported("modularity is undirected-only")
    if len(labels) != g.n:
        raise LengthMismatch(f"{len(labels)} labels for {g.n} vertices")
    m = g.num_edges
    if m == 0:
        raise EmptyGraph("modularity needs at least one edge")
    intra: Counter = Counter()
    deg: Counter = Counter()
    for u, v, _ in g.edges():
        if labels[u] == labels[v]:
            intra[labels[u]] += 1
    for v in range(g.n):
        deg[labels[v]] += g.degree(v)
    q = _ZERO
    for c in set(labels):
        q += Fraction(intra[c], m) - Fraction(deg[c], 2 * m) ** 2
    return float(q)


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected partition agreement via the contingency formula;
    1 exactly when the labelings agree up to relabeling."""
    if len(a) != len(b):
        raise LengthMismatch(f"label lengths differ: {len(a)} vs {len(b)}")
    n = len(a)
    if n == 0:
        return 1.0
    joint: Counter = Counter(zip(a, b))
    rows: Counter = Counter(a)
    cols: Counter = Counter(b)
    sum_ij = sum(comb(c, 2) for c in joint.values())
    sum_a = sum(comb(c, 2) for c in rows.values())
    sum_b = sum(comb(c, 2) for c in cols.values())
    total = comb(n, 2)
    if total == 0:
        return 1.0
    expected = Fraction(sum_a * sum_b, total)
    max_index = Fraction(sum_a + sum_b, 2)
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


# -- Ricci flow clustering -----------------------------------------------------

def ricci_flow_weights(g: Graph, p: FlowParams) -> list[dict]:
    """Evolve edge weights under w <- (1 - nu*kappa) d_G(u,v), renormalizing
    so the weights sum to |E| after every step.  Returns the trajectory
    (initial weights plus one map per iteration), all exact rationals.

    Curvature is recomputed each iteration: measures stay degree-uniform
    while the ground distance uses the evolved weights.
    """
    if g.directed:
        raise DirectedUnsupported("ricci flow is undirected-only")
    if not is_connected(g):
        raise Disconnected("ricci flow needs a connected graph")
    m = g.num_edges
    if m == 0:
        raise EmptyGraph("ricci flow needs at least one edge")
    cur = g
    weights = {(u, v): w for u, v, w in g.edges()}
    trajectory = [dict(weights)]
    for it in range(p.T):
        metric = GraphMetric(cur)
        evolved: dict[tuple[int, int], Fraction] = {}
        for u, v, _ in cur.edges():
            rec = orc_alpha(cur, u, v, p.alpha, metric=metric)
            w_new = (1 - p.nu * rec.kappa) * Fraction(rec.distance)
            if w_new <= 0:
                raise NonpositiveWeight(
                    f"iteration {it}: edge ({u},{v}) evolved to {w_new}")
            evolved[(u, v)] = w_new
        scale = Fraction(m) / sum(evolved.values())
        weights = {e: w * scale for e, w in evolved.items()}
        assert sum(weights.values()) == m
        trajectory.append(dict(weights))
        cur = g.with_weights(weights)
    return trajectory


def threshold_sweep_cluster(g: Graph, final_weights: dict,
                            p: FlowParams) -> CommunityAssignment:
    """Sweep cut-offs over the distinct final weights: drop edges heavier
    than the cut-off, label components, keep the assignment whenever the
    relative modularity improvement beats eps_d (skipped while Q <= 0).
    Falls back to the untrimmed component labeling."""
    if g.n == 0:
        return CommunityAssignment(labels=(), modularity=0.0,
                                   num_communities=0)
    all_edges = [(u, v) for u, v, _ in g.edges()]
    best = _component_labels(g.n, all_edges)
    best_q = modularity(g, best) if all_edges else 0.0
    q_prev = p.eps
    for cut in sorted(set(final_weights.values())):
        kept = [e for e in all_edges if final_weights[e] <= cut]
        labels = _component_labels(g.n, kept)
        q = modularity(g, labels)
        if q > 0 and (q - q_prev) / q > p.eps_d:
            best, best_q = labels, q
        q_prev = q
    return CommunityAssignment(labels=best, modularity=best_q,
                               num_communities=len(set(best)))


# -- negative edge removal clustering ------------------------------------------

def _kappa_of_edges(gcur: Graph, edges, alpha) -> dict:
    metric = GraphMetric(gcur)
    return {(u, v): orc_alpha(gcur, u, v, alpha, metric=metric).kappa
            for u, v in edges}


def negative_edge_removal_cluster(g: Graph, alpha=0, min_size: int = 1,
                                  target_communities: int = 0
                                  ) -> CommunityAssignment:
    """Iteratively remove the most negatively curved edge (ties broken
    lexicographically), recomputing curvature only around the removal, until
    no negative edge remains or enough components of size >= min_size exist.
    Undersized components merge into the neighbour component they share the
    most original edges with.  target_communities = 0 removes all negative
    edges."""
    if g.directed:
        raise DirectedUnsupported("removal clustering is undirected-only")
    if g.n == 0:
        return CommunityAssignment(labels=(), modularity=0.0,
                                   num_communities=0)
    a = as_alpha(alpha)
    edges = set((u, v) for u, v, _ in g.edges())
    if not edges:
        return CommunityAssignment(labels=tuple(range(g.n)), modularity=0.0,
                                   num_communities=g.n)
    gcur = g
    kappa = _kappa_of_edges(gcur, sorted(edges), a)

    def big_components() -> int:
        labels = _component_labels(g.n, edges)
        sizes = Counter(labels)
        return sum(1 for s in sizes.values() if s >= min_size)

    while True:
        negatives = sorted((k, u, v) for (u, v), k in kappa.items() if k < 0)
        if not negatives:
            break
        if target_communities > 0 and big_components() >= target_communities:
            break
        _, u, v = negatives[0]
        # pre-removal closed neighbourhoods bound where curvature can change
        scope = gcur.neighbor_set(u) | gcur.neighbor_set(v) | {u, v}
        edges.discard((u, v))
        kappa.pop((u, v))
        gcur = Graph.from_edges(g.n, sorted(edges), directed=False,
                                vertex_names=g.vertex_names)
        touched = [(s, t) for (s, t) in sorted(edges)
                   if s in scope or t in scope]
        kappa.update(_kappa_of_edges(gcur, touched, a))

    labels = list(_component_labels(g.n, edges))
    labels = _merge_small_components(g, labels, min_size)
    num = len(set(labels))
    q = modularity(g, labels) if g.num_edges > 0 else 0.0
    return CommunityAssignment(labels=tuple(labels), modularity=q,
                               num_communities=num)


def _merge_small_components(g: Graph, labels: list[int],
                            min_size: int) -> list[int]:
    """Fold components smaller than min_size into the neighbour component
    with the most connecting edges in the original graph."""
    while True:
        sizes = Counter(labels)
        small = sorted(c for c, s in sizes.items() if s < min_size)
        if not small or len(sizes) == 1:
            break
        merged_any = False
        for c in small:
            links: Counter = Counter()
            for u, v, _ in g.edges():
                if labels[u] == c and labels[v] != c:
                    links[labels[v]] += 1
                elif labels[v] == c and labels[u] != c:
                    links[labels[u]] += 1
            if not links:
                continue
            target = max(sorted(links), key=lambda d: (links[d], -d))
            for v in range(g.n):
                if labels[v] == c:
                    labels[v] = target
            merged_any = True
            break
        if not merged_any:
            break
    # densify ids, ordered by first appearance
    remap: dict[int, int] = {}
    out = []
    for lab in labels:
        if lab not in remap:
            remap[lab] = len(remap)
        out.append(remap[lab])
    return out


# -- curvature rewiring ----------------------------------------------------------

def curvature_rewire(g: Graph, p: RewireParams) -> RewireResult:
    """Curvature-guided rewiring: bolster the most negatively curved edges
    with a shortcut from a non-shared neighbour, prune the most positively
    curved.  Heuristic mode derives the thresholds as mean +/- one standard
    deviation of the edge-curvature distribution; otherwise exactly h
    additions and l removals happen.  Always returns a fresh graph."""
    if g.directed:
        raise DirectedUnsupported("rewiring is undirected-only")
    records = curvature_sweep(g, p.alpha)
    assert all(r.error is None for r in records)
    rng = random.Random(p.seed)
    present = set((u, v) for u, v, _ in g.edges())
    added: list[tuple[int, int]] = []
    removed: list[tuple[int, int]] = []

    def try_add(u: int, v: int) -> bool:
        pend = set(added)
        cands = sorted(w for w in g.neighbor_set(u) - g.neighbor_set(v) - {v}
                       if (min(w, v), max(w, v)) not in present
                       and (min(w, v), max(w, v)) not in pend)
        if not cands:
            return False
        w = rng.choice(cands)
        added.append((min(w, v), max(w, v)))
        return True

    if p.heuristic:
        vals = [float(r.kappa) for r in records]
        mean = statistics.fmean(vals)
        std = statistics.pstdev(vals)
        delta_l, delta_u = mean - std, mean + std
        for r in records:
            if float(r.kappa) < delta_l:
                try_add(r.x, r.y)
        removed = [(r.x, r.y) for r in records if float(r.kappa) > delta_u]
    else:
        for r in sorted(records, key=lambda r: (r.kappa, r.x, r.y)):
            if len(added) >= p.h:
                break
            try_add(r.x, r.y)
        by_high = sorted(records, key=lambda r: (-r.kappa, r.x, r.y))
        removed = [(r.x, r.y) for r in by_high[:p.l]]
    new_edges = sorted((present | set(added)) - set(removed))
    g2 = Graph.from_edges(g.n, new_edges, directed=False,
                          vertex_names=g.vertex_names)
    return RewireResult(graph=g2, added=tuple(added), removed=tuple(removed),
                        disconnected=not is_connected(g2))

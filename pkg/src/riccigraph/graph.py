"""Immutable simple graphs and digraphs with exact rational edge weights.

Vertices are dense integers 0..n-1; external labels, when present, ride in a
side table.  Shortest-path distances are exact: BFS hop counts on unweighted
graphs, rational Dijkstra on weighted ones.  Unreachable pairs are a value
(the UNREACHABLE sentinel), never an exception.
"""

from __future__ import annotations

import hashlib
import json
import struct
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import (
    DirectedUnsupported,
    DuplicateEdge,
    InvalidProbability,
    MalformedLine,
    NonpositiveWeight,
    NotAnEdge,
    SelfLoop,
)

ONE = Fraction(1)


class _UnreachableType:
    """Sentinel distance for vertex pairs joined by no (di)path."""

    __slots__ = ()
    _instance = None

    def __new__(cls) -> "_UnreachableType":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unreachable"


UNREACHABLE = _UnreachableType()

# A distance is an exact hop count, an exact rational length, or UNREACHABLE.
Distance = "int | Fraction | _UnreachableType"


def is_finite(d) -> bool:
    return d is not UNREACHABLE


class Degrees(NamedTuple):
    total: int
    in_: int
    out: int


@dataclass(frozen=True)
class Graph:
    """Simple (di)graph: no self-loops, no parallel edges, weights > 0.

    ``out_adj[v]`` lists (neighbor, weight) sorted by neighbor id; ``in_adj``
    is its exact transpose (the identical view when undirected).  Instances
    are immutable after construction and safe to share across workers.
    """

    n: int
    directed: bool
    out_adj: tuple[tuple[tuple[int, Fraction], ...], ...]
    in_adj: tuple[tuple[tuple[int, Fraction], ...], ...]
    vertex_names: tuple[str, ...] | None = None
    _out_sets: tuple[frozenset[int], ...] = field(
        default=(), compare=False, repr=False)

    @staticmethod
    def from_edges(n: int,
                   edges: Iterable[tuple],
                   directed: bool = False,
                   vertex_names: Sequence[str] | None = None) -> "Graph":
        """Build a graph from (u, v) or (u, v, w) tuples, validating the
        simple-graph invariants."""
        out: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
        inn: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = ONE
            else:
                u, v, w = e
                w = Fraction(w)
            if not (0 <= u < n and 0 <= v < n):
                raise NotAnEdge(f"vertex out of range in edge ({u},{v})")
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            if w <= 0:
                raise NonpositiveWeight(f"edge ({u},{v}) has weight {w}")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdge(f"edge ({u},{v}) given twice")
            seen.add(key)
            out[u].append((v, w))
            inn[v].append((u, w))
            if not directed:
                out[v].append((u, w))
                inn[u].append((v, w))
        for v in range(n):
            out[v].sort()
            inn[v].sort()
        names = tuple(vertex_names) if vertex_names is not None else None
        if names is not None and len(names) != n:
            raise ValueError("vertex_names length != n")
        g = Graph(n=n, directed=directed,
                  out_adj=tuple(tuple(a) for a in out),
                  in_adj=tuple(tuple(a) for a in inn),
                  vertex_names=names)
        object.__setattr__(g, "_out_sets",
                           tuple(frozenset(v for v, _ in a) for a in g.out_adj))
        return g

    # -- adjacency queries ------------------------------------------------

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self.out_adj[v])

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self.in_adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Out-neighbors; for undirected graphs these are the neighbors."""
        return self.out_neighbors(v)

    def neighbor_set(self, v: int) -> frozenset[int]:
        if self._out_sets:
            return self._out_sets[v]
        return frozenset(u for u, _ in self.out_adj[v])

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def has_arc(self, u: int, v: int) -> bool:
        return v in self.neighbor_set(u)

    def weight(self, u: int, v: int) -> Fraction:
        for t, w in self.out_adj[u]:
            if t == v:
                return w
        raise NotAnEdge(f"({u},{v}) not in graph")

    def edges(self) -> list[tuple[int, int, Fraction]]:
        """Deterministic edge list: arcs for digraphs, u < v once otherwise."""
        out = []
        for u in range(self.n):
            for v, w in self.out_adj[u]:
                if self.directed or u < v:
                    out.append((u, v, w))
        return out

    @property
    def num_edges(self) -> int:
        m = sum(len(a) for a in self.out_adj)
        return m if self.directed else m // 2

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1 for a in self.out_adj for _, w in a)

    def name_of(self, v: int) -> str:
        return self.vertex_names[v] if self.vertex_names else str(v)

    def with_weights(self, weights: dict[tuple[int, int], Fraction]) -> "Graph":
        """Same adjacency, new weights.  Keys are arcs for digraphs and
        (min,max) pairs for undirected graphs."""
        def w_of(u: int, v: int) -> Fraction:
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            return Fraction(weights[key])
        edges = []
        for u in range(self.n):
            for v, _ in self.out_adj[u]:
                if self.directed or u < v:
                    edges.append((u, v, w_of(u, v)))
        return Graph.from_edges(self.n, edges, directed=self.directed,
                                vertex_names=self.vertex_names)


# -- parsing and serialization ---------------------------------------------

_VERTEX_HEADER = "# vertices:"


def parse_edge_list(text: str | bytes, directed: bool = False) -> Graph:
    """Parse `u<TAB>v[<TAB>w]` lines into a Graph.

    '#' comment lines are skipped; vertex ids are assigned by first
    appearance.  A leading `# vertices:` header (as written by
    serialize_edge_list) pins the id order explicitly, which also preserves
    isolated vertices.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    ids: dict[str, int] = {}
    names: list[str] = []
    edges: list[tuple[int, int, Fraction]] = []

    def vid(label: str) -> int:
        if label not in ids:
            ids[label] = len(names)
            names.append(label)
        return ids[label]

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(_VERTEX_HEADER):
            for label in line[len(_VERTEX_HEADER):].split():
                vid(label)
            continue
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) not in (2, 3):
            raise MalformedLine(line_no, raw)
        u, v = vid(parts[0].strip()), vid(parts[1].strip())
        if u == v:
            raise SelfLoop(f"line {line_no}: self-loop at {parts[0]!r}")
        w = ONE
        if len(parts) == 3:
            try:
                w = Fraction(parts[2].strip())
            except (ValueError, ZeroDivisionError):
                raise MalformedLine(line_no, raw) from None
            if w <= 0:
                raise NonpositiveWeight(f"line {line_no}: weight {w}")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if any(((e[0], e[1]) if directed else (min(e[0], e[1]), max(e[0], e[1]))) == key
               for e in edges):
            raise DuplicateEdge(f"line {line_no}: edge repeated")
        edges.append((u, v, w))
    # purely positional labels carry no information; keep such graphs unnamed
    if names == [str(i) for i in range(len(names))]:
        return Graph.from_edges(len(names), edges, directed=directed)
    return Graph.from_edges(len(names), edges, directed=directed,
                            vertex_names=names)


def serialize_edge_list(g: Graph) -> str:
    """Inverse of parse_edge_list; includes a vertex-order header so the
    round trip reproduces ids (and keeps isolated vertices)."""
    lines = [_VERTEX_HEADER + " " + " ".join(g.name_of(v) for v in range(g.n))]
    for u, v, w in g.edges():
        cell = f"{g.name_of(u)}\t{g.name_of(v)}"
        if w != 1:
            cell += f"\t{w}"
        lines.append(cell)
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> dict:
    doc = {
        "n": g.n,
        "directed": g.directed,
        "edges": [{"u": u, "v": v, "w": str(w)} for u, v, w in g.edges()],
    }
    if g.vertex_names is not None:
        doc["names"] = list(g.vertex_names)
    return doc


def graph_from_json(doc: dict | str) -> Graph:
    if isinstance(doc, str):
        doc = json.loads(doc)
    edges = [(e["u"], e["v"], Fraction(e.get("w", "1"))) for e in doc["edges"]]
    return Graph.from_edges(doc["n"], edges, directed=doc["directed"],
                            vertex_names=doc.get("names"))


# -- distances ---------------------------------------------------------------

def _bfs_from(g: Graph, src: int) -> list:
    dist: list = [UNREACHABLE] * g.n
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        du = dist[u]
        for v, _ in g.out_adj[u]:
            if dist[v] is UNREACHABLE:
                dist[v] = du + 1
                q.append(v)
    return dist


def _dijkstra_from(g: Graph, src: int) -> list:
    dist: list = [UNREACHABLE] * g.n
    dist[src] = Fraction(0)
    heap: list[tuple[Fraction, int]] = [(Fraction(0), src)]
    while heap:
        du, u = heappop(heap)
        if dist[u] is not UNREACHABLE and du > dist[u]:
            continue
        for v, w in g.out_adj[u]:
            nd = du + w
            if dist[v] is UNREACHABLE or nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


def distances_from(g: Graph, src: int) -> list:
    """Exact shortest-path distances from src to every vertex."""
    return _bfs_from(g, src) if g.is_unweighted else _dijkstra_from(g, src)


def graph_distance(g: Graph, u: int, v: int):
    """Shortest (di)path length between u and v, or UNREACHABLE."""
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise NotAnEdge(f"vertex out of range: ({u},{v})")
    return distances_from(g, u)[v]


def all_pairs_distances(g: Graph) -> list[list]:
    """table[u][v] = graph_distance(g, u, v)."""
    return [distances_from(g, u) for u in range(g.n)]


class GraphMetric:
    """Callable (u, v) -> distance with per-source caching.

    One instance shared across a sweep avoids recomputing single-source
    trees; the graph is immutable so the cache never goes stale.
    """

    def __init__(self, g: Graph):
        self.g = g
        self._rows: dict[int, list] = {}

    def row(self, u: int) -> list:
        r = self._rows.get(u)
        if r is None:
            r = distances_from(self.g, u)
            self._rows[u] = r
        return r

    def __call__(self, u: int, v: int):
        return self.row(u)[v]


def is_connected(g: Graph) -> bool:
    """Weak connectivity for digraphs, plain connectivity otherwise."""
    if g.n == 0:
        return True
    seen = [False] * g.n
    seen[0] = True
    q = deque([0])
    while q:
        u = q.popleft()
        for v, _ in g.out_adj[u]:
            if not seen[v]:
                seen[v] = True
                q.append(v)
        for v, _ in g.in_adj[u]:
            if not seen[v]:
                seen[v] = True
                q.append(v)
    return all(seen)


def connected_components(g: Graph) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by smallest vertex."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = []
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            comp.append(u)
            for v, _ in g.out_adj[u]:
                if not seen[v]:
                    seen[v] = True
                    q.append(v)
            for v, _ in g.in_adj[u]:
                if not seen[v]:
                    seen[v] = True
                    q.append(v)
        comps.append(sorted(comp))
    return comps


# -- local structure ----------------------------------------------------------

def triangle_count(g: Graph, u: int, v: int) -> int:
    """Number of common neighbors of the edge (u, v)."""
    if g.directed:
        raise DirectedUnsupported("triangle_count is undirected-only")
    if not g.has_arc(u, v):
        raise NotAnEdge(f"({u},{v}) not in graph")
    return len(g.neighbor_set(u) & g.neighbor_set(v))


def degrees(g: Graph, v: int) -> Degrees:
    """(total, in, out) degree; all three coincide on undirected graphs."""
    d_out = g.out_degree(v)
    d_in = g.in_degree(v)
    if g.directed:
        return Degrees(d_in + d_out, d_in, d_out)
    return Degrees(d_out, d_in, d_out)


# -- random generation --------------------------------------------------------

def _pair_uniform(seed: int, u: int, v: int) -> float:
    """Splittable uniform in [0,1) keyed by (seed, u, v); order-independent
    across generation so parallel sampling reproduces exactly."""
    raw = hashlib.blake2b(struct.pack("<qqq", seed, u, v),
                          digest_size=8).digest()
    return int.from_bytes(raw, "big") / 2.0 ** 64


def sbm_generate(n: int, k: int, p_in: float, p_out: float,
                 directed: bool = False, seed: int = 0
                 ) -> tuple[Graph, list[int]]:
    """Stochastic block model with balanced round-robin block assignment.

    Returns the sampled graph and the ground-truth block labels.  Pure
    function of its arguments: the same seed yields the same edge set.
    """
    if not (0 <= p_out <= p_in <= 1):
        raise InvalidProbability(f"need 0 <= p_out <= p_in <= 1, "
                                 f"got p_in={p_in}, p_out={p_out}")
    if k < 1 or n < k:
        raise InvalidProbability(f"need k >= 1 and n >= k, got n={n}, k={k}")
    labels = [v % k for v in range(n)]
    edges = []
    for u in range(n):
        for v in range(n):
            if directed:
                if u == v:
                    continue
            elif u >= v:
                continue
            p = p_in if labels[u] == labels[v] else p_out
            if _pair_uniform(seed, u, v) < p:
                edges.append((u, v))
    return Graph.from_edges(n, edges, directed=directed), labels

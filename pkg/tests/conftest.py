"""Shared graph builders and randomized-instance helpers."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from riccigraph.graph import Graph
from riccigraph.measures import VertexMeasure


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n)
                                for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i + 1) for i in range(leaves)])


def hypercube(dim: int) -> Graph:
    n = 1 << dim
    edges = []
    for u in range(n):
        for b in range(dim):
            v = u ^ (1 << b)
            if u < v:
                edges.append((u, v))
    return Graph.from_edges(n, edges)


def barbell() -> Graph:
    """Two K4s joined by a single bridge edge (3,4)."""
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
             (4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7), (3, 4)]
    return Graph.from_edges(8, edges)


def random_tree(rng: random.Random, n: int) -> Graph:
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    return Graph.from_edges(n, edges)


def random_connected_graph(rng: random.Random, n: int,
                           extra: float = 0.3) -> Graph:
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    rest = [(i, j) for i in range(n) for j in range(i + 1, n)
            if (i, j) not in edges]
    rng.shuffle(rest)
    edges.update(rest[:int(extra * len(rest))])
    return Graph.from_edges(n, sorted(edges))


def random_digraph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(n)
             if u != v and rng.random() < p]
    return Graph.from_edges(n, edges, directed=True)


def random_measure(rng: random.Random, n: int, max_denom: int = 12,
                   max_support: int = 4) -> VertexMeasure:
    support = sorted(rng.sample(range(n), k=rng.randint(1, min(n, max_support))))
    parts = [rng.randint(1, max_denom) for _ in support]
    total = sum(parts)
    return VertexMeasure.of({v: Fraction(c, total)
                             for v, c in zip(support, parts)})


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)

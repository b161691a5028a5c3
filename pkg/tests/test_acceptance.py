"""Acceptance suite: one test per criterion, exact tolerances, one printed
pass line each.  Random instances are seeded, so every run checks the same
frozen population."""

import json
import random
import statistics
import sys
import time
from fractions import Fraction

import pytest

from riccigraph.cli import cmd_dispatch
from riccigraph.curvature import (
    concavity_check,
    contraction_check,
    diameter_bound_check,
    geodesic_propagation_check,
    jost_liu_lower_bound,
    jost_liu_triangle_lower_bound,
    lly_curvature_steps,
    lly_upper_bound,
    orc_alpha,
)
from riccigraph.directed import (
    directed_heuristic_plan,
    directed_orc,
    effective_length,
)
from riccigraph.errors import Infeasible, SinkVertex
from riccigraph.graph import Graph, GraphMetric, is_finite, sbm_generate
from riccigraph.measures import VertexMeasure, lly_measure
from riccigraph.netalgo import (
    FlowParams,
    adjusted_rand_index,
    negative_edge_removal_cluster,
    ricci_flow_weights,
    threshold_sweep_cluster,
)
from riccigraph.transport import (
    duality_gap,
    unit_split_oracle,
    wasserstein1,
    wasserstein1_dual,
)
from conftest import (
    barbell,
    complete_graph,
    hypercube,
    random_connected_graph,
    random_digraph,
    random_tree,
)

HALF = Fraction(1, 2)


class _Stopwatch:
    def __init__(self, criterion: int, description: str, budget_s: float):
        self.criterion = criterion
        self.description = description
        self.budget_s = budget_s

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.monotonic() - self.start
        verdict = "PASS" if exc_type is None else "FAIL"
        print(f"ACCEPTANCE {self.criterion}: {verdict} ({elapsed:.1f}s) - "
              f"{self.description}", file=sys.__stdout__, flush=True)
        if exc_type is None:
            assert elapsed < self.budget_s, (
                f"criterion {self.criterion} exceeded its "
                f"{self.budget_s:.0f}s budget: {elapsed:.1f}s")
        return False


def test_criterion_1_worked_example_exactness():
    with _Stopwatch(1, "worked single-edge and triangle values, exact",
                    budget_s=1.0):
        k2 = Graph.from_edges(2, [(0, 1)])
        assert orc_alpha(k2, 0, 1, 0).kappa == 0
        assert orc_alpha(k2, 0, 1, HALF).kappa == 1
        k3 = complete_graph(3)
        r0 = orc_alpha(k3, 0, 1, 0)
        assert (r0.w1, r0.kappa) == (HALF, HALF)
        r1 = orc_alpha(k3, 0, 1, HALF)
        assert (r1.w1, r1.kappa) == (Fraction(1, 4), Fraction(3, 4))


def test_criterion_2_hypercube():
    with _Stopwatch(2, "hypercube kappa = 1/N and saturated diameter bound, "
                       "N in {2,3,4,5}", budget_s=30.0):
        for dim in (2, 3, 4, 5):
            g = hypercube(dim)
            metric = GraphMetric(g)
            for u, v, _ in g.edges():
                assert orc_alpha(g, u, v, HALF, metric=metric).kappa == \
                    Fraction(1, dim)
            report = diameter_bound_check(g, mode="orc", alpha=HALF)
            assert report.diameter == dim
            assert report.bound == dim  # 2 sup J / k with J=1/2, k=1/N
            assert report.holds


def test_criterion_3_tree_equality():
    with _Stopwatch(3, "200 random trees: kappa_0 equals the degree bound "
                       "on every edge", budget_s=120.0):
        rng = random.Random(303)
        for _ in range(200):
            g = random_tree(rng, rng.randint(2, 30))
            metric = GraphMetric(g)
            for u, v, _ in g.edges():
                k0 = orc_alpha(g, u, v, 0, metric=metric).kappa
                assert k0 == jost_liu_lower_bound(g, u, v)


def test_criterion_4_bound_suite():
    with _Stopwatch(4, "100 random graphs (n<=14): lower/upper bounds, "
                       "phi monotone, concavity", budget_s=300.0):
        rng = random.Random(404)
        alphas = [Fraction(0), Fraction(1, 4), HALF, Fraction(3, 4)]
        for _ in range(100):
            g = random_connected_graph(rng, rng.randint(2, 14),
                                       rng.uniform(0.05, 0.5))
            metric = GraphMetric(g)
            for u, v, _ in g.edges():
                kappas = [orc_alpha(g, u, v, a, metric=metric).kappa
                          for a in alphas]
                assert jost_liu_lower_bound(g, u, v) <= kappas[0]
                assert jost_liu_triangle_lower_bound(g, u, v) <= kappas[0]
                for a, k in zip(alphas, kappas):
                    assert k <= lly_upper_bound(1, a)
                phis = [k / (1 - a) for a, k in zip(alphas, kappas)]
                assert all(p1 <= p2 for p1, p2 in zip(phis, phis[1:]))
                report = concavity_check(g, u, v, alphas)
                assert report.kappas == tuple(kappas)
                assert report.holds


def test_criterion_5_duality_and_oracle():
    with _Stopwatch(5, "500 random measure pairs: zero duality gap and "
                       "unit-split oracle equality", budget_s=300.0):
        rng = random.Random(505)

        def measure(n: int, denom: int) -> VertexMeasure:
            support = sorted(rng.sample(range(n),
                                        k=rng.randint(1, min(n, 4))))
            cuts = sorted(rng.sample(range(1, denom), k=len(support) - 1)) \
                if len(support) > 1 else []
            bounds = [0, *cuts, denom]
            return VertexMeasure.of(
                {v: Fraction(bounds[i + 1] - bounds[i], denom)
                 for i, v in enumerate(support)
                 if bounds[i + 1] > bounds[i]})

        for _ in range(500):
            g = random_connected_graph(rng, rng.randint(2, 10),
                                       rng.uniform(0.1, 0.5))
            metric = GraphMetric(g)
            denom = rng.randint(2, 24)
            mu, nu = measure(g.n, denom), measure(g.n, denom)
            cost, plan = wasserstein1(mu, nu, metric)
            cert = wasserstein1_dual(mu, nu, metric)
            assert duality_gap(plan, cert) == 0
            assert unit_split_oracle(mu, nu, metric, denom) == cost


def test_criterion_6_contraction_and_propagation():
    with _Stopwatch(6, "50 random graphs (n<=12): one-step W1 contraction "
                       "and pair-min >= edge-min", budget_s=300.0):
        rng = random.Random(606)
        from conftest import random_measure
        for _ in range(50):
            g = random_connected_graph(rng, rng.randint(2, 12),
                                       rng.uniform(0.1, 0.5))
            alpha = Fraction(rng.randint(0, 3), 4)
            prop = geodesic_propagation_check(g, alpha)
            assert prop.holds
            mu, nu = random_measure(rng, g.n), random_measure(rng, g.n)
            assert contraction_check(g, alpha, mu, nu).holds


def test_criterion_7_lly_limits():
    with _Stopwatch(7, "LLY limits stabilize within k<=6; single edge 2, "
                       "triangle 3/2", budget_s=120.0):
        assert lly_curvature_steps(Graph.from_edges(2, [(0, 1)]), 0, 1)[0] == 2
        assert lly_curvature_steps(complete_graph(3), 0, 1)[0] == \
            Fraction(3, 2)
        rng = random.Random(707)
        for _ in range(100):
            g = random_connected_graph(rng, rng.randint(2, 12),
                                       rng.uniform(0.05, 0.6))
            metric = GraphMetric(g)
            for u, v, _ in g.edges():
                _, k = lly_curvature_steps(g, u, v, metric=metric)
                assert k <= 6


def test_criterion_8_clustering_at_desk_scale():
    with _Stopwatch(8, "SBM(50,2,0.3,0.01) x 10 seeds: median ARI >= 0.9 for "
                       "both methods; barbell exact", budget_s=600.0):
        flow_params = FlowParams(nu=HALF, T=5, eps=0.0, eps_d=0.0)
        ari_flow, ari_remove = [], []
        for seed in range(10):
            g, truth = sbm_generate(50, 2, 0.3, 0.01, seed=seed)
            trajectory = ricci_flow_weights(g, flow_params)
            flow = threshold_sweep_cluster(g, trajectory[-1], flow_params)
            ari_flow.append(adjusted_rand_index(list(flow.labels), truth))
            removal = negative_edge_removal_cluster(
                g, alpha=0, min_size=3, target_communities=2)
            ari_remove.append(adjusted_rand_index(list(removal.labels), truth))
        assert statistics.median(ari_flow) >= 0.9, ari_flow
        assert statistics.median(ari_remove) >= 0.9, ari_remove

        g = barbell()
        truth = [0, 0, 0, 0, 1, 1, 1, 1]
        trajectory = ricci_flow_weights(g, flow_params)
        flow = threshold_sweep_cluster(g, trajectory[-1], flow_params)
        assert adjusted_rand_index(list(flow.labels), truth) == 1.0
        removal = negative_edge_removal_cluster(g, alpha=0, min_size=1,
                                                target_communities=2)
        assert adjusted_rand_index(list(removal.labels), truth) == 1.0


def test_criterion_9_directed_suite():
    with _Stopwatch(9, "effective-length figures, heuristic plan >= exact "
                       "W1, asymmetry witness", budget_s=300.0):
        # triangle orientations from the figure
        c3 = Graph.from_edges(3, [(0, 1), (1, 2), (2, 0)], directed=True)
        assert effective_length(c3, [0, 1, 2]).effective_length == 3
        t1 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], directed=True)
        assert effective_length(t1, [0, 1, 2]).effective_length == 1
        # quadrilateral family
        c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)],
                              directed=True)
        assert effective_length(c4, [0, 1, 2, 3]).effective_length == 4
        q2 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)],
                              directed=True)
        assert effective_length(q2, [0, 1, 2, 3]).effective_length == 2
        q0 = Graph.from_edges(4, [(0, 1), (2, 1), (2, 3), (0, 3)],
                              directed=True)
        assert effective_length(q0, [0, 1, 2, 3]).effective_length == 0

        rng = random.Random(909)
        feasible = 0
        for _ in range(100):
            g = random_digraph(rng, rng.randint(3, 10),
                               rng.uniform(0.15, 0.6))
            for x, y, _ in g.edges():
                try:
                    exact = directed_orc(g, x, y, 0).w1
                except SinkVertex:
                    continue
                try:
                    plan = directed_heuristic_plan(g, x, y, 0)
                except Infeasible:
                    assert not is_finite(exact)
                    continue
                assert is_finite(exact)
                assert plan.cost >= exact
                feasible += 1
        assert feasible > 100

        witness = Graph.from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)],
                                   directed=True)
        fwd = directed_orc(witness, 0, 1, 0).w1
        rev = directed_orc(witness, 1, 0, 0).w1
        assert fwd != rev


def test_criterion_10_cli_determinism(tmp_path):
    with _Stopwatch(10, "every CLI command byte-identical across reruns and "
                        "thread counts", budget_s=300.0):
        tri = tmp_path / "triangle.tsv"
        tri.write_text("0\t1\n1\t2\n0\t2\n")
        from riccigraph.graph import serialize_edge_list
        bar = tmp_path / "barbell.tsv"
        bar.write_text(serialize_edge_list(barbell()))

        def run_twice(argv_template):
            payloads = []
            for tag in ("x", "y"):
                outs = [tmp_path / f"{tag}{i}" for i in
                        range(len([a for a in argv_template if a == "@"]))]
                it = iter(outs)
                argv = [str(next(it)) if a == "@" else str(a)
                        for a in argv_template]
                assert cmd_dispatch(argv) in (0, 1)
                payloads.append(b"".join(p.read_bytes() for p in outs))
            assert payloads[0] == payloads[1], argv_template

        run_twice(["curvature", "--input", tri, "--alpha", "1/2",
                   "--threads", "1", "--out", "@", "--emit-dot", "@"])
        # thread counts must not change output bytes
        one = tmp_path / "t1.json"
        eight = tmp_path / "t8.json"
        cmd_dispatch(["curvature", "--input", str(bar), "--alpha", "0",
                      "--threads", "1", "--out", str(one)])
        cmd_dispatch(["curvature", "--input", str(bar), "--alpha", "0",
                      "--threads", "8", "--out", str(eight)])
        assert one.read_bytes() == eight.read_bytes()

        run_twice(["lly", "--input", tri, "--out", "@"])
        run_twice(["cluster", "--input", bar, "--method", "flow", "--nu",
                   "1/5", "-T", "5", "--out", "@"])
        run_twice(["cluster", "--input", bar, "--method", "remove",
                   "--target-communities", "2", "--out", "@"])
        run_twice(["rewire", "--input", bar, "--h", "2", "--l", "1",
                   "--seed", "21", "--out", "@", "--report", "@"])
        run_twice(["generate", "sbm", "--n", "24", "--k", "2", "--p-in",
                   "0.4", "--p-out", "0.05", "--seed", "2", "--out", "@",
                   "--labels", "@"])
        run_twice(["check", "bounds", "--input", tri, "--alpha", "1/2",
                   "--out", "@"])

"""Command-line front end: curvature tables, clustering, rewiring, SBM
generation, bound-check suites, and DOT export.

Every command is deterministic: identical argv + identical input bytes give
byte-identical output files (wall-clock timing goes to stderr only).
Rationals are rendered as exact "p/q" strings; --floats adds decimal fields.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .curvature import (
    CurvatureRecord,
    concavity_check,
    contraction_check,
    curvature_sweep,
    diameter_bound_check,
    jost_liu_lower_bound,
    jost_liu_triangle_lower_bound,
    lly_upper_bound,
    orc_alpha,
)
from .directed import directed_sweep
from .errors import RicciGraphError
from .graph import (
    Graph,
    graph_from_json,
    parse_edge_list,
    sbm_generate,
    serialize_edge_list,
)
from .measures import VertexMeasure, dirac
from .netalgo import (
    FlowParams,
    RewireParams,
    adjusted_rand_index,
    curvature_rewire,
    negative_edge_removal_cluster,
    ricci_flow_weights,
    threshold_sweep_cluster,
)


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility header embedded in every output file.  Timing is
    carried in memory but never written (outputs must be byte-identical
    across reruns)."""

    command: str
    parameters: dict
    input_digest: str | None
    seed: int | None
    version: str
    timing_s: float | None = None

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "version": self.version,
        }


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_graph(path: str, directed: bool) -> tuple[Graph, str]:
    raw = Path(path).read_bytes()
    text = raw.decode("utf-8")
    if path.endswith(".json"):
        g = graph_from_json(text)
    else:
        g = parse_edge_list(text, directed=directed)
    return g, _digest(raw)


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# threads is an execution detail: output must be byte-identical across pool
# sizes, so it stays out of the recorded parameters.
_MANIFEST_SKIP = ("func", "out", "input", "command", "threads")


def _manifest(args: argparse.Namespace, digest: str | None,
              skip=_MANIFEST_SKIP) -> dict:
    params = {k: str(v) for k, v in sorted(vars(args).items())
              if k not in skip and v is not None}
    seed = getattr(args, "seed", None)
    return RunManifest(command=args.command, parameters=params,
                       input_digest=digest, seed=seed,
                       version=__version__).to_json()


# -- DOT export -----------------------------------------------------------------

def _diverging_color(kappa: float) -> str:
    """Blue for negative curvature, red for positive, saturating at |k|=1."""
    t = max(-1.0, min(1.0, kappa))
    mid = (0xF7, 0xF7, 0xF7)
    deep = (0x21, 0x66, 0xAC) if t < 0 else (0xB2, 0x18, 0x2B)
    t = abs(t)
    rgb = tuple(round(m + (d - m) * t) for m, d in zip(mid, deep))
    return "#%02x%02x%02x" % rgb


def export_dot(g: Graph, records: list[CurvatureRecord]) -> str:
    """DOT text with curvature labels and a fixed diverging color scale."""
    kind, arrow = ("digraph", "->") if g.directed else ("graph", "--")
    by_edge = {(r.x, r.y): r for r in records}
    lines = [f"{kind} G {{"]
    for v in range(g.n):
        lines.append(f'  "{g.name_of(v)}";')
    for u, v, _ in g.edges():
        rec = by_edge.get((u, v))
        attrs = ""
        if rec is not None and rec.kappa is not None:
            label = repr(round(float(rec.kappa), 6))
            attrs = (f' [label="{label}", '
                     f'color="{_diverging_color(float(rec.kappa))}"]')
        elif rec is not None and rec.kappa is None:
            attrs = ' [label="undefined (blocked transport)"]'
        lines.append(f'  "{g.name_of(u)}" {arrow} "{g.name_of(v)}"{attrs};')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- subcommands ------------------------------------------------------------------

def cmd_curvature(args: argparse.Namespace) -> int:
    g, digest = _load_graph(args.input, args.directed)
    if args.directed:
        records = directed_sweep(g, args.alpha, want_plan=args.emit_plan)
    else:
        records = curvature_sweep(g, args.alpha, threads=args.threads,
                                  want_plan=args.emit_plan)
    doc = {
        "manifest": _manifest(args, digest),
        "records": [r.to_json(floats=args.floats, include_plan=args.emit_plan)
                    for r in records],
    }
    _emit(doc, args.out)
    if args.emit_dot:
        Path(args.emit_dot).write_text(export_dot(g, records))
    return 0


def cmd_lly(args: argparse.Namespace) -> int:
    g, digest = _load_graph(args.input, False)
    records = curvature_sweep(g, 0, mode="lly", threads=args.threads)
    doc = {
        "manifest": _manifest(args, digest),
        "records": [r.to_json(floats=args.floats) for r in records],
    }
    _emit(doc, args.out)
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    g, digest = _load_graph(args.input, False)
    if args.method == "flow":
        params = FlowParams(nu=args.nu, eps=args.eps, eps_d=args.eps_d,
                            T=args.T, alpha=args.alpha)
        trajectory = ricci_flow_weights(g, params)
        assignment = threshold_sweep_cluster(g, trajectory[-1], params)
    else:
        assignment = negative_edge_removal_cluster(
            g, alpha=args.alpha, min_size=args.min_size,
            target_communities=args.target_communities)
    if args.truth:
        truth_doc = json.loads(Path(args.truth).read_text())
        truth = [truth_doc["labels"][str(v)] for v in range(g.n)]
        assignment = type(assignment)(
            labels=assignment.labels, modularity=assignment.modularity,
            num_communities=assignment.num_communities,
            ari=adjusted_rand_index(list(assignment.labels), truth))
    doc = {"manifest": _manifest(args, digest), **assignment.to_json()}
    _emit(doc, args.out)
    return 0


def cmd_rewire(args: argparse.Namespace) -> int:
    g, digest = _load_graph(args.input, False)
    params = RewireParams(heuristic=args.heuristic, h=args.h, l=args.l,
                          alpha=args.alpha, seed=args.seed)
    result = curvature_rewire(g, params)
    text = serialize_edge_list(result.graph)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.report:
        doc = {
            "manifest": _manifest(args, digest),
            "added": [list(e) for e in result.added],
            "removed": [list(e) for e in result.removed],
            "disconnected": result.disconnected,
        }
        _emit(doc, args.report)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    g, labels = sbm_generate(args.n, args.k, args.p_in, args.p_out,
                             directed=args.directed, seed=args.seed)
    text = serialize_edge_list(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.labels:
        doc = {
            "manifest": _manifest(args, _digest(text.encode())),
            "labels": {str(v): lab for v, lab in enumerate(labels)},
        }
        _emit(doc, args.labels)
    return 0


def _random_measure(g: Graph, rng: random.Random) -> VertexMeasure:
    verts = sorted(rng.sample(range(g.n), k=min(g.n, rng.randint(1, 3))))
    cuts = sorted(rng.randint(1, 12) for _ in range(len(verts)))
    total = sum(cuts)
    return VertexMeasure.of({v: Fraction(c, total)
                             for v, c in zip(verts, cuts)})


def cmd_check(args: argparse.Namespace) -> int:
    g, digest = _load_graph(args.input, False)
    alpha = args.alpha
    failures: list[dict] = []
    details: dict = {}
    if args.what == "bounds":
        for u, v, _ in g.edges():
            k0 = orc_alpha(g, u, v, 0).kappa
            ka = orc_alpha(g, u, v, alpha).kappa
            lo = jost_liu_lower_bound(g, u, v)
            lo_tri = jost_liu_triangle_lower_bound(g, u, v)
            hi = lly_upper_bound(1, alpha)
            tight = k0 == lo
            if not (lo <= k0 and lo_tri <= k0 and ka <= hi):
                failures.append({"edge": [u, v], "kappa0": str(k0),
                                 "kappa_alpha": str(ka),
                                 "jost_liu": str(lo),
                                 "jost_liu_triangle": str(lo_tri),
                                 "upper": str(hi)})
            details.setdefault("equality_flags", {})[f"{u}-{v}"] = tight
    elif args.what == "concavity":
        grid = [Fraction(tok) for tok in args.grid.split(",")]
        for u, v, _ in g.edges():
            report = concavity_check(g, u, v, grid)
            if not report.holds:
                failures.append({"edge": [u, v],
                                 "violations": list(report.violations)})
    elif args.what == "contraction":
        rng = random.Random(args.seed)
        for trial in range(args.trials):
            mu = _random_measure(g, rng)
            nu = _random_measure(g, rng)
            report = contraction_check(g, alpha, mu, nu)
            if not report.holds:
                failures.append({"trial": trial, **report.to_json()})
        details["trials"] = args.trials
    else:  # diameter
        report = diameter_bound_check(g, mode=args.mode, alpha=alpha)
        details.update(report.to_json())
        if report.holds is False:
            failures.append(report.to_json())
    doc = {
        "manifest": _manifest(args, digest),
        "check": args.what,
        "holds": not failures,
        "details": details,
        "counterexamples": failures,
    }
    _emit(doc, args.out)
    return 0 if not failures else 1


# -- dispatch -------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="riccigraph")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, alpha_default: str = "0") -> None:
        p.add_argument("--input", required=True)
        p.add_argument("--alpha", type=Fraction, default=Fraction(alpha_default))
        p.add_argument("--out")

    p = sub.add_parser("curvature", help="per-edge curvature records")
    common(p)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--emit-plan", action="store_true")
    p.add_argument("--emit-dot")
    p.add_argument("--floats", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("lly", help="limit curvature per edge")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--floats", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_lly)

    p = sub.add_parser("cluster", help="curvature-informed clustering")
    common(p)
    p.add_argument("--method", choices=["flow", "remove"], required=True)
    p.add_argument("--nu", type=Fraction, default=Fraction(1, 5))
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--eps-d", dest="eps_d", type=float, default=0.0)
    p.add_argument("-T", type=int, default=10)
    p.add_argument("--min-size", type=int, default=1)
    p.add_argument("--target-communities", type=int, default=0)
    p.add_argument("--truth")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("rewire", help="curvature-guided rewiring")
    common(p)
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--heuristic", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_rewire)

    p = sub.add_parser("generate", help="random instance generation")
    gsub = p.add_subparsers(dest="model", required=True)
    ps = gsub.add_parser("sbm")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--k", type=int, required=True)
    ps.add_argument("--p-in", dest="p_in", type=float, required=True)
    ps.add_argument("--p-out", dest="p_out", type=float, required=True)
    ps.add_argument("--directed", action="store_true")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out")
    ps.add_argument("--labels")
    ps.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="bound / theorem check suites")
    p.add_argument("what", choices=["bounds", "concavity", "contraction",
                                    "diameter"])
    common(p)
    p.add_argument("--grid", default="0,1/4,1/2,3/4,1")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["lly", "orc"], default="lly")
    p.set_defaults(func=cmd_check)
    return top


def cmd_dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.monotonic()
    try:
        status = args.func(args)
    except RicciGraphError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    elapsed = time.monotonic() - start
    sys.stderr.write(f"[riccigraph] {args.command} finished in "
                     f"{elapsed:.3f}s\n")
    return status


def main() -> None:
    sys.exit(cmd_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

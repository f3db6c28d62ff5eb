"""Command-line entry point: build, query, flow, route, stats, verify, bench."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import labelling, oracle
from .errors import BuildError, IndexFormatError, InputError, RDIndexError
from .flow import electrical_flow, plan_route
from .graph import WEIGHT_MODES, Graph, read_graph
from .labelling import LabelIndex, build_labels, reconstruct_inverse
from .query import lca, query_pair, query_pairs, query_source
from .rng import Xoshiro256
from .treedecomp import decompose

EXIT_OK, EXIT_INPUT, EXIT_BUILD, EXIT_VERIFY = 0, 1, 2, 3


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _load_graph(args) -> Graph:
    g = read_graph(args.input, args.format, args.weight_mode)
    g.report.emit(sys.stderr)
    return g


def _graph_stats(g: Graph, td) -> dict:
    comps = td.component_stats()
    return {
        "n": g.n,
        "m": g.m,
        "d_max": g.max_degree,
        "components": len(comps),
        "h_G": [c["height"] for c in comps],
        "tw": max(c["width"] for c in comps),
    }


def cmd_build(args) -> int:
    g = _load_graph(args)
    start = time.perf_counter()
    td = decompose(g)
    idx = build_labels(g, td)
    elapsed = time.perf_counter() - start
    labelling.save(idx, args.output)
    stats = _graph_stats(g, td)
    stats.update({"labels": idx.label_count, "build_seconds": round(elapsed, 6),
                  "index": args.output})
    _emit(stats)
    return EXIT_OK


def cmd_stats(args) -> int:
    g = _load_graph(args)
    _emit(_graph_stats(g, decompose(g)))
    return EXIT_OK


def cmd_query_pair(args) -> int:
    idx = labelling.load(args.index)
    s, t = idx.internal(args.s), idx.internal(args.t)
    query_pair(idx, s, s)  # load compiled kernels before timing
    start = time.perf_counter_ns()
    res = query_pair(idx, s, t)
    elapsed = time.perf_counter_ns() - start
    _emit({
        "s": args.s,
        "t": args.t,
        "r": res.resistance if res.connected else None,
        "connected": res.connected,
        "labels_touched": res.labels_touched,
        "time_ns": elapsed,
    })
    return EXIT_OK


def cmd_query_source(args) -> int:
    idx = labelling.load(args.index)
    s = idx.internal(args.s)
    query_pair(idx, s, s)
    start = time.perf_counter_ns()
    res = query_source(idx, s)
    elapsed = time.perf_counter_ns() - start
    r = res.resistance
    if args.binary:
        if not args.out:
            raise InputError("--binary needs --out")
        with open(args.out, "wb") as fh:
            for chunk in np.array_split(r, max(1, len(r) // 65536)):
                fh.write(chunk.astype("<f8").tobytes())
    else:
        fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
        try:
            writer = csv.writer(fh)
            writer.writerow(["external_id", "r"])
            for ext, val in zip(idx.external_ids.tolist(), r.tolist()):
                writer.writerow([ext, repr(val) if math.isfinite(val) else ""])
        finally:
            if fh is not sys.stdout:
                fh.close()
    if args.out:
        finite = r[np.isfinite(r)]
        _emit({
            "s": args.s,
            "n": idx.n,
            "reachable": int(len(finite)),
            "max_r": float(finite.max()),
            "work": res.work,
            "time_ns": elapsed,
            "out": args.out,
            "format": "f64" if args.binary else "csv",
        })
    return EXIT_OK


def _index_for(args, g: Graph) -> LabelIndex:
    if getattr(args, "index", None):
        return labelling.load(args.index)
    return build_labels(g, decompose(g))


def cmd_flow(args) -> int:
    g = _load_graph(args)
    idx = _index_for(args, g)
    s, t = g.internal(args.s), g.internal(args.t)
    f = electrical_flow(idx, g, s, t)
    ext = g.external_ids
    keep = np.abs(f.flow) > args.min_flow
    _emit({
        "s": args.s,
        "t": args.t,
        "r": float(f.potential[s] - f.potential[t]),
        "edges": [
            {"u": int(ext[u]), "v": int(ext[v]), "flow": float(x)}
            for u, v, x in zip(f.edge_u[keep], f.edge_v[keep], f.flow[keep])
        ],
    })
    return EXIT_OK


def cmd_route(args) -> int:
    g = _load_graph(args)
    idx = _index_for(args, g)
    s, t = g.internal(args.s), g.internal(args.t)
    plan = plan_route(idx, g, s, t, args.k, args.removal_prob, args.trials, args.seed)
    ext = g.external_ids
    _emit({
        "s": args.s,
        "t": args.t,
        "k": args.k,
        "paths": [{"nodes": [int(ext[v]) for v in p.nodes], "bottleneck": p.bottleneck}
                  for p in plan.paths],
        "length_ratio": plan.length_ratio,
        "diversity": plan.diversity,
        "robustness": plan.robustness,
        "seed": plan.seed,
        "trials": args.trials,
        "removal_prob": args.removal_prob,
    })
    return EXIT_OK


def verify_graph(g: Graph, idx: LabelIndex, pairs: int, seed: int, tol: float = 1e-8) -> dict:
    """Compare the index against the dense oracle; returns a report with ``passed``."""
    L = oracle.dense_laplacian(g)
    rng = Xoshiro256(seed)
    n = g.n
    ss = np.array(rng.sample_ids(pairs, n), dtype=np.int64)
    ts = np.array(rng.sample_ids(pairs, n), dtype=np.int64)

    R = np.full((n, n), np.inf)
    for c in range(g.n_components):
        members = np.flatnonzero(g.component == c)
        R[np.ix_(members, members)] = oracle.resistance_matrix(L[np.ix_(members, members)])
    got = query_pairs(idx, ss, ts)
    want = R[ss, ts]
    same_inf = np.isinf(got) & np.isinf(want)
    with np.errstate(invalid="ignore"):
        diff = np.where(same_inf, 0.0, np.abs(got - want))
    pair_max = float(diff.max()) if len(diff) else 0.0
    checks = {"pairs": {"count": pairs, "max_abs_diff": pair_max,
                        "passed": bool(np.all(np.isfinite(diff)) and pair_max <= tol)}}

    grounded = oracle.submatrix_inverse(L, idx.roots)
    chol = float(np.abs(reconstruct_inverse(idx) - grounded).max())
    diag = float(np.abs(idx.diagonal - np.diag(grounded)).max())
    checks["cholesky_sum"] = {"max_abs_diff": chol, "diagonal_max_abs_diff": diag,
                              "passed": bool(chol <= 1e-9 and diag <= 1e-9)}

    removable = [v for v in range(n) if v not in set(idx.roots)]
    drop = [removable[rng.below(len(removable))] for _ in range(min(3, len(removable)))]
    u2_inv = grounded
    u1_remove = sorted(set(idx.roots) | set(drop))
    keep = [v for v in range(n) if v not in set(u1_remove)]
    if keep:
        direct = oracle.submatrix_inverse(L, u1_remove)[np.ix_(keep, keep)]
        via_schur = oracle.schur_complement(u2_inv[np.ix_(removable, removable)],
                                            [removable.index(v) for v in keep])
        nested = float(np.abs(direct - via_schur).max())
    else:
        nested = 0.0
    checks["nested_inverse_schur"] = {"max_abs_diff": nested, "passed": bool(nested <= 1e-9)}

    cut_diff = None
    for s, t in zip(ss.tolist(), ts.tolist()):
        if g.component[s] != g.component[t] or idx.is_ancestor(s, t) or idx.is_ancestor(t, s):
            continue
        a = lca(idx, s, t)
        cut = [a] + [int(v) for v in _ancestors(idx, a)]
        res = oracle.cut_property_resistance(g, cut, s, t)
        cut_diff = float(abs(res["total"] - R[s, t]))
        break
    checks["cut_property"] = {"max_abs_diff": cut_diff,
                              "passed": bool(cut_diff is None or cut_diff <= 1e-9)}

    flow_diff = None
    for s, t in zip(ss.tolist(), ts.tolist()):
        if s != t and g.component[s] == g.component[t]:
            mine = electrical_flow(idx, g, s, t).flow
            ref = oracle.electrical_flow_reference(g, s, t)
            flow_diff = float(np.abs(mine - ref).max())
            break
    checks["flow_reference"] = {"max_abs_diff": flow_diff,
                                "passed": bool(flow_diff is None or flow_diff <= 1e-9)}
    return {"n": n, "m": g.m, "seed": seed, "checks": checks,
            "passed": bool(all(c["passed"] for c in checks.values()))}


def _ancestors(idx: LabelIndex, v: int):
    w = idx.parent[v]
    while w >= 0:
        yield w
        w = idx.parent[w]


def cmd_verify(args) -> int:
    g = _load_graph(args)
    if args.index:
        try:
            idx = labelling.load(args.index)
        except IndexFormatError as exc:
            _emit({"index": args.index, "passed": False, "error": str(exc)})
            return EXIT_VERIFY
    else:
        idx = build_labels(g, decompose(g))
    report = verify_graph(g, idx, args.pairs, args.seed)
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _percentiles(xs: list[int]) -> dict:
    if not xs:
        return {"count": 0}
    arr = np.asarray(xs, dtype=np.float64)
    return {"count": len(xs), "mean": float(arr.mean()), "median": float(np.median(arr)),
            "p99": float(np.percentile(arr, 99)), "max": float(arr.max())}


def run_bench(idx: LabelIndex, pairs: int, sources: int, seed: int, threads: int = 1) -> dict:
    rng = Xoshiro256(seed)
    pair_ids = [(rng.below(idx.n), rng.below(idx.n)) for _ in range(pairs)]
    source_ids = [rng.below(idx.n) for _ in range(sources)]
    digest = hashlib.sha256(json.dumps([pair_ids, source_ids]).encode()).hexdigest()

    def one_pair(st):
        start = time.perf_counter_ns()
        res = query_pair(idx, *st)
        return time.perf_counter_ns() - start, res.labels_touched

    def one_source(s):
        start = time.perf_counter_ns()
        res = query_source(idx, s)
        return time.perf_counter_ns() - start, res.work

    if idx.n:
        query_pair(idx, 0, 0)
        query_source(idx, 0)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        pair_out = list(pool.map(one_pair, pair_ids))
        source_out = list(pool.map(one_source, source_ids))
    return {
        "seed": seed,
        "threads": threads,
        "sample_sha256": digest,
        "pair_latency_ns": _percentiles([x for x, _ in pair_out]),
        "labels_touched": _percentiles([y for _, y in pair_out]),
        "source_latency_ns": _percentiles([x for x, _ in source_out]),
        "source_work": _percentiles([y for _, y in source_out]),
    }


def cmd_bench(args) -> int:
    idx = labelling.load(args.index)
    _emit(run_bench(idx, args.pairs, args.sources, args.seed, args.threads))
    return EXIT_OK


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="graph file")
    p.add_argument("--format", choices=["edgelist", "dimacs"], default="edgelist")
    p.add_argument("--weight-mode", choices=WEIGHT_MODES, default=None,
                   help="default: conductance for edge lists, resistance for DIMACS")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdindex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="decompose, label and write an index file")
    _add_graph_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stats", help="decomposition statistics of a graph")
    _add_graph_args(p)
    p.set_defaults(func=cmd_stats)

    q = sub.add_parser("query", help="resistance queries against an index")
    qsub = q.add_subparsers(dest="mode", required=True)
    p = qsub.add_parser("pair")
    p.add_argument("index")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.set_defaults(func=cmd_query_pair)
    p = qsub.add_parser("source")
    p.add_argument("index")
    p.add_argument("s", type=int)
    p.add_argument("--out", help="write the vector here (CSV unless --binary)")
    p.add_argument("--binary", action="store_true", help="raw little-endian f64, node id order")
    p.set_defaults(func=cmd_query_source)

    p = sub.add_parser("flow", help="unit electrical flow between two nodes")
    _add_graph_args(p)
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--index")
    p.add_argument("--min-flow", type=float, default=0.0)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("route", help="k alternative routes peeled off the electrical flow")
    _add_graph_args(p)
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--index")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--removal-prob", type=float, default=0.001)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("verify", help="check an index against the dense oracle")
    _add_graph_args(p)
    p.add_argument("--index", help="verify this index file instead of building one")
    p.add_argument("--pairs", type=int, default=36)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="latency of random pair and source queries")
    p.add_argument("index")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--sources", type=int, default=0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BuildError as exc:
        print(f"build error: {exc}", file=sys.stderr)
        return EXIT_BUILD
    except RDIndexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance suite: one PASS/FAIL line per criterion (shown in the pytest summary)."""

from __future__ import annotations

import time
from collections import deque

import numpy as np
import pytest

from conftest import record
from rdindex import build_index, labelling, oracle, synth
from rdindex.flow import electrical_flow
from rdindex.graph import EdgeRecord, build_graph
from rdindex.labelling import reconstruct_inverse
from rdindex.query import lca, query_pair, query_pairs, query_source
from rdindex.rng import Xoshiro256

ANCHOR_TOL = 0.005
ORACLE_TOL = 1e-8
IDENTITY_TOL = 1e-9

SWEEP_SEEDS = range(1000, 1100)
_SWEEP_BUILD_SECONDS: list[float] = []


@pytest.fixture(scope="module")
def sweep():
    out = []
    start = time.perf_counter()
    for seed in SWEEP_SEEDS:
        g = synth.random_connected(seed)
        out.append((seed, g, build_index(g)))
    _SWEEP_BUILD_SECONDS.append(time.perf_counter() - start)
    return out


def _r(g, idx, a, b):
    return query_pair(idx, g.internal(a), g.internal(b)).resistance


def test_c1_worked_example(example):
    g, idx = example
    start = time.perf_counter()
    r24 = _r(g, idx, 2, 4)
    r19 = _r(g, idx, 1, 9)
    ms = (time.perf_counter() - start) * 1e3
    ok = abs(r24 - 1.61) <= ANCHOR_TOL and abs(r19 - 1.62) <= ANCHOR_TOL
    record("1", ok, f"r(v2,v4)={r24:.4f} (1.61), r(v1,v9)={r19:.4f} (1.62), {ms:.2f} ms")
    assert ok


@pytest.mark.xfail(strict=True, reason="literal edge list with v4-v5 does not reproduce 1.61")
def test_c1_literal_edge_list():
    edges = synth.EXAMPLE_EDGES + [(4, 5)]
    g = build_graph([EdgeRecord(u, v) for u, v in edges])
    r24 = _r(g, build_index(g), 2, 4)
    ok = abs(r24 - 1.61) <= ANCHOR_TOL
    record("1-literal", ok, f"13-edge list gives r(v2,v4)={r24:.4f}; expected to miss 1.61",
           expected_fail=True)
    assert ok


def test_c2_edge_removal():
    edges = [EdgeRecord(u, v) for u, v in synth.EXAMPLE_EDGES if (u, v) != (8, 9)]
    g = build_graph(edges)
    r = _r(g, build_index(g), 2, 4)
    ok = abs(r - 1.89) <= ANCHOR_TOL
    record("2", ok, f"after deleting (v8,v9): r(v2,v4)={r:.4f} (1.89)")
    assert ok


def test_c3_flow(example):
    g, idx = example
    s, t = g.internal(2), g.internal(4)
    f = electrical_flow(idx, g, s, t)
    got = [f.on_edge(g.internal(a), g.internal(b)) for a, b in [(2, 9), (9, 8), (8, 4)]]
    anchors_ok = all(abs(x - y) <= ANCHOR_TOL for x, y in zip(got, [0.59, 0.36, 0.66]))
    net = f.net_outflow(g.n)
    expect = np.zeros(g.n)
    expect[s], expect[t] = 1.0, -1.0
    conservation = float(np.abs(net - expect).max())
    r = query_pair(idx, s, t).resistance
    path_err = 0.0
    for path in ([2, 9, 8, 4], [2, 3, 7, 8, 4], [2, 9, 5, 6, 4]):
        nodes = [g.internal(v) for v in path]
        drop = sum(f.on_edge(a, b) / g.edge_conductance(a, b) for a, b in zip(nodes, nodes[1:]))
        path_err = max(path_err, abs(drop - r))
    ok = anchors_ok and conservation <= IDENTITY_TOL and path_err <= IDENTITY_TOL
    record("3", ok, f"flows {got[0]:.4f}/{got[1]:.4f}/{got[2]:.4f}, "
                    f"conservation {conservation:.1e}, path-sum err {path_err:.1e}")
    assert ok


def test_c4_oracle_sweep(sweep):
    start = time.perf_counter()
    worst = 0.0
    weighted = 0
    sizes = []
    for _, g, idx in sweep:
        R = oracle.resistance_matrix(oracle.dense_laplacian(g))
        ss, ts = np.meshgrid(np.arange(g.n), np.arange(g.n), indexing="ij")
        got = query_pairs(idx, ss.ravel(), ts.ravel()).reshape(g.n, g.n)
        worst = max(worst, float(np.abs(got - R).max()))
        weighted += g.weighted
        sizes.append(g.n)
    secs = time.perf_counter() - start + sum(_SWEEP_BUILD_SECONDS)
    ok = worst <= ORACLE_TOL and secs < 300 and 0 < weighted < len(sweep)
    record("4", ok, f"{len(sweep)} graphs (n {min(sizes)}..{max(sizes)}, {weighted} weighted), "
                    f"max diff {worst:.1e}, {secs:.1f} s")
    assert ok


def test_c5_cholesky_sum(sweep):
    worst = 0.0
    for _, g, idx in sweep:
        L = oracle.dense_laplacian(g)
        truth = oracle.submatrix_inverse(L, idx.roots)
        worst = max(worst, float(np.abs(reconstruct_inverse(idx) - truth).max()))
    ok = worst <= IDENTITY_TOL
    record("5", ok, f"column outer-product sum vs grounded inverse, max diff {worst:.1e}")
    assert ok


def _ancestors(idx, v):
    out = []
    w = idx.parent[v]
    while w >= 0:
        out.append(int(w))
        w = idx.parent[w]
    return out


def test_c6_formulations():
    worst = 0.0
    cases = {"both-in-U": 0, "mixed": 0, "both-in-V": 0}
    draws = 0
    seed = 5000
    while draws < 50:
        seed += 1
        g = synth.random_connected(seed)
        idx = build_index(g)
        rng = Xoshiro256(seed)
        L = oracle.dense_laplacian(g)
        # a pair split by its LCA's ancestor set, so the cut identity applies
        for _ in range(50):
            s, t = rng.below(g.n), rng.below(g.n)
            if s != t and not idx.is_ancestor(s, t) and not idx.is_ancestor(t, s):
                break
        else:
            continue
        kind = ["both-in-U", "mixed", "both-in-V"][draws % 3]
        size = 1 + rng.below(max(1, g.n // 3))
        V = set()
        while len(V) < size:
            V.add(rng.below(g.n))
        if kind == "both-in-U":
            V -= {s, t}
            if not V:
                V = {next(v for v in range(g.n) if v not in (s, t))}
        elif kind == "mixed":
            V.add(s)
            V.discard(t)
        else:
            V |= {s, t}
        root = rng.below(g.n)
        a = lca(idx, s, t)
        cut = [a] + _ancestors(idx, a)
        values = {
            "pinv": oracle.pseudo_inverse_resistance(L, s, t),
            "grounded": oracle.grounded_resistance(L, root, s, t),
            "partition": oracle.partition_resistance(L, V, s, t),
            "cut": oracle.cut_property_resistance(g, cut, s, t)["total"],
            "labels": query_pair(idx, s, t).resistance,
        }
        vals = np.array(list(values.values()))
        worst = max(worst, float(vals.max() - vals.min()))
        cases[kind] += 1
        draws += 1
    ok = worst <= IDENTITY_TOL
    record("6", ok, f"{draws} draws {cases}, max pairwise spread {worst:.1e}")
    assert ok


def test_c7_source_vs_pair():
    g = synth.planar_like(100, 100, 0.5, seed=7)
    idx = build_index(g)
    rng = Xoshiro256(42)
    sources = rng.sample_ids(20, g.n)
    everyone = np.arange(g.n)
    worst = 0.0
    for s in sources:
        vec = query_source(idx, s).resistance
        pairs = query_pairs(idx, np.full(g.n, s), everyone)
        worst = max(worst, float(np.abs(vec - pairs).max()))

    query_source(idx, 0)
    query_pair(idx, 0, 1)
    start = time.perf_counter()
    for s in sources:
        query_source(idx, s)
    source_time = (time.perf_counter() - start) / len(sources)
    samples = [(rng.below(g.n), rng.below(g.n)) for _ in range(2000)]
    start = time.perf_counter()
    for s, t in samples:
        query_pair(idx, s, t)
    pair_time = (time.perf_counter() - start) / len(samples)
    ok = worst <= IDENTITY_TOL and source_time < g.n * pair_time
    record("7", ok, f"n={g.n}, 20 sources max diff {worst:.1e}; source {source_time * 1e3:.2f} ms "
                    f"vs n*pair {g.n * pair_time * 1e3:.1f} ms")
    assert ok


def _touched_by_walk(idx, s, t):
    """Count label reads of a pair query by walking the tree independently."""
    up_s = [s] + _ancestors(idx, s)
    up_t = set([t] + _ancestors(idx, t))
    common = next(v for v in up_s if v in up_t)
    below_s = up_s.index(common)
    below_t = ([t] + _ancestors(idx, t)).index(common)
    # from the common node up to (not including) the root, both columns are read
    shared = len(_ancestors(idx, common))
    return below_s + below_t + 2 * shared


def test_c8_structural_counts(sweep, example):
    bad = 0
    checked = 0
    for _, g, idx in list(sweep[:20]) + [(0,) + example]:
        if idx.label_count != int(idx.depth.sum()):
            bad += 1
        rng = Xoshiro256(g.n)
        for _ in range(50):
            s, t = rng.below(g.n), rng.below(g.n)
            res = query_pair(idx, s, t)
            if res.labels_touched != _touched_by_walk(idx, s, t) or \
                    res.labels_touched > idx.depth[s] + idx.depth[t]:
                bad += 1
            checked += 1
    g, idx = example
    ok = bad == 0
    record("8", ok, f"labels == sum depth on 21 graphs (example: {idx.label_count}), "
                    f"{checked} pair reads counted, {bad} mismatches")
    assert ok


def test_c9_precision(sweep):
    worst = 0.0
    for _, g, idx in sweep:
        assert g.n <= 200
        R = oracle.resistance_matrix(oracle.dense_laplacian(g))
        for s in range(0, g.n, max(1, g.n // 10)):
            worst = max(worst, float(np.abs(query_source(idx, s).resistance - R[s]).max()))
    ok = worst <= IDENTITY_TOL
    record("9", ok, f"single-source vectors vs oracle on {len(sweep)} graphs, max diff {worst:.1e}")
    assert ok


def _bfs(g, s):
    dist = np.full(g.n, -1)
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u)[0].tolist():
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def test_c10_metric_axioms():
    g = synth.grid_with_chords(12, 12, 30, seed=11)
    idx = build_index(g)
    rng = Xoshiro256(42)
    sym = zero = tri = bfs = 0
    for _ in range(1000):
        a, b, c = rng.below(g.n), rng.below(g.n), rng.below(g.n)
        rab = query_pair(idx, a, b).resistance
        sym += rab != query_pair(idx, b, a).resistance
        zero += query_pair(idx, a, a).resistance != 0.0
        rac = query_pair(idx, a, c).resistance
        rbc = query_pair(idx, b, c).resistance
        tri += rac > rab + rbc + IDENTITY_TOL
        bfs += rab > _bfs(g, a)[b] + IDENTITY_TOL
    ok = sym == zero == tri == bfs == 0
    record("10", ok, f"1000 triples: asymmetric {sym}, nonzero self {zero}, "
                     f"triangle violations {tri}, above hop distance {bfs}")
    assert ok


def test_c11_scale_smoke(tmp_path):
    """Non-gating scale substitute: the line is reported either way."""
    g = synth.grid(200, 200)
    start = time.perf_counter()
    idx = build_index(g)
    build_s = time.perf_counter() - start
    path = tmp_path / "grid.idx"
    labelling.save(idx, str(path))
    back = labelling.load(str(path))
    roundtrip = labelling.to_bytes(back) == labelling.to_bytes(idx)
    rng = Xoshiro256(42)
    h = idx.height
    over = 0
    for _ in range(1000):
        res = query_pair(back, rng.below(g.n), rng.below(g.n))
        over += res.labels_touched > 2 * h
    worst = 0.0
    for s in rng.sample_ids(5, g.n):
        vec = query_source(back, s).resistance
        worst = max(worst, float(np.abs(vec - query_pairs(back, np.full(g.n, s), np.arange(g.n))).max()))
    ok = roundtrip and over == 0 and worst <= IDENTITY_TOL
    record("11", ok, f"200x200 grid built in {build_s:.1f} s (h_G={h}, {idx.label_count} labels), "
                     f"round trip {roundtrip}, pairs over 2*h_G: {over}, 5 sources max diff {worst:.1e} "
                     "[non-gating; road-network build not run]")
    if not ok:
        pytest.xfail("scale smoke test is non-gating")

"""Electrical s-t flow from label columns, and flow-based alternative routes."""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DifferentComponents, NoPath
from .graph import Graph
from .labelling import LabelIndex
from .query import source_column
from .rng import Xoshiro256

RESIDUAL_EPS = 1e-12


@dataclass(eq=False)
class FlowAssignment:
    """Signed flow per undirected edge; positive means lower id -> higher id."""

    s: int
    t: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    flow: np.ndarray
    potential: np.ndarray

    def net_outflow(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        np.add.at(out, self.edge_u, self.flow)
        np.add.at(out, self.edge_v, -self.flow)
        return out

    def on_edge(self, a: int, b: int) -> float:
        """Flow along a -> b (negative when it runs the other way)."""
        u, v, sign = (a, b, 1.0) if a < b else (b, a, -1.0)
        hit = np.flatnonzero((self.edge_u == u) & (self.edge_v == v))
        if not len(hit):
            raise KeyError((a, b))
        return sign * float(self.flow[hit[0]])


@dataclass
class FlowPath:
    nodes: list[int]
    bottleneck: float


@dataclass
class RoutePlan:
    s: int
    t: int
    paths: list[FlowPath]
    length_ratio: float
    diversity: float
    robustness: float
    seed: int
    extra: dict = field(default_factory=dict)


def electrical_flow(idx: LabelIndex, g: Graph, s: int, t: int) -> FlowAssignment:
    """Unit current injected at ``s`` and drawn at ``t``.

    Node potentials are the difference of the two grounded-inverse columns of
    ``s`` and ``t``; each edge carries potential drop times conductance.
    """
    if idx.component[s] != idx.component[t]:
        raise DifferentComponents(s, t)
    us, vs, cs = g.edges()
    if s == t:
        x = np.zeros(g.n)
    else:
        col_s, _ = source_column(idx, s)
        col_t, _ = source_column(idx, t)
        x = col_s - col_t
    return FlowAssignment(s, t, us, vs, (x[us] - x[vs]) * cs, x)


def _widest_value(out_edges, s, t, n):
    best = np.zeros(n)
    best[s] = np.inf
    heap = [(-np.inf, s)]
    done = np.zeros(n, dtype=bool)
    while heap:
        negb, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == t:
            return -negb
        for v, cap in out_edges[u].items():
            b = min(-negb, cap)
            if b > best[v]:
                best[v] = b
                heapq.heappush(heap, (-b, v))
    return 0.0


def _fewest_hops_path(out_edges, s, t, n, floor):
    """Lexicographically smallest among the fewest-hop s->t paths using edges with cap >= floor."""
    into = [[] for _ in range(n)]
    for u in range(n):
        for v, cap in out_edges[u].items():
            if cap >= floor:
                into[v].append(u)
    dist = np.full(n, -1, dtype=np.int64)
    dist[t] = 0
    queue = deque([t])
    while queue:
        v = queue.popleft()
        for u in into[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    if dist[s] < 0:
        return None
    path = [s]
    u = s
    while u != t:
        u = min(v for v, cap in out_edges[u].items() if cap >= floor and dist[v] == dist[u] - 1)
        path.append(u)
    return path


def alternative_paths(f: FlowAssignment, g: Graph, k: int) -> list[FlowPath]:
    """Peel up to ``k`` max-bottleneck paths off the flow.

    Each round picks the path whose smallest residual flow is largest (ties:
    fewer hops, then smaller node sequence) and subtracts that bottleneck
    along it.  Stops early once no positive-flow path is left.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = g.n
    out_edges: list[dict[int, float]] = [dict() for _ in range(n)]
    for u, v, x in zip(f.edge_u.tolist(), f.edge_v.tolist(), f.flow.tolist()):
        if x > RESIDUAL_EPS:
            out_edges[u][v] = x
        elif x < -RESIDUAL_EPS:
            out_edges[v][u] = -x
    paths: list[FlowPath] = []
    for _ in range(k):
        if f.s == f.t:
            break
        width = _widest_value(out_edges, f.s, f.t, n)
        if width <= RESIDUAL_EPS:
            break
        nodes = _fewest_hops_path(out_edges, f.s, f.t, n, width)
        for a, b in zip(nodes, nodes[1:]):
            left = out_edges[a][b] - width
            if left > RESIDUAL_EPS:
                out_edges[a][b] = left
            else:
                del out_edges[a][b]
        paths.append(FlowPath(nodes, width))
    if not paths:
        raise NoPath(f"no positive flow path from {f.s} to {f.t}")
    return paths


def path_edges(nodes: list[int]) -> set[tuple[int, int]]:
    return {(a, b) if a < b else (b, a) for a, b in zip(nodes, nodes[1:])}


def path_length(g: Graph, nodes: list[int]) -> float:
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        nbrs = g.indices[g.indptr[a]: g.indptr[a + 1]]
        total += float(g.length[g.indptr[a] + np.searchsorted(nbrs, b)])
    return total


def shortest_path_length(g: Graph, s: int, t: int) -> float:
    """Dijkstra over the input edge lengths."""
    dist = np.full(g.n, np.inf)
    dist[s] = 0.0
    heap = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == t:
            return d
        lo, hi = g.indptr[u], g.indptr[u + 1]
        for v, w in zip(g.indices[lo:hi].tolist(), g.length[lo:hi].tolist()):
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return float(dist[t])


def jaccard(a: set, b: set) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def _survives(edges: list[tuple[int, int]], alive: np.ndarray, s: int, t: int) -> np.ndarray:
    """Per trial, whether s reaches t through the surviving edges (union-find over trials)."""
    nodes = sorted({x for e in edges for x in e} | {s, t})
    pos = {v: i for i, v in enumerate(nodes)}
    trials = alive.shape[0]
    parent = np.tile(np.arange(len(nodes)), (trials, 1))
    rows = np.arange(trials)

    def find(x):
        while True:
            p = parent[rows, x]
            if np.array_equal(p, x):
                return x
            parent[rows, x] = parent[rows, p]
            x = parent[rows, x]

    for j, (a, b) in enumerate(edges):
        ra = find(np.full(trials, pos[a]))
        rb = find(np.full(trials, pos[b]))
        live = alive[:, j] & (ra != rb)
        parent[rows[live], ra[live]] = rb[live]
    return find(np.full(trials, pos[s])) == find(np.full(trials, pos[t]))


def route_metrics(paths: list[list[int]], g: Graph, shortest_len: float,
                  removal_prob: float, trials: int, seed: int) -> tuple[float, float, float]:
    """Length ratio, diversity (1 - mean pairwise Jaccard) and Monte Carlo robustness.

    Trial ``i`` draws from its own generator seeded with ``seed + i``, one
    uniform per edge of the path union in sorted edge order.
    """
    if not paths:
        raise ValueError("need at least one path")
    length_ratio = float(np.mean([path_length(g, p) / shortest_len for p in paths]))
    sets = [path_edges(p) for p in paths]
    pairs = list(itertools.combinations(sets, 2))
    diversity = 1.0 - (float(np.mean([jaccard(a, b) for a, b in pairs])) if pairs else 1.0)
    s, t = paths[0][0], paths[0][-1]
    union = sorted(set().union(*sets))
    if trials <= 0:
        return length_ratio, diversity, float("nan")
    draws = Xoshiro256.uniform_matrix(seed, trials, len(union))
    alive = draws >= removal_prob
    ok = _survives(union, alive, s, t)
    return length_ratio, diversity, float(ok.mean())


def plan_route(idx: LabelIndex, g: Graph, s: int, t: int, k: int,
               removal_prob: float = 0.001, trials: int = 1000, seed: int = 42) -> RoutePlan:
    f = electrical_flow(idx, g, s, t)
    found = alternative_paths(f, g, k)
    shortest = shortest_path_length(g, s, t)
    length_ratio, diversity, robustness = route_metrics(
        [p.nodes for p in found], g, shortest, removal_prob, trials, seed)
    return RoutePlan(s, t, found, length_ratio, diversity, robustness, seed,
                     extra={"shortest_length": shortest, "removal_prob": removal_prob,
                            "trials": trials})

"""Seeded synthetic graphs for tests and benchmarks."""

from __future__ import annotations

from .graph import EdgeRecord, Graph, build_graph
from .rng import Xoshiro256

# nine-node example graph used throughout the tests, 1-based labels
EXAMPLE_EDGES = [(1, 2), (2, 3), (2, 9), (3, 7), (3, 9), (4, 6), (4, 8),
                 (5, 6), (5, 9), (7, 8), (7, 9), (8, 9)]


def example_graph() -> Graph:
    return build_graph([EdgeRecord(u, v) for u, v in EXAMPLE_EDGES], "unweighted")


def _weight(rng: Xoshiro256, weighted: bool) -> float:
    return 0.5 + 4.5 * rng.random() if weighted else 1.0


def _mode(weighted: bool) -> str:
    return "conductance" if weighted else "unweighted"


def _spanning_tree(rng: Xoshiro256, n: int) -> list[tuple[int, int]]:
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    return [(order[i], order[rng.below(i)]) for i in range(1, n)]


def erdos_renyi(n: int, p: float, seed: int, weighted: bool = False) -> Graph:
    """G(n, p) plus a random spanning tree so the result is connected."""
    rng = Xoshiro256(seed)
    pairs = set()
    for a, b in _spanning_tree(rng, n):
        pairs.add((min(a, b), max(a, b)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                pairs.add((u, v))
    edges = [EdgeRecord(u, v, _weight(rng, weighted)) for u, v in sorted(pairs)]
    return build_graph(edges, _mode(weighted))


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    out = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                out.append((v, v + 1))
            if r + 1 < rows:
                out.append((v, v + cols))
    return out


def grid(rows: int, cols: int) -> Graph:
    return build_graph([EdgeRecord(u, v) for u, v in grid_edges(rows, cols)])


def grid_with_chords(rows: int, cols: int, chords: int, seed: int,
                     weighted: bool = False) -> Graph:
    """Grid plus ``chords`` random extra edges between distinct nodes."""
    rng = Xoshiro256(seed)
    n = rows * cols
    edges = [EdgeRecord(u, v, _weight(rng, weighted)) for u, v in grid_edges(rows, cols)]
    for _ in range(chords):
        u, v = rng.below(n), rng.below(n)
        if u != v:
            edges.append(EdgeRecord(u, v, _weight(rng, weighted)))
    return build_graph(edges, _mode(weighted))


def planar_like(rows: int, cols: int, keep: float, seed: int) -> Graph:
    """Random spanning tree of a grid plus each remaining grid edge with probability ``keep``."""
    rng = Xoshiro256(seed)
    n = rows * cols
    edges = grid_edges(rows, cols)
    # random-weight Kruskal gives a random spanning tree of the grid
    keys = [rng.random() for _ in edges]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for i in sorted(range(len(edges)), key=keys.__getitem__):
        a, b = find(edges[i][0]), find(edges[i][1])
        if a != b:
            parent[a] = b
            chosen.append(edges[i])
        elif rng.random() < keep:
            chosen.append(edges[i])
    return build_graph([EdgeRecord(u, v) for u, v in sorted(chosen)])


def random_connected(seed: int) -> Graph:
    """One draw from the mixed family: ER or grid-with-chords, n in [5, 200], maybe weighted."""
    rng = Xoshiro256(seed)
    weighted = rng.below(2) == 1
    if rng.below(2) == 0:
        n = 5 + rng.below(196)
        p = min(1.0, (1.0 + 3.0 * rng.random()) / n)
        return erdos_renyi(n, p, seed + 1_000_003, weighted)
    rows = 2 + rng.below(13)
    cols = max(3, (5 + rng.below(196)) // rows)
    cols = min(cols, 200 // rows)
    return grid_with_chords(rows, cols, rng.below(rows * cols // 4 + 1), seed + 1_000_003, weighted)


def two_blocks_cut_vertex() -> Graph:
    """Two 4-cycles with chords sharing node 0."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3),
             (0, 4), (4, 5), (5, 6), (6, 0), (4, 6)]
    return build_graph([EdgeRecord(u, v) for u, v in edges])


def two_components() -> Graph:
    edges = [(0, 1), (1, 2), (2, 0), (10, 11), (11, 12), (12, 13), (13, 10)]
    return build_graph([EdgeRecord(u, v) for u, v in edges])

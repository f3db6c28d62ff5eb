"""Minimum-degree elimination tree decomposition and its DFS layout."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import CycleDetected, DisconnectedInput
from .graph import Graph

NO_PARENT = -1


@dataclass(eq=False)
class TreeDecomposition:
    """Elimination forest: one tree node per graph node.

    ``parent[v]`` is ``NO_PARENT`` for roots.  ``bags[v]`` lists ``v`` and its
    neighbours at elimination time.  ``dfs_order``/``depth``/``subtree_size``
    are filled by :func:`dfs_annotate`; subtrees occupy contiguous DFS ranges.
    """

    elimination_order: np.ndarray
    parent: np.ndarray
    bags: list[np.ndarray]
    roots: list[int]
    depth: np.ndarray = field(default=None)
    dfs_order: np.ndarray = field(default=None)
    subtree_size: np.ndarray = field(default=None)
    node_at: np.ndarray = field(default=None)

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return self.roots[0]

    @property
    def height(self) -> int:
        """Nodes on the longest root path (max depth + 1)."""
        return int(self.depth.max()) + 1

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def component_stats(self) -> list[dict]:
        out = []
        for r in self.roots:
            lo = int(self.dfs_order[r])
            members = self.node_at[lo: lo + int(self.subtree_size[r])]
            out.append({
                "root": int(r),
                "size": int(len(members)),
                "height": int(self.depth[members].max()) + 1,
                "width": max(len(self.bags[v]) for v in members.tolist()) - 1,
            })
        return out

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent.tolist()):
            if p != NO_PARENT:
                kids[p].append(v)
        return kids

    def path_to_root(self, u: int) -> list[int]:
        path = [u]
        while self.parent[path[-1]] != NO_PARENT:
            path.append(int(self.parent[path[-1]]))
        return path


def _eliminate(g: Graph) -> tuple[np.ndarray, list[np.ndarray]]:
    n = g.n
    adj = [set(g.indices[g.indptr[u]: g.indptr[u + 1]].tolist()) for u in range(n)]
    ext = g.external_ids.tolist()
    heap = [(len(adj[u]), ext[u], u) for u in range(n)]
    heapq.heapify(heap)
    done = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    bags: list[np.ndarray] = [None] * n
    i = 0
    while heap:
        deg, _, v = heapq.heappop(heap)
        if done[v] or deg != len(adj[v]):
            continue  # stale entry
        done[v] = True
        order[i] = v
        i += 1
        nbrs = adj[v]
        bags[v] = np.array(sorted(nbrs | {v}), dtype=np.int64)
        for u in nbrs:
            au = adj[u]
            au.discard(v)
            au |= nbrs
            au.discard(u)
            heapq.heappush(heap, (len(au), ext[u], u))
        adj[v] = set()
    return order, bags


def _parents(order: np.ndarray, bags: list[np.ndarray]) -> np.ndarray:
    pos = np.empty(len(order), dtype=np.int64)
    pos[order] = np.arange(len(order))
    parent = np.full(len(order), NO_PARENT, dtype=np.int64)
    for v, bag in enumerate(bags):
        others = bag[bag != v]
        if len(others):
            parent[v] = others[np.argmin(pos[others])]
    return parent


def decompose(g: Graph) -> TreeDecomposition:
    """MDE decomposition of every component; one root per component.

    Ties on degree go to the smaller external label, so the result does not
    depend on the line order of the input file.  Roots are listed in
    component-id order and the DFS layout places components in that order.
    """
    order, bags = _eliminate(g)
    parent = _parents(order, bags)
    roots = [int(v) for v in order if parent[v] == NO_PARENT]
    roots.sort(key=lambda r: g.component[r])
    td = TreeDecomposition(elimination_order=order, parent=parent, bags=bags, roots=roots)
    return dfs_annotate(td)


def mde_decompose(g: Graph) -> TreeDecomposition:
    if g.n_components != 1:
        raise DisconnectedInput(g.n_components)
    return decompose(g)


def dfs_annotate(td: TreeDecomposition) -> TreeDecomposition:
    """Fill ``dfs_order``, ``depth``, ``subtree_size`` and ``node_at``.

    Children are visited in increasing id order.
    """
    n = td.n
    kids = td.children()
    depth = np.full(n, -1, dtype=np.int64)
    dfs = np.full(n, -1, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    node_at = np.empty(n, dtype=np.int64)
    counter = 0
    for r in td.roots:
        if td.parent[r] != NO_PARENT or dfs[r] >= 0:
            raise CycleDetected()
        depth[r] = 0
        stack = [(r, 0)]
        while stack:
            v, k = stack.pop()
            if k == 0:
                if dfs[v] >= 0:
                    raise CycleDetected()
                dfs[v] = counter
                node_at[counter] = v
                counter += 1
            if k < len(kids[v]):
                stack.append((v, k + 1))
                c = kids[v][k]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
            elif td.parent[v] != NO_PARENT:
                size[td.parent[v]] += size[v]
    if counter != n:
        raise CycleDetected()
    td.depth, td.dfs_order, td.subtree_size, td.node_at = depth, dfs, size, node_at
    return td


def is_ancestor(td: TreeDecomposition, a: int, u: int) -> bool:
    """True when ``a`` is ``u`` or lies on the tree path from ``u`` to its root."""
    da = td.dfs_order[a]
    return bool(da <= td.dfs_order[u] < da + td.subtree_size[a])

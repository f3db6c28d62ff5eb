from __future__ import annotations

import numpy as np
import pytest

from rdindex import synth
from rdindex.errors import DisconnectedInput
from rdindex.treedecomp import decompose, is_ancestor, mde_decompose


def test_example_tree_shape(example):
    g, _ = example
    td = mde_decompose(g)
    ext = g.external_ids
    assert [int(ext[v]) for v in td.elimination_order] == list(range(1, 10))
    assert td.height == 6 and td.width == 2
    assert [int(ext[v]) for v in td.path_to_root(g.internal(2))] == [2, 3, 7, 8, 9]
    assert [int(ext[v]) for v in td.path_to_root(g.internal(5))] == [5, 6, 8, 9]
    assert td.dfs_order[g.internal(4)] - td.dfs_order[g.internal(8)] == 6


def test_mde_rejects_disconnected(triangle_pair):
    with pytest.raises(DisconnectedInput):
        mde_decompose(triangle_pair)
    td = decompose(triangle_pair)
    assert len(td.roots) == 2
    assert [c["size"] for c in td.component_stats()] == [3, 3]


def _check_decomposition(g, td):
    # every edge lies in some bag, bags are center plus ancestors
    for u, v, _ in zip(*g.edges()):
        assert is_ancestor(td, u, v) or is_ancestor(td, v, u)
    for v in range(g.n):
        bag = td.bags[v]
        assert v in bag
        for w in bag:
            assert is_ancestor(td, w, v)
    # running intersection: nodes holding w in their bag form a connected subtree
    holders = [[] for _ in range(g.n)]
    for v in range(g.n):
        for w in td.bags[v]:
            holders[w].append(v)
    for w, hs in enumerate(holders):
        hs = set(hs)
        tops = [v for v in hs if td.parent[v] not in hs]
        assert len(tops) == 1


@pytest.mark.parametrize("seed", range(10))
def test_decomposition_properties(seed):
    g = synth.random_connected(seed)
    td = decompose(g)
    _check_decomposition(g, td)
    assert td.height == td.depth.max() + 1
    assert td.width == max(len(b) for b in td.bags) - 1
    # DFS numbering gives each subtree a contiguous interval
    for v in range(g.n):
        lo = td.dfs_order[v]
        inside = (td.dfs_order >= lo) & (td.dfs_order < lo + td.subtree_size[v])
        assert all(is_ancestor(td, v, u) for u in np.flatnonzero(inside))
        assert inside.sum() == td.subtree_size[v]


def test_decomposition_deterministic_under_line_order():
    g = synth.random_connected(3)
    us, vs, cs = g.edges()
    from rdindex.graph import EdgeRecord, build_graph
    ext = g.external_ids
    recs = [EdgeRecord(int(ext[u]), int(ext[v]), float(c)) for u, v, c in zip(us, vs, cs)]
    h = build_graph(recs[::-1])
    a, b = decompose(g), decompose(h)
    ea = [int(g.external_ids[v]) for v in a.elimination_order]
    eb = [int(h.external_ids[v]) for v in b.elimination_order]
    assert ea == eb and a.height == b.height


def test_cut_vertex_blocks():
    g = synth.two_blocks_cut_vertex()
    td = decompose(g)
    _check_decomposition(g, td)
    assert td.width == 2

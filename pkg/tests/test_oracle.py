from __future__ import annotations

import numpy as np
import pytest

from rdindex import oracle, synth
from rdindex.errors import Singular, TooLarge, ZeroPivot


def test_example_values(example):
    g, _ = example
    L = oracle.dense_laplacian(g)
    s, t = g.internal(2), g.internal(4)
    assert oracle.pseudo_inverse_resistance(L, s, t) == pytest.approx(1.6082, abs=5e-5)
    assert oracle.pseudo_inverse_resistance(L, g.internal(1), g.internal(9)) == pytest.approx(1.6186, abs=5e-5)


def test_partition_cases_on_example(example):
    g, _ = example
    L = oracle.dense_laplacian(g)
    s, t = g.internal(2), g.internal(4)
    want = oracle.pseudo_inverse_resistance(L, s, t)
    for keep in ([g.internal(x) for x in (7, 8, 9)], [s, g.internal(9)], [s, t]):
        assert oracle.partition_resistance(L, keep, s, t) == pytest.approx(want, abs=1e-12)


def test_cut_property_terms(example):
    g, idx = example
    cut = [g.internal(x) for x in (8, 9)]
    res = oracle.cut_property_resistance(g, cut, g.internal(2), g.internal(4))
    # series-parallel by hand: v2 to the contracted rest is 1 || (1 + (1 || 1.5)) = 8/13
    assert res["r_s"] == pytest.approx(8 / 13)
    assert res["r_t"] == pytest.approx(0.75)
    assert res["total"] == pytest.approx(1.6082, abs=5e-5)


def test_cut_must_separate(example):
    g, _ = example
    with pytest.raises(ValueError):
        oracle.cut_property_resistance(g, [g.internal(9)], g.internal(2), g.internal(4))


def test_schur_of_inverse_is_inverse_of_block():
    g = synth.random_connected(4)
    L = oracle.dense_laplacian(g)
    M = oracle.submatrix_inverse(L, [0])
    keep = list(range(1, g.n // 2))
    direct = np.linalg.inv(L[np.ix_(keep, keep)])
    via = oracle.schur_complement(M[1:, 1:], [k - 1 for k in keep])
    np.testing.assert_allclose(direct, via, atol=1e-10)


def test_schur_complement_is_laplacian():
    g = synth.random_connected(9)
    L = oracle.dense_laplacian(g)
    S = oracle.schur_complement(L, [0, 3, 5])
    np.testing.assert_allclose(S.sum(axis=1), 0.0, atol=1e-10)
    assert np.all(S - np.diag(np.diag(S)) <= 1e-12)


def test_gaussian_elimination_matches_labels(example):
    g, idx = example
    L = oracle.dense_laplacian(g)
    root = idx.roots[0]
    M = oracle.submatrix_inverse(L, [root])
    order = [v for v in idx.node_at[::-1] if v != root][::-1]
    order = sorted(order, key=lambda v: idx.depth[v])  # ancestors first
    _, cols = oracle.gaussian_eliminate_inverse(M, order, return_columns=True)
    for v, col in cols.items():
        lo = idx.dfs_order[v]
        sub = idx.node_at[lo: lo + idx.subtree_size[v]]
        np.testing.assert_allclose(col[sub], idx.labels(v), atol=1e-12)


def test_gaussian_elimination_zero_pivot():
    with pytest.raises(ZeroPivot):
        oracle.gaussian_eliminate_inverse(np.zeros((2, 2)), [0])


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_singular_and_guard(example):
    g, _ = example
    with pytest.raises(Singular):
        oracle.submatrix_inverse(oracle.dense_laplacian(g), [])
    with pytest.raises(TooLarge):
        oracle.dense_laplacian(g, limit=5)


def test_flow_reference_independent_of_root(example):
    g, _ = example
    a = oracle.electrical_flow_reference(g, 1, 3, root=0)
    b = oracle.electrical_flow_reference(g, 1, 3, root=8)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_contract_merges_parallel_edges(example):
    g, _ = example
    keep = [g.internal(x) for x in (1, 2)]
    h, d = oracle.contract(g, keep)
    assert h.n == 3
    # v2 had edges to v3 and v9, both now go to the super node
    assert h.edge_conductance(h.internal(2), d) == 2.0

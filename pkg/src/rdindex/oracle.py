"""Dense reference formulations of resistance distance for small graphs.

Everything here is O(n^3) and exists to cross-check the label index.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import Singular, TooLarge, ZeroPivot
from .graph import EdgeRecord, Graph, build_graph

SIZE_GUARD = 2048
_SINGULAR_TOL = 1e-12


def dense_laplacian(g: Graph, limit: int = SIZE_GUARD) -> np.ndarray:
    if g.n > limit:
        raise TooLarge(g.n, limit)
    L = np.zeros((g.n, g.n))
    rows = np.repeat(np.arange(g.n), g.degree)
    L[rows, g.indices] = -g.conductance
    L[np.arange(g.n), np.arange(g.n)] = g.weighted_degree
    return L


def _inv(A: np.ndarray) -> np.ndarray:
    """Inverse through LU with partial pivoting; raises Singular on a tiny pivot."""
    if A.shape[0] == 0:
        return A.copy()
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.min() <= _SINGULAR_TOL * max(1.0, diag.max()):
        raise Singular("matrix is singular to working precision")
    return scipy.linalg.lu_solve((lu, piv), np.eye(A.shape[0]))


def submatrix_inverse(L: np.ndarray, remove: Iterable[int]) -> np.ndarray:
    """Inverse of ``L`` without the ``remove`` rows/columns, embedded with zeros."""
    n = L.shape[0]
    gone = set(int(v) for v in remove)
    keep = [i for i in range(n) if i not in gone]
    out = np.zeros((n, n))
    out[np.ix_(keep, keep)] = _inv(L[np.ix_(keep, keep)])
    return out


def schur_complement(M: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """``M/keep``: block-eliminate every index outside ``keep`` (rows in sorted ``keep`` order)."""
    keep = sorted(int(v) for v in keep)
    kept = set(keep)
    rest = [i for i in range(M.shape[0]) if i not in kept]
    A = M[np.ix_(keep, keep)]
    if not rest:
        return A.copy()
    B = M[np.ix_(keep, rest)]
    C = M[np.ix_(rest, keep)]
    D = M[np.ix_(rest, rest)]
    return A - B @ _inv(D) @ C


def laplacian_pinv(L: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse of a connected graph's Laplacian via ``(L + J/n)^-1 - J/n``."""
    n = L.shape[0]
    J = np.full((n, n), 1.0 / n)
    return _inv(L + J) - J


def pseudo_inverse_resistance(L: np.ndarray, s: int, t: int) -> float:
    P = laplacian_pinv(L)
    return float(P[s, s] + P[t, t] - 2.0 * P[s, t])


def resistance_matrix(L: np.ndarray) -> np.ndarray:
    """All-pairs resistances of a connected graph from one pseudo-inverse."""
    P = laplacian_pinv(L)
    d = np.diag(P)
    return d[:, None] + d[None, :] - 2.0 * P


def grounded_resistance(L: np.ndarray, root: int, s: int, t: int) -> float:
    """Resistance from the inverse with one grounded node removed."""
    M = submatrix_inverse(L, [root])
    return float(M[s, s] + M[t, t] - 2.0 * M[s, t])


def partition_resistance(L: np.ndarray, keep: Iterable[int], s: int, t: int) -> float:
    """Resistance through the partition (U, V) with V = ``keep``.

    Uses ``p_u`` = row u of ``-L_UU^-1 L_UV`` and the pseudo-inverse of the
    Schur complement ``L/V``; the case (both in U, mixed, both in V) is
    picked from where ``s`` and ``t`` fall.
    """
    n = L.shape[0]
    V = sorted(set(int(v) for v in keep))
    if not V:
        raise ValueError("the kept set V must be nonempty")
    inV = set(V)
    U = [i for i in range(n) if i not in inV]
    vpos = {v: k for k, v in enumerate(V)}
    upos = {u: k for k, u in enumerate(U)}
    schur_pinv = laplacian_pinv(schur_complement(L, V))
    if s == t:
        return 0.0
    if U:
        Luu_inv = _inv(L[np.ix_(U, U)])
        P = -Luu_inv @ L[np.ix_(U, V)]
    if s in inV and t in inV:
        x = np.zeros(len(V))
        x[vpos[s]] += 1.0
        x[vpos[t]] -= 1.0
        return float(x @ schur_pinv @ x)
    if s in inV or t in inV:
        u, v = (t, s) if s in inV else (s, t)
        x = P[upos[u]].copy()
        x[vpos[v]] -= 1.0
        return float(Luu_inv[upos[u], upos[u]] + x @ schur_pinv @ x)
    a, b = upos[s], upos[t]
    direct = Luu_inv[a, a] + Luu_inv[b, b] - 2.0 * Luu_inv[a, b]
    x = P[a] - P[b]
    return float(direct + x @ schur_pinv @ x)


def gaussian_eliminate_inverse(Minv: np.ndarray, eliminate: Sequence[int],
                               return_columns: bool = False):
    """Apply ``S <- S - S[:, v] S[:, v]^T / S[v, v]`` for each ``v`` in order.

    With ``return_columns`` also returns ``{v: column of S just before v's step}``.
    """
    S = np.array(Minv, dtype=float, copy=True)
    cols = {}
    for v in eliminate:
        v = int(v)
        piv = S[v, v]
        if abs(piv) < 1e-14:
            raise ZeroPivot(v)
        col = S[:, v].copy()
        if return_columns:
            cols[v] = col
        S -= np.outer(col, col) / piv
        S[v, :] = 0.0
        S[:, v] = 0.0
    return (S, cols) if return_columns else S


def electrical_flow_reference(g: Graph, s: int, t: int, root: int | None = None):
    """Unit s->t flow on every edge of ``g.edges()`` (positive from lower to higher id)."""
    L = dense_laplacian(g)
    if g.component[s] != g.component[t]:
        raise Singular("source and sink are disconnected")
    members = np.flatnonzero(g.component == g.component[s])
    if root is None:
        root = int(members[-1])
    Lc = L[np.ix_(members, members)]
    pos = {int(v): k for k, v in enumerate(members)}
    Minv = submatrix_inverse(Lc, [pos[root]])
    b = np.zeros(len(members))
    b[pos[s]] += 1.0
    b[pos[t]] -= 1.0
    x = np.zeros(g.n)
    x[members] = Minv @ b
    us, vs, cs = g.edges()
    return (x[us] - x[vs]) * cs


def contract(g: Graph, keep: Iterable[int]) -> tuple[Graph, int]:
    """Collapse every node outside ``keep`` into one super node.

    Returns the contracted graph (parallel edges merged by summing
    conductances) and the internal id of the super node.
    """
    keep = set(int(v) for v in keep)
    delta = int(g.external_ids.max()) + 1
    us, vs, cs = g.edges()
    ext = g.external_ids
    edges = []
    for u, v, c in zip(us.tolist(), vs.tolist(), cs.tolist()):
        a = int(ext[u]) if u in keep else delta
        b = int(ext[v]) if v in keep else delta
        edges.append(EdgeRecord(a, b, c))
    h = build_graph(edges, "conductance")
    return h, h.internal(delta)


def cut_property_resistance(g: Graph, cut: Iterable[int], s: int, t: int) -> dict:
    """Evaluate r(s,t) through the vertex cut ``cut`` separating ``s`` from ``t``.

    Returns the three terms: resistance from s to the contracted rest of its
    side, the same for t, and the sum over cut nodes of
    ``(S[v,s] - S[v,t])^2 / S[v,v]`` where S comes from eliminating the cut
    (one cut node stays grounded).
    """
    cut = [int(v) for v in cut]
    cutset = set(cut)
    if s in cutset or t in cutset:
        raise ValueError("s and t must lie outside the cut")
    L = dense_laplacian(g)
    side_s, side_t = _sides(g, cutset, s, t)
    ground = cut[-1]
    Minv = submatrix_inverse(L, [ground])
    _, cols = gaussian_eliminate_inverse(Minv, cut[:-1], return_columns=True)
    cut_sum = 0.0
    for v, col in cols.items():
        cut_sum += float((col[s] - col[t]) ** 2 / col[v])

    def to_rest(side, x):
        h, d = contract(g, side)
        Lh = dense_laplacian(h)
        return pseudo_inverse_resistance(Lh, h.internal(int(g.external_ids[x])), d)

    r_s = to_rest(side_s, s)
    r_t = to_rest(side_t, t)
    return {"r_s": r_s, "r_t": r_t, "cut_sum": cut_sum, "total": r_s + r_t + cut_sum}


def _sides(g: Graph, cutset: set[int], s: int, t: int) -> tuple[set[int], set[int]]:
    def reach(src):
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v in g.neighbors(u)[0].tolist():
                if v not in seen and v not in cutset:
                    seen.add(v)
                    stack.append(v)
        return seen

    a = reach(s)
    if t in a:
        raise ValueError("the cut does not separate s from t")
    return a, reach(t)

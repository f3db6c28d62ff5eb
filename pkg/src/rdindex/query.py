"""Single-pair and single-source resistance queries over a :class:`LabelIndex`."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DifferentComponents, InvalidId
from .labelling import LabelIndex


@dataclass(frozen=True)
class PairResult:
    s: int
    t: int
    resistance: float
    labels_touched: int

    @property
    def connected(self) -> bool:
        return math.isfinite(self.resistance)


@dataclass(frozen=True, eq=False)
class SourceResult:
    """``column[u]`` is entry (s, u) of the grounded inverse Laplacian of s's component."""

    s: int
    resistance: np.ndarray
    column: np.ndarray
    work: int


def _check(idx: LabelIndex, *nodes: int) -> None:
    for u in nodes:
        if not (isinstance(u, (int, np.integer)) and 0 <= u < idx.n):
            raise InvalidId(u)


@numba.njit(cache=True, nogil=True)
def _lca(parent, depth, s, t):
    a, b = s, t
    while depth[a] > depth[b]:
        a = parent[a]
    while depth[b] > depth[a]:
        b = parent[b]
    while a != b:
        a = parent[a]
        b = parent[b]
    return a


@numba.njit(cache=True, nogil=True)
def _pair(parent, depth, dfs, offsets, values, s, t):
    l = _lca(parent, depth, s, t)
    ds = dfs[s]
    dt = dfs[t]
    side_s = 0.0
    w = s
    while w != l:
        base = offsets[w]
        x = values[base + ds - dfs[w]]
        side_s += x * x / values[base]
        w = parent[w]
    side_t = 0.0
    w = t
    while w != l:
        base = offsets[w]
        x = values[base + dt - dfs[w]]
        side_t += x * x / values[base]
        w = parent[w]
    shared = 0.0
    w = l
    while parent[w] >= 0:
        base = offsets[w]
        x = values[base + ds - dfs[w]] - values[base + dt - dfs[w]]
        shared += x * x / values[base]
        w = parent[w]
    # grouping keeps r(s, t) == r(t, s) bit for bit
    return (side_s + side_t) + shared


@numba.njit(cache=True, nogil=True)
def _pairs_batch(parent, depth, dfs, offsets, values, component, ss, ts, out):
    for i in range(len(ss)):
        if component[ss[i]] != component[ts[i]]:
            out[i] = np.inf
        else:
            out[i] = _pair(parent, depth, dfs, offsets, values, ss[i], ts[i])


@numba.njit(cache=True, nogil=True)
def _column(parent, dfs, size, offsets, values, s, col):
    """Accumulate column s into ``col`` (indexed by DFS position); returns work."""
    ds = dfs[s]
    work = 0
    w = s
    while parent[w] >= 0:
        base = offsets[w]
        ratio = values[base + ds - dfs[w]] / values[base]
        lo = dfs[w]
        for j in range(size[w]):
            col[lo + j] += values[base + j] * ratio
        work += size[w]
        w = parent[w]
    return work


def lca(idx: LabelIndex, s: int, t: int) -> int:
    _check(idx, s, t)
    if idx.component[s] != idx.component[t]:
        raise DifferentComponents(s, t)
    return int(_lca(idx.parent, idx.depth, s, t))


def query_pair(idx: LabelIndex, s: int, t: int) -> PairResult:
    """Resistance between internal ids ``s`` and ``t``; infinite across components."""
    _check(idx, s, t)
    touched = int(idx.depth[s] + idx.depth[t])
    if idx.component[s] != idx.component[t]:
        return PairResult(int(s), int(t), math.inf, 0)
    r = _pair(idx.parent, idx.depth, idx.dfs_order, idx.offsets, idx.values, s, t)
    return PairResult(int(s), int(t), float(r), touched)


def query_pairs(idx: LabelIndex, ss, ts) -> np.ndarray:
    """Vectorised :func:`query_pair` returning only the resistances."""
    ss = np.asarray(ss, dtype=np.int64)
    ts = np.asarray(ts, dtype=np.int64)
    if len(ss) and (min(ss.min(), ts.min()) < 0 or max(ss.max(), ts.max()) >= idx.n):
        raise InvalidId("out of range in batch")
    out = np.empty(len(ss))
    _pairs_batch(idx.parent, idx.depth, idx.dfs_order, idx.offsets, idx.values,
                 idx.component, ss, ts, out)
    return out


def source_column(idx: LabelIndex, s: int) -> tuple[np.ndarray, int]:
    """Column ``s`` of the grounded inverse, indexed by node id, and the work count."""
    _check(idx, s)
    col = np.zeros(idx.n)
    work = _column(idx.parent, idx.dfs_order, idx.subtree_size, idx.offsets, idx.values, s, col)
    return col[idx.dfs_order], int(work)


def query_source(idx: LabelIndex, s: int) -> SourceResult:
    """Resistances from ``s`` to every node in one upward pass."""
    col, work = source_column(idx, s)
    r = idx.diagonal[s] + idx.diagonal - 2.0 * col
    r[idx.component != idx.component[s]] = np.inf
    r[s] = 0.0
    return SourceResult(int(s), r, col, work + idx.n)

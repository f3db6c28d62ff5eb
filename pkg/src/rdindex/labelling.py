"""Resistance-distance labels built by bottom-up rank-1 updates, plus the index file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO

import crc32c
import numba
import numpy as np

from .errors import (
    BadMagic,
    ChecksumMismatch,
    HierarchyViolation,
    NonPositivePivot,
    NotAnAncestor,
    TruncatedFile,
    UnsupportedVersion,
)
from .graph import Graph
from .treedecomp import NO_PARENT, TreeDecomposition

PIVOT_EPS = 1e-12
MAGIC = b"TRIX"
VERSION = 1
_U64_NONE = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass(eq=False)
class LabelIndex:
    """Tree layout plus the label arrays.

    ``values[offsets[v]:offsets[v + 1]]`` holds ``S[v, u]`` for every ``u`` in
    the subtree of ``v``, ordered by DFS position, so ``S[v, v]`` comes first.
    Roots store nothing.  ``diagonal[u]`` is the resistance from ``u`` to the
    root of its component.
    """

    parent: np.ndarray
    dfs_order: np.ndarray
    subtree_size: np.ndarray
    depth: np.ndarray
    roots: list[int]
    offsets: np.ndarray
    values: np.ndarray
    diagonal: np.ndarray
    external_ids: np.ndarray
    weighted: bool

    def __post_init__(self):
        n = self.n
        self.node_at = np.empty(n, dtype=np.int64)
        self.node_at[self.dfs_order] = np.arange(n)
        self.component = np.empty(n, dtype=np.int64)
        for c, r in enumerate(self.roots):
            lo = self.dfs_order[r]
            self.component[self.node_at[lo: lo + self.subtree_size[r]]] = c
        self._ext_to_int = {int(e): i for i, e in enumerate(self.external_ids.tolist())}

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def label_count(self) -> int:
        return int(self.offsets[-1])

    @property
    def height(self) -> int:
        return int(self.depth.max()) + 1

    def labels(self, v: int) -> np.ndarray:
        return self.values[self.offsets[v]: self.offsets[v + 1]]

    def internal(self, label: int) -> int:
        from .errors import InvalidId

        try:
            return self._ext_to_int[int(label)]
        except (KeyError, ValueError, TypeError):
            raise InvalidId(label) from None

    def is_ancestor(self, a: int, u: int) -> bool:
        da = self.dfs_order[a]
        return bool(da <= self.dfs_order[u] < da + self.subtree_size[a])


def label_at(idx: LabelIndex, v: int, u: int) -> float:
    if idx.parent[v] == NO_PARENT and idx.is_ancestor(v, u):
        return 0.0  # roots carry no label
    if not idx.is_ancestor(v, u):
        raise NotAnAncestor(v, u)
    return float(idx.values[idx.offsets[v] + idx.dfs_order[u] - idx.dfs_order[v]])


@numba.njit(cache=True)
def _build_kernel(indptr, indices, cond, parent, dfs, size, node_at, offsets, values, diagonal):
    n = len(parent)
    acc = np.zeros(n)
    ratio = np.zeros(n)
    mark = np.full(n, -1, dtype=np.int64)
    walk = np.empty(n, dtype=np.int64)
    for p in range(n - 1, -1, -1):
        vi = node_at[p]
        if parent[vi] < 0:
            continue
        lo = dfs[vi]
        hi = lo + size[vi]
        degree = 0.0
        nwalk = 0
        for e in range(indptr[vi], indptr[vi + 1]):
            w = indices[e]
            c = cond[e]
            degree += c
            if dfs[w] <= lo:
                continue  # not yet processed
            if dfs[w] >= hi:
                return 1, w, vi, 0.0
            vk = w
            while vk != vi:
                if vk < 0:
                    return 1, w, vi, 0.0
                base = offsets[vk]
                if mark[vk] != vi:
                    mark[vk] = vi
                    ratio[vk] = 0.0
                    walk[nwalk] = vk
                    nwalk += 1
                ratio[vk] += c * values[base + dfs[w] - dfs[vk]] / values[base]
                vk = parent[vk]
        for j in range(lo, hi):
            acc[j] = 0.0
        for q in range(nwalk):
            vk = walk[q]
            r = ratio[vk]
            base = offsets[vk]
            sk = dfs[vk]
            for j in range(size[vk]):
                acc[sk + j] += values[base + j] * r
        denom = degree
        for e in range(indptr[vi], indptr[vi + 1]):
            w = indices[e]
            if dfs[w] > lo:
                denom -= cond[e] * acc[dfs[w]]
        if not denom > 1e-12:
            return 2, vi, vi, denom
        pivot = 1.0 / denom
        base = offsets[vi]
        values[base] = pivot
        diagonal[vi] += pivot
        for j in range(1, hi - lo):
            x = acc[lo + j] * pivot
            values[base + j] = x
            diagonal[node_at[lo + j]] += x * x * denom
    return 0, 0, 0, 0.0


def label_offsets(parent: np.ndarray, subtree_size: np.ndarray) -> np.ndarray:
    lengths = np.where(parent == NO_PARENT, 0, subtree_size)
    offsets = np.zeros(len(parent) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return offsets


def build_labels(g: Graph, td: TreeDecomposition) -> LabelIndex:
    """Compute every label column in reverse DFS order.

    Each non-root ``v`` gets column ``v`` of the inverse of the Laplacian
    block over the nodes already processed (its subtree), obtained from the
    stored columns of its descendants by one rank-1 update.
    """
    offsets = label_offsets(td.parent, td.subtree_size)
    values = np.zeros(int(offsets[-1]))
    diagonal = np.zeros(g.n)
    status, a, b, val = _build_kernel(
        g.indptr, g.indices, g.conductance, td.parent, td.dfs_order,
        td.subtree_size, td.node_at, offsets, values, diagonal,
    )
    if status == 1:
        raise HierarchyViolation(int(a), int(b))
    if status == 2:
        raise NonPositivePivot(int(a), float(val))
    return LabelIndex(
        parent=td.parent.copy(),
        dfs_order=td.dfs_order.copy(),
        subtree_size=td.subtree_size.copy(),
        depth=td.depth.copy(),
        roots=list(td.roots),
        offsets=offsets,
        values=values,
        diagonal=diagonal,
        external_ids=g.external_ids.copy(),
        weighted=g.weighted,
    )


def build_index(g: Graph) -> LabelIndex:
    from .treedecomp import decompose

    return build_labels(g, decompose(g))


def reconstruct_inverse(idx: LabelIndex) -> np.ndarray:
    """Dense sum of ``S[:, v] S[:, v]^T / S[v, v]`` over non-root ``v`` (small n only)."""
    n = idx.n
    out = np.zeros((n, n))
    for v in range(n):
        lab = idx.labels(v)
        if not len(lab):
            continue
        lo = idx.dfs_order[v]
        col = np.zeros(n)
        col[idx.node_at[lo: lo + len(lab)]] = lab
        out += np.outer(col, col) / lab[0]
    return out


# index file ---------------------------------------------------------------

def _write_array(buf: list[bytes], arr: np.ndarray, dtype: str) -> None:
    data = np.ascontiguousarray(arr, dtype=dtype).tobytes()
    buf.append(struct.pack("<Q", len(arr)))
    buf.append(data)


def to_bytes(idx: LabelIndex) -> bytes:
    buf: list[bytes] = [
        MAGIC,
        struct.pack("<IIQQ", VERSION, 1 if idx.weighted else 0, idx.n, len(idx.roots)),
        struct.pack(f"<{len(idx.roots)}Q", *idx.roots),
    ]
    parent = idx.parent.astype(np.int64).view(np.uint64).copy()
    parent[idx.parent == NO_PARENT] = _U64_NONE
    _write_array(buf, parent, "<u8")
    _write_array(buf, idx.dfs_order, "<u8")
    _write_array(buf, idx.subtree_size, "<u8")
    _write_array(buf, idx.depth, "<u4")
    _write_array(buf, idx.offsets, "<u8")
    _write_array(buf, idx.values, "<f8")
    _write_array(buf, idx.diagonal, "<f8")
    _write_array(buf, idx.external_ids, "<u8")
    body = b"".join(buf)
    return body + struct.pack("<I", crc32c.crc32c(body))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, nbytes: int, what: str) -> bytes:
        end = self.pos + nbytes
        if end > len(self.data):
            raise TruncatedFile(what)
        chunk = self.data[self.pos:end]
        self.pos = end
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def array(self, dtype: str, what: str, expect: int | None = None) -> np.ndarray:
        (count,) = self.unpack("<Q", what)
        if expect is not None and count != expect:
            raise TruncatedFile(f"{what} length {count}, expected {expect}")
        dt = np.dtype(dtype)
        return np.frombuffer(self.take(count * dt.itemsize, what), dtype=dt)


def from_bytes(data: bytes) -> LabelIndex:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(bytes(data[:4]))
    rd = _Reader(data)
    rd.take(4, "magic")
    version, flags, n, ncomp = rd.unpack("<IIQQ", "header")
    if version != VERSION:
        raise UnsupportedVersion(version)
    roots = list(rd.unpack(f"<{ncomp}Q", "roots"))
    parent_u = rd.array("<u8", "parent", n)
    dfs = rd.array("<u8", "dfs_order", n)
    size = rd.array("<u8", "subtree_size", n)
    depth = rd.array("<u4", "depth", n)
    offsets = rd.array("<u8", "label offsets", n + 1)
    values = rd.array("<f8", "label values", int(offsets[-1]) if n else 0)
    diagonal = rd.array("<f8", "diagonal", n)
    ext = rd.array("<u8", "id map", n)
    body_end = rd.pos
    (stored,) = rd.unpack("<I", "checksum")
    computed = crc32c.crc32c(data[:body_end])
    if stored != computed:
        raise ChecksumMismatch(stored, computed)
    parent = parent_u.astype(np.int64)
    parent[parent_u == _U64_NONE] = NO_PARENT
    return LabelIndex(
        parent=parent,
        dfs_order=dfs.astype(np.int64),
        subtree_size=size.astype(np.int64),
        depth=depth.astype(np.int64),
        roots=[int(r) for r in roots],
        offsets=offsets.astype(np.int64),
        values=values.astype(np.float64),
        diagonal=diagonal.astype(np.float64),
        external_ids=ext.astype(np.int64),
        weighted=bool(flags & 1),
    )


def serialize(idx: LabelIndex, sink: BinaryIO) -> None:
    sink.write(to_bytes(idx))


def deserialize(source: BinaryIO) -> LabelIndex:
    return from_bytes(source.read())


def save(idx: LabelIndex, path: str) -> None:
    with open(path, "wb") as fh:
        serialize(idx, fh)


def load(path: str) -> LabelIndex:
    with open(path, "rb") as fh:
        return deserialize(fh)

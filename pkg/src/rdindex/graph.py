"""Graph ingestion: edge-list and DIMACS parsing, normalization, components."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    ArcBeforeProblemLine,
    EmptyGraph,
    IdOutOfRange,
    InvalidId,
    MalformedLine,
    MissingProblemLine,
    NegativeWeight,
)

WEIGHT_MODES = ("conductance", "resistance", "unweighted")


class EdgeRecord(NamedTuple):
    u: int
    v: int
    weight: float = 1.0


@dataclass
class ParseReport:
    self_loops: int = 0
    merged_parallels: int = 0
    duplicate_arcs: int = 0

    def __str__(self) -> str:
        return (
            f"dropped {self.self_loops} self-loop(s), merged {self.merged_parallels} "
            f"parallel edge(s), collapsed {self.duplicate_arcs} duplicate arc(s)"
        )

    def emit(self, stream: IO[str] | None = None) -> None:
        print(str(self), file=stream or sys.stderr)


def _parse_label(tok: str) -> int:
    val = int(tok)
    if val < 0:
        raise ValueError(tok)
    return val


def _parse_weight(tok: str, lineno: int) -> float:
    w = float(tok)
    if not np.isfinite(w):
        raise ValueError(tok)
    if w <= 0:
        raise NegativeWeight(lineno)
    return w


def parse_edge_list(stream: Iterable[str]) -> list[EdgeRecord]:
    """Parse whitespace separated ``u v [w]`` lines; ``#`` starts a comment line."""
    edges = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise MalformedLine(lineno, line)
        try:
            u = _parse_label(parts[0])
            v = _parse_label(parts[1])
            w = _parse_weight(parts[2], lineno) if len(parts) == 3 else 1.0
        except ValueError:
            raise MalformedLine(lineno, line) from None
        edges.append(EdgeRecord(u, v, w))
    return edges


def parse_dimacs_gr(stream: Iterable[str], report: ParseReport | None = None) -> list[EdgeRecord]:
    """Parse a 9th DIMACS challenge ``.gr`` file into undirected edges.

    Arcs are 1-based.  Both directions of an edge collapse into one record;
    when their weights disagree the smaller one is kept.
    """
    n = None
    seen: dict[tuple[int, int], int] = {}
    edges: list[EdgeRecord] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if len(parts) != 4 or parts[1] != "sp":
                raise MalformedLine(lineno, line)
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise MalformedLine(lineno, line) from None
        elif tag == "a":
            if n is None:
                raise ArcBeforeProblemLine(lineno)
            if len(parts) != 4:
                raise MalformedLine(lineno, line)
            try:
                u, v = int(parts[1]), int(parts[2])
                w = _parse_weight(parts[3], lineno)
            except ValueError:
                raise MalformedLine(lineno, line) from None
            for x in (u, v):
                if not 1 <= x <= n:
                    raise IdOutOfRange(lineno, x, n)
            key = (u, v) if u <= v else (v, u)
            pos = seen.get(key)
            if pos is None:
                seen[key] = len(edges)
                edges.append(EdgeRecord(u, v, w))
            else:
                if report is not None:
                    report.duplicate_arcs += 1
                if w < edges[pos].weight:
                    edges[pos] = edges[pos]._replace(weight=w)
        else:
            raise MalformedLine(lineno, line)
    if n is None:
        raise MissingProblemLine()
    return edges


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph in CSR form with dense internal ids.

    ``conductance`` holds the Laplacian edge weights.  ``length`` keeps the
    input weight (1 when unweighted) for routing metrics.
    """

    indptr: np.ndarray
    indices: np.ndarray
    conductance: np.ndarray
    length: np.ndarray
    weighted: bool
    external_ids: np.ndarray
    component: np.ndarray
    n_components: int
    report: ParseReport = field(default_factory=ParseReport)
    _ext_to_int: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def weighted_degree(self) -> np.ndarray:
        return np.add.reduceat(self.conductance, self.indptr[:-1]) if self.m else np.zeros(self.n)

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.indices[lo:hi], self.conductance[lo:hi]

    def adjacency(self, u: int) -> list[tuple[int, float]]:
        nbrs, cond = self.neighbors(u)
        return list(zip(nbrs.tolist(), cond.tolist()))

    def edge_conductance(self, u: int, v: int) -> float:
        nbrs, cond = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        if pos < len(nbrs) and nbrs[pos] == v:
            return float(cond[pos])
        return 0.0

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once as ``(u, v, conductance)`` with u < v, sorted."""
        rows = np.repeat(np.arange(self.n), self.degree)
        keep = rows < self.indices
        return rows[keep], self.indices[keep], self.conductance[keep]

    def edge_lengths(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n), self.degree)
        return self.length[rows < self.indices]

    def internal(self, label: int) -> int:
        try:
            return self._ext_to_int[int(label)]
        except (KeyError, ValueError, TypeError):
            raise InvalidId(label) from None

    def external(self, u: int) -> int:
        return int(self.external_ids[u])

    @property
    def id_map(self) -> dict[int, int]:
        return dict(self._ext_to_int)


def build_graph(edges: Iterable[EdgeRecord], weight_mode: str = "conductance",
                report: ParseReport | None = None) -> Graph:
    """Normalize an edge list into a :class:`Graph`.

    Internal ids follow first appearance.  Self-loops are dropped.  Parallel
    edges sum their conductances, except in ``unweighted`` mode where the
    graph is simple and duplicates collapse to conductance 1.
    """
    if weight_mode not in WEIGHT_MODES:
        raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
    report = report if report is not None else ParseReport()
    ext_to_int: dict[int, int] = {}
    merged: dict[tuple[int, int], list[float]] = {}
    saw_edge = False
    for e in edges:
        saw_edge = True
        u, v = int(e.u), int(e.v)
        if u == v:
            report.self_loops += 1
            continue
        w = float(e.weight)
        if not w > 0:
            raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
        iu = ext_to_int.setdefault(u, len(ext_to_int))
        iv = ext_to_int.setdefault(v, len(ext_to_int))
        key = (iu, iv) if iu < iv else (iv, iu)
        if weight_mode == "unweighted":
            c, length = 1.0, 1.0
        elif weight_mode == "resistance":
            c, length = 1.0 / w, w
        else:
            c, length = w, w
        slot = merged.get(key)
        if slot is None:
            merged[key] = [c, length]
        else:
            report.merged_parallels += 1
            if weight_mode != "unweighted":
                slot[0] += c
            slot[1] = min(slot[1], length)
    if not saw_edge:
        raise EmptyGraph()
    if not merged:
        raise EmptyGraph("every edge is a self-loop")

    n = len(ext_to_int)
    keys = np.array(list(merged.keys()), dtype=np.int64)
    vals = np.array(list(merged.values()), dtype=np.float64)
    rows = np.concatenate([keys[:, 0], keys[:, 1]])
    cols = np.concatenate([keys[:, 1], keys[:, 0]])
    cond = np.concatenate([vals[:, 0], vals[:, 0]])
    lens = np.concatenate([vals[:, 1], vals[:, 1]])
    order = np.lexsort((cols, rows))
    rows, cols, cond, lens = rows[order], cols[order], cond[order], lens[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])

    ncomp, labels = connected_components(
        csr_matrix((np.ones(len(cols)), cols, indptr), shape=(n, n)), directed=False
    )
    # relabel so component ids follow first appearance of their lowest node
    _, first = np.unique(labels, return_index=True)
    remap = np.empty(ncomp, dtype=np.int64)
    remap[np.argsort(first)] = np.arange(ncomp)
    external = np.empty(n, dtype=np.int64)
    for label, i in ext_to_int.items():
        external[i] = label
    return Graph(
        indptr=indptr,
        indices=cols,
        conductance=cond,
        length=lens,
        weighted=weight_mode != "unweighted",
        external_ids=external,
        component=remap[labels].astype(np.int64),
        n_components=int(ncomp),
        report=report,
        _ext_to_int=ext_to_int,
    )


def laplacian_row(g: Graph, u: int) -> dict[int, float]:
    nbrs, cond = g.neighbors(u)
    row = {int(v): -float(c) for v, c in zip(nbrs, cond)}
    row[int(u)] = float(cond.sum())
    return dict(sorted(row.items()))


def write_edge_list(g: Graph, stream: IO[str]) -> None:
    """Write ``g`` in the edge-list format; weights are conductances."""
    us, vs, cs = g.edges()
    ext = g.external_ids
    for u, v, c in zip(us.tolist(), vs.tolist(), cs.tolist()):
        if g.weighted:
            stream.write(f"{ext[u]} {ext[v]} {c!r}\n")
        else:
            stream.write(f"{ext[u]} {ext[v]}\n")


def read_graph(path: str, fmt: str = "edgelist", weight_mode: str | None = None) -> Graph:
    """Load a graph file; DIMACS travel times default to resistance weights."""
    report = ParseReport()
    with open(path, encoding="utf-8") as fh:
        if fmt == "dimacs":
            edges = parse_dimacs_gr(fh, report)
            mode = weight_mode or "resistance"
        elif fmt == "edgelist":
            edges = parse_edge_list(fh)
            mode = weight_mode or "conductance"
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return build_graph(edges, mode, report)

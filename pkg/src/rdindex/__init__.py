"""Exact resistance-distance queries from tree-decomposition labels."""

from __future__ import annotations

from .flow import alternative_paths, electrical_flow, plan_route
from .graph import Graph, build_graph, read_graph
from .labelling import LabelIndex, build_index, build_labels, load, save
from .query import lca, query_pair, query_pairs, query_source
from .treedecomp import TreeDecomposition, decompose, mde_decompose

__all__ = [
    "Graph", "build_graph", "read_graph",
    "TreeDecomposition", "decompose", "mde_decompose",
    "LabelIndex", "build_labels", "build_index", "load", "save",
    "lca", "query_pair", "query_pairs", "query_source",
    "electrical_flow", "alternative_paths", "plan_route",
]

"""Exception hierarchy shared by every module."""

from __future__ import annotations


class RDIndexError(Exception):
    """Base class for all errors raised by rdindex."""


class InputError(RDIndexError):
    """Problems with user-supplied graph files or ids (CLI exit code 1)."""


class MalformedLine(InputError):
    def __init__(self, line: int, text: str = ""):
        self.line = line
        super().__init__(f"malformed line {line}: {text!r}")


class NegativeWeight(InputError):
    def __init__(self, line: int):
        self.line = line
        super().__init__(f"non-positive weight on line {line}")


class MissingProblemLine(InputError):
    def __init__(self):
        super().__init__("DIMACS input has no 'p sp n m' line")


class ArcBeforeProblemLine(InputError):
    def __init__(self, line: int):
        self.line = line
        super().__init__(f"arc on line {line} precedes the problem line")


class IdOutOfRange(InputError):
    def __init__(self, line: int, node: int, n: int):
        self.line = line
        self.node = node
        super().__init__(f"node id {node} on line {line} outside 1..{n}")


class EmptyGraph(InputError):
    def __init__(self, msg: str = "graph has no edges"):
        super().__init__(msg)


class InvalidId(InputError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"unknown node id {node!r}")


class BuildError(RDIndexError):
    """Failures while decomposing or labelling (CLI exit code 2)."""


class DisconnectedInput(BuildError):
    def __init__(self, n_components: int):
        self.n_components = n_components
        super().__init__(f"graph has {n_components} connected components")


class CycleDetected(BuildError):
    def __init__(self):
        super().__init__("parent array does not describe a forest")


class NonPositivePivot(BuildError):
    def __init__(self, node: int, value: float):
        self.node = node
        self.value = value
        super().__init__(f"pivot for node {node} is {value!r}")


class HierarchyViolation(BuildError):
    def __init__(self, neighbor: int, node: int):
        self.neighbor = neighbor
        self.node = node
        super().__init__(f"neighbor {neighbor} is not below {node} in the tree")


class NotAnAncestor(RDIndexError):
    def __init__(self, v: int, u: int):
        self.v = v
        self.u = u
        super().__init__(f"{v} is not an ancestor-or-self of {u}")


class DifferentComponents(RDIndexError):
    def __init__(self, s: int, t: int):
        self.s = s
        self.t = t
        super().__init__(f"nodes {s} and {t} lie in different components")


class IndexFormatError(InputError):
    """Unreadable index file."""


class BadMagic(IndexFormatError):
    def __init__(self, found: bytes):
        super().__init__(f"bad magic {found!r}")


class UnsupportedVersion(IndexFormatError):
    def __init__(self, version: int):
        self.version = version
        super().__init__(f"unsupported index version {version}")


class TruncatedFile(IndexFormatError):
    def __init__(self, what: str = "file"):
        super().__init__(f"truncated index ({what})")


class ChecksumMismatch(IndexFormatError):
    def __init__(self, stored: int, computed: int):
        super().__init__(f"CRC-32C mismatch: stored {stored:#010x}, computed {computed:#010x}")


class TooLarge(RDIndexError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"dense oracle refuses n={n} (limit {limit})")


class Singular(RDIndexError):
    pass


class ZeroPivot(RDIndexError):
    def __init__(self, node: int):
        self.node = node
        super().__init__(f"zero pivot when eliminating {node}")


class NoPath(RDIndexError):
    pass

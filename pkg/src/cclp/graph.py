"""Immutable undirected simple graphs and local-structure primitives."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Sequence, TextIO

import numpy as np
from scipy import sparse

from . import _kernels
from .exceptions import EdgeListParseError, EmptyGraphError, InvalidNodeError

__all__ = [
    "EdgeListOptions",
    "Graph",
    "LoadInfo",
    "NodePair",
    "clustering_coefficient",
    "common_neighbors",
    "condensed_index",
    "dump_edge_list",
    "lcl",
    "load_edge_list",
    "neighbors",
    "pair_from_condensed",
    "triangle_count",
]


class NodePair(NamedTuple):
    """Unordered node pair stored canonically with ``x < y``."""

    x: int
    y: int

    @classmethod
    def of(cls, a: int, b: int) -> "NodePair":
        a, b = int(a), int(b)
        if a == b:
            raise InvalidNodeError(f"a node pair needs two distinct nodes, got ({a}, {b})")
        return cls(a, b) if a < b else cls(b, a)


def condensed_index(n: int, xs, ys) -> np.ndarray:
    """Position of pairs ``x < y`` in the length ``n(n-1)/2`` condensed vector."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    return n * xs - (xs * (xs + 1)) // 2 + (ys - xs - 1)


def pair_from_condensed(n: int, idx) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`condensed_index`."""
    idx = np.asarray(idx, dtype=np.int64)
    # row start offsets; searchsorted is exact where the closed form is not
    starts = condensed_index(n, np.arange(n), np.arange(n) + 1)
    xs = np.searchsorted(starts, idx, side="right") - 1
    ys = idx - starts[xs] + xs + 1
    return xs, ys


@dataclass(frozen=True)
class EdgeListOptions:
    """Parsing switches for :func:`load_edge_list`.

    With ``symmetrize`` off, the input is read as directed and only mutual
    links (both ``a b`` and ``b a`` present) are kept.
    """

    comment_prefixes: frozenset[str] = frozenset({"#", "%"})
    symmetrize: bool = True
    drop_self_loops: bool = True


@dataclass(frozen=True)
class LoadInfo:
    lines_read: int = 0
    duplicates_dropped: int = 0
    self_loops_dropped: int = 0
    non_mutual_dropped: int = 0


class Graph:
    """Undirected simple graph on dense ids ``0..n-1`` in CSR form.

    Neighbour lists are sorted so intersections are linear merges. Instances
    are never mutated after construction and may be shared between threads.

    Parameters
    ----------
    indptr, indices : array-like
        CSR structure; row ``x`` holds the sorted neighbours of ``x``.
    labels : sequence, optional
        External label of every dense id. Defaults to the ids themselves.
    """

    __slots__ = ("indptr", "indices", "labels", "load_info", "_label_index", "_edge_keys")

    def __init__(self, indptr, indices, labels: Sequence[Hashable] | None = None,
                 load_info: LoadInfo | None = None):
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int32)
        n = indptr.shape[0] - 1
        if labels is None:
            labels = list(range(n))
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} nodes")
        indptr.flags.writeable = False
        indices.flags.writeable = False
        self.indptr = indptr
        self.indices = indices
        self.labels = tuple(labels)
        self.load_info = load_info or LoadInfo()
        self._label_index = None
        self._edge_keys = None

    @classmethod
    def from_edges(cls, edges, n_nodes: int | None = None,
                   labels: Sequence[Hashable] | None = None,
                   load_info: LoadInfo | None = None) -> "Graph":
        """Build from an ``(m, 2)`` array of dense ids.

        Duplicates and reversed copies collapse; self-loops are rejected.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n_nodes is None:
            n_nodes = len(labels) if labels is not None else (int(edges.max()) + 1 if edges.size else 0)
        if edges.size and (edges.min() < 0 or edges.max() >= n_nodes):
            raise InvalidNodeError("edge endpoint outside 0..n_nodes-1")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed in a simple graph")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        keys = np.unique(lo * n_nodes + hi) if n_nodes else np.empty(0, np.int64)
        lo, hi = keys // max(n_nodes, 1), keys % max(n_nodes, 1)
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_nodes), out=indptr[1:])
        return cls(indptr, cols, labels=labels, load_info=load_info)

    @classmethod
    def from_networkx(cls, G) -> "Graph":
        nodes = list(G.nodes())
        pos = {v: i for i, v in enumerate(nodes)}
        edges = [(pos[u], pos[v]) for u, v in G.edges() if u != v]
        return cls.from_edges(np.array(edges, dtype=np.int64).reshape(-1, 2), n_nodes=len(nodes), labels=nodes)

    @property
    def node_count(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self) -> int:
        return self.indices.shape[0] // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def _check(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.node_count:
            raise InvalidNodeError(f"node id {x} outside 0..{self.node_count - 1}")
        return x

    def neighbors(self, x: int) -> np.ndarray:
        x = self._check(x)
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    def degree(self, x: int) -> int:
        x = self._check(x)
        return int(self.indptr[x + 1] - self.indptr[x])

    def has_edge(self, x: int, y: int) -> bool:
        nb = self.neighbors(x)
        y = self._check(y)
        i = np.searchsorted(nb, y)
        return bool(i < nb.shape[0] and nb[i] == y)

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``x < y``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        cols = self.indices.astype(np.int64)
        keep = rows < cols
        return np.column_stack([rows[keep], cols[keep]])

    def edge_keys(self) -> np.ndarray:
        """Sorted condensed indices of all edges."""
        if self._edge_keys is None:
            e = self.edges()
            keys = condensed_index(self.node_count, e[:, 0], e[:, 1])
            keys.flags.writeable = False
            self._edge_keys = keys
        return self._edge_keys

    def without_edges(self, pairs) -> "Graph":
        """Copy with the given edges removed; every node is retained."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        n = self.node_count
        drop = condensed_index(n, pairs.min(axis=1), pairs.max(axis=1))
        keys = self.edge_keys()
        if not np.isin(drop, keys).all():
            raise ValueError("cannot remove a pair that is not an edge")
        kept = self.edges()[~np.isin(keys, drop)]
        return Graph.from_edges(kept, n_nodes=n, labels=self.labels)

    def to_scipy(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.shape[0], dtype=np.float64)
        n = self.node_count
        return sparse.csr_matrix((data, self.indices.astype(np.int64), self.indptr), shape=(n, n))

    def id_of(self, label) -> int:
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_index[label]
        except KeyError:
            raise InvalidNodeError(f"unknown node label {label!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and self.labels == other.labels)

    __hash__ = None

    def __repr__(self):
        return f"Graph(node_count={self.node_count}, edge_count={self.edge_count})"


def load_edge_list(source: TextIO | str | Iterable[str],
                   options: EdgeListOptions | None = None) -> Graph:
    """Read a whitespace-separated edge list.

    Columns beyond the second (weights, timestamps) are ignored. Labels are
    kept as strings and mapped to dense ids in order of first appearance.

    Raises
    ------
    EdgeListParseError
        A non-comment line has fewer than two tokens.
    EmptyGraphError
        No edge survives parsing.
    """
    options = options or EdgeListOptions()
    if isinstance(source, str):
        source = io.StringIO(source)
    prefixes = tuple(options.comment_prefixes)
    index: dict[str, int] = {}
    labels: list[str] = []
    src, dst = [], []
    self_loops = 0
    lines = 0
    for lineno, line in enumerate(source, start=1):
        lines = lineno
        stripped = line.strip()
        if not stripped or (prefixes and stripped.startswith(prefixes)):
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise EdgeListParseError(f"line {lineno}: expected two node labels, got {stripped!r}", lineno)
        a, b = tokens[0], tokens[1]
        if a == b:
            if options.drop_self_loops:
                self_loops += 1
                continue
            raise EdgeListParseError(f"line {lineno}: self-loop on {a!r}", lineno)
        for lab in (a, b):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
        src.append(index[a])
        dst.append(index[b])
    if not src:
        raise EmptyGraphError("edge list contains no edges")

    n = len(labels)
    s = np.asarray(src, dtype=np.int64)
    d = np.asarray(dst, dtype=np.int64)
    non_mutual = 0
    if options.symmetrize:
        lo, hi = np.minimum(s, d), np.maximum(s, d)
        keys = lo * n + hi
        unique = np.unique(keys)
    else:
        directed = np.unique(s * n + d)
        reverse = (directed % n) * n + directed // n
        mutual = directed[np.isin(directed, reverse)]
        lo, hi = mutual // n, mutual % n
        unique = np.unique(np.minimum(lo, hi) * n + np.maximum(lo, hi))
        non_mutual = int(directed.shape[0] - mutual.shape[0])
        keys = s * n + d
        if unique.size == 0:
            raise EmptyGraphError("no mutual links in directed edge list")
    dup = int(keys.shape[0] - (np.unique(keys).shape[0]))
    info = LoadInfo(lines_read=lines, duplicates_dropped=dup,
                    self_loops_dropped=self_loops, non_mutual_dropped=non_mutual)
    edges = np.column_stack([unique // n, unique % n])
    return Graph.from_edges(edges, n_nodes=n, labels=labels, load_info=info)


def dump_edge_list(g: Graph, out: TextIO | None = None) -> str:
    """Canonical edge list: dense ids, ``x < y``, lexicographic order."""
    text = "".join(f"{x} {y}\n" for x, y in g.edges().tolist())
    if out is not None:
        out.write(text)
    return text


def neighbors(g: Graph, x: int) -> np.ndarray:
    """Sorted, read-only neighbour array of ``x``."""
    return g.neighbors(x)


def common_neighbors(g: Graph, x: int, y: int) -> np.ndarray:
    p = NodePair.of(g._check(x), g._check(y))
    ip, ix = g.indptr, g.indices
    out = np.empty(min(g.degree(p.x), g.degree(p.y)), dtype=ix.dtype)
    m = _kernels.intersect_into(ix, ip[p.x], ip[p.x + 1], ip[p.y], ip[p.y + 1], out)
    return out[:m]


def triangle_count(g: Graph, z: int) -> int:
    """Number of edges among the neighbours of ``z``."""
    z = g._check(z)
    ip, ix = g.indptr, g.indices
    total = 0
    for u in ix[ip[z]:ip[z + 1]]:
        total += _kernels.intersect_count(ix, ip[z], ip[z + 1], ip[u], ip[u + 1])
    return total // 2


def clustering_coefficient(g: Graph, z: int) -> float:
    """Local clustering coefficient; 0 for nodes of degree below two."""
    k = g.degree(z)
    if k < 2:
        return 0.0
    return triangle_count(g, z) / (k * (k - 1) / 2)


def lcl(g: Graph, x: int, y: int) -> int:
    """Number of links between the common neighbours of ``x`` and ``y``."""
    p = NodePair.of(g._check(x), g._check(y))
    scratch = np.empty(max(int(g.degrees.max(initial=0)), 1), dtype=g.indices.dtype)
    _, links = _kernels.lcl_pair(g.indptr, g.indices, p.x, p.y, scratch)
    return int(links)

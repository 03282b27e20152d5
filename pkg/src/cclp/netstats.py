"""Whole-network statistics: degree, distance, clustering and LCP-corr."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .exceptions import DegenerateInputError, EmptyGraphError, ParameterError
from .graph import Graph
from .indices import build_context

__all__ = [
    "NetworkSummary",
    "average_degree",
    "average_shortest_distance",
    "lcp_corr",
    "network_clustering",
    "summarize",
]

SUMMARY_FIELDS = ("dataset", "N", "M", "k_avg", "d_avg", "CC", "LCP_corr", "components")


@dataclass(frozen=True)
class NetworkSummary:
    n_nodes: int
    n_edges: int
    avg_degree: float
    avg_shortest_distance: float
    clustering: float
    lcp_corr: float
    connected_component_count: int

    def row(self, dataset: str = "") -> dict:
        """Fields in report order, keyed by the CSV header names."""
        return dict(zip(SUMMARY_FIELDS, (
            dataset, self.n_nodes, self.n_edges, self.avg_degree,
            self.avg_shortest_distance, self.clustering, self.lcp_corr,
            self.connected_component_count)))

    def as_dict(self) -> dict:
        return asdict(self)


def average_degree(g: Graph) -> float:
    if g.node_count == 0:
        raise EmptyGraphError("average degree of an empty graph")
    return 2.0 * g.edge_count / g.node_count


def average_shortest_distance(g: Graph, max_sources: int | None = None,
                              seed: int = 0) -> float:
    """Mean hop distance over connected, unordered node pairs.

    Runs an exact BFS from every node unless ``max_sources`` is given and
    smaller than the node count, in which case a seeded uniform sample of
    sources is used (an estimate).
    """
    n = g.node_count
    if n < 2:
        raise DegenerateInputError("average distance needs at least two nodes")
    if max_sources is not None and max_sources < n:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=max_sources, replace=False)).astype(np.int64)
    else:
        sources = np.arange(n, dtype=np.int64)
    sums, counts = _kernels.bfs_distance_sums(g.indptr, g.indices, sources)
    reached = int(counts.sum())
    if reached == 0:
        raise DegenerateInputError("no pair of distinct nodes is connected")
    return float(sums.sum()) / reached


def network_clustering(g: Graph) -> float:
    """Unweighted mean of local clustering coefficients (0 for degree < 2)."""
    if g.node_count == 0:
        raise EmptyGraphError("clustering of an empty graph")
    return float(np.mean(build_context(g).clustering))


def _cn_lcl(g: Graph, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ones = np.ones(g.node_count)
    cn = np.empty(xs.shape[0])
    car = np.empty(xs.shape[0])
    _kernels.score_pairs(g.indptr, g.indices, ones, _kernels.MODE_WEIGHTED, xs, ys, cn)
    _kernels.score_pairs(g.indptr, g.indices, ones, _kernels.MODE_CAR, xs, ys, car)
    lcl = np.zeros_like(cn)
    np.divide(car, cn, out=lcl, where=cn > 0)
    return cn, lcl


def lcp_corr(g: Graph, population: str = "edges") -> float:
    """Pearson correlation between CN and LCL over pairs with CN > 1.

    Parameters
    ----------
    population : {"edges", "pairs"}
        ``"edges"`` samples the observed links; ``"pairs"`` every unordered
        node pair (linked or not) with more than one common neighbour.

    Returns
    -------
    float
        NaN when fewer than two pairs qualify or either variable is constant.
    """
    if population == "edges":
        e = g.edges()
        xs, ys = np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1])
    elif population == "pairs":
        a = g.to_scipy()
        two_hop = (a @ a).tocoo()
        keep = (two_hop.row < two_hop.col) & (two_hop.data > 1)
        xs = np.ascontiguousarray(two_hop.row[keep], dtype=np.int64)
        ys = np.ascontiguousarray(two_hop.col[keep], dtype=np.int64)
    else:
        raise ParameterError(f"population must be 'edges' or 'pairs', got {population!r}")
    cn, lcl = _cn_lcl(g, xs, ys)
    sel = cn > 1
    cn, lcl = cn[sel], lcl[sel]
    if cn.shape[0] < 2 or np.ptp(cn) == 0 or np.ptp(lcl) == 0:
        return math.nan
    dc = cn - cn.mean()
    dl = lcl - lcl.mean()
    r = float(np.dot(dc, dl) / math.sqrt(np.dot(dc, dc) * np.dot(dl, dl)))
    return max(-1.0, min(1.0, r))


def summarize(g: Graph, lcp_population: str = "edges",
              max_sources: int | None = None) -> NetworkSummary:
    n_comp, _ = connected_components(g.to_scipy(), directed=False)
    try:
        d = average_shortest_distance(g, max_sources=max_sources)
    except DegenerateInputError:
        d = math.nan
    return NetworkSummary(
        n_nodes=g.node_count,
        n_edges=g.edge_count,
        avg_degree=average_degree(g),
        avg_shortest_distance=d,
        clustering=network_clustering(g),
        lcp_corr=lcp_corr(g, population=lcp_population),
        connected_component_count=int(n_comp),
    )

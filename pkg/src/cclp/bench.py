"""Wall-clock timing of all-pairs scoring."""
from __future__ import annotations

import statistics
import time

import numpy as np

from .graph import Graph, pair_from_condensed
from .indices import IndexKind, build_context, score_all_pairs


def synthetic_graph(n: int, avg_degree: float, seed: int = 0) -> Graph:
    """Uniform random graph with ``round(n * avg_degree / 2)`` distinct edges."""
    m = int(round(n * avg_degree / 2))
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError(f"{m} edges do not fit on {n} nodes")
    rng = np.random.default_rng(seed)
    keys = np.unique(rng.integers(0, total, size=m))
    while keys.shape[0] < m:
        keys = np.unique(np.concatenate([keys, rng.integers(0, total, size=m - keys.shape[0])]))
    xs, ys = pair_from_condensed(n, keys)
    return Graph.from_edges(np.column_stack([xs, ys]), n_nodes=n)


def time_scoring(g: Graph, kind, repeats: int = 3, n_threads: int = 1,
                 warmup: bool = True) -> list[float]:
    """Seconds per full pass: context construction plus every pair scored."""
    kind = IndexKind.parse(kind)
    if warmup:
        score_all_pairs(g, build_context(g), kind, n_threads=n_threads)
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        score_all_pairs(g, build_context(g), kind, n_threads=n_threads)
        times.append(time.perf_counter() - t)
    return times


def median_time(g: Graph, kind, repeats: int = 3, n_threads: int = 1) -> float:
    return statistics.median(time_scoring(g, kind, repeats=repeats, n_threads=n_threads))

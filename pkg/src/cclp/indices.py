"""Local similarity indices and ranked candidate lists.

Scores are computed by merging sorted neighbour arrays, one pair at a time.
Per-node weights (degrees, clustering) are precomputed once per graph in a
:class:`NodeContext`, so CN, AA, RA and CCLP share the same kernel and
differ only in the weight summed over common neighbours.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import _kernels
from .exceptions import ParameterError
from .graph import Graph, NodePair, condensed_index, pair_from_condensed

__all__ = [
    "IndexKind",
    "NodeContext",
    "ScoredPair",
    "ScoredPairs",
    "build_context",
    "non_edges",
    "pair_keys",
    "random_uniform",
    "rank",
    "score_all_pairs",
    "score_candidates",
    "score_pair",
    "score_pairs",
    "tiebreak_keys",
    "top_ranked",
]


class IndexKind(str, enum.Enum):
    PA = "pa"
    CN = "cn"
    JC = "jc"
    AA = "aa"
    RA = "ra"
    CAR = "car"
    CCLP = "cclp"
    RANDOM = "random"

    @classmethod
    def parse(cls, name) -> "IndexKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ",".join(k.value for k in cls)
            raise ParameterError(f"unknown index {name!r}; valid: {valid}") from None

    @property
    def label(self) -> str:
        return self.name

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NodeContext:
    """Per-node quantities of one (training) graph."""

    degrees: np.ndarray
    triangles: np.ndarray
    clustering: np.ndarray

    @property
    def node_count(self) -> int:
        return self.degrees.shape[0]


def build_context(g: Graph) -> NodeContext:
    deg = g.degrees.astype(np.int64)
    tri = _kernels.triangle_counts(g.indptr, g.indices)
    possible = deg * (deg - 1) / 2.0
    cc = np.zeros(deg.shape[0], dtype=np.float64)
    np.divide(tri, possible, out=cc, where=deg >= 2)
    for a in (deg, tri, cc):
        a.flags.writeable = False
    return NodeContext(degrees=deg, triangles=tri, clustering=cc)


def _kernel_args(ctx: NodeContext, kind: IndexKind):
    deg = ctx.degrees
    if kind is IndexKind.PA:
        return _kernels.MODE_PA, np.zeros(1)
    if kind is IndexKind.JC:
        return _kernels.MODE_JACCARD, np.zeros(1)
    if kind is IndexKind.CAR:
        return _kernels.MODE_CAR, np.zeros(1)
    if kind is IndexKind.CN:
        w = np.ones(deg.shape[0])
    elif kind is IndexKind.AA:
        # a common neighbour always has degree >= 2, so ln(k) > 0 where used
        w = np.zeros(deg.shape[0])
        np.divide(1.0, np.log(np.maximum(deg, 1)), out=w, where=deg >= 2)
    elif kind is IndexKind.RA:
        w = np.zeros(deg.shape[0])
        np.divide(1.0, deg, out=w, where=deg >= 1)
    elif kind is IndexKind.CCLP:
        w = np.asarray(ctx.clustering, dtype=np.float64)
    else:
        raise ParameterError(f"{kind} has no kernel")
    return _kernels.MODE_WEIGHTED, np.ascontiguousarray(w)


# --- seeded per-pair randomness -------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SALT_TIEBREAK = 0x5BD1E995
_SALT_RANDOM = 0x2545F491


def _splitmix(keys: np.ndarray, seed: int, salt: int) -> np.ndarray:
    z = np.asarray(keys, dtype=np.uint64) * _GOLDEN
    z = z + np.uint64((int(seed) * 0x100000001B3 ^ salt) & 0xFFFFFFFFFFFFFFFF)
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def pair_keys(g: Graph, xs, ys) -> np.ndarray:
    return condensed_index(g.node_count, xs, ys)


def tiebreak_keys(keys, seed: int) -> np.ndarray:
    """Seeded tie-break key of each pair, a pure function of (seed, pair)."""
    return _splitmix(np.atleast_1d(keys), seed, _SALT_TIEBREAK)


def random_uniform(keys, seed: int) -> np.ndarray:
    """Seeded uniform [0, 1) score of each pair, a pure function of (seed, pair)."""
    h = _splitmix(np.atleast_1d(keys), seed, _SALT_RANDOM)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


# --- scoring ----------------------------------------------------------------

def score_pair(g: Graph, ctx: NodeContext, kind, x: int, y: int,
               rng: np.random.Generator | None = None) -> float:
    """Score a single pair. ``RANDOM`` draws from ``rng``."""
    kind = IndexKind.parse(kind)
    p = NodePair.of(g._check(x), g._check(y))
    if kind is IndexKind.RANDOM:
        rng = rng if rng is not None else np.random.default_rng()
        return float(rng.random())
    out = np.empty(1)
    mode, w = _kernel_args(ctx, kind)
    _kernels.score_pairs(g.indptr, g.indices, w, mode,
                         np.array([p.x], np.int64), np.array([p.y], np.int64), out)
    return float(out[0])


def _as_pairs(g: Graph, pairs) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    xs = np.minimum(pairs[:, 0], pairs[:, 1])
    ys = np.maximum(pairs[:, 0], pairs[:, 1])
    n = g.node_count
    if pairs.size and (xs.min() < 0 or ys.max() >= n):
        raise ParameterError(f"pair endpoint outside 0..{n - 1}")
    if np.any(xs == ys):
        raise ParameterError("pair with identical endpoints")
    return np.ascontiguousarray(xs), np.ascontiguousarray(ys)


def score_pairs(g: Graph, ctx: NodeContext, kind, pairs, seed: int = 0) -> np.ndarray:
    """Vector of scores for an ``(m, 2)`` array of pairs.

    ``RANDOM`` scores are seeded per pair, so the result does not depend on
    the order of ``pairs``.
    """
    kind = IndexKind.parse(kind)
    xs, ys = _as_pairs(g, pairs)
    if kind is IndexKind.RANDOM:
        return random_uniform(pair_keys(g, xs, ys), seed)
    out = np.empty(xs.shape[0], dtype=np.float64)
    mode, w = _kernel_args(ctx, kind)
    _kernels.score_pairs(g.indptr, g.indices, w, mode, xs, ys, out)
    return out


def _row_chunks(n: int, parts: int) -> list[tuple[int, int]]:
    per_row = np.arange(n - 1, -1, -1, dtype=np.int64)
    cum = np.cumsum(per_row)
    total = int(cum[-1]) if n else 0
    bounds = [0]
    for i in range(1, parts):
        bounds.append(int(np.searchsorted(cum, total * i // parts)) + 1)
    bounds.append(n)
    bounds = sorted(set(min(b, n) for b in bounds))
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def score_all_pairs(g: Graph, ctx: NodeContext, kind, seed: int = 0,
                    n_threads: int = 1) -> np.ndarray:
    """Scores of all ``n(n-1)/2`` pairs in condensed order, edges included.

    Rows are split into contiguous blocks scored on ``n_threads`` threads;
    every pair's score is independent of the split.
    """
    kind = IndexKind.parse(kind)
    n = g.node_count
    size = n * (n - 1) // 2
    if kind is IndexKind.RANDOM:
        return random_uniform(np.arange(size, dtype=np.int64), seed)
    out = np.empty(size, dtype=np.float64)
    if size == 0:
        return out
    mode, w = _kernel_args(ctx, kind)
    n_threads = max(1, int(n_threads))
    chunks = _row_chunks(n, n_threads * 4 if n_threads > 1 else 1)
    if n_threads == 1:
        for a, b in chunks:
            _kernels.score_rows(g.indptr, g.indices, w, mode, a, b, out)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(lambda ab: _kernels.score_rows(g.indptr, g.indices, w, mode, ab[0], ab[1], out),
                          chunks))
    return out


def non_edges(g: Graph) -> np.ndarray:
    """All unordered non-adjacent pairs ``x < y`` in lexicographic order."""
    n = g.node_count
    mask = np.ones(n * (n - 1) // 2, dtype=bool)
    mask[g.edge_keys()] = False
    xs, ys = pair_from_condensed(n, np.flatnonzero(mask))
    return np.column_stack([xs, ys])


# --- ranking ----------------------------------------------------------------

class ScoredPair(NamedTuple):
    pair: NodePair
    score: float
    tiebreak: int


@dataclass(frozen=True)
class ScoredPairs:
    """Column-oriented sequence of scored pairs."""

    x: np.ndarray
    y: np.ndarray
    score: np.ndarray
    tiebreak: np.ndarray

    def __len__(self):
        return self.x.shape[0]

    def __getitem__(self, item):
        if isinstance(item, (int, np.integer)):
            return ScoredPair(NodePair(int(self.x[item]), int(self.y[item])),
                              float(self.score[item]), int(self.tiebreak[item]))
        return ScoredPairs(self.x[item], self.y[item], self.score[item], self.tiebreak[item])

    def __iter__(self) -> Iterator[ScoredPair]:
        for i in range(len(self)):
            yield self[i]

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])


def score_candidates(g: Graph, ctx: NodeContext, kind, candidates, seed: int = 0) -> ScoredPairs:
    """Score candidate pairs and attach their seeded tie-break keys."""
    xs, ys = _as_pairs(g, candidates)
    scores = score_pairs(g, ctx, kind, np.column_stack([xs, ys]), seed=seed)
    tb = tiebreak_keys(pair_keys(g, xs, ys), seed)
    return ScoredPairs(xs, ys, scores, tb)


def rank(scored: ScoredPairs) -> ScoredPairs:
    """Order by score descending, then tie-break key ascending."""
    if not np.all(np.isfinite(scored.score)):
        raise ParameterError("cannot rank non-finite scores")
    order = np.lexsort((scored.tiebreak, -scored.score))
    return scored[order]


def top_ranked(scores: np.ndarray, tiebreak_of, k: int) -> np.ndarray:
    """Positions of the ``k`` best entries of ``scores``, best first.

    Same order as a full :func:`rank`, but only entries tied at the cut-off
    need a tie-break key. ``tiebreak_of`` maps an array of positions to their
    keys.
    """
    m = scores.shape[0]
    k = min(int(k), m)
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    if k < m:
        kth = np.partition(scores, m - k)[m - k]
        above = np.flatnonzero(scores > kth)
        tied = np.flatnonzero(scores == kth)
    else:
        above = np.arange(m)
        tied = np.empty(0, dtype=np.int64)
    chosen = np.concatenate([above, tied])
    tb = tiebreak_of(chosen)
    order = np.lexsort((tb, -scores[chosen]))
    return chosen[order][:k]

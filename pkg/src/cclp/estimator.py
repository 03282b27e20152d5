"""scikit-learn style wrappers around the similarity indices."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .exceptions import InvalidNodeError
from .graph import Graph, load_edge_list
from .indices import (IndexKind, ScoredPairs, build_context, non_edges, rank,
                      score_candidates, score_pairs, top_ranked, tiebreak_keys, pair_keys)

__all__ = ["SimilarityFeatures", "SimilarityLinkPredictor", "check_edges", "check_pairs"]


def check_edges(X) -> Graph:
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a Graph, or an ``(m, 2)`` array of node labels. Integer arrays
    are taken as dense ids ``0..max``; anything else is mapped to dense ids
    in order of first appearance.
    """
    if isinstance(X, Graph):
        return X
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError(f"expected an (n_edges, 2) array, got shape {arr.shape}")
    if np.issubdtype(arr.dtype, np.integer):
        arr = check_array(arr[:, :2], dtype=np.int64, ensure_min_samples=1)
        if arr.min() < 0:
            raise ValueError("integer node ids must be non-negative")
        arr = arr[arr[:, 0] != arr[:, 1]]
        return Graph.from_edges(arr, n_nodes=int(np.asarray(X)[:, :2].max()) + 1)
    return load_edge_list(f"{a} {b}\n" for a, b in arr[:, :2].tolist())


def check_pairs(X, graph: Graph) -> np.ndarray:
    """Validate query pairs against ``graph`` and return dense ids."""
    arr = np.asarray(X)
    if arr.ndim == 1 and arr.shape[0] == 2:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n_pairs, 2) array, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer) or _has_string_labels(graph):
        arr = np.array([[graph.id_of(_label(graph, a)), graph.id_of(_label(graph, b))]
                        for a, b in arr.tolist()], dtype=np.int64).reshape(-1, 2)
    arr = check_array(arr, dtype=np.int64, ensure_min_samples=0)
    if arr.size and (arr.min() < 0 or arr.max() >= graph.node_count):
        raise InvalidNodeError(f"node id outside 0..{graph.node_count - 1}")
    return arr


def _has_string_labels(graph: Graph) -> bool:
    return bool(graph.labels) and isinstance(graph.labels[0], str)


def _label(graph: Graph, v):
    return str(v) if _has_string_labels(graph) else v


class SimilarityLinkPredictor(BaseEstimator):
    """Score unobserved links of a graph with one local similarity index.

    Parameters
    ----------
    index : str, default="cclp"
        One of ``pa, cn, jc, aa, ra, car, cclp, random``.
    threshold : float, default=0.0
        ``predict`` marks a pair as a link when its score exceeds this.
    random_state : int, default=0
        Seed for ``random`` scores and tie-breaking.

    Attributes
    ----------
    graph_ : Graph
    context_ : NodeContext
    """

    def __init__(self, index="cclp", threshold=0.0, random_state=0):
        self.index = index
        self.threshold = threshold
        self.random_state = random_state

    def fit(self, X, y=None):
        self.graph_ = check_edges(X)
        self.context_ = build_context(self.graph_)
        self.index_ = IndexKind.parse(self.index)
        self.n_nodes_ = self.graph_.node_count
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "graph_")
        pairs = check_pairs(X, self.graph_)
        return score_pairs(self.graph_, self.context_, self.index_, pairs, seed=self.random_state)

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > self.threshold).astype(np.int64)

    def rank_candidates(self, top_k: int | None = None) -> ScoredPairs:
        """Non-edges of the fitted graph, best first."""
        check_is_fitted(self, "graph_")
        scored = score_candidates(self.graph_, self.context_, self.index_,
                                  non_edges(self.graph_), seed=self.random_state)
        if top_k is None:
            return rank(scored)
        keys = pair_keys(self.graph_, scored.x, scored.y)
        pos = top_ranked(scored.score, lambda p: tiebreak_keys(keys[p], self.random_state), top_k)
        return scored[pos]


class SimilarityFeatures(TransformerMixin, BaseEstimator):
    """Pair features made of several similarity indices.

    ``fit`` takes the observed graph, ``transform`` maps an ``(n, 2)`` pair
    array to an ``(n, len(indices))`` score matrix, suitable as input to any
    scikit-learn classifier.
    """

    def __init__(self, indices=("cn", "aa", "ra", "car", "cclp"), random_state=0):
        self.indices = indices
        self.random_state = random_state

    def fit(self, X, y=None):
        self.graph_ = check_edges(X)
        self.context_ = build_context(self.graph_)
        self.kinds_ = [IndexKind.parse(k) for k in self.indices]
        self.n_features_out_ = len(self.kinds_)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "graph_")
        pairs = check_pairs(X, self.graph_)
        cols = [score_pairs(self.graph_, self.context_, k, pairs, seed=self.random_state)
                for k in self.kinds_]
        return np.column_stack(cols) if cols else np.empty((pairs.shape[0], 0))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "kinds_")
        return np.array([k.value for k in self.kinds_], dtype=object)

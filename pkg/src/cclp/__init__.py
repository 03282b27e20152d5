"""Local link-prediction indices built around the clustering coefficient of
common neighbours (CCLP), with CN/JC/AA/RA/PA/CAR comparators and a seeded
evaluation harness."""
from .exceptions import (CCLPError, DatasetError, DegenerateInputError, EdgeListParseError,
                         EmptyGraphError, InvalidNodeError, ParameterError)
from .graph import (EdgeListOptions, Graph, NodePair, clustering_coefficient, common_neighbors,
                    dump_edge_list, lcl, load_edge_list, neighbors, triangle_count)
from .indices import (IndexKind, NodeContext, ScoredPair, ScoredPairs, build_context, rank,
                      score_all_pairs, score_candidates, score_pair, score_pairs)
from .netstats import (NetworkSummary, average_degree, average_shortest_distance, lcp_corr,
                       network_clustering, summarize)
from .evaluation import (ExperimentReport, MetricParams, SplitResult, aup, auc, auc_exact,
                         precision_at, run_experiment, split_edges)
from .estimator import SimilarityFeatures, SimilarityLinkPredictor

__version__ = "0.1.0"

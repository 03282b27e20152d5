"""Random edge hold-out, precision/AUP/AUC, and the multi-run driver."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateInputError, ParameterError
from .graph import Graph, condensed_index, pair_from_condensed
from .indices import (IndexKind, NodeContext, ScoredPairs, build_context,
                      score_all_pairs, score_pairs, tiebreak_keys, top_ranked)

__all__ = [
    "ExperimentReport",
    "MetricParams",
    "SplitResult",
    "aup",
    "auc",
    "auc_exact",
    "precision_at",
    "precision_curve",
    "probe_size",
    "run_experiment",
    "run_seed",
    "split_edges",
]

METRICS = ("precision", "aup", "auc")
CURVE_POINTS = 10


@dataclass(frozen=True)
class SplitResult:
    train: Graph
    probe: np.ndarray  # (k, 2), x < y
    seed: int
    probe_fraction: float

    @property
    def probe_keys(self) -> np.ndarray:
        return np.sort(condensed_index(self.train.node_count, self.probe[:, 0], self.probe[:, 1]))


def probe_size(m: int, fraction: float) -> int:
    """Round-half-up of ``fraction * m``."""
    return int(math.floor(fraction * m + 0.5))


def split_edges(g: Graph, fraction: float = 0.1, seed: int = 0) -> SplitResult:
    """Hold out a uniform random subset of edges as the probe set.

    Nodes left isolated in the training graph are kept; no connectivity
    constraint is imposed.
    """
    if not 0 < fraction < 1:
        raise ParameterError(f"probe fraction must lie in (0, 1), got {fraction}")
    m = g.edge_count
    k = probe_size(m, fraction)
    if k < 1 or k >= m:
        raise ParameterError(f"fraction {fraction} of {m} edges leaves an empty probe or training set")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(m, size=k, replace=False))
    probe = g.edges()[chosen]
    return SplitResult(train=g.without_edges(probe), probe=probe, seed=seed, probe_fraction=fraction)


@dataclass(frozen=True)
class MetricParams:
    L_max: int
    auc_comparisons: int = 100_000
    runs: int = 1

    def __post_init__(self):
        if self.L_max < 1 or self.auc_comparisons < 1 or self.runs < 1:
            raise ParameterError(f"L_max, auc_comparisons and runs must be positive: {self}")

    @classmethod
    def auto(cls, g: Graph, L_max: int | None = None, runs: int | None = None,
             auc_comparisons: int = 100_000) -> "MetricParams":
        """Defaults sized to the network.

        ``L_max`` is 20 below 1000 links, else 100; ``runs`` is 1000 below
        1000 nodes, else 300.
        """
        if L_max is None:
            L_max = 20 if g.edge_count < 1000 else 100
        if runs is None:
            runs = 1000 if g.node_count < 1000 else 300
        return cls(L_max=L_max, auc_comparisons=auc_comparisons, runs=runs)


# --- metrics on a ranking ---------------------------------------------------

def _codes(pairs) -> np.ndarray:
    if isinstance(pairs, ScoredPairs):
        x, y = pairs.x, pairs.y
    else:
        if isinstance(pairs, (set, frozenset)):
            pairs = list(pairs)
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        x, y = arr[:, 0], arr[:, 1]
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    return (np.minimum(x, y) << 32) | np.maximum(x, y)


def _hits(ranked, probe, L: int) -> np.ndarray:
    if L < 1:
        raise ParameterError(f"L must be positive, got {L}")
    if L > len(ranked):
        raise ParameterError(f"L={L} exceeds the {len(ranked)} ranked candidates")
    return np.isin(_codes(ranked[:L]), _codes(probe))


def precision_at(ranked, probe, L: int) -> float:
    """Fraction of the first ``L`` ranked pairs that are probe links."""
    return float(_hits(ranked, probe, L).sum()) / L


def precision_curve(ranked, probe, L_max: int) -> np.ndarray:
    """Precision at ``L_max/10, 2*L_max/10, ..., L_max``."""
    if L_max % CURVE_POINTS:
        raise ParameterError(f"L_max must be a multiple of {CURVE_POINTS}, got {L_max}")
    hits = np.cumsum(_hits(ranked, probe, L_max))
    ls = np.arange(1, CURVE_POINTS + 1) * (L_max // CURVE_POINTS)
    return hits[ls - 1] / ls


def aup(ranked, probe, L_max: int) -> float:
    """Area under the precision curve as the mean of its ten points."""
    return float(np.mean(precision_curve(ranked, probe, L_max)))


# --- AUC ----------------------------------------------------------------------

def _observed_keys(train: Graph, probe) -> np.ndarray:
    probe = np.asarray(probe, dtype=np.int64).reshape(-1, 2)
    pk = condensed_index(train.node_count, probe.min(axis=1), probe.max(axis=1))
    return np.union1d(train.edge_keys(), pk)


def _sample_nonexistent(n: int, observed: np.ndarray, count: int,
                        rng: np.random.Generator) -> np.ndarray:
    total = n * (n - 1) // 2
    free = total - observed.shape[0]
    if free <= 0:
        raise DegenerateInputError("no nonexistent pairs to compare against")
    found = []
    need = count
    while need > 0:
        batch = int(need * total / free * 1.1) + 32
        k = rng.integers(0, total, size=batch)
        pos = np.minimum(np.searchsorted(observed, k), max(observed.shape[0] - 1, 0))
        ok = k[observed[pos] != k] if observed.size else k
        found.append(ok[:need])
        need -= found[-1].shape[0]
    return np.concatenate(found)


def _auc_samples(train: Graph, probe, n: int, rng: np.random.Generator):
    probe = np.asarray(probe, dtype=np.int64).reshape(-1, 2)
    if probe.shape[0] == 0:
        raise DegenerateInputError("empty probe set")
    chosen = probe[rng.integers(0, probe.shape[0], size=n)]
    keys = _sample_nonexistent(train.node_count, _observed_keys(train, probe), n, rng)
    xs, ys = pair_from_condensed(train.node_count, keys)
    return chosen, np.column_stack([xs, ys])


def _auc_compare(train, ctx, kind, probe_s, non_s, rng) -> float:
    n = probe_s.shape[0]
    if kind is IndexKind.RANDOM:
        sp = rng.random(n)
        sn = rng.random(n)
    else:
        sp = score_pairs(train, ctx, kind, probe_s)
        sn = score_pairs(train, ctx, kind, non_s)
    higher = np.count_nonzero(sp > sn)
    ties = np.count_nonzero(sp == sn)
    return (higher + 0.5 * ties) / n


def auc(train: Graph, ctx: NodeContext, kind, probe, n: int = 100_000, seed: int = 0) -> float:
    """Sampled AUC from ``n`` independent probe-vs-nonexistent comparisons.

    Nonexistent pairs are the non-edges of ``train`` that are not in
    ``probe``. Equal scores count one half. ``RANDOM`` scores are drawn
    afresh for every comparison. For a fixed seed every index sees the same
    sampled pairs.
    """
    kind = IndexKind.parse(kind)
    if n < 1:
        raise ParameterError("number of comparisons must be positive")
    rng = np.random.default_rng(seed)
    probe_s, non_s = _auc_samples(train, probe, n, rng)
    return _auc_compare(train, ctx, kind, probe_s, non_s, rng)


def auc_exact(train: Graph, ctx: NodeContext, kind, probe, seed: int = 0) -> float:
    """AUC over every (probe, nonexistent) pair; memory grows as ``N^2``."""
    kind = IndexKind.parse(kind)
    probe = np.asarray(probe, dtype=np.int64).reshape(-1, 2)
    if probe.shape[0] == 0:
        raise DegenerateInputError("empty probe set")
    n = train.node_count
    allscores = score_all_pairs(train, ctx, kind, seed=seed)
    observed = _observed_keys(train, probe)
    mask = np.ones(allscores.shape[0], dtype=bool)
    mask[observed] = False
    non = np.sort(allscores[mask])
    if non.size == 0:
        raise DegenerateInputError("no nonexistent pairs to compare against")
    pk = condensed_index(n, probe.min(axis=1), probe.max(axis=1))
    sp = allscores[pk]
    lo = np.searchsorted(non, sp, side="left")
    hi = np.searchsorted(non, sp, side="right")
    return float((lo.sum() + 0.5 * (hi - lo).sum()) / (sp.shape[0] * non.shape[0]))


# --- experiment driver ------------------------------------------------------

@dataclass
class ExperimentReport:
    dataset: str
    index: IndexKind
    runs: int
    seed: int
    params: MetricParams
    metrics: dict = field(default_factory=dict)   # name -> (mean, std)
    curve: np.ndarray | None = None               # mean precision at L_max/10 * (1..10)
    wall_ms: tuple = ()

    def mean(self, metric: str) -> float:
        return self.metrics[metric][0]

    def std(self, metric: str) -> float:
        return self.metrics[metric][1]


def run_seed(master_seed: int, r: int) -> int:
    """Seed of run ``r``, a pure function of the master seed and run index."""
    if master_seed < 0:
        raise ParameterError("seed must be non-negative")
    state = np.random.SeedSequence([int(master_seed), int(r)]).generate_state(2, np.uint32)
    return (int(state[0]) << 31) | (int(state[1]) >> 1)


def _one_run(g, kinds, params, seed, probe_fraction, metrics, exact_auc, n_threads):
    split = split_edges(g, probe_fraction, seed)
    train = split.train
    t0 = time.perf_counter()
    ctx = build_context(train)
    shared_ms = (time.perf_counter() - t0) * 1e3
    out = {}
    need_rank = "precision" in metrics or "aup" in metrics
    if need_rank:
        cand = np.ones(g.node_count * (g.node_count - 1) // 2, dtype=bool)
        cand[train.edge_keys()] = False
        cand = np.flatnonzero(cand)
        if params.L_max > cand.shape[0]:
            raise ParameterError(f"L_max={params.L_max} exceeds {cand.shape[0]} candidates")
        probe_keys = split.probe_keys
    if "auc" in metrics and not exact_auc:
        rng = np.random.default_rng(seed)
        probe_s, non_s = _auc_samples(train, split.probe, params.auc_comparisons, rng)
        rng_state = rng.bit_generator.state
    for kind in kinds:
        t = time.perf_counter()
        res = {}
        if need_rank:
            scores = score_all_pairs(train, ctx, kind, seed=seed, n_threads=n_threads)[cand]
            top = top_ranked(scores, lambda pos: tiebreak_keys(cand[pos], seed), params.L_max)
            hits = np.cumsum(np.isin(cand[top], probe_keys))
            res["precision"] = float(hits[-1] / params.L_max)
            if params.L_max % CURVE_POINTS == 0:
                ls = np.arange(1, CURVE_POINTS + 1) * (params.L_max // CURVE_POINTS)
                curve = hits[ls - 1] / ls
                res["aup"] = float(curve.mean())
                res["_curve"] = curve
        if "auc" in metrics:
            if exact_auc:
                res["auc"] = auc_exact(train, ctx, kind, split.probe, seed=seed)
            else:
                rng = np.random.default_rng()
                rng.bit_generator.state = rng_state
                res["auc"] = _auc_compare(train, ctx, kind, probe_s, non_s, rng)
        res["_ms"] = shared_ms + (time.perf_counter() - t) * 1e3
        out[kind] = res
    return out


def run_experiment(g: Graph, kinds, params: MetricParams | None = None, master_seed: int = 0,
                   dataset: str = "", probe_fraction: float = 0.1, metrics=METRICS,
                   auc_exact: bool = False, n_jobs: int = 1, n_threads: int = 1) -> list[ExperimentReport]:
    """Average precision, AUP and AUC over independent random splits.

    Every index is scored on the same split in a given run, and each run's
    seed depends only on ``(master_seed, run index)``, so reports are
    identical for any ``n_jobs``. The context (degrees, clustering) is built
    from the training graph alone.

    Parameters
    ----------
    kinds : iterable of IndexKind or str
    params : MetricParams, optional
        Defaults to :meth:`MetricParams.auto`.
    n_jobs : int
        Runs executed concurrently on threads.
    n_threads : int
        Threads used inside each all-pairs scoring pass.

    Returns
    -------
    list of ExperimentReport
        One per index, in the order given. Standard deviations are
        population (``ddof=0``) values over runs.
    """
    kinds = [IndexKind.parse(k) for k in kinds]
    params = params or MetricParams.auto(g)
    metrics = tuple(metrics)
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ParameterError(f"unknown metrics {sorted(unknown)}")
    if "aup" in metrics and params.L_max % CURVE_POINTS:
        raise ParameterError(f"L_max must be a multiple of {CURVE_POINTS} for aup")
    seeds = [run_seed(master_seed, r) for r in range(params.runs)]

    def job(r):
        try:
            return _one_run(g, kinds, params, seeds[r], probe_fraction, metrics, auc_exact, n_threads)
        except Exception as exc:
            exc.args = (f"run {r}: {exc}",) + exc.args[1:]
            raise

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(job, range(params.runs)))
    else:
        results = [job(r) for r in range(params.runs)]

    reports = []
    for kind in kinds:
        per_run = [res[kind] for res in results]
        rep = ExperimentReport(dataset=dataset, index=kind, runs=params.runs, seed=master_seed,
                               params=params, wall_ms=tuple(res["_ms"] for res in per_run))
        for m in metrics:
            vals = np.array([res[m] for res in per_run])
            rep.metrics[m] = (float(vals.mean()), float(vals.std()))
        if "_curve" in per_run[0]:
            rep.curve = np.mean([res["_curve"] for res in per_run], axis=0)
        reports.append(rep)
    return reports

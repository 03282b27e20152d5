"""Command-line entry point: ``cclp {stats,evaluate,predict,bench}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from .bench import synthetic_graph, time_scoring
from .datasets import DATA_DIR_ENV, Registry
from .evaluation import CURVE_POINTS, MetricParams, run_experiment
from .exceptions import (CCLPError, DatasetError, DegenerateInputError, EdgeListParseError,
                         EmptyGraphError, InvalidNodeError, ParameterError)
from .estimator import SimilarityLinkPredictor
from .indices import IndexKind
from .netstats import SUMMARY_FIELDS, summarize

log = logging.getLogger("cclp")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

EVALUATE_FIELDS = ("dataset", "index", "metric", "mean", "stddev", "runs", "seed",
                   "param_L", "param_n", "wall_ms")
PREDICT_FIELDS = ("label_x", "label_y", "score")
BENCH_FIELDS = ("dataset", "index", "N", "M", "pairs", "repeats", "threads", "median_ms", "min_ms")
RATIO_FIELD = "cclp_vs_car"


class UsageError(CCLPError):
    pass


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".10g")
    return str(v)


def _write(rows: list[dict], fields, fmt: str, out) -> None:
    if fmt == "json":
        clean = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.items()}
                 for r in rows]
        json.dump(clean, out, indent=2)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r.get(f, "")) for f in fields])


def _split_list(values) -> list[str]:
    out = []
    for v in values or []:
        out.extend(s for s in v.split(",") if s)
    return out


def _threads(value: str) -> int:
    if value == "auto":
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("thread count must be positive")
    return n


def _auto_int(value: str):
    if value == "auto":
        return None
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("value must be positive")
    return n


def _kinds(names) -> list[IndexKind]:
    try:
        return [IndexKind.parse(n) for n in names]
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def _datasets(args, registry) -> list[str]:
    names = _split_list(args.dataset)
    if not names:
        raise UsageError("at least one --dataset is required")
    return names


# --- subcommands ------------------------------------------------------------

def cmd_stats(args, registry, out) -> list[dict]:
    rows = []
    for name in _datasets(args, registry):
        entry, g = registry.load(name)
        summary = summarize(g, lcp_population=args.lcp_population, max_sources=args.max_sources)
        rows.append(summary.row(entry.id))
    _write(rows, SUMMARY_FIELDS, args.out, out)
    return rows


def cmd_evaluate(args, registry, out) -> list[dict]:
    kinds = _kinds(_split_list(args.indices))
    metrics = tuple(_split_list(args.metrics))
    rows = []
    with_ratio = IndexKind.CCLP in kinds and IndexKind.CAR in kinds
    fields = EVALUATE_FIELDS + ((RATIO_FIELD,) if with_ratio else ())
    for name in _datasets(args, registry):
        entry, g = registry.load(name)
        params = MetricParams.auto(g, L_max=args.lmax, runs=args.runs, auc_comparisons=args.auc_n)
        reports = run_experiment(g, kinds, params, master_seed=args.seed, dataset=entry.id,
                                 probe_fraction=args.probe_frac, metrics=metrics,
                                 auc_exact=args.auc_exact, n_jobs=args.threads)
        by_kind = {r.index: r for r in reports}
        for rep in reports:
            wall = float(np.mean(rep.wall_ms))
            base = dict(dataset=entry.id, index=rep.index.value, runs=rep.runs, seed=rep.seed,
                        param_L=params.L_max,
                        param_n="exact" if args.auc_exact else params.auc_comparisons,
                        wall_ms=round(wall, 3))
            for m in metrics:
                row = dict(base, metric=m, mean=rep.mean(m), stddev=rep.std(m))
                if with_ratio:
                    row[RATIO_FIELD] = _ratio(by_kind[IndexKind.CCLP].mean(m), by_kind[IndexKind.CAR].mean(m))
                rows.append(row)
            if args.curve and rep.curve is not None:
                step = params.L_max // CURVE_POINTS
                for i, p in enumerate(rep.curve, start=1):
                    row = dict(base, metric=f"precision@{i * step}", mean=float(p), stddev="")
                    if with_ratio:
                        row[RATIO_FIELD] = _ratio(by_kind[IndexKind.CCLP].curve[i - 1],
                                                  by_kind[IndexKind.CAR].curve[i - 1])
                    rows.append(row)
    _write(rows, fields, args.out, out)
    return rows


def _ratio(cclp: float, car: float) -> float:
    """Relative improvement of CCLP over CAR, in percent."""
    if car == 0:
        return math.nan if cclp == 0 else math.inf
    return round(100.0 * (cclp - car) / car, 2)


def cmd_predict(args, registry, out) -> list[dict]:
    names = _split_list(args.dataset)
    if len(names) != 1:
        raise UsageError("predict takes exactly one --dataset")
    kind = _kinds([args.index])[0]
    _, g = registry.load(names[0])
    n_candidates = g.node_count * (g.node_count - 1) // 2 - g.edge_count
    top_k = args.top_k
    if top_k == 0:
        log.warning("top-k is 0; nothing to emit")
    elif top_k > n_candidates:
        log.warning("top-k %d exceeds %d candidate pairs; truncating", top_k, n_candidates)
        top_k = n_candidates
    rows = []
    if top_k > 0:
        model = SimilarityLinkPredictor(index=kind.value, random_state=args.seed).fit(g)
        for sp in model.rank_candidates(top_k):
            rows.append(dict(label_x=g.labels[sp.pair.x], label_y=g.labels[sp.pair.y], score=sp.score))
    _write(rows, PREDICT_FIELDS, args.out, out)
    return rows


def cmd_bench(args, registry, out) -> list[dict]:
    kinds = _kinds(_split_list(args.indices))
    graphs = []
    for name in _split_list(args.dataset):
        entry, g = registry.load(name)
        graphs.append((entry.id, g))
    for n in _split_list(args.synthetic):
        n = int(n)
        graphs.append((f"synthetic-n{n}-k{_fmt(args.avg_degree)}",
                       synthetic_graph(n, args.avg_degree, seed=args.seed)))
    if kinds and not graphs:
        raise UsageError("bench needs --dataset or --synthetic")
    rows = []
    for name, g in graphs:
        for kind in kinds:
            times = time_scoring(g, kind, repeats=args.repeats, n_threads=args.threads)
            rows.append(dict(dataset=name, index=kind.value, N=g.node_count, M=g.edge_count,
                             pairs=g.node_count * (g.node_count - 1) // 2, repeats=args.repeats,
                             threads=args.threads, median_ms=round(1e3 * float(np.median(times)), 3),
                             min_ms=round(1e3 * min(times), 3)))
    _write(rows, BENCH_FIELDS, args.out, out)
    return rows


# --- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", action="append", default=[],
                        help="registry id or edge-list path; repeatable or comma separated")
    common.add_argument("--registry", action="append", default=[],
                        help=f"extra registry manifest (YAML); ${DATA_DIR_ENV}/registry.yaml is read automatically")
    common.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    common.add_argument("--out", choices=("csv", "json"), default="csv", help="output format")
    common.add_argument("--output", default="-", help="output file (default stdout)")
    common.add_argument("--threads", type=_threads, default=1, help="worker threads, or 'auto'")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cclp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="topological summary per dataset")
    p.add_argument("--lcp-population", choices=("edges", "pairs"), default="edges")
    p.add_argument("--max-sources", type=int, default=None,
                   help="BFS from a seeded sample of this many sources instead of all nodes")
    p.set_defaults(func=cmd_stats)

    all_kinds = ",".join(k.value for k in IndexKind)
    p = sub.add_parser("evaluate", parents=[common], help="precision / AUP / AUC over random splits")
    p.add_argument("--indices", action="append", default=None, help=f"comma separated subset of {all_kinds}")
    p.add_argument("--metrics", action="append", default=None, help="subset of precision,aup,auc")
    p.add_argument("--probe-frac", type=float, default=0.1)
    p.add_argument("--runs", type=_auto_int, default=None, help="number of splits, or 'auto'")
    p.add_argument("--lmax", type=_auto_int, default=None, help="largest L, or 'auto'")
    p.add_argument("--auc-n", type=int, default=100_000, help="AUC comparisons per run")
    p.add_argument("--auc-exact", action="store_true", help="exhaustive AUC (small graphs only)")
    p.add_argument("--curve", action="store_true", help="also emit precision at the ten L values")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", parents=[common], help="top-k unobserved links of a full graph")
    p.add_argument("--index", default="cclp")
    p.add_argument("--top-k", type=int, default=20)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", parents=[common], help="time all-pairs scoring")
    p.add_argument("--indices", action="append", default=None)
    p.add_argument("--synthetic", action="append", default=[],
                   help="node counts of uniform random graphs to generate")
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.command == "evaluate":
        args.indices = args.indices or ["pa,cn,jc,aa,ra,car,cclp,random"]
        args.metrics = args.metrics or ["precision,aup,auc"]
    elif args.command == "bench":
        args.indices = args.indices if args.indices is not None else ["cn,cclp"]
    if args.command == "predict" and args.top_k < 0:
        parser.error("--top-k must be non-negative")

    buf = io.StringIO()
    try:
        registry = Registry.default(args.registry)
        args.func(args, registry, buf)
    except UsageError as exc:
        print(f"cclp {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"cclp {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, OSError) as exc:
        print(f"cclp {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EdgeListParseError, EmptyGraphError, DegenerateInputError, InvalidNodeError) as exc:
        print(f"cclp {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA

    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

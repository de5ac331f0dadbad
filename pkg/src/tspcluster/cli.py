"""Command-line pipeline: ingest -> k-NN -> affinity -> init -> train ->
assign -> evaluate -> report.

Subcommands: cluster (full pipeline), kmeans (frozen-feature baseline),
knn-diag (neighbor label-consistency diagnostic), synth (synthetic data),
eval (metrics from an assignments file), project (PCA export), sweep-k
(K-sensitivity table).  Exit codes: 0 success, 1 runtime failure, 2 usage
error.
"""

import argparse
import contextlib
import os
import sys

import numpy as np

from . import io as tspio
from ._validation import UNLABELED
from .affinity import build_affinity
from .head import TrainConfig, train
from .kmeans import kmeans
from .metrics import ari, confusion_counts, hungarian_acc, nmi, pca_project
from .neighbors import NeighborGraph, build_knn, label_consistency
from .rng import make_rng
from .synth import SHAPES, BlobSpec, generate

THREADS_ENV = "TSPCLUSTER_THREADS"


def _default_threads():
    value = os.environ.get(THREADS_ENV)
    return int(value) if value else None


@contextlib.contextmanager
def _thread_limits(n):
    if n is None:
        yield
        return
    if n < 1:
        raise ValueError(f"--threads must be >= 1, got {n}")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        yield
        return
    with threadpool_limits(limits=n):
        yield


def _load_embeddings(path):
    if str(path).endswith(".csv"):
        x, _ = tspio.read_csv_embeddings(path)
        return x
    return tspio.read_embeddings(path)


def _load_pair(embeddings_path, labels_path):
    x = _load_embeddings(embeddings_path)
    labels = None
    if labels_path is not None:
        labels = tspio.read_labels(labels_path)
        if labels.shape[0] != x.shape[0]:
            raise ValueError(
                f"labels/embeddings count mismatch: {labels.shape[0]} labels "
                f"for {x.shape[0]} embeddings"
            )
    return x, labels


def _consistency_summary(graph, labels):
    per_point, mean = label_consistency(graph, labels)
    return {
        "k": graph.k,
        "metric": graph.metric,
        "mean": mean,
        "std": float(per_point.std()),
        "min": float(per_point.min()),
        "max": float(per_point.max()),
    }


def _evaluated_report(config, assignments, labels, n_clusters, consistency=None):
    sizes = np.bincount(assignments, minlength=n_clusters)
    report = tspio.EvalReport(
        config=config,
        n_points=int(assignments.shape[0]),
        n_clusters=int(n_clusters),
        cluster_sizes=[int(s) for s in sizes],
        per_point_consistency=consistency,
    )
    if labels is not None:
        if np.any(labels == UNLABELED):
            raise ValueError("labels contain unlabeled points; cannot evaluate")
        acc, _ = hungarian_acc(assignments, labels)
        report.acc = acc
        report.nmi = nmi(assignments, labels)
        report.ari = ari(assignments, labels)
        size = max(n_clusters, int(labels.max()) + 1)
        report.confusion = confusion_counts(
            assignments, labels, size=size
        ).tolist()
    return report


def _print_metrics(report):
    if report.acc is not None:
        print(
            f"acc {report.acc:.4f}  nmi {report.nmi:.4f}  ari {report.ari:.4f}"
        )
    else:
        print("no labels provided; metrics skipped")


def _run_head_pipeline(x, args, k):
    graph = build_knn(x, k, metric=args.metric)
    affinity = build_affinity(
        graph, embeddings=None if args.metric == "euclidean" else x
    )
    config = TrainConfig(
        n_clusters=args.clusters,
        n_neighbors=k,
        entropy_weight=args.entropy_weight,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        init=args.init,
        seed=args.seed,
        kmeans_restarts=args.kmeans_restarts,
    )
    head, history = train(x, graph, affinity, config, rng=make_rng(args.seed))
    return graph, head, history


def cmd_cluster(args):
    x, labels = _load_pair(args.embeddings, args.labels)
    graph, head, history = _run_head_pipeline(x, args, args.neighbors)
    assignments = head.predict(x)
    tspio.write_assignments(args.assignments_out, assignments)
    config = {
        "command": "cluster",
        "embeddings": args.embeddings,
        "labels": args.labels,
        "clusters": args.clusters,
        "neighbors": args.neighbors,
        "entropy_weight": args.entropy_weight,
        "lr": args.lr,
        "batch_size": args.batch_size,
        "epochs": args.epochs,
        "seed": args.seed,
        "metric": args.metric,
        "init": args.init,
        "kmeans_restarts": args.kmeans_restarts,
        "threads": args.threads,
        "assignments_out": args.assignments_out,
        "report_out": args.report_out,
    }
    consistency = (
        _consistency_summary(graph, labels) if labels is not None else None
    )
    report = _evaluated_report(config, assignments, labels, args.clusters,
                               consistency)
    tspio.write_report(args.report_out, report)
    print(f"assignments -> {args.assignments_out}")
    print(f"final epoch loss {history[-1]:.6f}")
    _print_metrics(report)
    return 0


def cmd_kmeans(args):
    x, labels = _load_pair(args.embeddings, args.labels)
    result = kmeans(
        x,
        args.clusters,
        rng=make_rng(args.seed),
        n_restarts=args.restarts,
        max_iter=args.max_iter,
        tol=args.tol,
    )
    tspio.write_assignments(args.assignments_out, result.assignments)
    config = {
        "command": "kmeans",
        "embeddings": args.embeddings,
        "labels": args.labels,
        "clusters": args.clusters,
        "restarts": args.restarts,
        "max_iter": args.max_iter,
        "tol": args.tol,
        "seed": args.seed,
        "threads": args.threads,
        "assignments_out": args.assignments_out,
        "report_out": args.report_out,
    }
    report = _evaluated_report(config, result.assignments, labels, args.clusters)
    tspio.write_report(args.report_out, report)
    print(f"assignments -> {args.assignments_out}")
    print(f"inertia {result.inertia:.6f} after {result.iterations} iterations")
    _print_metrics(report)
    return 0


def cmd_knn_diag(args):
    x, labels = _load_pair(args.embeddings, args.labels)
    graph = build_knn(x, args.neighbors, metric=args.metric)
    per_point, mean = label_consistency(graph, labels)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            for value in per_point:
                fh.write(f"{value:.6f}\n")
        print(f"per-point consistency -> {args.out}")
    if args.report_out is not None:
        config = {
            "command": "knn-diag",
            "embeddings": args.embeddings,
            "labels": args.labels,
            "neighbors": args.neighbors,
            "metric": args.metric,
            "threads": args.threads,
            "out": args.out,
            "report_out": args.report_out,
        }
        n_classes = int(np.unique(labels).size)
        report = tspio.EvalReport(
            config=config,
            n_points=int(x.shape[0]),
            n_clusters=n_classes,
            cluster_sizes=[int(c) for c in np.bincount(labels)],
            per_point_consistency=_consistency_summary(graph, labels),
        )
        tspio.write_report(args.report_out, report)
    print(f"mean_consistency {mean:.6f}")
    return 0


def cmd_synth(args):
    spec = BlobSpec(
        n_clusters=args.clusters,
        points_per_cluster=args.points_per_cluster,
        dim=args.dim,
        center_separation=args.separation,
        within_std=args.within_std,
        shape=args.shape,
        seed=args.seed,
        imbalance=args.imbalance,
    )
    x, labels = generate(spec)
    tspio.write_embeddings(args.out_embeddings, x)
    tspio.write_labels(args.out_labels, labels)
    print(
        f"wrote {x.shape[0]} x {x.shape[1]} embeddings -> {args.out_embeddings}"
    )
    print(f"wrote labels -> {args.out_labels}")
    return 0


def cmd_eval(args):
    assignments = tspio.read_assignments(args.assignments)
    labels = tspio.read_labels(args.labels)
    if labels.shape[0] != assignments.shape[0]:
        raise ValueError(
            f"labels/assignments count mismatch: {labels.shape[0]} labels "
            f"for {assignments.shape[0]} assignments"
        )
    config = {
        "command": "eval",
        "assignments": args.assignments,
        "labels": args.labels,
        "threads": args.threads,
        "report_out": args.report_out,
    }
    n_clusters = int(assignments.max()) + 1
    report = _evaluated_report(config, assignments, labels, n_clusters)
    tspio.write_report(args.report_out, report)
    _print_metrics(report)
    return 0


def cmd_project(args):
    x, labels = _load_pair(args.embeddings, args.labels)
    projected = pca_project(x, out_dim=args.dim)
    header = ",".join(f"pc{i + 1}" for i in range(args.dim))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(header + (",label\n" if labels is not None else "\n"))
        for i, row in enumerate(projected):
            cells = ",".join(f"{v:.9g}" for v in row)
            if labels is not None:
                cells += f",{int(labels[i])}"
            fh.write(cells + "\n")
    print(f"projection -> {args.out}")
    return 0


def cmd_sweep_k(args):
    x, labels = _load_pair(args.embeddings, args.labels)
    k_values = [int(v) for v in args.k_list.split(",") if v.strip()]
    if not k_values:
        raise ValueError("--k-list must name at least one K")
    if min(k_values) < 3:
        raise ValueError("every K in --k-list must be >= 3")
    # Neighbor lists are sorted, so the k-NN graph for any smaller k is an
    # exact prefix of the largest one; build once and slice.
    full = build_knn(x, max(k_values), metric=args.metric)
    rows = []
    print(f"{'K':>4} {'ACC':>8} {'NMI':>8} {'ARI':>8}")
    for k in k_values:
        graph = NeighborGraph(
            k=k,
            metric=full.metric,
            indices=full.indices[:, :k].copy(),
            distances=full.distances[:, :k].copy(),
        )
        affinity = build_affinity(
            graph, embeddings=None if args.metric == "euclidean" else x
        )
        config = TrainConfig(
            n_clusters=args.clusters,
            n_neighbors=k,
            entropy_weight=args.entropy_weight,
            learning_rate=args.lr,
            batch_size=args.batch_size,
            epochs=args.epochs,
            init=args.init,
            seed=args.seed,
            kmeans_restarts=args.kmeans_restarts,
        )
        head, _ = train(x, graph, affinity, config, rng=make_rng(args.seed))
        assignments = head.predict(x)
        acc, _ = hungarian_acc(assignments, labels)
        row = {
            "k": k,
            "acc": acc,
            "nmi": nmi(assignments, labels),
            "ari": ari(assignments, labels),
        }
        rows.append(row)
        print(f"{k:>4} {row['acc']:>8.4f} {row['nmi']:>8.4f} {row['ari']:>8.4f}")
    if args.report_out is not None:
        config = {
            "command": "sweep-k",
            "embeddings": args.embeddings,
            "labels": args.labels,
            "clusters": args.clusters,
            "k_list": k_values,
            "entropy_weight": args.entropy_weight,
            "lr": args.lr,
            "batch_size": args.batch_size,
            "epochs": args.epochs,
            "seed": args.seed,
            "metric": args.metric,
            "init": args.init,
            "kmeans_restarts": args.kmeans_restarts,
            "threads": args.threads,
            "report_out": args.report_out,
        }
        import json

        with open(args.report_out, "w", encoding="utf-8") as fh:
            json.dump({"config": config, "results": rows}, fh, indent=2,
                      sort_keys=True)
            fh.write("\n")
    return 0


def _add_train_flags(parser):
    parser.add_argument("--neighbors", type=int, default=20,
                        help="neighbors per point (default 20)")
    parser.add_argument("--entropy-weight", type=float, default=3.0,
                        dest="entropy_weight")
    parser.add_argument("--lr", type=float, default=1e-4)
    parser.add_argument("--batch-size", type=int, default=256,
                        dest="batch_size")
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--metric", choices=["euclidean", "cosine", "dot"],
                        default="euclidean")
    parser.add_argument("--init", choices=["kmeans", "random"],
                        default="kmeans")
    parser.add_argument("--kmeans-restarts", type=int, default=10,
                        dest="kmeans_restarts")


def _add_common_flags(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker threads (env {THREADS_ENV})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tspcluster",
        description="Cluster frozen embedding vectors with a neighbor-"
        "agreement softmax head.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="full pipeline on an embeddings file")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels")
    p.add_argument("--clusters", type=int, required=True)
    _add_train_flags(p)
    _add_common_flags(p)
    p.add_argument("--assignments-out", default="assignments.txt",
                   dest="assignments_out")
    p.add_argument("--report-out", default="report.json", dest="report_out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("kmeans", help="frozen-feature K-means baseline")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=300, dest="max_iter")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_common_flags(p)
    p.add_argument("--assignments-out", default="assignments.txt",
                   dest="assignments_out")
    p.add_argument("--report-out", default="report.json", dest="report_out")
    p.set_defaults(func=cmd_kmeans)

    p = sub.add_parser("knn-diag",
                       help="neighbor label-consistency diagnostic")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--neighbors", type=int, default=20)
    p.add_argument("--metric", choices=["euclidean", "cosine", "dot"],
                   default="dot")
    _add_common_flags(p)
    p.add_argument("--out", help="per-point consistency output path")
    p.add_argument("--report-out", dest="report_out")
    p.set_defaults(func=cmd_knn_diag)

    p = sub.add_parser("synth", help="generate synthetic embeddings")
    p.add_argument("--out-embeddings", required=True, dest="out_embeddings")
    p.add_argument("--out-labels", required=True, dest="out_labels")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--points-per-cluster", type=int, required=True,
                   dest="points_per_cluster")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--within-std", type=float, default=1.0, dest="within_std")
    p.add_argument("--shape", choices=list(SHAPES), default="isotropic")
    p.add_argument("--imbalance", type=float, default=0.0)
    _add_common_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="metrics from assignments + labels")
    p.add_argument("--assignments", required=True)
    p.add_argument("--labels", required=True)
    _add_common_flags(p)
    p.add_argument("--report-out", default="report.json", dest="report_out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("project", help="PCA export for external plotting")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels")
    p.add_argument("--dim", type=int, default=2)
    _add_common_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("sweep-k", help="pipeline ACC/NMI/ARI across K values")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--k-list", default="5,10,15,20,25,30", dest="k_list")
    _add_train_flags(p)
    _add_common_flags(p)
    p.add_argument("--report-out", dest="report_out")
    p.set_defaults(func=cmd_sweep_k)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with _thread_limits(args.threads):
            return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

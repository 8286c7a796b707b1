"""Command-line front end.

Every pipeline stage is a subcommand that reads the snapshot files of the
stages before it, so any stage can be re-run in isolation; ``run`` chains
all of them. Configuration precedence: built-in defaults, then the
--config file, then SCHOLARNET_* environment variables, then flags.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import report as report_mod
from .cloning import (
    ClusterParams,
    load_clone_labels,
    load_clone_report,
    load_embeddings,
    load_nodes,
    make_clones,
    save_clone_report,
    save_nodes,
)
from .community import load_community_tree, nh_louvain, save_community_tree
from .config import load_config
from .errors import ScholarnetError
from .graph import (
    build_graph,
    density,
    load_graph,
    prune_edges,
    save_graph,
    threshold_for_density,
)
from .ingest import filter_researchers, load_corpus, save_corpus
from .openalex import fetch_openalex
from .pipeline import run_pipeline, run_synth
from .profiles import (
    aggregate_profile,
    load_doc_topics,
    load_similarity,
    save_similarity,
    similarity_matrix,
)
from .refine import load_refined, merge_whole_graph, refine_all, save_refined
from .synth import SynthSpec


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out-dir", dest="out_dir", help="artifact directory")
    parser.add_argument("--seed", type=int, help="random seed")


def _config_from_args(args: argparse.Namespace, extra: dict | None = None):
    flags = {
        "out_dir": getattr(args, "out_dir", None),
        "seed": getattr(args, "seed", None),
    }
    if extra:
        flags.update(extra)
    return load_config(args.config, flags=flags)


def _cmd_ingest(args) -> int:
    config = _config_from_args(args, {"min_pubs": args.min_pubs})
    if args.source == "file":
        if not args.input:
            raise ScholarnetError("--source file requires --input <documents file>")
        corpus = load_corpus(args.input)
    else:
        if not args.institution or args.from_year is None or args.to_year is None:
            raise ScholarnetError("--source openalex requires --institution, --from, --to")
        corpus = fetch_openalex(
            args.institution,
            (args.from_year, args.to_year),
            endpoint=args.endpoint,
        )
    corpus = filter_researchers(corpus, config.min_pubs)
    out = Path(args.out) if args.out else Path(config.out_dir) / "corpus.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out)
    print(f"{len(corpus.publications)} publications, {len(corpus.researchers)} researchers -> {out}")
    return 0


def _cmd_clone(args) -> int:
    config = _config_from_args(
        args,
        {
            "doc_topics": args.doc_topics,
            "clone_labels": args.labels,
            "embeddings": args.embeddings,
            "threshold_factor": args.threshold_factor,
            "min_samples": args.min_samples,
            "min_cluster_size": args.min_cluster_size,
        },
    )
    out_dir = Path(config.out_dir)
    corpus = load_corpus(args.corpus or out_dir / "corpus.jsonl")
    doc_topics = load_doc_topics(config.doc_topics)
    labels = load_clone_labels(config.clone_labels) if config.clone_labels else None
    vectors = load_embeddings(config.embeddings) if config.embeddings else None
    nodes, clone_report = make_clones(
        corpus,
        doc_topics,
        threshold_factor=config.threshold_factor,
        params=ClusterParams(config.min_samples, config.min_cluster_size),
        doc_vectors=vectors,
        labels=labels,
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    save_nodes(nodes, out_dir / "clone_nodes.json")
    save_clone_report(clone_report, out_dir / "clone_report.json")
    print(
        f"{clone_report.total_researchers} researchers, "
        f"{clone_report.high_impact_count} high-impact, "
        f"{clone_report.cloned_count} cloned -> {len(nodes)} nodes"
    )
    return 0


def _cmd_similarity(args) -> int:
    config = _config_from_args(args, {"doc_topics": args.doc_topics})
    out_dir = Path(config.out_dir)
    nodes = load_nodes(args.nodes or out_dir / "clone_nodes.json")
    sim = similarity_matrix({n.node_id: n.profile for n in nodes})
    out_dir.mkdir(parents=True, exist_ok=True)
    save_similarity(sim, out_dir / "similarity.json")
    corpus_path = Path(args.corpus) if args.corpus else out_dir / "corpus.jsonl"
    if corpus_path.exists():
        corpus = load_corpus(corpus_path)
        doc_topics = load_doc_topics(config.doc_topics)
        base_profiles = {
            r: aggregate_profile(doc_topics, corpus.researchers[r])
            for r in sorted(corpus.researchers)
        }
        save_similarity(similarity_matrix(base_profiles), out_dir / "similarity_base.json")
    print(f"{len(nodes)} x {len(nodes)} similarity matrix -> {out_dir / 'similarity.json'}")
    return 0


def _cmd_graph(args) -> int:
    config = _config_from_args(
        args,
        {"prune_threshold": args.threshold, "target_density": args.target_density},
    )
    out_dir = Path(config.out_dir)
    sim = load_similarity(args.similarity or out_dir / "similarity.json")
    g_full = build_graph(sim)
    threshold = config.effective_threshold()
    if threshold is None:
        threshold = threshold_for_density(g_full, config.target_density)
    g = prune_edges(g_full, threshold)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_graph(g, out_dir / "graph.json")
    save_graph(g_full, out_dir / "graph_full.json")
    base_path = Path(args.similarity_base) if args.similarity_base else out_dir / "similarity_base.json"
    if base_path.exists():
        save_graph(build_graph(load_similarity(base_path)), out_dir / "graph_base.json")
    d = density(g) if g.node_count() > 1 else 0.0
    print(f"pruned at {threshold:.6g}: {g.edge_count()} edges, density {d:.4f}")
    return 0


def _cmd_detect(args) -> int:
    config = _config_from_args(args, {"min_community_size": args.min_size})
    out_dir = Path(config.out_dir)
    g = load_graph(args.graph or out_dir / "graph.json")
    tree = nh_louvain(g, min_size=config.min_community_size, seed=config.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_community_tree(tree, out_dir / "community_tree.json")
    leaves = tree.leaves()
    print(f"{len(leaves)} communities (sizes {[leaf.size() for leaf in leaves]})")
    return 0


def _cmd_refine(args) -> int:
    config = _config_from_args(args)
    out_dir = Path(config.out_dir)
    g = load_graph(args.graph or out_dir / "graph.json")
    tree = load_community_tree(args.tree or out_dir / "community_tree.json", g)
    refined, overlap = refine_all(tree)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_refined(refined, overlap, out_dir / "refined_communities.json")
    multi = overlap.multi_community()
    print(f"{len(refined)} refined communities, {len(multi)} multi-community researchers")
    return 0


def _cmd_report(args) -> int:
    config = _config_from_args(args, {"topic_words": args.topic_words})
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    before = load_graph(args.before or out_dir / "graph_base.json")
    after = load_graph(args.after or out_dir / "graph_full.json")

    stats = {
        "before": report_mod.edge_stats(before).__dict__,
        "after": report_mod.edge_stats(after).__dict__,
    }
    (out_dir / "edge_stats.json").write_text(
        json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    merged = merge_whole_graph(after)
    deltas = report_mod.mean_edge_delta(before, merged, set(before.nodes))
    report_path = Path(args.clone_report) if args.clone_report else out_dir / "clone_report.json"
    cloned = set()
    if report_path.exists():
        cloned = set(load_clone_report(report_path).clones_per_researcher)
    flagged = sorted(b for b in cloned if deltas[b][1] - deltas[b][0] <= 0)
    payload = {
        "order": list(deltas),
        "deltas": {b: {"before": v[0], "after": v[1], "delta": v[1] - v[0]} for b, v in deltas.items()},
        "flagged_cloned": flagged,
    }
    (out_dir / "mean_edge_delta.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    communities_path = Path(args.communities) if args.communities else out_dir / "refined_communities.json"
    refined, _ = load_refined(communities_path)
    (out_dir / "community_stats.json").write_text(
        json.dumps(report_mod.community_stats(refined), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    if config.topic_words:
        nodes = load_nodes(args.nodes or out_dir / "clone_nodes.json")
        topic_words = report_mod.load_topic_words(config.topic_words)
        tables = {
            n.node_id: [[w, s] for w, s in report_mod.wordcloud_scores(n, topic_words).entries]
            for n in nodes
        }
        (out_dir / "wordclouds.json").write_text(
            json.dumps({"tables": tables}, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(f"report tables -> {out_dir}")
    return 0


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        topics=args.topics,
        researchers=args.researchers,
        communities=args.communities,
        pubs_per_researcher=args.pubs,
        bridges=args.bridges,
        bridge_pubs=args.bridge_pubs,
        skew=args.skew,
        noise=args.noise,
        seed=args.seed if args.seed is not None else 0,
    )
    out_dir = args.out_dir or "out"
    paths = run_synth(spec, out_dir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _cmd_run(args) -> int:
    config = _config_from_args(
        args,
        {
            "documents": args.documents,
            "doc_topics": args.doc_topics,
            "topic_words": args.topic_words,
            "clone_labels": args.labels,
            "embeddings": args.embeddings,
            "prune_threshold": args.threshold,
            "target_density": args.target_density,
            "min_pubs": args.min_pubs,
            "threshold_factor": args.threshold_factor,
            "min_community_size": args.min_size,
            "cloning": args.cloning,
            "snapshots": args.snapshots,
        },
    )
    manifest = run_pipeline(config)
    print(f"{len(manifest.stages)} stages -> {Path(config.out_dir) / 'manifest.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scholarnet",
        description="Topic-similarity research networks with researcher cloning",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load or fetch a publication corpus")
    _add_common(p)
    p.add_argument("--source", choices=["openalex", "file"], default="file")
    p.add_argument("--input", help="documents file (for --source file)")
    p.add_argument("--institution", help="institution query (for --source openalex)")
    p.add_argument("--from", dest="from_year", type=int, help="first publication year")
    p.add_argument("--to", dest="to_year", type=int, help="last publication year")
    p.add_argument("--endpoint", default="https://api.openalex.org")
    p.add_argument("--min-pubs", dest="min_pubs", type=int)
    p.add_argument("--out", help="output corpus path")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("clone", help="split high-impact researchers into clones")
    _add_common(p)
    p.add_argument("--corpus", help="filtered corpus file")
    p.add_argument("--doc-topics", dest="doc_topics")
    p.add_argument("--threshold-factor", dest="threshold_factor", type=float)
    p.add_argument("--labels", help="external clone-label file")
    p.add_argument("--embeddings", help="document embedding file")
    p.add_argument("--min-samples", dest="min_samples", type=int)
    p.add_argument("--min-cluster-size", dest="min_cluster_size", type=int)
    p.set_defaults(func=_cmd_clone)

    p = sub.add_parser("similarity", help="pairwise node similarity matrix")
    _add_common(p)
    p.add_argument("--nodes", help="clone-node file")
    p.add_argument("--corpus", help="filtered corpus file (for the base matrix)")
    p.add_argument("--doc-topics", dest="doc_topics")
    p.set_defaults(func=_cmd_similarity)

    p = sub.add_parser("graph", help="build and prune the research network")
    _add_common(p)
    p.add_argument("--similarity", help="similarity matrix file")
    p.add_argument("--similarity-base", dest="similarity_base")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--threshold", type=float, help="fixed prune threshold")
    group.add_argument("--target-density", dest="target_density", type=float)
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("detect", help="hierarchical community detection")
    _add_common(p)
    p.add_argument("--graph", help="pruned graph file")
    p.add_argument("--min-size", dest="min_size", type=int)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("refine", help="merge clones within communities")
    _add_common(p)
    p.add_argument("--graph", help="pruned graph file")
    p.add_argument("--tree", help="community tree file")
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("report", help="evaluation tables")
    _add_common(p)
    p.add_argument("--before", help="pre-clone full graph")
    p.add_argument("--after", help="cloned full graph")
    p.add_argument("--communities", help="refined communities file")
    p.add_argument("--topic-words", dest="topic_words")
    p.add_argument("--nodes", help="clone-node file (for wordclouds)")
    p.add_argument("--clone-report", dest="clone_report")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic planted corpus")
    _add_common(p)
    p.add_argument("--topics", type=int, default=6)
    p.add_argument("--researchers", type=int, default=60)
    p.add_argument("--communities", type=int, default=3)
    p.add_argument("--pubs", type=int, default=8)
    p.add_argument("--bridges", type=int, default=0)
    p.add_argument("--bridge-pubs", dest="bridge_pubs", type=int, default=30)
    p.add_argument("--skew", help='publication-count skew, e.g. "pareto(1.5)"')
    p.add_argument("--noise", type=float, default=0.05)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run", help="full pipeline")
    _add_common(p)
    p.add_argument("--documents")
    p.add_argument("--doc-topics", dest="doc_topics")
    p.add_argument("--topic-words", dest="topic_words")
    p.add_argument("--labels")
    p.add_argument("--embeddings")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--threshold", type=float)
    group.add_argument("--target-density", dest="target_density", type=float)
    p.add_argument("--min-pubs", dest="min_pubs", type=int)
    p.add_argument("--threshold-factor", dest="threshold_factor", type=float)
    p.add_argument("--min-size", dest="min_size", type=int)
    p.add_argument("--cloning", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--snapshots", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ScholarnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

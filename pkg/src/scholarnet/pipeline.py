"""End-to-end orchestration with per-stage snapshots and a hashed manifest.

Stages run in a fixed order (ingest, clone, similarity, graph, detect,
refine, report), each consuming only prior interchange artifacts. The
manifest lists every written file with its content hash and never embeds
the output directory or timestamps, so identical inputs, config, and seed
produce a byte-identical manifest.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import report as report_mod
from .cloning import (
    ClusterParams,
    load_clone_labels,
    load_embeddings,
    make_clones,
    save_clone_report,
    save_nodes,
)
from .community import nh_louvain, save_community_tree
from .config import PipelineConfig
from .errors import PipelineStageError
from .graph import build_graph, density, prune_edges, save_graph, threshold_for_density
from .ingest import filter_researchers, load_corpus, save_corpus
from .profiles import (
    aggregate_profile,
    load_doc_topics,
    save_doc_topics,
    save_similarity,
    similarity_matrix,
)
from .refine import merge_whole_graph, refine_all, save_refined
from .synth import SynthSpec, generate_synthetic, save_ground_truth

STAGES = ("ingest", "clone", "similarity", "graph", "detect", "refine", "report")


@dataclass
class Manifest:
    config: dict
    stages: list[dict] = field(default_factory=list)

    def add(self, name: str, files: dict[str, str]) -> None:
        self.stages.append({"name": name, "files": files})

    def to_dict(self) -> dict:
        return {"config": self.config, "stages": self.stages}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _json_dump(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


class _Recorder:
    """Tracks stage outputs and hashes them for the manifest."""

    def __init__(self, out_dir: Path, snapshots: bool):
        self.out_dir = out_dir
        self.snapshots = snapshots
        self.files: dict[str, str] = {}

    def start_stage(self):
        self.files = {}

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def record(self, name: str) -> None:
        self.files[name] = _sha256(self.out_dir / name)


def run_pipeline(config: PipelineConfig) -> Manifest:
    """Execute every stage; returns the manifest after writing it to disk.

    A stage failure is re-raised with the stage name attached; artifacts
    from completed stages stay on disk for inspection.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_config = {k: v for k, v in config.to_dict().items() if k != "out_dir"}
    manifest = Manifest(config=manifest_config)
    rec = _Recorder(out_dir, config.snapshots)

    state: dict = {}

    def stage(name: str, fn) -> None:
        rec.start_stage()
        try:
            fn()
        except Exception as exc:
            raise PipelineStageError(name, exc) from exc
        manifest.add(name, dict(sorted(rec.files.items())))

    def do_ingest():
        corpus = load_corpus(config.documents)
        corpus = filter_researchers(corpus, config.min_pubs)
        state["corpus"] = corpus
        if config.snapshots:
            save_corpus(corpus, rec.path("corpus.jsonl"))
            rec.record("corpus.jsonl")

    def do_clone():
        doc_topics = load_doc_topics(config.doc_topics)
        state["doc_topics"] = doc_topics
        labels = load_clone_labels(config.clone_labels) if config.clone_labels else None
        vectors = load_embeddings(config.embeddings) if config.embeddings else None
        params = ClusterParams(
            min_samples=config.min_samples,
            min_cluster_size=config.min_cluster_size,
        )
        factor = config.threshold_factor if config.cloning else math.inf
        nodes, clone_report = make_clones(
            state["corpus"],
            doc_topics,
            threshold_factor=factor,
            params=params,
            doc_vectors=vectors,
            labels=labels,
        )
        state["nodes"] = nodes
        state["clone_report"] = clone_report
        if config.snapshots:
            save_nodes(nodes, rec.path("clone_nodes.json"))
            rec.record("clone_nodes.json")
            save_clone_report(clone_report, rec.path("clone_report.json"))
            rec.record("clone_report.json")

    def do_similarity():
        nodes = state["nodes"]
        corpus = state["corpus"]
        doc_topics = state["doc_topics"]
        sim = similarity_matrix({n.node_id: n.profile for n in nodes})
        base_profiles = {
            r: aggregate_profile(doc_topics, corpus.researchers[r])
            for r in sorted(corpus.researchers)
        }
        sim_base = similarity_matrix(base_profiles)
        state["sim"] = sim
        state["sim_base"] = sim_base
        if config.snapshots:
            save_similarity(sim, rec.path("similarity.json"))
            rec.record("similarity.json")
            save_similarity(sim_base, rec.path("similarity_base.json"))
            rec.record("similarity_base.json")

    def do_graph():
        g_full = build_graph(state["sim"])
        g_base_full = build_graph(state["sim_base"])
        threshold = config.effective_threshold()
        if threshold is None:
            threshold = threshold_for_density(g_full, config.target_density)
        g = prune_edges(g_full, threshold)
        state["g_full"] = g_full
        state["g_base_full"] = g_base_full
        state["g"] = g
        state["threshold"] = threshold
        if config.snapshots:
            save_graph(g, rec.path("graph.json"))
            rec.record("graph.json")
            save_graph(g_full, rec.path("graph_full.json"))
            rec.record("graph_full.json")
            save_graph(g_base_full, rec.path("graph_base.json"))
            rec.record("graph_base.json")
            _json_dump(
                {
                    "prune_mode": config.prune_mode,
                    "threshold_used": threshold,
                    "density_full": density(g_full) if g_full.node_count() > 1 else 0.0,
                    "density_pruned": density(g) if g.node_count() > 1 else 0.0,
                },
                rec.path("graph_meta.json"),
            )
            rec.record("graph_meta.json")

    def do_detect():
        tree = nh_louvain(state["g"], min_size=config.min_community_size, seed=config.seed)
        state["tree"] = tree
        if config.snapshots:
            save_community_tree(tree, rec.path("community_tree.json"))
            rec.record("community_tree.json")

    def do_refine():
        refined, overlap = refine_all(state["tree"])
        state["refined"] = refined
        state["overlap"] = overlap
        if config.snapshots:
            save_refined(refined, overlap, rec.path("refined_communities.json"))
            rec.record("refined_communities.json")

    def do_report():
        g_full = state["g_full"]
        g_base_full = state["g_base_full"]
        before = report_mod.edge_stats(g_base_full)
        after = report_mod.edge_stats(g_full)
        _json_dump(
            {"before": before.__dict__, "after": after.__dict__},
            rec.path("edge_stats.json"),
        )
        rec.record("edge_stats.json")

        merged = merge_whole_graph(g_full)
        base_ids = set(state["corpus"].researchers)
        deltas = report_mod.mean_edge_delta(g_base_full, merged, base_ids)
        cloned = set(state["clone_report"].clones_per_researcher)
        # cloned researchers whose mean incident weight failed to increase
        flagged = sorted(b for b in cloned if deltas[b][1] - deltas[b][0] <= 0)
        _json_dump(
            {
                "order": list(deltas),
                "deltas": {
                    b: {"before": v[0], "after": v[1], "delta": v[1] - v[0]}
                    for b, v in deltas.items()
                },
                "flagged_cloned": flagged,
            },
            rec.path("mean_edge_delta.json"),
        )
        rec.record("mean_edge_delta.json")

        _json_dump(report_mod.community_stats(state["refined"]), rec.path("community_stats.json"))
        rec.record("community_stats.json")

        if config.topic_words:
            topic_words = report_mod.load_topic_words(config.topic_words)
            tables = {}
            for node in state["nodes"]:
                table = report_mod.wordcloud_scores(node, topic_words)
                tables[node.node_id] = [[w, s] for w, s in table.entries]
            _json_dump({"tables": tables}, rec.path("wordclouds.json"))
            rec.record("wordclouds.json")

    stage("ingest", do_ingest)
    stage("clone", do_clone)
    stage("similarity", do_similarity)
    stage("graph", do_graph)
    stage("detect", do_detect)
    stage("refine", do_refine)
    stage("report", do_report)

    _json_dump(manifest.to_dict(), out_dir / "manifest.json")
    return manifest


def run_synth(spec: SynthSpec, out_dir: str | Path) -> dict[str, str]:
    """Generate a synthetic corpus and write its four interchange files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = generate_synthetic(spec)
    save_corpus(result.corpus, out / "documents.jsonl")
    save_doc_topics(result.doc_topics, out / "doc_topics.jsonl")
    report_mod.save_topic_words(result.topic_words, out / "topic_words.json")
    save_ground_truth(result.ground_truth, out / "ground_truth.json")
    return {
        "documents": str(out / "documents.jsonl"),
        "doc_topics": str(out / "doc_topics.jsonl"),
        "topic_words": str(out / "topic_words.json"),
        "ground_truth": str(out / "ground_truth.json"),
    }

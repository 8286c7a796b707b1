"""Plot-ready evaluation tables: edge-weight stats, per-researcher deltas,
community summaries, and wordcloud score tables.

Everything here is a pure function over pipeline outputs; rendering is out
of scope.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .cloning import ResearcherNode
from .errors import DimensionError, SchemaError
from .graph import ResearchGraph
from .refine import RefinedCommunity

DEFAULT_BINS = 50


@dataclass
class EdgeWeightStats:
    mean: float
    median: float
    stddev: float
    skewness: float
    bin_edges: list[float]
    counts: list[int]


def edge_stats(g: ResearchGraph, bins: int = DEFAULT_BINS) -> EdgeWeightStats:
    """Moments and a fixed-range histogram of the edge weights."""
    weights = np.array(sorted(g.edges.values()), dtype=np.float64)
    if weights.size == 0:
        raise DimensionError("edge_stats requires at least one edge")
    mean = float(weights.mean())
    m2 = float(((weights - mean) ** 2).mean())
    m3 = float(((weights - mean) ** 3).mean())
    skewness = 0.0 if m2 == 0.0 else m3 / m2**1.5
    counts, edges = np.histogram(weights, bins=bins, range=(0.0, 1.0))
    return EdgeWeightStats(
        mean=mean,
        median=float(np.median(weights)),
        stddev=float(np.sqrt(m2)),
        skewness=skewness,
        bin_edges=[float(e) for e in edges],
        counts=[int(c) for c in counts],
    )


def _mean_incident(g: ResearchGraph, node: str) -> float:
    incident = g.neighbors(node)
    if not incident:
        return 0.0
    return float(sum(incident.values()) / len(incident))


def mean_edge_delta(
    before: ResearchGraph,
    after_merged: ResearchGraph,
    base_ids: set[str],
) -> dict[str, tuple[float, float]]:
    """Per-researcher mean incident edge weight in each graph.

    ``before`` is the graph built without cloning and ``after_merged`` the
    cloned graph folded back to base identities, so both are keyed by
    base_id. The result is ordered by ascending difference (after - before)
    so it can be plotted directly.
    """
    out = []
    for base_id in sorted(base_ids):
        if base_id not in before:
            raise SchemaError(f"base_id {base_id!r} missing from the before graph")
        if base_id not in after_merged:
            raise SchemaError(f"base_id {base_id!r} missing from the after graph")
        b = _mean_incident(before, base_id)
        a = _mean_incident(after_merged, base_id)
        out.append((base_id, b, a))
    out.sort(key=lambda item: (item[2] - item[1], item[0]))
    return {base_id: (b, a) for base_id, b, a in out}


def community_stats(communities: Sequence[RefinedCommunity]) -> dict:
    """Count plus size and density summaries over refined communities."""
    if not communities:
        raise DimensionError("community_stats requires at least one community")
    sizes = np.array([len(c.members) for c in communities], dtype=np.float64)
    densities = np.array([c.density for c in communities], dtype=np.float64)
    return {
        "count": len(communities),
        "max_size": int(sizes.max()),
        "min_size": int(sizes.min()),
        "avg_size": float(sizes.mean()),
        "median_size": float(np.median(sizes)),
        "avg_density": float(densities.mean()),
        "sizes": [int(s) for s in sizes],
    }


@dataclass
class WordcloudTable:
    node_id: str
    entries: list[tuple[str, float]]

    def __post_init__(self):
        scores = [s for _, s in self.entries]
        if any(s < 0 for s in scores):
            raise SchemaError("wordcloud scores must be non-negative")
        if scores != sorted(scores, reverse=True):
            raise SchemaError("wordcloud entries must be sorted descending by score")


def wordcloud_scores(
    node: ResearcherNode,
    topic_words: Mapping[int, Sequence[tuple[str, float]]],
    top_topics: int = 5,
    top_words: int = 50,
) -> WordcloudTable:
    """Score words by profile-weighted word probability.

    The node's ``top_topics`` highest-probability topics are selected; each
    word scores topic_prob * word_prob, summed when a word recurs across
    the selected topics; the ``top_words`` best survive. Ties break
    alphabetically so output never depends on input ordering.
    """
    profile = node.profile
    order = np.argsort(-profile, kind="stable")
    selected = [int(t) for t in order[:top_topics] if profile[t] > 0.0]
    scores: dict[str, float] = {}
    for topic in selected:
        if topic not in topic_words:
            raise SchemaError(f"topic {topic} missing from the topic-word table")
        for word, prob in topic_words[topic]:
            scores[word] = scores.get(word, 0.0) + float(profile[topic]) * float(prob)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:top_words]
    return WordcloudTable(node_id=node.node_id, entries=ranked)


def save_topic_words(
    topic_words: Mapping[int, Sequence[tuple[str, float]]], path: str | Path
) -> None:
    payload = {
        "topics": {
            str(topic): [[word, float(prob)] for word, prob in words]
            for topic, words in sorted(topic_words.items())
        }
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_topic_words(path: str | Path) -> dict[int, list[tuple[str, float]]]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "topics" not in payload:
        raise SchemaError(f"{path}: expected a top-level 'topics' object")
    out: dict[int, list[tuple[str, float]]] = {}
    for topic, words in payload["topics"].items():
        try:
            key = int(topic)
        except ValueError as exc:
            raise SchemaError(f"{path}: topic key {topic!r} is not an integer") from exc
        parsed = []
        for entry in words:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise SchemaError(f"{path}: word entries must be [word, prob], got {entry!r}")
            word, prob = entry
            if not isinstance(prob, (int, float)) or prob < 0:
                raise SchemaError(f"{path}: probability for {word!r} must be non-negative")
            parsed.append((str(word), float(prob)))
        out[key] = parsed
    return out

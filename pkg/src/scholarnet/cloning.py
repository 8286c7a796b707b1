"""Split prolific researchers into clones by clustering their publications.

A researcher whose publication count strictly exceeds a multiple of the
corpus median is clustered over their documents; each resulting cluster
becomes a clone node, and density-clustering noise becomes a clone of its
own. Everyone else passes through as a single node.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from sklearn.cluster import DBSCAN

from .errors import DimensionError, DocTopicLookupError, SchemaError
from .ingest import Corpus
from .profiles import DocTopicTable, aggregate_profile, jsd
from .validation import is_zero_row

logger = logging.getLogger(__name__)

NOISE = -1


@dataclass(frozen=True)
class ClusterParams:
    """Density-clustering knobs for per-researcher publication clustering."""

    min_samples: int = 5
    min_cluster_size: int = 10

    def __post_init__(self):
        if self.min_samples < 1:
            raise SchemaError(f"min_samples must be >= 1, got {self.min_samples}")
        if self.min_cluster_size < 1:
            raise SchemaError(f"min_cluster_size must be >= 1, got {self.min_cluster_size}")


@dataclass(frozen=True)
class ResearcherNode:
    """One vertex of the research network: a researcher or one of its clones.

    ``clone_index`` 0 means the researcher was not split and ``node_id``
    equals ``base_id``; clones carry ``"<base_id>#<k>"`` with k >= 1.
    """

    node_id: str
    base_id: str
    clone_index: int
    pub_ids: frozenset[str]
    profile: np.ndarray

    def __post_init__(self):
        if not self.pub_ids:
            raise SchemaError(f"node {self.node_id!r} has no publications")
        if "#" in self.base_id:
            # '#' is reserved for clone suffixes so base identities stay recoverable
            raise SchemaError(f"base_id {self.base_id!r} may not contain '#'")
        expected = self.base_id if self.clone_index == 0 else f"{self.base_id}#{self.clone_index}"
        if self.node_id != expected:
            raise SchemaError(
                f"node_id {self.node_id!r} inconsistent with base {self.base_id!r} "
                f"and clone index {self.clone_index}"
            )

    @property
    def is_clone(self) -> bool:
        return self.clone_index > 0


@dataclass
class CloneReport:
    total_researchers: int
    high_impact_count: int
    cloned_count: int
    clones_per_researcher: dict[str, int] = field(default_factory=dict)
    threshold_used: float = 0.0

    def __post_init__(self):
        if not (self.cloned_count <= self.high_impact_count <= self.total_researchers):
            raise SchemaError(
                f"inconsistent counts: cloned {self.cloned_count}, "
                f"high-impact {self.high_impact_count}, total {self.total_researchers}"
            )


def high_impact_threshold(pub_counts: list[int], factor: float = 1.5) -> float:
    """``factor`` times the median publication count.

    Even-length medians average the two central values. Researchers are
    high-impact when their count is strictly greater than the result.
    """
    if not pub_counts:
        raise DimensionError("high_impact_threshold requires a non-empty count list")
    return factor * float(np.median(pub_counts))


def _kth_distances(distances: np.ndarray, min_samples: int) -> np.ndarray:
    # distance to the min_samples-th nearest neighbor, self included,
    # matching the core-point count convention
    k = min(min_samples, distances.shape[0]) - 1
    return np.sort(distances, axis=1)[:, k]


KNEE_MIN_DEPTH = 0.05


def knee_eps(distances: np.ndarray, min_samples: int) -> float:
    """Neighborhood radius from the knee of the sorted k-distance curve.

    For each point, take the distance to its min_samples-th nearest
    neighbor, sort ascending, normalize the curve to the unit square, and
    pick the point hanging deepest below the chord. A curve with no real
    elbow (max depth under ``KNEE_MIN_DEPTH``) is one density regime, so
    the radius is the curve maximum and every point counts as core.
    """
    n = distances.shape[0]
    curve = np.sort(_kth_distances(distances, min_samples))
    if n < 3 or curve[-1] == curve[0]:
        return max(float(curve[-1]), 1e-12)
    x = np.linspace(0.0, 1.0, n)
    y = (curve - curve[0]) / (curve[-1] - curve[0])
    depth = x - y  # chord is the identity line after normalization
    i = int(np.argmax(depth))
    if depth[i] < KNEE_MIN_DEPTH:
        return max(float(curve[-1]), 1e-12)
    return max(float(curve[i]), 1e-12)


def _pairwise_jsd(vectors: np.ndarray) -> np.ndarray:
    n = vectors.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = jsd(vectors[i], vectors[j])
    return out


def cluster_publications(
    doc_vectors: Mapping[str, np.ndarray],
    params: ClusterParams = ClusterParams(),
    *,
    metric: str = "jsd",
    labels: Mapping[str, int] | None = None,
) -> dict[str, int]:
    """Density-cluster a researcher's documents; -1 labels noise.

    When ``labels`` is given (externally computed, e.g. over fine-tuned
    embeddings) it passes through verbatim for exactly these documents.
    Otherwise DBSCAN runs with ``min_samples`` and a radius read off the
    knee of the k-distance curve, and clusters smaller than
    ``min_cluster_size`` are folded into noise. Whatever a pass leaves as
    noise is re-clustered at its own radius, so a looser group sitting
    behind a tighter one is still recovered; points no pass can place
    keep the noise label.
    """
    ids = sorted(doc_vectors)
    if len(ids) < 2:
        raise DimensionError("cluster_publications requires at least 2 documents")
    if labels is not None:
        missing = [i for i in ids if i not in labels]
        if missing:
            raise SchemaError(f"external labels missing for {missing[:5]}")
        return {i: int(labels[i]) for i in ids}

    vectors = np.stack([np.asarray(doc_vectors[i], dtype=np.float64) for i in ids])
    if vectors.ndim != 2:
        raise DimensionError("document vectors must share one dimension")
    if metric == "jsd":
        dist = _pairwise_jsd(vectors)
    elif metric == "euclidean":
        diff = vectors[:, None, :] - vectors[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
    else:
        raise SchemaError(f"unknown metric {metric!r}")

    out = np.full(len(ids), NOISE, dtype=int)
    active = np.arange(len(ids))
    next_label = 0
    while active.size >= max(params.min_samples, params.min_cluster_size):
        sub = dist[np.ix_(active, active)]
        local = _dbscan_pass(sub, params, knee_eps(sub, params.min_samples))
        if not (local != NOISE).any():
            # a flat k-distance curve has no elbow to read; one loose regime
            # can then shatter into undersized fragments, so retry at the
            # curve maximum where the pass degenerates to connected components
            local = _dbscan_pass(sub, params, float(_kth_distances(sub, params.min_samples).max()))
        found = local != NOISE
        if not found.any():
            break
        out[active[found]] = local[found] + next_label
        next_label = int(out.max()) + 1
        active = active[~found]
    return {pub_id: int(label) for pub_id, label in zip(ids, out)}


def _dbscan_pass(dist: np.ndarray, params: ClusterParams, eps: float) -> np.ndarray:
    """One DBSCAN round at the given radius; undersized clusters fold to noise."""
    eps = max(eps, 1e-12)
    raw = DBSCAN(eps=eps, min_samples=params.min_samples, metric="precomputed").fit_predict(dist)
    sizes: dict[int, int] = {}
    for label in raw:
        if label != NOISE:
            sizes[int(label)] = sizes.get(int(label), 0) + 1
    keep = sorted(label for label, size in sizes.items() if size >= params.min_cluster_size)
    remap = {label: rank for rank, label in enumerate(keep)}
    return np.array([remap.get(int(label), NOISE) for label in raw], dtype=int)


def _topic_rows(doc_topics: DocTopicTable, pub_ids) -> dict[str, np.ndarray]:
    missing = [p for p in pub_ids if p not in doc_topics]
    if missing:
        raise DocTopicLookupError(f"pub_ids missing from doc-topic table: {sorted(missing)[:5]}")
    return {p: doc_topics.rows[p] for p in pub_ids}


def _clone_nodes(
    base_id: str,
    label_map: dict[str, int],
    doc_topics: DocTopicTable,
) -> list[ResearcherNode]:
    by_label: dict[int, set[str]] = {}
    for pub_id, label in label_map.items():
        by_label.setdefault(label, set()).add(pub_id)
    ordered = sorted(label for label in by_label if label != NOISE)
    if NOISE in by_label:
        ordered.append(NOISE)  # noise clone takes the highest index
    nodes = []
    for k, label in enumerate(ordered, start=1):
        pub_ids = frozenset(by_label[label])
        nodes.append(
            ResearcherNode(
                node_id=f"{base_id}#{k}",
                base_id=base_id,
                clone_index=k,
                pub_ids=pub_ids,
                profile=aggregate_profile(doc_topics, pub_ids),
            )
        )
    return nodes


def make_clones(
    corpus: Corpus,
    doc_topics: DocTopicTable,
    *,
    threshold_factor: float = 1.5,
    params: ClusterParams = ClusterParams(),
    doc_vectors: Mapping[str, np.ndarray] | None = None,
    labels: Mapping[str, Mapping[str, int]] | None = None,
) -> tuple[list[ResearcherNode], CloneReport]:
    """Expand high-impact researchers into clone nodes.

    Clustering runs over topic rows with a JSD metric unless ``doc_vectors``
    supplies embedding vectors (then euclidean), and is skipped entirely for
    a researcher listed in ``labels``. A researcher whose documents fall in
    a single cluster stays unsplit.
    """
    counts = corpus.pub_counts()
    threshold = high_impact_threshold(list(counts.values()), factor=threshold_factor)
    nodes: list[ResearcherNode] = []
    high_impact = 0
    clones_per: dict[str, int] = {}

    for base_id in sorted(corpus.researchers):
        pub_ids = corpus.researchers[base_id]
        split = None
        if counts[base_id] > threshold:
            high_impact += 1
        if counts[base_id] > threshold and len(pub_ids) >= 2:
            external = labels.get(base_id) if labels else None
            if external is not None:
                label_map = cluster_publications(_topic_rows(doc_topics, pub_ids), params, labels=external)
            else:
                if doc_vectors is not None:
                    vectors = {p: doc_vectors[p] for p in pub_ids}
                    metric = "euclidean"
                    pre_noise: dict[str, int] = {}
                else:
                    rows = _topic_rows(doc_topics, pub_ids)
                    # unplaceable documents cannot be compared; they go straight to noise
                    pre_noise = {p: NOISE for p, row in rows.items() if is_zero_row(row)}
                    vectors = {p: row for p, row in rows.items() if p not in pre_noise}
                    metric = "jsd"
                if len(vectors) >= 2:
                    label_map = cluster_publications(vectors, params, metric=metric)
                else:
                    label_map = {p: 0 for p in vectors}
                label_map.update(pre_noise)
            if len(set(label_map.values())) >= 2:
                split = _clone_nodes(base_id, label_map, doc_topics)
        if split is None:
            nodes.append(
                ResearcherNode(
                    node_id=base_id,
                    base_id=base_id,
                    clone_index=0,
                    pub_ids=frozenset(pub_ids),
                    profile=aggregate_profile(doc_topics, pub_ids),
                )
            )
        else:
            nodes.extend(split)
            clones_per[base_id] = len(split)

    nodes.sort(key=lambda n: (n.base_id, n.clone_index))
    report = CloneReport(
        total_researchers=len(corpus.researchers),
        high_impact_count=high_impact,
        cloned_count=len(clones_per),
        clones_per_researcher=clones_per,
        threshold_used=threshold,
    )
    return nodes, report


def save_nodes(nodes: list[ResearcherNode], path: str | Path) -> None:
    payload = {
        "nodes": [
            {
                "node_id": n.node_id,
                "base_id": n.base_id,
                "clone_index": n.clone_index,
                "pub_ids": sorted(n.pub_ids),
                "profile": [float(x) for x in n.profile],
            }
            for n in nodes
        ]
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_nodes(path: str | Path) -> list[ResearcherNode]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "nodes" not in payload:
        raise SchemaError(f"{path}: expected a top-level 'nodes' list")
    nodes = []
    for entry in payload["nodes"]:
        nodes.append(
            ResearcherNode(
                node_id=entry["node_id"],
                base_id=entry["base_id"],
                clone_index=int(entry["clone_index"]),
                pub_ids=frozenset(entry["pub_ids"]),
                profile=np.asarray(entry["profile"], dtype=np.float64),
            )
        )
    return nodes


def save_clone_report(report: CloneReport, path: str | Path) -> None:
    payload = {
        "total_researchers": report.total_researchers,
        "high_impact_count": report.high_impact_count,
        "cloned_count": report.cloned_count,
        "clones_per_researcher": dict(sorted(report.clones_per_researcher.items())),
        # an infinite threshold (cloning disabled) is stored as null to stay strict JSON
        "threshold_used": report.threshold_used if math.isfinite(report.threshold_used) else None,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_clone_report(path: str | Path) -> CloneReport:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    raw_threshold = payload["threshold_used"]
    return CloneReport(
        total_researchers=int(payload["total_researchers"]),
        high_impact_count=int(payload["high_impact_count"]),
        cloned_count=int(payload["cloned_count"]),
        clones_per_researcher={k: int(v) for k, v in payload["clones_per_researcher"].items()},
        threshold_used=math.inf if raw_threshold is None else float(raw_threshold),
    )


def save_embeddings(vectors: Mapping[str, np.ndarray], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for pub_id in sorted(vectors):
            row = {"pub_id": pub_id, "vector": [float(x) for x in vectors[pub_id]]}
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def load_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """Per-document embedding vectors, one JSON record per line."""
    out: dict[str, np.ndarray] = {}
    dim = None
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            if "pub_id" not in row or "vector" not in row:
                raise SchemaError(f"{path}:{lineno}: expected 'pub_id' and 'vector' fields")
            pub_id = row["pub_id"]
            if pub_id in out:
                raise SchemaError(f"{path}:{lineno}: duplicate pub_id {pub_id!r}")
            vec = np.asarray(row["vector"], dtype=np.float64)
            if vec.ndim != 1 or vec.size == 0:
                raise SchemaError(f"{path}:{lineno}: vector must be a non-empty flat list")
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise DimensionError(
                    f"{path}:{lineno}: vector length {vec.size} differs from {dim}"
                )
            out[pub_id] = vec
    return out


def save_clone_labels(labels: Mapping[str, Mapping[str, int]], path: str | Path) -> None:
    payload = {
        "labels": {
            base_id: {pub_id: int(label) for pub_id, label in sorted(inner.items())}
            for base_id, inner in sorted(labels.items())
        }
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_clone_labels(path: str | Path) -> dict[str, dict[str, int]]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "labels" not in payload:
        raise SchemaError(f"{path}: expected a top-level 'labels' object")
    out: dict[str, dict[str, int]] = {}
    for base_id, inner in payload["labels"].items():
        if not isinstance(inner, dict):
            raise SchemaError(f"{path}: labels for {base_id!r} must be an object")
        parsed = {}
        for pub_id, label in inner.items():
            if not isinstance(label, int) or isinstance(label, bool):
                raise SchemaError(f"{path}: label for {base_id!r}/{pub_id!r} must be an integer")
            parsed[pub_id] = label
        out[base_id] = parsed
    return out

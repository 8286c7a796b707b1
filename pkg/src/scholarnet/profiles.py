"""Researcher topic profiles and the pairwise topic-similarity matrix.

A topic distribution is a 1-D numpy probability vector over T topics. The
same representation serves documents and researchers; a researcher's profile
is the normalized mean of their documents' rows. Pairwise similarity is
1 minus the Jensen-Shannon divergence, computed in log base 2 so every value
lands in [0, 1].
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DegenerateProfileError,
    DimensionError,
    DocTopicLookupError,
    SchemaError,
)
from .validation import check_distribution, check_same_length, is_zero_row

logger = logging.getLogger(__name__)


@dataclass
class DocTopicTable:
    """Per-document topic distributions keyed by publication id.

    Rows are validated on construction: each must have ``topic_count``
    entries and be either a probability vector or all-zero (documents the
    topic model could not place; they are skipped during aggregation).
    """

    topic_count: int
    rows: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.topic_count < 1:
            raise SchemaError(f"topic_count must be >= 1, got {self.topic_count}")
        validated: dict[str, np.ndarray] = {}
        for pub_id, row in self.rows.items():
            arr = check_distribution(row, name=f"doc-topic row {pub_id!r}", allow_zero=True)
            if arr.shape[0] != self.topic_count:
                raise DimensionError(
                    f"doc-topic row {pub_id!r} has {arr.shape[0]} entries, expected {self.topic_count}"
                )
            validated[pub_id] = arr
        self.rows = validated

    def __contains__(self, pub_id: str) -> bool:
        return pub_id in self.rows

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class SimilarityMatrix:
    """Symmetric matrix of 1-JSD values over an ordered node-id list."""

    node_ids: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.node_ids)
        if self.values.shape != (n, n):
            raise DimensionError(
                f"similarity matrix shape {self.values.shape} does not match {n} node ids"
            )
        if len(set(self.node_ids)) != n:
            raise SchemaError("similarity node_ids contain duplicates")
        if not np.array_equal(self.values, self.values.T):
            raise SchemaError("similarity matrix is not symmetric")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise SchemaError("similarity entries must lie in [0, 1]")
        if not np.all(np.diag(self.values) == 1.0):
            raise SchemaError("similarity diagonal must be exactly 1")

    def value(self, a: str, b: str) -> float:
        i = self.node_ids.index(a)
        j = self.node_ids.index(b)
        return float(self.values[i, j])


def aggregate_profile(doc_topics: DocTopicTable, pub_ids: Iterable[str]) -> np.ndarray:
    """Mean of the member documents' rows, re-normalized to sum to 1.

    All-zero rows are excluded with a warning; if every member row is
    all-zero the profile is degenerate and an error is raised.
    """
    ids = sorted(set(pub_ids))
    if not ids:
        raise DimensionError("aggregate_profile requires a non-empty pub_id set")
    members = []
    for pub_id in ids:
        if pub_id not in doc_topics:
            raise DocTopicLookupError(f"pub_id {pub_id!r} missing from doc-topic table")
        row = doc_topics.rows[pub_id]
        if is_zero_row(row):
            logger.warning("excluding all-zero topic row for %s from aggregation", pub_id)
            continue
        members.append(row)
    if not members:
        raise DegenerateProfileError(
            f"all {len(ids)} member rows are all-zero; no profile can be formed"
        )
    mean = np.mean(np.stack(members), axis=0)
    return mean / mean.sum()


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in base 2, bounded to [0, 1].

    Zero entries of the left argument contribute nothing to each KL term.
    """
    p = check_distribution(p, name="p")
    q = check_distribution(q, name="q")
    check_same_length(p, q)
    m = 0.5 * (p + q)

    def _kl(a: np.ndarray) -> float:
        mask = a > 0
        # a > 0 implies m > 0, so the ratio is always defined
        return float(np.sum(a[mask] * np.log2(a[mask] / m[mask])))

    value = 0.5 * _kl(p) + 0.5 * _kl(q)
    # guard against float drift just outside the mathematical range
    return min(1.0, max(0.0, value))


def similarity(p, q) -> float:
    return 1.0 - jsd(p, q)


def similarity_matrix(profiles: Mapping[str, np.ndarray]) -> SimilarityMatrix:
    """Dense 1-JSD matrix over all profiles, node ids sorted lexicographically."""
    if len(profiles) < 2:
        raise DimensionError(f"similarity_matrix requires >= 2 profiles, got {len(profiles)}")
    node_ids = sorted(profiles)
    dims = {np.asarray(profiles[n]).shape[0] for n in node_ids}
    if len(dims) != 1:
        raise DimensionError(f"profiles have mixed dimensions: {sorted(dims)}")
    n = len(node_ids)
    values = np.ones((n, n), dtype=np.float64)
    for i in range(n):
        pi = profiles[node_ids[i]]
        for j in range(i + 1, n):
            s = 1.0 - jsd(pi, profiles[node_ids[j]])
            values[i, j] = s
            values[j, i] = s
    return SimilarityMatrix(node_ids=node_ids, values=values)


# --- interchange I/O -------------------------------------------------------

def load_doc_topics(path: str | Path) -> DocTopicTable:
    """Read the doc-topics interchange file (JSONL: header line, then rows)."""
    path = Path(path)
    rows: dict[str, np.ndarray] = {}
    topic_count = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno + 1}: invalid JSON: {exc}") from exc
            if topic_count is None:
                if "topic_count" not in record:
                    raise SchemaError(f"{path}: first line must carry 'topic_count'")
                topic_count = int(record["topic_count"])
                continue
            for key in ("pub_id", "probs"):
                if key not in record:
                    raise SchemaError(f"{path}:{lineno + 1}: row missing field {key!r}")
            pub_id = record["pub_id"]
            if pub_id in rows:
                raise SchemaError(f"{path}:{lineno + 1}: duplicate pub_id {pub_id!r}")
            rows[pub_id] = record["probs"]
    if topic_count is None:
        raise SchemaError(f"{path}: empty doc-topics file")
    return DocTopicTable(topic_count=topic_count, rows=rows)


def save_doc_topics(table: DocTopicTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"topic_count": table.topic_count}) + "\n")
        for pub_id in sorted(table.rows):
            probs = [float(x) for x in table.rows[pub_id]]
            fh.write(json.dumps({"pub_id": pub_id, "probs": probs}) + "\n")


def save_similarity(matrix: SimilarityMatrix, path: str | Path) -> None:
    payload = {
        "node_ids": matrix.node_ids,
        "values": [[float(x) for x in row] for row in matrix.values],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_similarity(path: str | Path) -> SimilarityMatrix:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    for key in ("node_ids", "values"):
        if key not in payload:
            raise SchemaError(f"{path}: similarity export missing field {key!r}")
    return SimilarityMatrix(node_ids=list(payload["node_ids"]), values=payload["values"])

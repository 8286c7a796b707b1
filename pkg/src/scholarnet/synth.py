"""Synthetic corpora with planted community structure.

Researchers draw documents from topic mixtures concentrated on one planted
topic block; optional bridge researchers are high-output and split their
documents across two blocks, and an optional heavy-tail profile skews
publication counts. Ground truth (block memberships) is recorded for
scoring recovered communities.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .ingest import Corpus, Publication, build_corpus
from .profiles import DocTopicTable

WORDS_PER_DOC = 40


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the planted-community generator."""

    topics: int = 6
    researchers: int = 60
    communities: int = 3
    pubs_per_researcher: int = 8
    bridges: int = 0
    bridge_pubs: int = 30
    skew: str | None = None
    noise: float = 0.05
    words_per_topic: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.topics < 2:
            raise SchemaError(f"need at least 2 topics, got {self.topics}")
        if self.researchers < 4:
            raise SchemaError(f"need at least 4 researchers, got {self.researchers}")
        if not (1 <= self.communities <= self.topics):
            raise SchemaError(
                f"{self.communities} planted communities cannot partition {self.topics} topics"
            )
        if self.bridges and self.communities < 2:
            raise SchemaError("bridge researchers need at least 2 planted communities")
        if self.pubs_per_researcher < 1 or self.bridge_pubs < 2:
            raise SchemaError("publication counts must be positive (bridges need >= 2)")
        if not (0.0 <= self.noise < 1.0):
            raise SchemaError(f"noise must be in [0, 1), got {self.noise}")
        if self.skew is not None and _parse_skew(self.skew) is None:
            raise SchemaError(f"unrecognized skew profile {self.skew!r}")


def _parse_skew(spec: str) -> float | None:
    spec = spec.strip()
    if spec.startswith("pareto(") and spec.endswith(")"):
        try:
            shape = float(spec[len("pareto(") : -1])
        except ValueError:
            return None
        return shape if shape > 0 else None
    return None


@dataclass
class GroundTruth:
    """Planted block membership per researcher; bridges carry two blocks."""

    communities: dict[str, list[int]]
    topic_blocks: list[list[int]]

    def flat_labels(self) -> dict[str, int]:
        """Single-block researchers only, for partition scoring."""
        return {r: blocks[0] for r, blocks in self.communities.items() if len(blocks) == 1}


@dataclass
class SynthResult:
    corpus: Corpus
    doc_topics: DocTopicTable
    topic_words: dict[int, list[tuple[str, float]]]
    ground_truth: GroundTruth


def _topic_blocks(topics: int, communities: int) -> list[list[int]]:
    base, extra = divmod(topics, communities)
    blocks = []
    start = 0
    for c in range(communities):
        size = base + (1 if c < extra else 0)
        blocks.append(list(range(start, start + size)))
        start += size
    return blocks


def _doc_distribution(rng: np.random.Generator, block: list[int], spec: SynthSpec) -> np.ndarray:
    theta = np.zeros(spec.topics)
    inner = rng.dirichlet(np.full(len(block), 5.0))
    theta[block] = (1.0 - spec.noise) * inner
    outside = [t for t in range(spec.topics) if t not in block]
    if outside and spec.noise > 0.0:
        theta[outside] = spec.noise / len(outside)
    return theta / theta.sum()


def _make_abstract(rng: np.random.Generator, theta: np.ndarray, vocab: list[list[str]]) -> str:
    words = []
    for _ in range(WORDS_PER_DOC):
        topic = int(rng.choice(len(theta), p=theta))
        words.append(vocab[topic][int(rng.integers(len(vocab[topic])))])
    return " ".join(words)


def _pub_count(rng: np.random.Generator, spec: SynthSpec) -> int:
    if spec.skew is None:
        return spec.pubs_per_researcher
    shape = _parse_skew(spec.skew)
    return max(1, int(round(spec.pubs_per_researcher * (1.0 + rng.pareto(shape)))))


def generate_synthetic(spec: SynthSpec) -> SynthResult:
    """Build a corpus, its doc-topic table, topic words, and ground truth."""
    rng = np.random.default_rng(spec.seed)
    blocks = _topic_blocks(spec.topics, spec.communities)
    vocab = [
        [f"w{t:02d}x{j:02d}" for j in range(spec.words_per_topic)]
        for t in range(spec.topics)
    ]

    publications: list[Publication] = []
    rows: dict[str, np.ndarray] = {}
    truth: dict[str, list[int]] = {}
    pub_seq = 0

    def add_doc(author: str, block: list[int]) -> None:
        nonlocal pub_seq
        theta = _doc_distribution(rng, block, spec)
        pub_id = f"P{pub_seq:05d}"
        pub_seq += 1
        publications.append(
            Publication(
                pub_id=pub_id,
                title=f"Study {pub_id}",
                abstract=_make_abstract(rng, theta, vocab),
                year=2010 + pub_seq % 15,
                author_ids=frozenset({author}),
            )
        )
        rows[pub_id] = theta

    for r in range(spec.researchers):
        rid = f"R{r:04d}"
        block_idx = r % spec.communities
        truth[rid] = [block_idx]
        for _ in range(_pub_count(rng, spec)):
            add_doc(rid, blocks[block_idx])

    for b in range(spec.bridges):
        rid = f"B{b:04d}"
        first = b % spec.communities
        second = (b + 1) % spec.communities
        truth[rid] = sorted({first, second})
        half = spec.bridge_pubs // 2
        for i in range(spec.bridge_pubs):
            add_doc(rid, blocks[first] if i < half else blocks[second])

    # ranked word probabilities, same harmonic shape for every topic
    weights = np.array([1.0 / (j + 1) for j in range(spec.words_per_topic)])
    weights /= weights.sum()
    topic_words = {
        t: [(vocab[t][j], float(weights[j])) for j in range(spec.words_per_topic)]
        for t in range(spec.topics)
    }

    corpus = build_corpus(
        publications,
        provenance={
            "source": "synthetic",
            "seed": spec.seed,
            "topics": spec.topics,
            "researchers": spec.researchers,
            "communities": spec.communities,
            "bridges": spec.bridges,
            "skew": spec.skew,
        },
    )
    return SynthResult(
        corpus=corpus,
        doc_topics=DocTopicTable(topic_count=spec.topics, rows=rows),
        topic_words=topic_words,
        ground_truth=GroundTruth(communities=truth, topic_blocks=blocks),
    )


def save_ground_truth(truth: GroundTruth, path: str | Path) -> None:
    payload = {
        "communities": truth.communities,
        "topic_blocks": truth.topic_blocks,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_ground_truth(path: str | Path) -> GroundTruth:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return GroundTruth(
        communities={r: [int(c) for c in cs] for r, cs in payload["communities"].items()},
        topic_blocks=[[int(t) for t in b] for b in payload["topic_blocks"]],
    )

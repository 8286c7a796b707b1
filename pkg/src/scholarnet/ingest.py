"""Publication corpus loading, validation, and the minimum-output filter."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError

REQUIRED_FIELDS = ("pub_id", "title", "abstract", "year", "author_ids")


@dataclass(frozen=True)
class Publication:
    """One paper's metadata. ``author_ids`` is a frozen, non-empty id set."""

    pub_id: str
    title: str
    abstract: str
    year: int
    author_ids: frozenset[str]

    def __post_init__(self):
        if not self.pub_id:
            raise SchemaError("publication has empty pub_id")
        if not self.author_ids:
            raise SchemaError(f"publication {self.pub_id!r} has no authors")


@dataclass
class Corpus:
    """Publications plus the derived researcher -> publication index."""

    publications: list[Publication]
    researchers: dict[str, list[str]]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        validate_corpus(self)

    def publication_index(self) -> dict[str, Publication]:
        return {p.pub_id: p for p in self.publications}

    def pub_counts(self) -> dict[str, int]:
        return {rid: len(pubs) for rid, pubs in self.researchers.items()}


def build_corpus(publications: list[Publication], provenance: dict | None = None) -> Corpus:
    """Assemble a corpus, deriving the researcher index from author ids.

    Publications are sorted by pub_id so the result is deterministic
    regardless of input (or network arrival) order.
    """
    seen: dict[str, Publication] = {}
    for pub in publications:
        if pub.pub_id in seen:
            raise SchemaError(f"duplicate pub_id {pub.pub_id!r}")
        seen[pub.pub_id] = pub
    ordered = [seen[k] for k in sorted(seen)]
    researchers: dict[str, list[str]] = {}
    for pub in ordered:
        for rid in sorted(pub.author_ids):
            researchers.setdefault(rid, []).append(pub.pub_id)
    return Corpus(
        publications=ordered,
        researchers={rid: researchers[rid] for rid in sorted(researchers)},
        provenance=provenance or {},
    )


def validate_corpus(corpus: Corpus) -> None:
    known = {p.pub_id for p in corpus.publications}
    if len(known) != len(corpus.publications):
        raise SchemaError("corpus contains duplicate pub_ids")
    for rid, pubs in corpus.researchers.items():
        if len(set(pubs)) != len(pubs):
            raise SchemaError(f"researcher {rid!r} lists duplicate publications")
        missing = [p for p in pubs if p not in known]
        if missing:
            raise SchemaError(f"researcher {rid!r} references unknown pub_id {missing[0]!r}")


def _parse_record(record: dict, where: str) -> Publication:
    for key in REQUIRED_FIELDS:
        if key not in record:
            raise SchemaError(f"{where}: record missing field {key!r}")
    author_ids = record["author_ids"]
    if not isinstance(author_ids, list) or not all(isinstance(a, str) for a in author_ids):
        raise SchemaError(f"{where}: author_ids must be an array of strings")
    if not isinstance(record["year"], int):
        raise SchemaError(f"{where}: year must be an integer")
    return Publication(
        pub_id=str(record["pub_id"]),
        title=str(record["title"]),
        abstract=str(record["abstract"]),
        year=record["year"],
        author_ids=frozenset(author_ids),
    )


def load_corpus(path: str | Path) -> Corpus:
    """Read a documents interchange file (JSONL, one publication per line)."""
    path = Path(path)
    publications: list[Publication] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: record {index}: invalid JSON: {exc}") from exc
            pub = _parse_record(record, f"{path}: record {index}")
            if pub.pub_id in seen:
                raise SchemaError(f"{path}: record {index}: duplicate pub_id {pub.pub_id!r}")
            seen.add(pub.pub_id)
            publications.append(pub)
    return build_corpus(publications, provenance={"source": str(path)})


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the documents interchange file (JSONL, sorted by pub_id)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for pub in corpus.publications:
            record = {
                "pub_id": pub.pub_id,
                "title": pub.title,
                "abstract": pub.abstract,
                "year": pub.year,
                "author_ids": sorted(pub.author_ids),
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def filter_researchers(corpus: Corpus, min_pubs: int) -> Corpus:
    """Drop researchers with fewer than ``min_pubs`` publications.

    Publications left without any remaining author are dropped as well, and
    surviving author lists are trimmed to the kept researchers so the result
    round-trips through the documents file unchanged. Removal counts are
    recorded in provenance.
    """
    if min_pubs < 1:
        raise ValueError(f"min_pubs must be >= 1, got {min_pubs}")
    kept_researchers = {rid for rid, pubs in corpus.researchers.items() if len(pubs) >= min_pubs}
    kept_pubs = []
    for pub in corpus.publications:
        authors = frozenset(a for a in pub.author_ids if a in kept_researchers)
        if authors:
            kept_pubs.append(
                Publication(
                    pub_id=pub.pub_id,
                    title=pub.title,
                    abstract=pub.abstract,
                    year=pub.year,
                    author_ids=authors,
                )
            )
    provenance = dict(corpus.provenance)
    provenance["filter"] = {
        "min_pubs": min_pubs,
        "researchers_removed": len(corpus.researchers) - len(kept_researchers),
        "publications_removed": len(corpus.publications) - len(kept_pubs),
    }
    return build_corpus(kept_pubs, provenance=provenance)

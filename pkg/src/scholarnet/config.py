"""Pipeline configuration: defaults, flat key=value files, environment
overrides, and command-line flags, in that order of increasing precedence.

Exactly one of the two pruning controls may be active; when neither is set
explicitly the fixed-threshold default applies.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .errors import ConfigError

ENV_PREFIX = "SCHOLARNET_"

DEFAULT_PRUNE_THRESHOLD = 0.25
DEFAULT_TARGET_DENSITY = 0.1


@dataclass
class PipelineConfig:
    """Everything a full run needs; paths point at interchange files."""

    documents: str = "documents.jsonl"
    doc_topics: str = "doc_topics.jsonl"
    topic_words: str | None = None
    clone_labels: str | None = None
    embeddings: str | None = None
    out_dir: str = "out"
    min_pubs: int = 5
    threshold_factor: float = 1.5
    prune_threshold: float | None = None
    target_density: float | None = None
    min_community_size: int = 30
    min_samples: int = 5
    min_cluster_size: int = 10
    cloning: bool = True
    snapshots: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.prune_threshold is not None and self.target_density is not None:
            raise ConfigError(
                "prune_threshold and target_density are mutually exclusive; set only one"
            )
        if self.min_pubs < 1:
            raise ConfigError(f"min_pubs must be >= 1, got {self.min_pubs}")
        if self.threshold_factor <= 0:
            raise ConfigError(f"threshold_factor must be positive, got {self.threshold_factor}")
        if self.prune_threshold is not None and not (0.0 <= self.prune_threshold <= 1.0):
            raise ConfigError(f"prune_threshold must be in [0, 1], got {self.prune_threshold}")
        if self.target_density is not None and not (0.0 < self.target_density <= 1.0):
            raise ConfigError(f"target_density must be in (0, 1], got {self.target_density}")
        if self.min_community_size < 2:
            raise ConfigError(f"min_community_size must be >= 2, got {self.min_community_size}")

    @property
    def prune_mode(self) -> str:
        """Which pruning control is active: 'threshold' or 'density'."""
        return "density" if self.target_density is not None else "threshold"

    def effective_threshold(self) -> float | None:
        """Fixed prune threshold, or None when density-targeting is active."""
        if self.target_density is not None:
            return None
        if self.prune_threshold is not None:
            return self.prune_threshold
        return DEFAULT_PRUNE_THRESHOLD

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = getattr(self, f.name)
        return out


_FIELD_TYPES = {
    "documents": str,
    "doc_topics": str,
    "topic_words": str,
    "clone_labels": str,
    "embeddings": str,
    "out_dir": str,
    "min_pubs": int,
    "threshold_factor": float,
    "prune_threshold": float,
    "target_density": float,
    "min_community_size": int,
    "min_samples": int,
    "min_cluster_size": int,
    "cloning": bool,
    "snapshots": bool,
    "seed": int,
}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if raw.lower() in {"none", "null", ""}:
        return None
    if kind is bool:
        lowered = raw.lower()
        if lowered in {"true", "1", "yes", "on"}:
            return True
        if lowered in {"false", "0", "no", "off"}:
            return False
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r} as a boolean")
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r} as {kind.__name__}") from exc


def parse_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; unknown keys error."""
    out: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def env_overrides(environ: Mapping[str, str] | None = None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for key in _FIELD_TYPES:
        env_key = ENV_PREFIX + key.upper()
        if env_key in environ:
            out[key] = _parse_value(key, environ[env_key])
    return out


def load_config(
    path: str | Path | None = None,
    *,
    environ: Mapping[str, str] | None = None,
    flags: Mapping[str, object] | None = None,
) -> PipelineConfig:
    """Merge defaults < config file < environment < flags.

    ``flags`` entries equal to None mean "not given on the command line"
    and are skipped. Setting one pruning control at a higher layer clears
    the other, so a flag can switch modes without editing the file.
    """
    merged: dict = {}
    for layer in (
        parse_config_file(path) if path else {},
        env_overrides(environ),
        {k: v for k, v in (flags or {}).items() if v is not None},
    ):
        if "prune_threshold" in layer and "target_density" not in layer:
            merged.pop("target_density", None)
        if "target_density" in layer and "prune_threshold" not in layer:
            merged.pop("prune_threshold", None)
        merged.update(layer)
    unknown = set(merged) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(**merged)

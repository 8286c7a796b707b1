"""Weighted undirected research network over researcher/clone nodes.

Edges come from pairwise topic similarity, so weights live in (0, 1]. The
graph is immutable after construction; pruning and subgraph extraction
return new instances, which keeps shared read access safe.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, SchemaError
from .profiles import SimilarityMatrix


def _key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


class ResearchGraph:
    """Undirected graph: sorted node list plus canonically keyed edges."""

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str, float]] = ()):
        self.nodes: list[str] = sorted(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise SchemaError("graph nodes contain duplicates")
        node_set = set(self.nodes)
        self._edges: dict[tuple[str, str], float] = {}
        self._adj: dict[str, dict[str, float]] = {n: {} for n in self.nodes}
        for u, v, w in edges:
            if u == v:
                raise SchemaError(f"self-loop on node {u!r}")
            if u not in node_set or v not in node_set:
                raise SchemaError(f"edge ({u!r}, {v!r}) references a node not in the graph")
            w = float(w)
            if not (0.0 < w <= 1.0):
                raise SchemaError(f"edge ({u!r}, {v!r}) weight {w} outside (0, 1]")
            key = _key(u, v)
            if key in self._edges:
                raise SchemaError(f"duplicate edge ({key[0]!r}, {key[1]!r})")
            self._edges[key] = w
            self._adj[u][v] = w
            self._adj[v][u] = w

    @property
    def edges(self) -> dict[tuple[str, str], float]:
        return dict(self._edges)

    def edge_count(self) -> int:
        return len(self._edges)

    def node_count(self) -> int:
        return len(self.nodes)

    def total_weight(self) -> float:
        return float(sum(self._edges.values()))

    def neighbors(self, node: str) -> Mapping[str, float]:
        return self._adj[node]

    def weighted_degree(self, node: str) -> float:
        return float(sum(self._adj[node].values()))

    def weight(self, u: str, v: str) -> float:
        """Edge weight, or 0.0 when the pair is not connected."""
        return self._edges.get(_key(u, v), 0.0)

    def has_edge(self, u: str, v: str) -> bool:
        return _key(u, v) in self._edges

    def __contains__(self, node: str) -> bool:
        return node in self._adj

    def induced_subgraph(self, nodes: Iterable[str]) -> "ResearchGraph":
        keep = set(nodes)
        unknown = keep - set(self.nodes)
        if unknown:
            raise SchemaError(f"unknown nodes in subgraph request: {sorted(unknown)[:5]}")
        edges = [
            (u, v, w)
            for (u, v), w in self._edges.items()
            if u in keep and v in keep
        ]
        return ResearchGraph(keep, edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResearchGraph):
            return NotImplemented
        return self.nodes == other.nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return f"ResearchGraph(nodes={len(self.nodes)}, edges={len(self._edges)})"


def build_graph(sim: SimilarityMatrix) -> ResearchGraph:
    """Complete similarity graph; pairs with zero similarity carry no edge.

    An absent edge and a zero-weight edge are equivalent for every
    downstream computation (pruning, density, modularity), so zero
    similarities are simply not materialized.
    """
    ids = sim.node_ids
    edges = []
    for i in range(len(ids)):
        row = sim.values[i]
        for j in range(i + 1, len(ids)):
            w = float(row[j])
            if w > 0.0:
                edges.append((ids[i], ids[j], w))
    return ResearchGraph(ids, edges)


def prune_edges(g: ResearchGraph, threshold: float) -> ResearchGraph:
    """Drop edges with weight strictly below the threshold; keep all nodes.

    Ties at the threshold survive. Isolated nodes remain so that every
    researcher still appears downstream.
    """
    if threshold < 0.0:
        raise SchemaError(f"prune threshold must be >= 0, got {threshold}")
    kept = [(u, v, w) for (u, v), w in g.edges.items() if w >= threshold]
    return ResearchGraph(g.nodes, kept)


def density(g: ResearchGraph) -> float:
    """Fraction of possible edges present: |E| / (|V| (|V|-1) / 2)."""
    n = g.node_count()
    if n < 2:
        raise DimensionError(f"density needs at least 2 nodes, got {n}")
    return g.edge_count() / (n * (n - 1) / 2)


def threshold_for_density(g: ResearchGraph, target_density: float) -> float:
    """Smallest prune threshold whose surviving density is <= the target.

    Walks the sorted distinct weights; because pruning is strict-<, a
    candidate threshold t keeps exactly the edges with weight >= t. When
    even pruning at the maximum weight keeps too many edges (ties at the
    top), the next float above the maximum clears them.
    """
    if not (0.0 < target_density <= 1.0):
        raise SchemaError(f"target density must be in (0, 1], got {target_density}")
    n = g.node_count()
    if n < 2:
        raise DimensionError(f"threshold_for_density needs at least 2 nodes, got {n}")
    max_edges = n * (n - 1) / 2
    budget = int(np.floor(target_density * max_edges))
    weights = sorted(set(g.edges.values()))
    if g.edge_count() <= budget:
        return 0.0
    for t in weights:
        kept = sum(1 for w in g.edges.values() if w >= t)
        if kept <= budget:
            return float(t)
    return float(np.nextafter(weights[-1], np.inf))


def save_graph(g: ResearchGraph, path: str | Path) -> None:
    payload = {
        "nodes": g.nodes,
        "edges": [[u, v, w] for (u, v), w in sorted(g.edges.items())],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> ResearchGraph:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "nodes" not in payload or "edges" not in payload:
        raise SchemaError(f"{path}: expected an object with 'nodes' and 'edges'")
    edges = []
    for entry in payload["edges"]:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise SchemaError(f"{path}: edge entries must be [u, v, weight], got {entry!r}")
        edges.append((entry[0], entry[1], float(entry[2])))
    return ResearchGraph(payload["nodes"], edges)

"""Fold clone nodes back to base researcher identities inside communities.

Within each detected community, all clones of one researcher collapse to a
single vertex; parallel edges created by the collapse keep their maximum
weight, and edges between two clones of the same researcher disappear.
Clones of one researcher that landed in different communities are left
alone, which is what lets a researcher belong to several communities.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .community import CommunityTree, TreeNode
from .errors import SchemaError
from .graph import ResearchGraph


def base_of(node_id: str) -> str:
    """Recover the researcher identity from a possibly suffixed node id."""
    stem, sep, tail = node_id.rpartition("#")
    if sep and tail.isdigit():
        return stem
    return node_id


@dataclass
class RefinedCommunity:
    """A community after clone merging: base identities and folded edges."""

    community_id: int
    graph: ResearchGraph
    source_leaf: TreeNode | None = None

    @property
    def members(self) -> set[str]:
        return set(self.graph.nodes)

    @property
    def edges(self) -> dict[tuple[str, str], float]:
        return self.graph.edges

    @property
    def density(self) -> float:
        n = self.graph.node_count()
        if n < 2:
            return 0.0
        return self.graph.edge_count() / (n * (n - 1) / 2)


def _fold(g: ResearchGraph) -> ResearchGraph:
    members = sorted({base_of(n) for n in g.nodes})
    folded: dict[tuple[str, str], float] = {}
    for (u, v), w in g.edges.items():
        bu, bv = base_of(u), base_of(v)
        if bu == bv:
            continue
        key = (bu, bv) if bu <= bv else (bv, bu)
        if w > folded.get(key, 0.0):
            folded[key] = w
    return ResearchGraph(members, [(u, v, w) for (u, v), w in folded.items()])


def refine_community(
    leaf_subgraph: ResearchGraph,
    community_id: int = 0,
    source_leaf: TreeNode | None = None,
) -> RefinedCommunity:
    """Merge same-researcher clones within one community's subgraph.

    Each base identity appears once; every surviving edge carries the
    maximum weight over the clone-pair edges it replaces, so the result is
    independent of edge iteration order.
    """
    return RefinedCommunity(
        community_id=community_id,
        graph=_fold(leaf_subgraph),
        source_leaf=source_leaf,
    )


@dataclass
class OverlapReport:
    """Which communities each researcher ended up in, plus a multiplicity histogram."""

    memberships: dict[str, set[int]]
    overlap_counts: dict[int, int]

    def multi_community(self) -> list[str]:
        return sorted(b for b, cs in self.memberships.items() if len(cs) > 1)


def refine_all(tree: CommunityTree) -> tuple[list[RefinedCommunity], OverlapReport]:
    """Refine every leaf community and tabulate cross-community membership."""
    refined = [
        refine_community(leaf.subgraph, community_id=i, source_leaf=leaf)
        for i, leaf in enumerate(tree.leaves())
    ]
    memberships: dict[str, set[int]] = {}
    for community in refined:
        for member in community.members:
            memberships.setdefault(member, set()).add(community.community_id)
    overlap_counts: dict[int, int] = {}
    for ids in memberships.values():
        overlap_counts[len(ids)] = overlap_counts.get(len(ids), 0) + 1
    return refined, OverlapReport(
        memberships={b: memberships[b] for b in sorted(memberships)},
        overlap_counts=dict(sorted(overlap_counts.items())),
    )


def merge_whole_graph(g: ResearchGraph) -> ResearchGraph:
    """Apply the clone fold to an entire graph, ignoring community structure.

    Used for before/after comparisons; a clone-free graph passes through
    unchanged.
    """
    return _fold(g)


def save_refined(
    communities: list[RefinedCommunity],
    overlap: OverlapReport,
    path: str | Path,
) -> None:
    payload = {
        "communities": [
            {
                "community_id": c.community_id,
                "members": sorted(c.members),
                "edges": [[u, v, w] for (u, v), w in sorted(c.edges.items())],
                "density": c.density,
            }
            for c in communities
        ],
        "overlap": {
            "memberships": {b: sorted(ids) for b, ids in overlap.memberships.items()},
            "overlap_counts": {str(k): v for k, v in overlap.overlap_counts.items()},
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_refined(path: str | Path) -> tuple[list[RefinedCommunity], OverlapReport]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "communities" not in payload or "overlap" not in payload:
        raise SchemaError(f"{path}: expected 'communities' and 'overlap' sections")
    communities = []
    for entry in payload["communities"]:
        graph = ResearchGraph(
            entry["members"],
            [(u, v, float(w)) for u, v, w in entry["edges"]],
        )
        communities.append(RefinedCommunity(community_id=int(entry["community_id"]), graph=graph))
    overlap_payload = payload["overlap"]
    overlap = OverlapReport(
        memberships={b: {int(i) for i in ids} for b, ids in overlap_payload["memberships"].items()},
        overlap_counts={int(k): int(v) for k, v in overlap_payload["overlap_counts"].items()},
    )
    return communities, overlap

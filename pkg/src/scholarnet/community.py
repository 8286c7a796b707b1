"""Hierarchical community detection on the weighted research network.

A seeded two-phase greedy modularity optimizer (local moves, then community
aggregation, repeated to a fixpoint; best partition over a handful of
restarts) is applied recursively: any detected community larger than
``min_size`` is re-split on its induced subgraph until communities are small
enough or irreducible. Determinism comes from threading one seeded generator
through every restart's visit-order shuffles and from smallest-community-id
tie breaking; accepted moves must beat staying put by more than a fixed
epsilon, which also guarantees termination.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import DimensionError, SchemaError
from .graph import ResearchGraph, density

GAIN_EPS = 1e-12

# Bell(8) = 4140 partitions: cheap enough to check exhaustively
EXACT_SIZE_LIMIT = 8


@dataclass
class Partition:
    """Flat community assignment with its modularity score."""

    assignment: dict[str, int]
    modularity: float

    def __post_init__(self):
        ids = set(self.assignment.values())
        if ids != set(range(len(ids))):
            raise SchemaError("community ids must be contiguous integers from 0")

    def communities(self) -> list[list[str]]:
        """Member lists indexed by community id, each sorted."""
        count = len(set(self.assignment.values()))
        out: list[list[str]] = [[] for _ in range(count)]
        for node in sorted(self.assignment):
            out[self.assignment[node]].append(node)
        return out


def modularity(g: ResearchGraph, assignment: Mapping[str, int]) -> float:
    """Weighted Newman modularity of an assignment.

    Q = sum over communities of [w_in/m - (deg_tot/(2m))^2] with w_in the
    undirected internal weight. Extra assignment keys are ignored; a graph
    node missing from the assignment is an error.
    """
    m = g.total_weight()
    if m <= 0.0:
        raise DimensionError("modularity is undefined on an edgeless graph")
    for node in g.nodes:
        if node not in assignment:
            raise SchemaError(f"node {node!r} is not covered by the assignment")
    internal: dict[int, float] = {}
    degree: dict[int, float] = {}
    for node in g.nodes:
        c = assignment[node]
        degree[c] = degree.get(c, 0.0) + g.weighted_degree(node)
    for (u, v), w in g.edges.items():
        if assignment[u] == assignment[v]:
            c = assignment[u]
            internal[c] = internal.get(c, 0.0) + w
    q = 0.0
    for c, deg in degree.items():
        q += internal.get(c, 0.0) / m - (deg / (2.0 * m)) ** 2
    # roundoff can land an ulp under the theoretical floor
    return max(q, -0.5)


def _local_moves(
    adj: list[dict[int, float]],
    self_w: list[float],
    m: float,
    order: list[int],
) -> tuple[list[int], bool]:
    """One level of greedy moves. Returns (community per node, any_moved)."""
    n = len(adj)
    comm = list(range(n))
    degree = [sum(adj[i].values()) + 2.0 * self_w[i] for i in range(n)]
    sigma_tot = degree[:]
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            old = comm[i]
            k_i = degree[i]
            sigma_tot[old] -= k_i
            comm[i] = -1
            # weight from i into each adjacent community, old included
            k_in: dict[int, float] = {old: 0.0}
            for j, w in adj[i].items():
                c = comm[j]
                if c >= 0:
                    k_in[c] = k_in.get(c, 0.0) + w
            best_c, best_gain = old, k_in[old] / m - sigma_tot[old] * k_i / (2.0 * m * m)
            for c in sorted(k_in):
                if c == old:
                    continue
                gain = k_in[c] / m - sigma_tot[c] * k_i / (2.0 * m * m)
                if gain > best_gain + GAIN_EPS:
                    best_c, best_gain = c, gain
            comm[i] = best_c
            sigma_tot[best_c] += k_i
            if best_c != old:
                moved_any = True
                improved = True
    return comm, moved_any


def _aggregate(
    adj: list[dict[int, float]],
    self_w: list[float],
    comm: list[int],
) -> tuple[list[dict[int, float]], list[float], list[int]]:
    """Collapse communities into single nodes, summing parallel edges."""
    labels = sorted(set(comm))
    dense = {c: i for i, c in enumerate(labels)}
    relabeled = [dense[c] for c in comm]
    k = len(labels)
    new_adj: list[dict[int, float]] = [{} for _ in range(k)]
    new_self = [0.0] * k
    for i, c in enumerate(relabeled):
        new_self[c] += self_w[i]
        for j, w in adj[i].items():
            if j < i:
                continue
            d = relabeled[j]
            if c == d:
                new_self[c] += w
            else:
                new_adj[c][d] = new_adj[c].get(d, 0.0) + w
                new_adj[d][c] = new_adj[d].get(c, 0.0) + w
    return new_adj, new_self, relabeled


def _set_partitions(items: list):
    """Every partition of ``items`` into non-empty blocks, deterministic order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in _set_partitions(rest):
        for i, block in enumerate(smaller):
            yield smaller[:i] + [block + [first]] + smaller[i + 1 :]
        yield smaller + [[first]]


def _exact_best(g: ResearchGraph) -> dict[str, int]:
    """Exhaustive-search modularity optimum; first-enumerated wins ties."""
    nodes = g.nodes
    edges = list(g.edges.items())
    m = g.total_weight()
    degree = {node: g.weighted_degree(node) for node in nodes}
    best_q = float("-inf")
    best_blocks: list[list[str]] = []
    for blocks in _set_partitions(nodes):
        community_of = {node: ci for ci, block in enumerate(blocks) for node in block}
        w_in = [0.0] * len(blocks)
        deg_tot = [0.0] * len(blocks)
        for (u, v), w in edges:
            if community_of[u] == community_of[v]:
                w_in[community_of[u]] += w
        for node in nodes:
            deg_tot[community_of[node]] += degree[node]
        q = sum(wi / m - (dt / (2.0 * m)) ** 2 for wi, dt in zip(w_in, deg_tot))
        if q > best_q + GAIN_EPS:
            best_q, best_blocks = q, blocks
    community_of = {node: ci for ci, block in enumerate(best_blocks) for node in block}
    return {node: community_of[node] for node in nodes}


def _louvain_once(
    base_adj: list[dict[int, float]],
    n_nodes: int,
    m: float,
    rng: random.Random,
) -> list[int]:
    """One full two-phase run; returns the community index per node."""
    adj = base_adj
    self_w = [0.0] * n_nodes
    membership = list(range(n_nodes))
    while True:
        order = list(range(len(adj)))
        rng.shuffle(order)
        comm, moved = _local_moves(adj, self_w, m, order)
        if not moved:
            break
        adj, self_w, relabeled = _aggregate(adj, self_w, comm)
        membership = [relabeled[membership[i]] for i in range(n_nodes)]
        if len(adj) == 1:
            break
    return membership


def _canonical(nodes: list[str], membership: list[int]) -> dict[str, int]:
    """Renumber community ids ascending by each one's first member index."""
    first_seen: dict[int, int] = {}
    for i, c in enumerate(membership):
        first_seen.setdefault(c, i)
    canon = {
        c: rank
        for rank, c in enumerate(sorted(first_seen, key=lambda c: first_seen[c]))
    }
    return {nodes[i]: canon[membership[i]] for i in range(len(nodes))}


def louvain(g: ResearchGraph, seed: int = 0, restarts: int = 10) -> Partition:
    """Greedy modularity optimization, best of ``restarts`` seeded runs.

    Each run shuffles the visit order once per level with a generator
    threaded through all restarts, so the result is deterministic per
    seed. Within a run a node moves only when the insertion gain strictly
    beats remaining in its current community (ties stay / go to the
    smallest community id), so modularity is non-decreasing and the loop
    terminates; across runs the highest-modularity partition wins. Greedy
    single-node moves can still miss optima that require moving several
    nodes at once, so on graphs small enough to enumerate every partition
    the exhaustive optimum replaces the greedy result when strictly
    better; at that size the returned partition is exact. Isolated nodes
    end in singleton communities.
    """
    if restarts < 1:
        raise SchemaError(f"restarts must be >= 1, got {restarts}")
    m = g.total_weight()
    if m <= 0.0:
        raise DimensionError("community detection needs at least one edge")
    nodes = g.nodes
    index = {node: i for i, node in enumerate(nodes)}
    base_adj: list[dict[int, float]] = [
        {index[v]: w for v, w in g.neighbors(u).items()} for u in nodes
    ]
    rng = random.Random(seed)

    best: Partition | None = None
    for _ in range(restarts):
        assignment = _canonical(nodes, _louvain_once(base_adj, len(nodes), m, rng))
        candidate = Partition(assignment=assignment, modularity=modularity(g, assignment))
        # strict improvement keeps the earliest winner on ties
        if best is None or candidate.modularity > best.modularity + GAIN_EPS:
            best = candidate

    if len(nodes) <= EXACT_SIZE_LIMIT:
        exact = _exact_best(g)
        q = modularity(g, exact)
        if q > best.modularity + GAIN_EPS:
            membership = [exact[node] for node in nodes]
            best = Partition(assignment=_canonical(nodes, membership), modularity=q)
    return best


@dataclass
class TreeNode:
    """One node of the community hierarchy; leaves are final communities."""

    node_ids: list[str]
    subgraph: ResearchGraph
    density: float
    modularity: float | None = None
    children: list["TreeNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def size(self) -> int:
        return len(self.node_ids)


@dataclass
class CommunityTree:
    root: TreeNode
    min_size: int
    seed: int

    def leaves(self) -> list[TreeNode]:
        """Final communities, collected left to right."""
        out: list[TreeNode] = []

        def walk(node: TreeNode) -> None:
            if node.is_leaf:
                out.append(node)
            else:
                for child in node.children:
                    walk(child)

        walk(self.root)
        return out


def _node_density(sub: ResearchGraph) -> float:
    if sub.node_count() < 2:
        return 0.0
    return density(sub)


def _split(sub: ResearchGraph, min_size: int, seed: int) -> TreeNode:
    """Run one detection pass on this subgraph and recurse into oversize parts."""
    node = TreeNode(node_ids=sub.nodes, subgraph=sub, density=_node_density(sub))
    if sub.node_count() <= 1:
        return node
    if sub.total_weight() <= 0.0:
        # nothing to optimize: every node is its own community
        node.children = [
            TreeNode(node_ids=[n], subgraph=sub.induced_subgraph([n]), density=0.0)
            for n in sub.nodes
        ]
        return node
    part = louvain(sub, seed)
    groups = part.communities()
    if len(groups) <= 1:
        return node  # irreducible regardless of size
    node.modularity = part.modularity
    children = []
    for ci, group in enumerate(groups):
        child_sub = sub.induced_subgraph(group)
        if len(group) > min_size:
            children.append(_split(child_sub, min_size, seed * 31 + ci + 1))
        else:
            children.append(
                TreeNode(node_ids=child_sub.nodes, subgraph=child_sub, density=_node_density(child_sub))
            )
    node.children = children
    return node


def nh_louvain(g: ResearchGraph, min_size: int = 30, seed: int = 0) -> CommunityTree:
    """Recursive community detection with a minimum-size stopping rule.

    The root graph is always split once; only communities larger than
    ``min_size`` are re-split on their induced subgraphs (original edge
    weights, no re-normalization) until they stop splitting or shrink to
    size <= ``min_size``. An edgeless (sub)graph yields singleton leaves.
    """
    if min_size < 2:
        raise SchemaError(f"min_size must be >= 2, got {min_size}")
    return CommunityTree(root=_split(g, min_size, seed), min_size=min_size, seed=seed)


def _tree_node_payload(node: TreeNode) -> dict:
    return {
        "node_ids": node.node_ids,
        "density": node.density,
        "modularity": node.modularity,
        "children": [_tree_node_payload(child) for child in node.children],
    }


def save_community_tree(tree: CommunityTree, path: str | Path) -> None:
    payload = {
        "min_size": tree.min_size,
        "seed": tree.seed,
        "root": _tree_node_payload(tree.root),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _tree_node_from_payload(payload: dict, graph: ResearchGraph) -> TreeNode:
    sub = graph.induced_subgraph(payload["node_ids"])
    node = TreeNode(
        node_ids=sorted(payload["node_ids"]),
        subgraph=sub,
        density=float(payload["density"]),
        modularity=payload.get("modularity"),
    )
    node.children = [_tree_node_from_payload(c, graph) for c in payload.get("children", [])]
    return node


def load_community_tree(path: str | Path, graph: ResearchGraph) -> CommunityTree:
    """Rebuild a saved tree; induced subgraphs are recomputed from ``graph``."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "root" not in payload:
        raise SchemaError(f"{path}: expected an object with a 'root' tree")
    return CommunityTree(
        root=_tree_node_from_payload(payload["root"], graph),
        min_size=int(payload.get("min_size", 2)),
        seed=int(payload.get("seed", 0)),
    )

"""Estimator-style wrappers around the clustering and community cores.

These follow the fit/fit_predict/labels_ conventions so they can sit in
sklearn pipelines and grids; the functional APIs in the sibling modules
remain the primary interface.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array

from .cloning import ClusterParams, cluster_publications
from .community import louvain, nh_louvain
from .errors import SchemaError
from .graph import ResearchGraph, prune_edges


def _index_keys(n: int) -> list[str]:
    width = max(1, len(str(n - 1)))
    return [f"{i:0{width}d}" for i in range(n)]


def _graph_from_affinity(X: np.ndarray) -> ResearchGraph:
    X = check_array(X, dtype=np.float64)
    n, m = X.shape
    if n != m:
        raise SchemaError(f"affinity matrix must be square, got {X.shape}")
    if not np.allclose(X, X.T):
        raise SchemaError("affinity matrix must be symmetric")
    keys = _index_keys(n)
    edges = [
        (keys[i], keys[j], float(X[i, j]))
        for i in range(n)
        for j in range(i + 1, n)
        if X[i, j] > 0.0
    ]
    return ResearchGraph(keys, edges)


class PublicationClusterer(ClusterMixin, BaseEstimator):
    """Density clustering of document vectors, noise labeled -1.

    The neighborhood radius is read off the knee of the k-distance curve
    and clusters below ``min_cluster_size`` are folded into noise. With the
    default metric rows must be probability vectors.
    """

    def __init__(self, min_samples: int = 5, min_cluster_size: int = 10, metric: str = "jsd"):
        self.min_samples = min_samples
        self.min_cluster_size = min_cluster_size
        self.metric = metric

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        keys = _index_keys(X.shape[0])
        label_map = cluster_publications(
            {keys[i]: X[i] for i in range(X.shape[0])},
            ClusterParams(self.min_samples, self.min_cluster_size),
            metric=self.metric,
        )
        self.labels_ = np.array([label_map[k] for k in keys], dtype=int)
        self.n_clusters_ = len(set(self.labels_) - {-1})
        return self


class LouvainCommunities(ClusterMixin, BaseEstimator):
    """Single-level seeded modularity clustering over an affinity matrix."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def fit(self, X, y=None):
        g = _graph_from_affinity(X)
        part = louvain(g, seed=self.seed)
        self.labels_ = np.array([part.assignment[k] for k in g.nodes], dtype=int)
        self.modularity_ = part.modularity
        return self


class NestedLouvain(ClusterMixin, BaseEstimator):
    """Recursive modularity clustering; labels are leaf-community indices."""

    def __init__(self, min_size: int = 30, seed: int = 0, prune_threshold: float | None = None):
        self.min_size = min_size
        self.seed = seed
        self.prune_threshold = prune_threshold

    def fit(self, X, y=None):
        g = _graph_from_affinity(X)
        if self.prune_threshold is not None:
            g = prune_edges(g, self.prune_threshold)
        tree = nh_louvain(g, min_size=self.min_size, seed=self.seed)
        leaf_of = {}
        for idx, leaf in enumerate(tree.leaves()):
            for node in leaf.node_ids:
                leaf_of[node] = idx
        self.labels_ = np.array([leaf_of[k] for k in g.nodes], dtype=int)
        self.tree_ = tree
        return self

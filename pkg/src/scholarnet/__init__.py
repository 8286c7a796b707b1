"""Topic-similarity research networks with researcher cloning.

Builds weighted researcher networks from per-document topic distributions,
splits prolific researchers into topical clones, detects hierarchical
communities, and merges the clones back per community so one researcher can
belong to several communities.
"""

from .cloning import (
    CloneReport,
    ClusterParams,
    ResearcherNode,
    cluster_publications,
    high_impact_threshold,
    make_clones,
)
from .community import (
    CommunityTree,
    Partition,
    TreeNode,
    louvain,
    modularity,
    nh_louvain,
)
from .config import PipelineConfig, load_config
from .errors import (
    ConfigError,
    DegenerateProfileError,
    DimensionError,
    DocTopicLookupError,
    PipelineStageError,
    ScholarnetError,
    SchemaError,
    TransportError,
)
from .estimators import LouvainCommunities, NestedLouvain, PublicationClusterer
from .graph import (
    ResearchGraph,
    build_graph,
    density,
    prune_edges,
    threshold_for_density,
)
from .ingest import Corpus, Publication, build_corpus, filter_researchers, load_corpus, save_corpus
from .openalex import fetch_openalex
from .pipeline import Manifest, run_pipeline, run_synth
from .profiles import (
    DocTopicTable,
    SimilarityMatrix,
    aggregate_profile,
    jsd,
    similarity,
    similarity_matrix,
)
from .refine import (
    OverlapReport,
    RefinedCommunity,
    merge_whole_graph,
    refine_all,
    refine_community,
)
from .report import (
    EdgeWeightStats,
    WordcloudTable,
    community_stats,
    edge_stats,
    mean_edge_delta,
    wordcloud_scores,
)
from .synth import GroundTruth, SynthSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "CloneReport",
    "ClusterParams",
    "CommunityTree",
    "ConfigError",
    "Corpus",
    "DegenerateProfileError",
    "DimensionError",
    "DocTopicLookupError",
    "DocTopicTable",
    "EdgeWeightStats",
    "GroundTruth",
    "LouvainCommunities",
    "Manifest",
    "NestedLouvain",
    "OverlapReport",
    "Partition",
    "PipelineConfig",
    "PipelineStageError",
    "Publication",
    "PublicationClusterer",
    "RefinedCommunity",
    "ResearchGraph",
    "ResearcherNode",
    "ScholarnetError",
    "SchemaError",
    "SimilarityMatrix",
    "SynthSpec",
    "TransportError",
    "TreeNode",
    "WordcloudTable",
    "aggregate_profile",
    "build_corpus",
    "build_graph",
    "cluster_publications",
    "community_stats",
    "density",
    "edge_stats",
    "fetch_openalex",
    "filter_researchers",
    "generate_synthetic",
    "high_impact_threshold",
    "jsd",
    "load_config",
    "load_corpus",
    "louvain",
    "make_clones",
    "mean_edge_delta",
    "merge_whole_graph",
    "modularity",
    "nh_louvain",
    "prune_edges",
    "refine_all",
    "refine_community",
    "run_pipeline",
    "run_synth",
    "save_corpus",
    "similarity",
    "similarity_matrix",
    "threshold_for_density",
    "wordcloud_scores",
]

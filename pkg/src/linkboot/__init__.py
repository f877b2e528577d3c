"""Link bootstrapping sampling, its closed-form predictions, and cross-network analytics."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    ComponentReport,
    DegreeStats,
    Graph,
    build_graph,
    connected_components,
    degree_stats,
    global_clustering,
    local_clustering,
    reciprocity,
)
from .sampler import CopiedNetwork, LbsParams, lbs_sample, lbs_sweep  # noqa: E402

__all__ = [
    "ComponentReport", "CopiedNetwork", "DegreeStats", "Graph", "LbsParams",
    "build_graph", "connected_components", "degree_stats", "global_clustering",
    "lbs_sample", "lbs_sweep", "local_clustering", "reciprocity",
]

"""Byte-budgeted graph distillation.

Compresses a node-attributed training graph into a small induced subgraph:
embed nodes with continuous WL-style aggregation, estimate each node's
representative power through sampled reverse k-NN, greedily pick exemplar
roots that maximize coverage within the byte budget, then iteratively prune
low-influence ego nodes with personalized PageRank and refill the freed
space.
"""

from .coverage import ExemplarSelection, brute_force_optimal, greedy_select, marginal_gain
from .graph import (
    DistilledGraph,
    Graph,
    GraphFormatError,
    byte_size,
    graph_from_edges,
    induced_subgraph,
    l_hop_neighborhood,
    load_graph,
    write_distilled,
    write_graph,
)
from .pipeline import (
    DistillConfig,
    InfeasibleBudgetError,
    RunReport,
    distill,
    distill_graph,
    scaling_probe,
)
from .revknn import RevKnnIndex, SampleConfig, build_rev_knn, representative_power, sample_size
from .sparsify import PprConfig, PprScores, knee_index, ppr, prune_and_enrich
from .synth import generate_synthetic
from .wl import WLEmbeddingTable, tree_distance, wl_embed

__all__ = [
    "DistillConfig",
    "DistilledGraph",
    "ExemplarSelection",
    "Graph",
    "GraphFormatError",
    "InfeasibleBudgetError",
    "PprConfig",
    "PprScores",
    "RevKnnIndex",
    "RunReport",
    "SampleConfig",
    "WLEmbeddingTable",
    "brute_force_optimal",
    "build_rev_knn",
    "byte_size",
    "distill",
    "distill_graph",
    "generate_synthetic",
    "graph_from_edges",
    "greedy_select",
    "induced_subgraph",
    "knee_index",
    "l_hop_neighborhood",
    "load_graph",
    "marginal_gain",
    "ppr",
    "prune_and_enrich",
    "representative_power",
    "sample_size",
    "scaling_probe",
    "tree_distance",
    "wl_embed",
    "write_distilled",
    "write_graph",
]

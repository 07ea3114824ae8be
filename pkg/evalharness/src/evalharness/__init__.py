"""Downstream GNN evaluation for distilled graph datasets."""

from .data import (
    Dataset,
    dataset_bytes,
    induced,
    load_dataset,
    load_provenance,
    random_budget_subgraph,
    split_indices,
    write_dataset,
)
from .harness import (
    EvalRow,
    distill_train_graph,
    gnn_hidden_embeddings,
    load_wl_embeddings,
    pair_distance_correlations,
    rows_to_markdown,
    rows_to_tsv,
    run_experiment,
    train_and_eval,
)
from .models import GCN, GIN, build_adjacency, build_model

__all__ = [
    "Dataset",
    "EvalRow",
    "GCN",
    "GIN",
    "build_adjacency",
    "build_model",
    "dataset_bytes",
    "distill_train_graph",
    "gnn_hidden_embeddings",
    "induced",
    "load_dataset",
    "load_provenance",
    "load_wl_embeddings",
    "pair_distance_correlations",
    "random_budget_subgraph",
    "rows_to_markdown",
    "rows_to_tsv",
    "run_experiment",
    "split_indices",
    "train_and_eval",
    "write_dataset",
]

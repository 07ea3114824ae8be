"""Continuous Weisfeiler-Lehman style node embeddings and tree distances.

Each layer halves the node's previous vector against the mean of its
neighbors' previous vectors:

    a_next[v] = 0.5 * (a[v] + mean_{u in N(v)} a[u])

Isolated nodes keep their vector unchanged (no 1/2 shrink: repeatedly
shrinking a lone feature vector toward zero would destroy information
without mixing in anything new).  After L layers the row for node v
summarizes its depth-L message-passing neighborhood, so the L2 distance
between rows acts as a distance between the unrolled computation trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .graph import Graph, format_feature


@dataclass(eq=False)
class WLEmbeddingTable:
    """Per-node embedding rows after ``depth`` aggregation layers."""

    embeddings: np.ndarray
    depth: int
    source_num_nodes: int

    def row(self, v: int) -> np.ndarray:
        return self.embeddings[v]


def wl_embed(g: Graph, depth: int, normalize: bool = False) -> WLEmbeddingTable:
    """Run ``depth`` aggregation layers over the graph features.

    Layer 0 is the feature matrix itself.  Double-buffered and fully
    vectorized; each node's neighbor reduction follows its sorted CSR slice,
    so results are bit-identical across runs and thread counts.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    feats = g.features.astype(np.float64, copy=True)
    if normalize:
        norms = np.linalg.norm(feats, axis=1, keepdims=True)
        np.divide(feats, norms, out=feats, where=norms > 0)
    if depth == 0 or g.num_edges == 0:
        # no layers, or every node isolated: all layers equal layer 0
        return WLEmbeddingTable(feats, depth, g.num_nodes)
    adj = sp.csr_matrix(
        (np.ones(g.num_edges, dtype=np.float64), g.csr_targets, g.csr_offsets),
        shape=(g.num_nodes, g.num_nodes),
    )
    deg = g.degrees().astype(np.float64)
    isolated = deg == 0
    inv_deg = np.zeros_like(deg)
    inv_deg[~isolated] = 1.0 / deg[~isolated]
    cur = feats
    for _ in range(depth):
        neigh_mean = (adj @ cur) * inv_deg[:, None]
        nxt = 0.5 * (cur + neigh_mean)
        nxt[isolated] = cur[isolated]
        cur = nxt
    return WLEmbeddingTable(cur, depth, g.num_nodes)


def tree_distance(table: WLEmbeddingTable, u: int, v: int) -> float:
    """L2 distance between the embedding rows of two nodes."""
    n = table.source_num_nodes
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError("node id out of range")
    return float(np.linalg.norm(table.embeddings[u] - table.embeddings[v]))


def write_embeddings(table: WLEmbeddingTable, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for v in range(table.source_num_nodes):
            fh.write(f"{v}\t" + ",".join(format_feature(x) for x in table.embeddings[v]) + "\n")

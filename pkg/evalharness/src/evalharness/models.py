"""Two-layer message-passing models for node classification (CPU, full batch)."""

from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F


def gcn_adjacency(edges: np.ndarray, n: int) -> torch.Tensor:
    """Sparse symmetric-normalized adjacency with self-loops: D^-1/2 (A+I) D^-1/2."""
    if edges.size:
        u, v = edges[:, 0], edges[:, 1]
        off_diag = u != v
        rows = np.concatenate([u, v[off_diag], np.arange(n)])
        cols = np.concatenate([v, u[off_diag], np.arange(n)])
    else:
        rows = cols = np.arange(n)
    deg = np.bincount(rows, minlength=n).astype(np.float64)
    weights = 1.0 / np.sqrt(deg[rows] * deg[cols])
    return torch.sparse_coo_tensor(
        torch.tensor(np.stack([rows, cols])), torch.tensor(weights, dtype=torch.float32),
        size=(n, n), check_invariants=False,
    ).coalesce()


def sum_adjacency(edges: np.ndarray, n: int) -> torch.Tensor:
    """Sparse unnormalized adjacency (no self-loops) for sum aggregation."""
    if edges.size == 0:
        return torch.sparse_coo_tensor(torch.zeros((2, 0), dtype=torch.int64),
                                       torch.zeros(0), size=(n, n),
                                       check_invariants=False).coalesce()
    u, v = edges[:, 0], edges[:, 1]
    off_diag = u != v
    rows = np.concatenate([u, v[off_diag]])
    cols = np.concatenate([v, u[off_diag]])
    return torch.sparse_coo_tensor(
        torch.tensor(np.stack([rows, cols])),
        torch.ones(rows.shape[0], dtype=torch.float32), size=(n, n),
        check_invariants=False,
    ).coalesce()


class GCN(nn.Module):
    def __init__(self, in_dim: int, hidden: int, num_classes: int, dropout: float = 0.5):
        super().__init__()
        self.lin1 = nn.Linear(in_dim, hidden)
        self.lin2 = nn.Linear(hidden, num_classes)
        self.dropout = dropout

    def forward(self, adj: torch.Tensor, x: torch.Tensor, return_hidden: bool = False):
        h = torch.sparse.mm(adj, self.lin1(x))
        h = F.relu(h)
        hidden = h
        h = F.dropout(h, p=self.dropout, training=self.training)
        out = torch.sparse.mm(adj, self.lin2(h))
        return (out, hidden) if return_hidden else out


class GIN(nn.Module):
    """Sum aggregation with a linear update per layer."""

    def __init__(self, in_dim: int, hidden: int, num_classes: int, dropout: float = 0.5):
        super().__init__()
        self.lin1 = nn.Linear(in_dim, hidden)
        self.lin2 = nn.Linear(hidden, num_classes)
        self.dropout = dropout

    def forward(self, adj: torch.Tensor, x: torch.Tensor, return_hidden: bool = False):
        h = self.lin1(x + torch.sparse.mm(adj, x))
        h = F.relu(h)
        hidden = h
        h = F.dropout(h, p=self.dropout, training=self.training)
        out = self.lin2(h + torch.sparse.mm(adj, h))
        return (out, hidden) if return_hidden else out


MODELS = {"gcn": (GCN, gcn_adjacency), "gin": (GIN, sum_adjacency)}


def build_model(name: str, in_dim: int, hidden: int, num_classes: int) -> nn.Module:
    if name not in MODELS:
        raise ValueError(f"unknown model {name!r}; expected one of {sorted(MODELS)}")
    return MODELS[name][0](in_dim, hidden, num_classes)


def build_adjacency(name: str, edges: np.ndarray, n: int) -> torch.Tensor:
    return MODELS[name][1](edges, n)

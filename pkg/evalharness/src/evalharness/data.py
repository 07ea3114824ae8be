"""Dataset I/O against the distiller's TSV interchange format.

The harness talks to the distiller exclusively through files: it writes
train graphs as nodes.tsv/edges.tsv, invokes the CLI, and reads back the
emitted nodes/edges/provenance triple.  Byte accounting reimplements the
published rule (4-byte features, 8-byte id and edge slots, 4-byte labels
when present) so budgets can be size-matched without importing the
distiller.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

UNLABELED = -1


@dataclass(eq=False)
class Dataset:
    features: np.ndarray          # (n, F) float64
    labels: np.ndarray            # (n,) int64, -1 where unlabeled
    edges: np.ndarray             # (m, 2) unique undirected pairs, u <= v

    @property
    def num_nodes(self) -> int:
        return int(self.features.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def num_classes(self) -> int:
        labeled = self.labels[self.labels != UNLABELED]
        return int(labeled.max()) + 1 if labeled.size else 0

    @property
    def labeled(self) -> bool:
        return bool(np.any(self.labels != UNLABELED))


def load_dataset(directory: str | Path) -> Dataset:
    directory = Path(directory)
    rows = []
    with (directory / "nodes.tsv").open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            node_id, label, feats = line.split("\t")
            rows.append((int(node_id), int(label),
                         np.array([float(x) for x in feats.split(",")])))
    rows.sort(key=lambda r: r[0])
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ValueError(f"{directory}/nodes.tsv: ids are not contiguous")
    features = np.stack([r[2] for r in rows])
    labels = np.array([r[1] for r in rows], dtype=np.int64)
    edges = []
    with (directory / "edges.tsv").open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            u, v = (int(x) for x in line.split("\t"))
            edges.append((min(u, v), max(u, v)))
    edge_arr = np.array(sorted(set(edges)), dtype=np.int64).reshape(-1, 2)
    return Dataset(features=features, labels=labels, edges=edge_arr)


def load_provenance(directory: str | Path):
    """(origin_ids, root_flags) arrays from a distilled output directory."""
    origins, flags = [], []
    with (Path(directory) / "provenance.tsv").open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            _, origin, is_root = line.split("\t")
            origins.append(int(origin))
            flags.append(is_root == "1")
    return np.array(origins, dtype=np.int64), np.array(flags, dtype=bool)


def write_dataset(ds: Dataset, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with (directory / "nodes.tsv").open("w") as fh:
        for v in range(ds.num_nodes):
            feats = ",".join(f"{x:.9g}" for x in ds.features[v])
            fh.write(f"{v}\t{int(ds.labels[v])}\t{feats}\n")
    with (directory / "edges.tsv").open("w") as fh:
        for u, v in ds.edges:
            fh.write(f"{u}\t{v}\n")


def dataset_bytes(ds: Dataset) -> int:
    """Published accounting rule; directed slots = 2 per edge, 1 per self-loop."""
    slots = int(2 * ds.edges.shape[0] - np.count_nonzero(ds.edges[:, 0] == ds.edges[:, 1])) \
        if ds.edges.size else 0
    total = ds.num_nodes * (ds.feature_dim * 4 + 8) + slots * 8
    if ds.labeled:
        total += ds.num_nodes * 4
    return total


def split_indices(n: int, seed: int, fractions=(0.6, 0.2, 0.2)):
    """Deterministic train/val/test node split."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("fractions must sum to 1")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(fractions[0] * n)
    n_val = int(fractions[1] * n)
    return order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:]


def induced(ds: Dataset, node_ids) -> tuple[Dataset, np.ndarray]:
    """Induced sub-dataset; returns (subset, origin ids sorted ascending)."""
    origin = np.unique(np.asarray(node_ids, dtype=np.int64))
    remap = np.full(ds.num_nodes, -1, dtype=np.int64)
    remap[origin] = np.arange(origin.size)
    keep = (remap[ds.edges[:, 0]] >= 0) & (remap[ds.edges[:, 1]] >= 0) \
        if ds.edges.size else np.zeros(0, dtype=bool)
    sub_edges = remap[ds.edges[keep]] if ds.edges.size else ds.edges
    return Dataset(
        features=ds.features[origin].copy(),
        labels=ds.labels[origin].copy(),
        edges=np.sort(sub_edges, axis=1) if sub_edges.size else sub_edges.reshape(0, 2),
    ), origin


def random_budget_subgraph(ds: Dataset, budget_bytes: int, seed: int):
    """Largest random-prefix induced subgraph that fits the byte budget.

    Induced-subgraph bytes grow monotonically with the prefix length, so a
    binary search over the shuffled prefix finds the size-matched control.
    """
    order = np.random.default_rng(seed).permutation(ds.num_nodes)
    lo, hi = 0, ds.num_nodes
    while lo < hi:
        mid = (lo + hi + 1) // 2
        sub, _ = induced(ds, order[:mid])
        if dataset_bytes(sub) <= budget_bytes:
            lo = mid
        else:
            hi = mid - 1
    if lo == 0:
        raise ValueError("budget too small for even one node")
    return induced(ds, order[:lo])

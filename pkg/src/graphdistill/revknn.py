"""Sampled reverse k-nearest-neighbor index over embedding rows.

A node's representative power is the fraction of sampled nodes whose exact
k-NN (by embedding L2 distance, brute force over all nodes) contains it.
Sampling z nodes uniformly without replacement keeps the estimate within
theta of the full-population value with probability 1 - delta, via a
Chernoff argument, as long as

    z >= ln(2/delta) * (2 + theta) / theta^2

which is independent of the graph size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .wl import WLEmbeddingTable

_CHUNK = 32  # samples per distance-scan block; bounds the (chunk, n) buffers


@dataclass(frozen=True)
class SampleConfig:
    theta: float = 0.15
    delta: float = 0.1
    k: int = 5
    seed: int = 0

    def validate(self) -> None:
        if not (0.0 < self.theta <= 1.0):
            raise ValueError(f"theta must be in (0, 1], got {self.theta}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(eq=False)
class RevKnnIndex:
    """Per-node lists of sample ids whose k-NN contains that node.

    Lists are stored flat: node v's list is
    ``rev_targets[rev_indptr[v]:rev_indptr[v + 1]]``, ascending.  Every
    sample contributes exactly ``k`` memberships, so the total list length
    is ``sample_size * k``.
    """

    sample_ids: np.ndarray
    k: int
    rev_indptr: np.ndarray
    rev_targets: np.ndarray

    @property
    def sample_size(self) -> int:
        return int(self.sample_ids.shape[0])

    @property
    def num_nodes(self) -> int:
        return int(self.rev_indptr.shape[0] - 1)

    def rev_list(self, v: int) -> np.ndarray:
        return self.rev_targets[self.rev_indptr[v]:self.rev_indptr[v + 1]]

    def rev_counts(self) -> np.ndarray:
        return np.diff(self.rev_indptr)


def sample_size(theta: float, delta: float) -> int:
    """Smallest sample count meeting the (theta, delta) concentration bound."""
    if not (0.0 < theta <= 1.0):
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.ceil(math.log(2.0 / delta) * (2.0 + theta) / (theta * theta))


def _knn_block(emb: np.ndarray, samples: np.ndarray, k: int, out: np.ndarray) -> None:
    """Exact k-NN rows for a block of sample ids, written into ``out``.

    Ordering is by squared L2 distance with ties broken by ascending node id
    (stable argsort over the natural index order); the query point itself is
    excluded.
    """
    diff = emb[samples][:, None, :] - emb[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    for i, s in enumerate(samples):
        row = d2[i]
        row[s] = np.inf
        out[i] = np.argsort(row, kind="stable")[:k]


def build_rev_knn(table: WLEmbeddingTable, cfg: SampleConfig, threads: int = 1) -> RevKnnIndex:
    """Draw the sample, run brute-force k-NN per sample, and invert the lists.

    The per-sample scans are independent and may run on a thread pool; each
    block writes a disjoint slice of the k-NN matrix and assembly happens in
    ascending sample order, so the result is identical for any thread count.
    """
    cfg.validate()
    n = table.source_num_nodes
    if n <= cfg.k:
        raise ValueError(f"need more than k={cfg.k} nodes, got {n}")
    z = min(sample_size(cfg.theta, cfg.delta), n)
    rng = np.random.default_rng(cfg.seed)
    sample_ids = np.sort(rng.choice(n, size=z, replace=False)).astype(np.int64)

    knn = np.empty((z, cfg.k), dtype=np.int64)
    blocks = [slice(i, min(i + _CHUNK, z)) for i in range(0, z, _CHUNK)]
    emb = table.embeddings
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_knn_block, emb, sample_ids[b], cfg.k, knn[b]) for b in blocks
            ]
            for f in futs:
                f.result()
    else:
        for b in blocks:
            _knn_block(emb, sample_ids[b], cfg.k, knn[b])

    # invert: (sample, member) pairs grouped by member, sample order preserved
    members = knn.ravel()
    owners = np.repeat(sample_ids, cfg.k)
    order = np.argsort(members, kind="stable")
    counts = np.bincount(members, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return RevKnnIndex(
        sample_ids=sample_ids,
        k=cfg.k,
        rev_indptr=indptr,
        rev_targets=owners[order],
    )


def representative_power(idx: RevKnnIndex, v: int) -> float:
    """Fraction of samples whose k-NN contains node v; in [0, 1]."""
    if not (0 <= v < idx.num_nodes):
        raise ValueError(f"invalid node id {v}")
    return float(idx.rev_indptr[v + 1] - idx.rev_indptr[v]) / idx.sample_size


def write_revknn(idx: RevKnnIndex, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for v in range(idx.num_nodes):
            fh.write(f"{v}\t" + ",".join(str(s) for s in idx.rev_list(v)) + "\n")

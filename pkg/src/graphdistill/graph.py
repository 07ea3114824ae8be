"""Immutable CSR node-attributed graphs: loading, writing, induced subgraphs, BFS balls.

The on-disk interchange format is plain TSV:

* ``nodes.tsv``   -- ``id<TAB>label<TAB>f1,f2,...,fF`` (label ``-1`` = unlabeled)
* ``edges.tsv``   -- ``u<TAB>v``, one undirected edge per line
* ``provenance.tsv`` -- ``distilled_id<TAB>origin_id<TAB>is_root(0|1)``

Undirected edges are stored in both directions in the CSR arrays; a self-loop
occupies a single directed slot.  Neighbor lists are strictly increasing,
which is what makes every downstream reduction order deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEATURE_BYTES = 4   # features are budgeted as 4-byte reals
ID_BYTES = 8        # node ids / edge slots as 8-byte integers
LABEL_BYTES = 4

UNLABELED = -1


class GraphFormatError(ValueError):
    """Malformed or inconsistent graph input files."""


@dataclass(eq=False)
class Graph:
    """Node-attributed undirected graph in CSR form.

    ``csr_offsets`` has length ``num_nodes + 1``; the neighbors of node ``v``
    are ``csr_targets[csr_offsets[v]:csr_offsets[v + 1]]``, strictly
    increasing.  ``num_edges`` counts directed slots (an undirected edge
    contributes two, a self-loop one).
    """

    num_nodes: int
    csr_offsets: np.ndarray
    csr_targets: np.ndarray
    features: np.ndarray
    labels: np.ndarray | None = None
    train_mask: np.ndarray | None = None

    @property
    def num_edges(self) -> int:
        return int(self.csr_targets.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    def neighbors(self, v: int) -> np.ndarray:
        return self.csr_targets[self.csr_offsets[v]:self.csr_offsets[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.csr_offsets)

    def validate(self) -> None:
        """Raise GraphFormatError on any structural invariant violation."""
        n = self.num_nodes
        if n <= 0:
            raise GraphFormatError("graph must have at least one node")
        if self.csr_offsets.shape != (n + 1,) or self.csr_offsets[0] != 0:
            raise GraphFormatError("csr_offsets must have length num_nodes+1 and start at 0")
        if np.any(np.diff(self.csr_offsets) < 0):
            raise GraphFormatError("csr_offsets must be non-decreasing")
        if self.csr_offsets[-1] != self.num_edges:
            raise GraphFormatError("csr_offsets[-1] must equal the directed slot count")
        if self.num_edges:
            if self.csr_targets.min() < 0 or self.csr_targets.max() >= n:
                raise GraphFormatError("edge target out of range")
            src = np.repeat(np.arange(n), np.diff(self.csr_offsets))
            same_src = src[1:] == src[:-1]
            if np.any(same_src & (np.diff(self.csr_targets) <= 0)):
                raise GraphFormatError("neighbor lists must be strictly increasing")
            # undirected symmetry: (u,v) stored iff (v,u) stored
            fwd = src * n + self.csr_targets
            rev = self.csr_targets * n + src
            if not np.array_equal(np.sort(fwd), np.sort(rev)):
                raise GraphFormatError("edge set is not symmetric")
        if self.features.shape[0] != n or self.features.ndim != 2 or self.features.shape[1] < 1:
            raise GraphFormatError("features must be a num_nodes x F matrix with F >= 1")
        if not np.all(np.isfinite(self.features)):
            raise GraphFormatError("features contain NaN/Inf")
        if self.labels is not None and self.labels.shape != (n,):
            raise GraphFormatError("labels must be per-node")
        if self.train_mask is not None and self.train_mask.shape != (n,):
            raise GraphFormatError("train_mask must be per-node")


@dataclass(eq=False)
class DistilledGraph:
    """Induced subgraph plus provenance back to the source graph.

    ``origin_ids[i]`` is the source node id of distilled node ``i`` (sorted
    ascending, unique); ``root_flags[i]`` marks exemplar roots as opposed to
    nodes pulled in by some root's L-hop ball.
    """

    graph: Graph
    origin_ids: np.ndarray
    root_flags: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    def root_origin_ids(self) -> np.ndarray:
        return self.origin_ids[self.root_flags]

    def validate(self, source: Graph | None = None) -> None:
        self.graph.validate()
        if self.origin_ids.shape != (self.graph.num_nodes,):
            raise GraphFormatError("origin_ids must be per-distilled-node")
        if np.any(np.diff(self.origin_ids) <= 0):
            raise GraphFormatError("origin_ids must be strictly increasing")
        if not self.root_flags.any():
            raise GraphFormatError("at least one root flag must be set")
        if source is not None:
            if self.origin_ids[-1] >= source.num_nodes or self.origin_ids[0] < 0:
                raise GraphFormatError("origin id out of range in source graph")


def byte_size(g: Graph | DistilledGraph) -> int:
    """Serialized size under the fixed accounting rule.

    ``num_nodes * (4F + 8) + directed_edge_slots * 8``, plus 4 bytes per node
    when labels are present.  This is the rule every budget check in the
    pipeline uses.
    """
    if isinstance(g, DistilledGraph):
        g = g.graph
    total = g.num_nodes * (g.feature_dim * FEATURE_BYTES + ID_BYTES)
    total += g.num_edges * ID_BYTES
    if g.labels is not None:
        total += g.num_nodes * LABEL_BYTES
    return total


def per_node_bytes(g: Graph) -> int:
    """Byte cost of one node (features + id slot + optional label), no edges."""
    return g.feature_dim * FEATURE_BYTES + ID_BYTES + (LABEL_BYTES if g.labels is not None else 0)


def _build_csr(n: int, pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort directed (u, v) pairs into CSR arrays; rejects duplicate slots."""
    if pairs.shape[0] == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[order]
    dup = np.all(pairs[1:] == pairs[:-1], axis=1)
    if np.any(dup):
        u, v = pairs[1:][dup][0]
        raise GraphFormatError(f"duplicate edge between nodes {u} and {v}")
    counts = np.bincount(pairs[:, 0], minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, pairs[:, 1].astype(np.int64)


def _symmetrize(edges: np.ndarray) -> np.ndarray:
    """Expand undirected (u, v) rows into directed slots; self-loops kept once."""
    if edges.shape[0] == 0:
        return edges.reshape(0, 2)
    rev = edges[:, ::-1]
    keep = edges[:, 0] != edges[:, 1]
    return np.concatenate([edges, rev[keep]], axis=0)


def graph_from_edges(n: int, undirected_edges, features=None, labels=None,
                     feature_dim: int = 1) -> Graph:
    """Build a validated Graph from an undirected edge list."""
    edges = np.asarray(list(undirected_edges), dtype=np.int64).reshape(-1, 2)
    offsets, targets = _build_csr(n, _symmetrize(edges))
    if features is None:
        features = np.zeros((n, feature_dim))
    g = Graph(
        num_nodes=n,
        csr_offsets=offsets,
        csr_targets=targets,
        features=np.asarray(features, dtype=np.float64),
        labels=None if labels is None else np.asarray(labels, dtype=np.int64),
    )
    g.validate()
    return g


def load_graph(nodes_path: str | Path, edges_path: str | Path) -> Graph:
    """Parse a nodes/edges TSV pair into a validated Graph.

    Node ids must form the contiguous range 0..n-1 (lines may appear in any
    order).  Errors report the offending 1-based line number.
    """
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    ids, labels, feats = [], [], []
    feat_dim = None
    with nodes_path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise GraphFormatError(f"{nodes_path}:{lineno}: expected 3 tab-separated fields")
            try:
                node_id = int(parts[0])
                label = int(parts[1])
                vec = np.array([float(x) for x in parts[2].split(",")], dtype=np.float64)
            except ValueError as exc:
                raise GraphFormatError(f"{nodes_path}:{lineno}: {exc}") from exc
            if feat_dim is None:
                feat_dim = vec.shape[0]
            elif vec.shape[0] != feat_dim:
                raise GraphFormatError(
                    f"{nodes_path}:{lineno}: feature dimension {vec.shape[0]} != {feat_dim}"
                )
            ids.append(node_id)
            labels.append(label)
            feats.append(vec)
    if not ids:
        raise GraphFormatError(f"{nodes_path}: no nodes")
    n = len(ids)
    id_arr = np.array(ids, dtype=np.int64)
    order = np.argsort(id_arr)
    if not np.array_equal(id_arr[order], np.arange(n)):
        raise GraphFormatError(f"{nodes_path}: node ids are not contiguous 0..{n - 1}")
    features = np.stack([feats[i] for i in order])
    if not np.all(np.isfinite(features)):
        raise GraphFormatError(f"{nodes_path}: features contain NaN/Inf")
    label_arr = np.array(labels, dtype=np.int64)[order]
    has_labels = bool(np.any(label_arr != UNLABELED))

    raw_edges = []
    with edges_path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise GraphFormatError(f"{edges_path}:{lineno}: expected 2 tab-separated fields")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise GraphFormatError(f"{edges_path}:{lineno}: {exc}") from exc
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"{edges_path}:{lineno}: edge ({u},{v}) references unknown node")
            raw_edges.append((u, v))
    pairs = _symmetrize(np.array(raw_edges, dtype=np.int64).reshape(-1, 2))
    offsets, targets = _build_csr(n, pairs)
    g = Graph(
        num_nodes=n,
        csr_offsets=offsets,
        csr_targets=targets,
        features=features,
        labels=label_arr if has_labels else None,
    )
    g.validate()
    return g


def format_feature(x: float) -> str:
    return f"{x:.9g}"


def write_graph(g: Graph, nodes_path: str | Path, edges_path: str | Path) -> None:
    """Emit nodes/edges TSVs (features at 9 significant digits, edges u <= v)."""
    with Path(nodes_path).open("w") as fh:
        for v in range(g.num_nodes):
            label = UNLABELED if g.labels is None else int(g.labels[v])
            feats = ",".join(format_feature(x) for x in g.features[v])
            fh.write(f"{v}\t{label}\t{feats}\n")
    with Path(edges_path).open("w") as fh:
        for u in range(g.num_nodes):
            for v in g.neighbors(u):
                if v >= u:
                    fh.write(f"{u}\t{v}\n")


def write_provenance(d: DistilledGraph, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for i in range(d.num_nodes):
            fh.write(f"{i}\t{int(d.origin_ids[i])}\t{int(d.root_flags[i])}\n")


def write_distilled(d: DistilledGraph, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(d.graph, out / "nodes.tsv", out / "edges.tsv")
    write_provenance(d, out / "provenance.tsv")


def induced_subgraph(g: Graph, node_ids, root_ids=None) -> DistilledGraph:
    """Induced subgraph on ``node_ids``: keeps exactly the edges with both ends inside.

    Distilled ids are the rank of the origin id (dense remap, ascending).
    ``root_ids`` marks exemplar roots; by default every node counts as a root
    (identity-style extraction).
    """
    origin = np.unique(np.asarray(list(node_ids), dtype=np.int64))
    if origin.size == 0:
        raise ValueError("node_ids must be nonempty")
    if origin[0] < 0 or origin[-1] >= g.num_nodes:
        raise ValueError("node id out of range")
    member = np.zeros(g.num_nodes, dtype=bool)
    member[origin] = True

    src = np.repeat(np.arange(g.num_nodes), np.diff(g.csr_offsets))
    keep = member[src] & member[g.csr_targets]
    remap = np.full(g.num_nodes, -1, dtype=np.int64)
    remap[origin] = np.arange(origin.size)
    new_src = remap[src[keep]]
    new_tgt = remap[g.csr_targets[keep]]
    counts = np.bincount(new_src, minlength=origin.size)
    offsets = np.zeros(origin.size + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    sub = Graph(
        num_nodes=int(origin.size),
        csr_offsets=offsets,
        csr_targets=new_tgt,  # slot order inherited from the source CSR, still sorted
        features=g.features[origin].copy(),
        labels=None if g.labels is None else g.labels[origin].copy(),
        train_mask=None if g.train_mask is None else g.train_mask[origin].copy(),
    )
    if root_ids is None:
        flags = np.ones(origin.size, dtype=bool)
    else:
        roots = np.asarray(list(root_ids), dtype=np.int64)
        flags = np.zeros(origin.size, dtype=bool)
        pos = np.searchsorted(origin, roots)
        if np.any(pos >= origin.size) or np.any(origin[np.minimum(pos, origin.size - 1)] != roots):
            raise ValueError("root_ids must be a subset of node_ids")
        flags[pos] = True
    return DistilledGraph(graph=sub, origin_ids=origin, root_flags=flags)


def l_hop_neighborhood(g: Graph, root: int, depth: int) -> np.ndarray:
    """Sorted ids of all nodes within ``depth`` hops of ``root`` (BFS ball, root included)."""
    if not (0 <= root < g.num_nodes):
        raise ValueError(f"invalid root {root}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    visited = np.zeros(g.num_nodes, dtype=bool)
    visited[root] = True
    frontier = np.array([root], dtype=np.int64)
    for _ in range(depth):
        if frontier.size == 0:
            break
        nbrs = np.concatenate(
            [g.csr_targets[g.csr_offsets[u]:g.csr_offsets[u + 1]] for u in frontier]
        )
        fresh = nbrs[~visited[nbrs]]
        if fresh.size == 0:
            break
        frontier = np.unique(fresh)
        visited[frontier] = True
    return np.flatnonzero(visited).astype(np.int64)

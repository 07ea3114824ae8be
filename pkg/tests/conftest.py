"""Shared builders and independent oracles used across the test suite.

Oracles here deliberately avoid the code paths they check: byte costs come
from from-scratch induced-subgraph accounting, PPR from a dense-matrix
power iteration, k-NN and knee points from plain Python scans.
"""

from __future__ import annotations

import numpy as np

from graphdistill import byte_size, induced_subgraph, l_hop_neighborhood
from graphdistill.graph import Graph, graph_from_edges
from graphdistill.revknn import RevKnnIndex


def one_hot(i: int, dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[i] = 1.0
    return v


def path_graph(n: int, feature_dim: int = 1) -> Graph:
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)], feature_dim=feature_dim)


def star_graph(leaves: int, feature_dim: int = 1) -> Graph:
    return graph_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)],
                            feature_dim=feature_dim)


def cycle_graph(n: int, feature_dim: int = 1) -> Graph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return graph_from_edges(n, edges, feature_dim=feature_dim)


def random_graph(rng: np.random.Generator, n: int, p: float, feature_dim: int = 3,
                 labels: bool = False) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    feats = rng.normal(size=(n, feature_dim))
    labs = rng.integers(0, 3, size=n) if labels else None
    return graph_from_edges(n, edges, features=feats, labels=labs)


def permuted_graph(g: Graph, perm: np.ndarray) -> Graph:
    """Relabel node v as perm[v]."""
    edges = []
    for u in range(g.num_nodes):
        for v in g.neighbors(u):
            if v >= u:
                edges.append((int(perm[u]), int(perm[v])))
    feats = np.empty_like(g.features)
    feats[perm] = g.features
    labs = None
    if g.labels is not None:
        labs = np.empty_like(g.labels)
        labs[perm] = g.labels
    return graph_from_edges(g.num_nodes, edges, features=feats, labels=labs)


def index_from_lists(num_nodes: int, sample_ids, lists: dict[int, list[int]],
                     k: int = 1) -> RevKnnIndex:
    """Hand-built reverse-kNN index for set-cover style instances."""
    sample_ids = np.asarray(sorted(sample_ids), dtype=np.int64)
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    flat = []
    for v in range(num_nodes):
        entries = sorted(lists.get(v, []))
        indptr[v + 1] = indptr[v] + len(entries)
        flat.extend(entries)
    return RevKnnIndex(sample_ids=sample_ids, k=k, rev_indptr=indptr,
                       rev_targets=np.asarray(flat, dtype=np.int64))


def random_index(rng: np.random.Generator, n: int, z: int, k: int) -> RevKnnIndex:
    """Random index with the build invariants (z*k memberships, list-per-sample)."""
    sample_ids = np.sort(rng.choice(n, size=z, replace=False))
    lists: dict[int, list[int]] = {}
    for s in sample_ids:
        for owner in rng.choice(n, size=k, replace=False):
            lists.setdefault(int(owner), []).append(int(s))
    return index_from_lists(n, sample_ids, lists, k=k)


# ---------------------------------------------------------------- oracles

def bfs_ball(g: Graph, root: int, depth: int) -> set[int]:
    """Plain-Python BFS; independent of l_hop_neighborhood."""
    seen = {root}
    frontier = [root]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                if int(v) not in seen:
                    seen.add(int(v))
                    nxt.append(int(v))
        frontier = nxt
    return seen


def dense_ppr(sub, beta: float, iters: int = 10000) -> np.ndarray:
    """Dense-matrix power iteration, run to machine-precision convergence."""
    g = sub.graph
    n = g.num_nodes
    P = np.zeros((n, n))
    dangling = np.zeros(n, dtype=bool)
    for j in range(n):
        nbrs = g.neighbors(j)
        if nbrs.size == 0:
            dangling[j] = True
        else:
            P[nbrs, j] = 1.0 / nbrs.size
    roots = np.flatnonzero(sub.root_flags)
    e = np.zeros(n)
    e[roots] = 1.0 / roots.size
    pi = np.full(n, 1.0 / n)
    for _ in range(iters):
        pi = (1.0 - beta) * (P @ pi + pi[dangling].sum() * e) + beta * e
    return pi


def knee_scan(sorted_scores) -> int:
    """Exhaustive second-difference scan over interior indices."""
    s = list(map(float, sorted_scores))
    best_i, best_c = -1, -1.0
    for i in range(1, len(s) - 1):
        c = abs(s[i + 1] + s[i - 1] - 2.0 * s[i])
        if c > best_c:
            best_i, best_c = i, c
    return best_i


def brute_knn(emb: np.ndarray, query: int, k: int) -> list[int]:
    """k nearest rows to `query` by L2, excluding itself, ties by smaller id."""
    pairs = []
    for v in range(emb.shape[0]):
        if v == query:
            continue
        pairs.append((float(np.linalg.norm(emb[query] - emb[v])), v))
    pairs.sort()
    return [v for _, v in pairs[:k]]


def subset_bytes(g: Graph, node_set) -> int:
    """From-scratch byte accounting of the induced subgraph on node_set."""
    if not node_set:
        return 0
    return byte_size(induced_subgraph(g, node_set))


def naive_greedy(g: Graph, idx: RevKnnIndex, depth: int, budget: int,
                 excluded=(), prior_roots=(), prior_members=None, removed=()):
    """Reference greedy: rescans every candidate each step, from-scratch costs.

    Returns (roots in pick order, member node set, covered sample set,
    bytes used).  Candidate order is gain descending then id ascending; the
    first fitting positive-gain candidate wins.
    """
    removed = {int(x) for x in removed}
    banned = {int(x) for x in excluded} | {int(r) for r in prior_roots} | set(removed)
    members = {int(v) for v in (prior_members if prior_members is not None else [])}
    covered: set[int] = set()
    roots = [int(r) for r in prior_roots]
    for r in roots:
        covered |= {int(s) for s in idx.rev_list(r)}
    while True:
        ranked = []
        for v in range(g.num_nodes):
            if v in banned:
                continue
            gain = len({int(s) for s in idx.rev_list(v)} - covered)
            if gain > 0:
                ranked.append((-gain, v))
        ranked.sort()
        pick = None
        for _, v in ranked:
            ball = {int(u) for u in l_hop_neighborhood(g, v, depth)} - removed
            total = subset_bytes(g, members | ball)
            if total <= budget:
                pick = (v, ball, total)
                break
        if pick is None:
            break
        v, ball, total = pick
        members |= ball
        covered |= {int(s) for s in idx.rev_list(v)}
        banned.add(v)
        roots.append(v)
    return roots, members, covered, subset_bytes(g, members)

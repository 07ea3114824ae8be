"""PPR-guided pruning of low-influence ego nodes, with budget-refilling enrichment.

Ego nodes (ball members that are not exemplar roots) get scored by
personalized PageRank with teleportation restricted to the roots:

    pi_next = (1 - beta) * A @ pi + beta * e

where A is the column-stochastic random-walk matrix of the current distilled
subgraph, e spreads teleport mass uniformly over the roots, and mass sitting
on degree-0 nodes is redirected to e to keep the iteration stochastic.  Ego
nodes scoring below the knee of the descending score curve (the point of
maximal absolute second difference) are dropped along with their incident
edges, and the freed bytes are refilled with further exemplars.  The loop
repeats until pruning yield falls below a threshold, nothing new fits, or an
iteration cap is reached.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .coverage import ExemplarSelection, greedy_select
from .graph import DistilledGraph, Graph, induced_subgraph
from .revknn import RevKnnIndex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PprConfig:
    beta: float = 0.15             # teleportation probability
    convergence_tol: float = 1e-9  # L1 stopping threshold
    max_iters: int = 1000
    min_prune_count: int | None = None  # None: max(1, min_prune_frac * current nodes)
    min_prune_frac: float = 0.01

    def validate(self) -> None:
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.min_prune_count is not None and self.min_prune_count < 1:
            raise ValueError("min_prune_count must be >= 1")
        if not (0.0 < self.min_prune_frac <= 1.0):
            raise ValueError("min_prune_frac must be in (0, 1]")

    def prune_threshold(self, current_nodes: int) -> int:
        if self.min_prune_count is not None:
            return self.min_prune_count
        return max(1, int(self.min_prune_frac * current_nodes))


@dataclass(eq=False)
class PprScores:
    scores: np.ndarray
    iterations_used: int
    converged: bool


def ppr(sub: DistilledGraph, cfg: PprConfig) -> PprScores:
    """Power iteration from the uniform vector until the L1 change drops below tol."""
    cfg.validate()
    n = sub.num_nodes
    roots = np.flatnonzero(sub.root_flags)
    if roots.size == 0:
        raise ValueError("subgraph has no root nodes")
    g = sub.graph
    e = np.zeros(n)
    e[roots] = 1.0 / roots.size
    deg = g.degrees().astype(np.float64)
    dangling = deg == 0
    has_dangling = bool(dangling.any())
    inv_deg = np.zeros(n)
    inv_deg[~dangling] = 1.0 / deg[~dangling]
    # column-stochastic walk matrix folded into the CSR data up front
    walk_mat = sp.csr_matrix(
        (inv_deg[g.csr_targets], g.csr_targets, g.csr_offsets), shape=(n, n)
    )
    beta = cfg.beta
    beta_e = beta * e
    pi = np.full(n, 1.0 / n)
    iterations = 0
    converged = False
    for iterations in range(1, cfg.max_iters + 1):
        nxt = walk_mat @ pi
        if has_dangling:
            nxt += pi[dangling].sum() * e
        nxt *= 1.0 - beta
        nxt += beta_e
        delta = float(np.abs(nxt - pi).sum())
        pi = nxt
        if delta < cfg.convergence_tol:
            converged = True
            break
    return PprScores(scores=pi, iterations_used=iterations, converged=converged)


def knee_index(sorted_scores) -> int:
    """Interior index of maximal |second difference| on a descending curve.

    Ties go to the smallest index.  Raises on fewer than three points (no
    interior point exists; callers treat that as skip-pruning).
    """
    s = np.asarray(sorted_scores, dtype=np.float64)
    if s.ndim != 1 or s.size < 3:
        raise ValueError("need at least 3 scores to locate a knee")
    if np.any(np.diff(s) > 0):
        raise ValueError("scores must be sorted in descending order")
    curvature = np.abs(s[2:] + s[:-2] - 2.0 * s[1:-1])
    return int(np.argmax(curvature)) + 1


def prune_and_enrich(
    g: Graph,
    sel: ExemplarSelection,
    idx: RevKnnIndex,
    depth: int,
    budget_bytes: int,
    cfg: PprConfig,
    max_rounds: int = 20,
    ball_cache: dict[int, np.ndarray] | None = None,
) -> DistilledGraph:
    """Iteratively prune below-knee ego nodes and refill the freed budget.

    Pruned nodes are permanently removed: they can neither become roots nor
    re-enter through a later exemplar's ball, which guarantees the loop makes
    progress.  Roots are never pruned.
    """
    cfg.validate()
    if sel.is_empty:
        raise ValueError("selection is empty")
    roots = [int(r) for r in sel.roots]
    members = sel.ball_nodes
    removed: list[int] = []
    bytes_used = sel.bytes_used
    if ball_cache is None:
        ball_cache = {}

    for rounds in range(1, max_rounds + 1):
        sub = induced_subgraph(g, members, root_ids=roots)
        if sub.num_nodes < 3:
            logger.info("sparsify iter=%d: %d nodes, skipping prune", rounds, sub.num_nodes)
            break
        scores = ppr(sub, cfg)
        order = np.argsort(-scores.scores, kind="stable")
        desc = scores.scores[order]
        knee = knee_index(desc)
        knee_value = desc[knee]
        prune_local = np.flatnonzero(~sub.root_flags & (scores.scores < knee_value))
        pruned_origin = sub.origin_ids[prune_local]
        threshold = cfg.prune_threshold(sub.num_nodes)

        members = np.setdiff1d(members, pruned_origin)
        removed.extend(int(v) for v in pruned_origin)

        refreshed = greedy_select(
            g, idx, depth, budget_bytes,
            prior_roots=roots,
            prior_member_ids=members,
            removed=removed,
            ball_cache=ball_cache,
        )
        added = refreshed.roots.size - len(roots)
        roots = [int(r) for r in refreshed.roots]
        members = refreshed.ball_nodes
        bytes_used = refreshed.bytes_used
        logger.info(
            "sparsify iter=%d knee_index=%d knee_value=%.6e pruned=%d refilled=%d bytes_used=%d",
            rounds, knee, knee_value, pruned_origin.size, added, bytes_used,
        )
        if pruned_origin.size < threshold or added == 0:
            break

    out = induced_subgraph(g, members, root_ids=roots)
    out.validate(g)
    return out

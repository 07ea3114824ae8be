"""Greedy exemplar selection under a byte budget.

Selection maximizes coverage: the fraction of sampled nodes whose reverse
k-NN lists get hit by at least one chosen root.  Coverage is monotone and
submodular, so lazy greedy (a CELF-style priority queue of stale marginal
gains) produces exactly the same selection as naive greedy while skipping
most gain recomputations.

The byte cost of a candidate root is incremental: the features of its L-hop
ball nodes not already present plus the newly induced edge slots.  A
candidate whose ball does not fit inside the remaining budget is skipped for
that step but stays eligible (overlap with later picks can shrink its cost).
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph, ID_BYTES, l_hop_neighborhood, per_node_bytes
from .revknn import RevKnnIndex

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 20


@dataclass(eq=False)
class ExemplarSelection:
    """Outcome of a greedy run: roots in pick order plus coverage/byte state.

    ``ball_nodes`` is the sorted union of the roots' L-hop balls (minus any
    nodes barred by the sparsifier); ``bytes_used`` is the accounting size of
    the subgraph induced on it, maintained incrementally but recomputable
    from scratch.
    """

    roots: np.ndarray
    covered: np.ndarray          # sorted sample ids hit by the selection
    bytes_used: int
    coverage_value: float
    ball_nodes: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.roots.size == 0


def _covered_mask(idx: RevKnnIndex, rev_pos: np.ndarray, roots) -> np.ndarray:
    mask = np.zeros(idx.sample_size, dtype=bool)
    for r in roots:
        mask[rev_pos[idx.rev_indptr[r]:idx.rev_indptr[r + 1]]] = True
    return mask


def _member_slot_count(g: Graph, member: np.ndarray) -> int:
    if g.num_edges == 0:
        return 0
    src = np.repeat(np.arange(g.num_nodes), np.diff(g.csr_offsets))
    return int(np.count_nonzero(member[src] & member[g.csr_targets]))


def marginal_gain(sel: ExemplarSelection, idx: RevKnnIndex, v: int) -> float:
    """Coverage gained by adding root v: |rev_list(v) \\ covered| / z."""
    if np.isin(v, sel.roots):
        raise ValueError(f"node {v} is already a root")
    lst = idx.rev_list(v)
    if lst.size == 0:
        return 0.0
    already = int(np.isin(lst, sel.covered).sum())
    return float(lst.size - already) / idx.sample_size


def greedy_select(
    g: Graph,
    idx: RevKnnIndex,
    depth: int,
    budget_bytes: int,
    excluded=(),
    *,
    prior_roots=(),
    prior_member_ids: np.ndarray | None = None,
    removed=(),
    ball_cache: dict[int, np.ndarray] | None = None,
) -> ExemplarSelection:
    """Lazy-greedy coverage maximization under the byte budget.

    ``excluded`` bars nodes from becoming roots; ``removed`` additionally
    bars them from entering any ball (the sparsifier passes its pruned set
    here).  ``prior_roots``/``prior_member_ids`` warm-start the run so the
    enrichment loop can extend an existing selection; coverage and bytes
    continue from that state.

    Picks are by maximal fresh marginal gain, ties by ascending node id.
    Candidates that do not fit are skipped for the step; selection ends when
    no positive-gain candidate fits.  The output is identical to naive
    greedy.

    ``ball_cache`` memoizes raw (unfiltered) L-hop balls keyed by root and
    may be shared across calls within one pipeline run; ``removed`` filtering
    is applied per use, so sharing never changes results.
    """
    n = g.num_nodes
    z = idx.sample_size
    pnb = per_node_bytes(g)
    rev_pos = np.searchsorted(idx.sample_ids, idx.rev_targets)

    removed_mask = np.zeros(n, dtype=bool)
    removed_list = np.asarray(list(removed), dtype=np.int64)
    if removed_list.size:
        removed_mask[removed_list] = True
    banned = removed_mask.copy()
    for col in (excluded, prior_roots):
        arr = np.asarray(list(col), dtype=np.int64)
        if arr.size:
            banned[arr] = True

    member = np.zeros(n, dtype=bool)
    if prior_member_ids is not None and len(prior_member_ids) > 0:
        member[np.asarray(prior_member_ids, dtype=np.int64)] = True
    covered = _covered_mask(idx, rev_pos, prior_roots)
    node_count = int(member.sum())
    slot_count = _member_slot_count(g, member)
    bytes_used = node_count * pnb + slot_count * ID_BYTES

    def fresh_gain_count(v: int) -> int:
        sl = rev_pos[idx.rev_indptr[v]:idx.rev_indptr[v + 1]]
        return int(np.count_nonzero(~covered[sl]))

    # initial gains, vectorized: per-node count of not-yet-covered entries
    rev_counts = idx.rev_counts()
    node_of_entry = np.repeat(np.arange(n), rev_counts)
    uncovered_entries = ~covered[rev_pos]
    gains0 = np.bincount(node_of_entry[uncovered_entries], minlength=n)

    heap: list[tuple[int, int]] = [
        (-int(gains0[v]), v) for v in range(n) if gains0[v] > 0 and not banned[v]
    ]
    heapq.heapify(heap)

    if ball_cache is None:
        ball_cache = {}
    scratch = np.zeros(n, dtype=bool)

    def ball_of(v: int) -> np.ndarray:
        b = ball_cache.get(v)
        if b is None:
            b = l_hop_neighborhood(g, v, depth)
            ball_cache[v] = b
        if removed_list.size:
            b = b[~removed_mask[b]]
        return b

    def incremental_cost(ball: np.ndarray, remaining: int):
        """(cost, new nodes, new slots); cost is None when the node-byte
        lower bound alone overflows ``remaining`` (slot count not needed)."""
        new = ball[~member[ball]]
        if new.size == 0:
            return 0, new, 0
        if new.size * pnb > remaining:
            return None, new, 0
        gather = np.concatenate(
            [g.csr_targets[g.csr_offsets[u]:g.csr_offsets[u + 1]] for u in new]
        )
        scratch[new] = True
        in_old = member[gather]
        slots_added = int(np.count_nonzero(in_old | scratch[gather])) + int(np.count_nonzero(in_old))
        scratch[new] = False
        return new.size * pnb + slots_added * ID_BYTES, new, slots_added

    roots: list[int] = list(int(r) for r in prior_roots)
    new_roots = 0
    while heap:
        deferred: list[tuple[int, int]] = []
        chosen = -1
        chosen_ball_update = None
        while heap:
            _, v = heapq.heappop(heap)
            cnt = fresh_gain_count(v)
            if cnt == 0:
                continue
            if heap and (-cnt, v) > heap[0]:
                heapq.heappush(heap, (-cnt, v))
                continue
            remaining = budget_bytes - bytes_used
            if remaining < pnb and not member[v]:
                # v itself is a new node, so the cost is at least pnb: no fit
                deferred.append((-cnt, v))
                continue
            cost, new_nodes, slots_added = incremental_cost(ball_of(v), remaining)
            if cost is not None and bytes_used + cost <= budget_bytes:
                chosen = v
                chosen_ball_update = (cost, new_nodes, slots_added, cnt)
                break
            deferred.append((-cnt, v))
        for item in deferred:
            heapq.heappush(heap, item)
        if chosen < 0:
            break
        cost, new_nodes, slots_added, cnt = chosen_ball_update
        member[new_nodes] = True
        node_count += new_nodes.size
        slot_count += slots_added
        bytes_used += cost
        covered[rev_pos[idx.rev_indptr[chosen]:idx.rev_indptr[chosen + 1]]] = True
        banned[chosen] = True
        roots.append(chosen)
        new_roots += 1
        logger.info(
            "select step=%d root=%d gain=%.6f bytes_used=%d",
            new_roots, chosen, cnt / z, bytes_used,
        )

    covered_ids = idx.sample_ids[np.flatnonzero(covered)]
    return ExemplarSelection(
        roots=np.asarray(roots, dtype=np.int64),
        covered=covered_ids,
        bytes_used=int(bytes_used),
        coverage_value=float(covered_ids.size) / z,
        ball_nodes=np.flatnonzero(member).astype(np.int64),
    )


def brute_force_optimal(idx: RevKnnIndex, costs: np.ndarray, budget_bytes: int) -> ExemplarSelection:
    """Exhaustive coverage maximization; testing oracle for tiny instances.

    Costs are additive per root.  Ties go to fewer roots, then to the
    lexicographically smallest id tuple.
    """
    n = idx.num_nodes
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"instance too large for exhaustive search ({n} > {BRUTE_FORCE_LIMIT})")
    costs = np.asarray(costs, dtype=np.int64)
    rev_pos = np.searchsorted(idx.sample_ids, idx.rev_targets)
    cov_bits = []
    for v in range(n):
        bits = 0
        for p in rev_pos[idx.rev_indptr[v]:idx.rev_indptr[v + 1]]:
            bits |= 1 << int(p)
        cov_bits.append(bits)

    best_cov, best_ids = -1, ()
    for mask in range(1 << n):
        ids = [v for v in range(n) if mask >> v & 1]
        if sum(int(costs[v]) for v in ids) > budget_bytes:
            continue
        cov = 0
        for v in ids:
            cov |= cov_bits[v]
        score = cov.bit_count()
        if score > best_cov or (
            score == best_cov
            and (len(ids), tuple(ids)) < (len(best_ids), tuple(best_ids))
        ):
            best_cov, best_ids = score, tuple(ids)

    union = 0
    for v in best_ids:
        union |= cov_bits[v]
    covered_ids = idx.sample_ids[[p for p in range(idx.sample_size) if union >> p & 1]]
    return ExemplarSelection(
        roots=np.asarray(best_ids, dtype=np.int64),
        covered=np.asarray(covered_ids, dtype=np.int64),
        bytes_used=int(sum(int(costs[v]) for v in best_ids)),
        coverage_value=float(best_cov) / idx.sample_size,
        ball_nodes=np.asarray(best_ids, dtype=np.int64),
    )

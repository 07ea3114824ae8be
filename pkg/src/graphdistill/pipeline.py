"""End-to-end distillation: embed -> reverse-kNN -> greedy -> sparsify/enrich.

`distill_graph` runs the pipeline on an in-memory graph and reports
per-stage wall times; `distill` adds file I/O around it (load inputs, write
nodes/edges/provenance into the output directory).  Timing output is kept
out of the output directory so that identical (config, seed) runs produce
byte-identical artifacts regardless of wall-clock noise or thread count.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coverage import greedy_select
from .graph import (
    DistilledGraph,
    Graph,
    ID_BYTES,
    byte_size,
    induced_subgraph,
    l_hop_neighborhood,
    load_graph,
    per_node_bytes,
    write_distilled,
)
from .revknn import SampleConfig, build_rev_knn, write_revknn
from .sparsify import PprConfig, prune_and_enrich
from .synth import generate_synthetic
from .wl import wl_embed, write_embeddings

logger = logging.getLogger(__name__)


class InfeasibleBudgetError(RuntimeError):
    """Budget too small for any single exemplar ball."""

    def __init__(self, budget_bytes: int, min_feasible: int):
        super().__init__(
            f"budget of {budget_bytes} bytes cannot fit any exemplar ball; "
            f"smallest feasible budget is about {min_feasible} bytes"
        )
        self.budget_bytes = budget_bytes
        self.min_feasible = min_feasible


@dataclass
class DistillConfig:
    nodes_path: str | Path | None = None
    edges_path: str | Path | None = None
    out_dir: str | Path | None = None
    depth: int = 2
    budget_bytes: int | None = None
    budget_frac: float | None = None
    sample: SampleConfig = field(default_factory=SampleConfig)
    ppr: PprConfig = field(default_factory=PprConfig)
    threads: int = 1
    train_mask_only: bool = False
    train_mask_path: str | Path | None = None
    dump_embeddings: str | Path | None = None
    dump_revknn: str | Path | None = None
    max_sparsify_iters: int = 20
    normalize_features: bool = False

    def validate(self) -> None:
        if (self.budget_bytes is None) == (self.budget_frac is None):
            raise ValueError("exactly one of budget_bytes / budget_frac must be set")
        if self.budget_bytes is not None and self.budget_bytes < 0:
            raise ValueError("budget_bytes must be >= 0")
        if self.budget_frac is not None and not (0.0 < self.budget_frac <= 1.0):
            raise ValueError("budget_frac must be in (0, 1]")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        self.sample.validate()
        self.ppr.validate()


@dataclass
class RunReport:
    stage_seconds: dict[str, float]
    budget_bytes: int
    bytes_used: int
    coverage: float
    num_nodes: int
    num_edges: int
    num_roots: int
    source_nodes: int
    source_edges: int

    @property
    def total_seconds(self) -> float:
        return sum(self.stage_seconds.values())

    def to_tsv(self) -> str:
        lines = [f"{stage}\t{secs:.6f}" for stage, secs in self.stage_seconds.items()]
        lines.append(f"total\t{self.total_seconds:.6f}")
        return "\n".join(lines) + "\n"


def min_feasible_budget(g: Graph, depth: int) -> int:
    """Cheapest single-root ball cost under the byte accounting rule."""
    pnb = per_node_bytes(g)
    best = None
    src = np.repeat(np.arange(g.num_nodes), g.degrees())
    for v in range(g.num_nodes):
        ball = l_hop_neighborhood(g, v, depth)
        member = np.zeros(g.num_nodes, dtype=bool)
        member[ball] = True
        slots = int(np.count_nonzero(member[src] & member[g.csr_targets]))
        cost = ball.size * pnb + slots * ID_BYTES
        if best is None or cost < best:
            best = cost
    return int(best)


def resolve_budget(g: Graph, cfg: DistillConfig) -> int:
    if cfg.budget_bytes is not None:
        return cfg.budget_bytes
    return int(cfg.budget_frac * byte_size(g))


def distill_graph(g: Graph, cfg: DistillConfig) -> tuple[DistilledGraph, RunReport]:
    """Run the full pipeline on an in-memory graph."""
    cfg.validate()
    budget = resolve_budget(g, cfg)
    stage_seconds: dict[str, float] = {}

    t0 = time.perf_counter()
    table = wl_embed(g, cfg.depth, normalize=cfg.normalize_features)
    stage_seconds["wl_embed"] = time.perf_counter() - t0
    if cfg.dump_embeddings:
        write_embeddings(table, cfg.dump_embeddings)

    t0 = time.perf_counter()
    idx = build_rev_knn(table, cfg.sample, threads=cfg.threads)
    stage_seconds["rev_knn"] = time.perf_counter() - t0
    if cfg.dump_revknn:
        write_revknn(idx, cfg.dump_revknn)

    balls: dict[int, np.ndarray] = {}
    t0 = time.perf_counter()
    sel = greedy_select(g, idx, cfg.depth, budget, ball_cache=balls)
    stage_seconds["greedy"] = time.perf_counter() - t0
    if sel.is_empty:
        raise InfeasibleBudgetError(budget, min_feasible_budget(g, cfg.depth))

    t0 = time.perf_counter()
    result = prune_and_enrich(
        g, sel, idx, cfg.depth, budget, cfg.ppr,
        max_rounds=cfg.max_sparsify_iters, ball_cache=balls,
    )
    stage_seconds["sparsify"] = time.perf_counter() - t0

    final_roots = result.root_origin_ids()
    covered = np.unique(
        np.concatenate([idx.rev_list(int(r)) for r in final_roots])
    ) if final_roots.size else np.zeros(0, dtype=np.int64)
    report = RunReport(
        stage_seconds=stage_seconds,
        budget_bytes=budget,
        bytes_used=byte_size(result),
        coverage=float(covered.size) / idx.sample_size,
        num_nodes=result.num_nodes,
        num_edges=result.graph.num_edges,
        num_roots=int(result.root_flags.sum()),
        source_nodes=g.num_nodes,
        source_edges=g.num_edges,
    )
    logger.info(
        "distilled %d/%d nodes, %d/%d edge slots, %d roots, %d/%d bytes, coverage %.4f",
        report.num_nodes, report.source_nodes, report.num_edges, report.source_edges,
        report.num_roots, report.bytes_used, budget, report.coverage,
    )
    return result, report


def _read_mask_ids(path: str | Path) -> np.ndarray:
    ids = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                ids.append(int(line.split("\t")[0]))
    return np.unique(np.asarray(ids, dtype=np.int64))


def distill(cfg: DistillConfig) -> tuple[DistilledGraph, RunReport]:
    """Load inputs, distill, and write the output directory."""
    cfg.validate()
    if cfg.nodes_path is None or cfg.edges_path is None or cfg.out_dir is None:
        raise ValueError("nodes_path, edges_path and out_dir are required")
    t0 = time.perf_counter()
    g = load_graph(cfg.nodes_path, cfg.edges_path)
    load_secs = time.perf_counter() - t0

    mask_ids = None
    if cfg.train_mask_only:
        if cfg.train_mask_path is None:
            raise ValueError("train_mask_only requires train_mask_path")
        mask_ids = _read_mask_ids(cfg.train_mask_path)
        work = induced_subgraph(g, mask_ids).graph
    else:
        work = g

    result, report = distill_graph(work, cfg)
    if mask_ids is not None:
        # map provenance back through the mask filter to original ids
        result = DistilledGraph(
            graph=result.graph,
            origin_ids=mask_ids[result.origin_ids],
            root_flags=result.root_flags,
        )

    t0 = time.perf_counter()
    write_distilled(result, cfg.out_dir)
    write_secs = time.perf_counter() - t0
    report.stage_seconds = {"load": load_secs, **report.stage_seconds, "write": write_secs}
    return result, report


@dataclass
class ProbeRow:
    n: int
    stage_seconds: dict[str, float]

    @property
    def total_seconds(self) -> float:
        return sum(self.stage_seconds.values())


def scaling_probe(
    sizes,
    *,
    degree: float = 4.0,
    feature_dim: int = 16,
    budget_frac: float = 0.03,
    depth: int = 2,
    sample: SampleConfig | None = None,
    ppr: PprConfig | None = None,
    seed: int = 0,
    threads: int = 1,
    repeats: int = 3,
) -> list[ProbeRow]:
    """Time the pipeline across graph sizes at fixed average degree.

    The sample size z depends only on (theta, delta), so it is constant
    across sizes.  Each size runs `repeats` times and the per-stage median
    is reported, which trims scheduler noise out of small measurements.
    """
    sizes = sorted(int(s) for s in sizes)
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    rows = []
    for n in sizes:
        g = generate_synthetic(
            "erdos-renyi", n, seed, feature_dim=feature_dim, p=min(1.0, degree / (n - 1))
        )
        cfg = DistillConfig(
            depth=depth,
            budget_frac=budget_frac,
            sample=sample or SampleConfig(),
            ppr=ppr or PprConfig(),
            threads=threads,
        )
        samples: list[dict[str, float]] = []
        for _ in range(max(1, repeats)):
            _, report = distill_graph(g, cfg)
            samples.append(report.stage_seconds)
        stages = samples[0].keys()
        medians = {
            st: float(np.median([s[st] for s in samples])) for st in stages
        }
        rows.append(ProbeRow(n=n, stage_seconds=medians))
        logger.info(
            "probe n=%d %s total=%.3fs", n,
            " ".join(f"{k}={v:.3f}" for k, v in medians.items()),
            sum(medians.values()),
        )
    return rows

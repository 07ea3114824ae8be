"""Command-line interface: distill, gen, probe.

Exit codes: 0 success, 2 infeasible budget, 1 I/O or validation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .graph import GraphFormatError, write_graph
from .pipeline import (
    DistillConfig,
    InfeasibleBudgetError,
    ProbeRow,
    distill,
    scaling_probe,
)
from .revknn import SampleConfig
from .sparsify import PprConfig
from .synth import KINDS, generate_synthetic


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--layers", type=int, default=2, help="aggregation depth L (default 2)")
    p.add_argument("--k", type=int, default=5, help="neighbor count for reverse k-NN (default 5)")
    p.add_argument("--theta", type=float, default=0.15, help="sampling error bound (default 0.15)")
    p.add_argument("--delta", type=float, default=0.1, help="sampling confidence parameter (default 0.1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphdistill")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distill", help="distill a graph into a byte budget")
    d.add_argument("--nodes", required=True)
    d.add_argument("--edges", required=True)
    budget = d.add_mutually_exclusive_group(required=True)
    budget.add_argument("--budget-bytes", type=int)
    budget.add_argument("--budget-frac", type=float)
    _add_common(d)
    d.add_argument("--beta", type=float, default=0.15, help="PPR teleportation probability")
    d.add_argument("--ppr-tol", type=float, default=1e-9)
    d.add_argument("--min-prune-frac", type=float, default=0.01)
    d.add_argument("--max-sparsify-iters", type=int, default=20)
    d.add_argument("--out", required=True, help="output directory (nodes/edges/provenance TSVs)")
    d.add_argument("--train-mask-only", action="store_true")
    d.add_argument("--train-mask", help="file with one train node id per line")
    d.add_argument("--dump-embeddings")
    d.add_argument("--dump-revknn")
    d.add_argument("--normalize-features", action="store_true")
    d.add_argument("--report", help="write stage timing TSV here (default: stdout)")
    d.set_defaults(func=_cmd_distill)

    gp = sub.add_parser("gen", help="generate a synthetic graph")
    gp.add_argument("--kind", choices=KINDS, required=True)
    gp.add_argument("--n", type=int, required=True)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--feature-dim", type=int, default=16)
    gp.add_argument("--p", type=float, default=0.01, help="edge probability (erdos-renyi)")
    gp.add_argument("--attach", type=int, default=2, help="edges per new node (barabasi-albert)")
    gp.add_argument("--clusters", type=int, default=3)
    gp.add_argument("--p-in", type=float, default=0.05)
    gp.add_argument("--p-out", type=float, default=0.005)
    gp.add_argument("--separation", type=float, default=3.0)
    gp.add_argument("--noise", type=float, default=1.0)
    gp.add_argument("--out", required=True)
    gp.set_defaults(func=_cmd_gen)

    pp = sub.add_parser("probe", help="time the pipeline across graph sizes")
    pp.add_argument("--sizes", required=True, help="comma-separated node counts, increasing")
    pp.add_argument("--degree", type=float, default=4.0)
    pp.add_argument("--feature-dim", type=int, default=16)
    pp.add_argument("--budget-frac", type=float, default=0.03)
    pp.add_argument("--repeats", type=int, default=3)
    _add_common(pp)
    pp.set_defaults(func=_cmd_probe)
    return parser


def _cmd_distill(args) -> int:
    cfg = DistillConfig(
        nodes_path=args.nodes,
        edges_path=args.edges,
        out_dir=args.out,
        depth=args.layers,
        budget_bytes=args.budget_bytes,
        budget_frac=args.budget_frac,
        sample=SampleConfig(theta=args.theta, delta=args.delta, k=args.k, seed=args.seed),
        ppr=PprConfig(
            beta=args.beta,
            convergence_tol=args.ppr_tol,
            min_prune_frac=args.min_prune_frac,
        ),
        threads=args.threads,
        train_mask_only=args.train_mask_only,
        train_mask_path=args.train_mask,
        dump_embeddings=args.dump_embeddings,
        dump_revknn=args.dump_revknn,
        max_sparsify_iters=args.max_sparsify_iters,
        normalize_features=args.normalize_features,
    )
    _, report = distill(cfg)
    tsv = report.to_tsv()
    if args.report:
        Path(args.report).write_text(tsv)
    else:
        sys.stdout.write(tsv)
    return 0


def _cmd_gen(args) -> int:
    g = generate_synthetic(
        args.kind,
        args.n,
        args.seed,
        feature_dim=args.feature_dim,
        p=args.p,
        attach=args.attach,
        clusters=args.clusters,
        p_in=args.p_in,
        p_out=args.p_out,
        separation=args.separation,
        noise=args.noise,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(g, out / "nodes.tsv", out / "edges.tsv")
    logging.getLogger(__name__).info(
        "wrote %s: %d nodes, %d edge slots", out, g.num_nodes, g.num_edges
    )
    return 0


def _cmd_probe(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows: list[ProbeRow] = scaling_probe(
        sizes,
        degree=args.degree,
        feature_dim=args.feature_dim,
        budget_frac=args.budget_frac,
        depth=args.layers,
        sample=SampleConfig(theta=args.theta, delta=args.delta, k=args.k, seed=args.seed),
        seed=args.seed,
        threads=args.threads,
        repeats=args.repeats,
    )
    stages = list(rows[0].stage_seconds)
    sys.stdout.write("n\t" + "\t".join(stages) + "\ttotal\n")
    for row in rows:
        cells = "\t".join(f"{row.stage_seconds[s]:.6f}" for s in stages)
        sys.stdout.write(f"{row.n}\t{cells}\t{row.total_seconds:.6f}\n")
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; 2 is reserved
        return 0 if exc.code == 0 else 1
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InfeasibleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Downstream evaluation: train small GNNs on full vs distilled vs random data.

Protocol per dataset: split nodes 60:20:20, hand the induced train-split
graph to the distiller through its CLI, then train a 2-layer model on each
variant and measure accuracy on the untouched test split of the full graph.
The random control is a size-matched random induced subgraph of the same
train graph.
"""

from __future__ import annotations

import shutil
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from .data import (
    Dataset,
    dataset_bytes,
    induced,
    load_dataset,
    random_budget_subgraph,
    split_indices,
    write_dataset,
)
from .models import build_adjacency, build_model

HIDDEN = 64
EPOCHS = 200
PATIENCE = 20
LR = 0.01
WEIGHT_DECAY = 5e-4


@dataclass
class EvalRow:
    dataset: str
    method: str                 # full | distilled | random
    compression: float          # S_r: training-set bytes / full-dataset bytes
    acc_mean: float
    acc_std: float
    train_seconds: float
    accuracies: list[float] = field(default_factory=list)


def train_once(
    train_ds: Dataset,
    train_label_idx: np.ndarray,
    full_ds: Dataset,
    val_idx: np.ndarray,
    test_idx: np.ndarray,
    model_name: str,
    seed: int,
) -> float:
    """Train on `train_ds`, early-stop on full-graph validation accuracy,
    return test accuracy in percent."""
    torch.manual_seed(seed)
    num_classes = full_ds.num_classes
    model = build_model(model_name, full_ds.feature_dim, HIDDEN, num_classes)
    opt = torch.optim.Adam(model.parameters(), lr=LR, weight_decay=WEIGHT_DECAY)

    adj_train = build_adjacency(model_name, train_ds.edges, train_ds.num_nodes)
    x_train = torch.tensor(train_ds.features, dtype=torch.float32)
    y_train = torch.tensor(train_ds.labels, dtype=torch.int64)
    idx_train = torch.tensor(train_label_idx, dtype=torch.int64)

    adj_full = build_adjacency(model_name, full_ds.edges, full_ds.num_nodes)
    x_full = torch.tensor(full_ds.features, dtype=torch.float32)
    y_full = torch.tensor(full_ds.labels, dtype=torch.int64)

    def accuracy(idx: np.ndarray) -> float:
        model.eval()
        with torch.no_grad():
            pred = model(adj_full, x_full).argmax(dim=1)
        sel = torch.tensor(idx, dtype=torch.int64)
        return float((pred[sel] == y_full[sel]).float().mean()) * 100.0

    best_val, best_state, bad_epochs = -1.0, None, 0
    for _ in range(EPOCHS):
        model.train()
        opt.zero_grad()
        out = model(adj_train, x_train)
        loss = F.cross_entropy(out[idx_train], y_train[idx_train])
        loss.backward()
        opt.step()
        val_acc = accuracy(val_idx)
        if val_acc > best_val:
            best_val = val_acc
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= PATIENCE:
                break
    if best_state is not None:
        model.load_state_dict(best_state)
    return accuracy(test_idx)


def train_and_eval(
    data_dir: str | Path,
    distilled_dir: str | Path | None,
    model: str = "gcn",
    seeds=range(5),
    *,
    split_seed: int = 0,
    method: str | None = None,
    budget_bytes: int | None = None,
    dataset_name: str | None = None,
) -> EvalRow:
    """One report row.  distilled_dir=None selects the full-data run, or the
    size-matched random control when method="random" (budget_bytes required)."""
    full = load_dataset(data_dir)
    if not full.labeled:
        raise ValueError("dataset has no labels to train on")
    train_idx, val_idx, test_idx = split_indices(full.num_nodes, split_seed)

    if distilled_dir is not None:
        method = method or "distilled"
        train_ds = load_dataset(distilled_dir)
        if train_ds.num_nodes == 0:
            raise ValueError("distilled dataset is empty")
        label_idx = np.flatnonzero(train_ds.labels != -1)
    elif method == "random":
        if budget_bytes is None:
            raise ValueError("random control needs budget_bytes")
        train_graph, _ = induced(full, train_idx)
        train_ds, _ = random_budget_subgraph(train_graph, budget_bytes, seed=split_seed)
        label_idx = np.flatnonzero(train_ds.labels != -1)
    else:
        method = "full"
        # full-data training still only sees train-split labels
        train_ds = full
        label_idx = train_idx
    if label_idx.size == 0:
        raise ValueError(f"no labeled training nodes for method {method}")

    started = time.perf_counter()
    accs = [
        train_once(train_ds, label_idx, full, val_idx, test_idx, model, seed)
        for seed in seeds
    ]
    elapsed = time.perf_counter() - started
    compression = dataset_bytes(train_ds) / dataset_bytes(full) if method != "full" else 1.0
    return EvalRow(
        dataset=dataset_name or Path(data_dir).name,
        method=method,
        compression=compression,
        acc_mean=float(np.mean(accs)),
        acc_std=float(np.std(accs)),
        train_seconds=elapsed,
        accuracies=[float(a) for a in accs],
    )


def distiller_command() -> list[str]:
    exe = shutil.which("graphdistill")
    if exe:
        return [exe]
    return [sys.executable, "-m", "graphdistill.cli"]


def distill_train_graph(
    data_dir: str | Path,
    work_dir: str | Path,
    s_r: float,
    *,
    split_seed: int = 0,
    distill_seed: int = 0,
    extra_args: list[str] | None = None,
) -> Path:
    """Write the train-split graph, run the distiller CLI at an S_r byte
    budget relative to the full dataset, and return the output directory."""
    work = Path(work_dir)
    full = load_dataset(data_dir)
    train_idx, _, _ = split_indices(full.num_nodes, split_seed)
    train_graph, _ = induced(full, train_idx)
    train_dir = work / "train_graph"
    write_dataset(train_graph, train_dir)
    budget = int(s_r * dataset_bytes(full))
    out_dir = work / "distilled"
    cmd = distiller_command() + [
        "-q", "distill",
        "--nodes", str(train_dir / "nodes.tsv"),
        "--edges", str(train_dir / "edges.tsv"),
        "--budget-bytes", str(budget),
        "--seed", str(distill_seed),
        "--out", str(out_dir),
        "--report", str(work / "distill_report.tsv"),
    ] + (extra_args or [])
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(
            f"distiller exited with {proc.returncode}: {proc.stderr.strip()}"
        )
    return out_dir


def run_experiment(
    data_dir: str | Path,
    work_dir: str | Path,
    s_r: float,
    model: str = "gcn",
    seeds=range(5),
    *,
    split_seed: int = 0,
    distill_seed: int = 0,
    dataset_name: str | None = None,
    extra_args: list[str] | None = None,
) -> list[EvalRow]:
    """Full vs distilled vs size-matched random; returns the three rows."""
    distilled_dir = distill_train_graph(
        data_dir, work_dir, s_r,
        split_seed=split_seed, distill_seed=distill_seed, extra_args=extra_args,
    )
    distilled_bytes = dataset_bytes(load_dataset(distilled_dir))
    common = dict(model=model, seeds=seeds, split_seed=split_seed,
                  dataset_name=dataset_name)
    return [
        train_and_eval(data_dir, None, **common),
        train_and_eval(data_dir, distilled_dir, **common),
        train_and_eval(data_dir, None, method="random",
                       budget_bytes=distilled_bytes, **common),
    ]


# ------------------------------------------------------------- correlation

def load_wl_embeddings(path: str | Path) -> np.ndarray:
    rows = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            node_id, feats = line.split("\t")
            rows.append((int(node_id), [float(x) for x in feats.split(",")]))
    rows.sort(key=lambda r: r[0])
    return np.array([r[1] for r in rows])


def pair_distance_correlations(
    wl_emb: np.ndarray,
    gnn_emb: np.ndarray,
    thresholds,
    *,
    max_pairs: int = 20000,
    seed: int = 0,
    min_pairs: int = 10,
) -> list[tuple[float, float, int]]:
    """Pearson correlation between WL and GNN pair distances, per WL-distance
    threshold.  Returns (threshold, correlation, pair count) rows."""
    n = wl_emb.shape[0]
    if gnn_emb.shape[0] != n:
        raise ValueError("embedding row counts differ")
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=max_pairs)
    j = rng.integers(0, n, size=max_pairs)
    keep = i != j
    i, j = i[keep], j[keep]
    wl_d = np.linalg.norm(wl_emb[i] - wl_emb[j], axis=1)
    gnn_d = np.linalg.norm(gnn_emb[i] - gnn_emb[j], axis=1)
    out = []
    for tau in thresholds:
        mask = wl_d <= tau
        count = int(mask.sum())
        if count < min_pairs:
            raise ValueError(f"only {count} pairs under threshold {tau}")
        a, b = wl_d[mask], gnn_d[mask]
        if a.std() == 0.0 or b.std() == 0.0:
            raise ValueError(f"degenerate distances under threshold {tau}")
        out.append((float(tau), float(np.corrcoef(a, b)[0, 1]), count))
    return out


def gnn_hidden_embeddings(data_dir: str | Path, model: str = "gcn",
                          seed: int = 0, split_seed: int = 0) -> np.ndarray:
    """Hidden-layer rows of a model trained on the full train split."""
    full = load_dataset(data_dir)
    train_idx, val_idx, test_idx = split_indices(full.num_nodes, split_seed)
    torch.manual_seed(seed)
    net = build_model(model, full.feature_dim, HIDDEN, full.num_classes)
    opt = torch.optim.Adam(net.parameters(), lr=LR, weight_decay=WEIGHT_DECAY)
    adj = build_adjacency(model, full.edges, full.num_nodes)
    x = torch.tensor(full.features, dtype=torch.float32)
    y = torch.tensor(full.labels, dtype=torch.int64)
    idx = torch.tensor(train_idx, dtype=torch.int64)
    for _ in range(EPOCHS):
        net.train()
        opt.zero_grad()
        loss = F.cross_entropy(net(adj, x)[idx], y[idx])
        loss.backward()
        opt.step()
    net.eval()
    with torch.no_grad():
        _, hidden = net(adj, x, return_hidden=True)
    return hidden.numpy()


# ------------------------------------------------------------------ report

def rows_to_tsv(rows: list[EvalRow]) -> str:
    header = "dataset\tmethod\tcompression\tacc_mean\tacc_std\ttrain_seconds\n"
    body = "".join(
        f"{r.dataset}\t{r.method}\t{r.compression:.6f}\t"
        f"{r.acc_mean:.2f}\t{r.acc_std:.2f}\t{r.train_seconds:.2f}\n"
        for r in rows
    )
    return header + body


def rows_to_markdown(rows: list[EvalRow]) -> str:
    lines = [
        "| dataset | method | S_r | accuracy | train s |",
        "|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r.dataset} | {r.method} | {r.compression:.4f} | "
            f"{r.acc_mean:.2f} ± {r.acc_std:.2f} | {r.train_seconds:.1f} |"
        )
    return "\n".join(lines) + "\n"

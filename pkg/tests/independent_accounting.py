#!/usr/bin/env python3
"""Recompute the byte size of an emitted graph directory, independently.

Reads nodes.tsv / edges.tsv straight off disk with no project imports and
applies the published accounting rule: 4 bytes per feature value, 8 bytes
per node id slot, 8 bytes per directed edge slot (an undirected line counts
twice, a self-loop once), 4 bytes per node label when any label != -1.

Usage: independent_accounting.py DIR   -> prints the byte count
"""

import sys
from pathlib import Path


def account_bytes(directory) -> int:
    directory = Path(directory)
    num_nodes = 0
    labeled = False
    feature_dim = None
    with (directory / "nodes.tsv").open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            _, label, feats = line.split("\t")
            dim = len(feats.split(","))
            if feature_dim is None:
                feature_dim = dim
            elif dim != feature_dim:
                raise ValueError("inconsistent feature dimension")
            if int(label) != -1:
                labeled = True
            num_nodes += 1
    slots = 0
    with (directory / "edges.tsv").open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            u, v = line.split("\t")
            slots += 1 if u == v else 2
    total = num_nodes * (feature_dim * 4 + 8) + slots * 8
    if labeled:
        total += num_nodes * 4
    return total


if __name__ == "__main__":
    print(account_bytes(sys.argv[1]))

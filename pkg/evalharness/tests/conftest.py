"""Session fixtures: datasets produced by the distiller CLI, consumed as files.

Everything the harness touches comes through the distiller's external
interfaces (gen/distill subcommands and the TSV formats), never through its
Python API.
"""

from __future__ import annotations

import subprocess

import pytest

from evalharness.harness import distiller_command


def run_cli(*args: str) -> None:
    proc = subprocess.run(
        distiller_command() + ["-q", *args], capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(f"distiller CLI failed ({proc.returncode}): {proc.stderr}")


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """Small planted-cluster dataset written by the distiller's gen command."""
    out = tmp_path_factory.mktemp("data") / "planted"
    run_cli(
        "gen", "--kind", "planted-clusters", "--n", "600", "--seed", "1",
        "--feature-dim", "12", "--clusters", "3",
        "--p-in", "0.02", "--p-out", "0.002", "--separation", "1.5",
        "--out", str(out),
    )
    return out


@pytest.fixture(scope="session")
def distilled_dir(dataset_dir, tmp_path_factory):
    """Distilled variant of `dataset_dir` at a 5% byte budget, plus WL dump."""
    work = tmp_path_factory.mktemp("distilled")
    out = work / "out"
    run_cli(
        "distill",
        "--nodes", str(dataset_dir / "nodes.tsv"),
        "--edges", str(dataset_dir / "edges.tsv"),
        "--budget-frac", "0.05", "--seed", "0",
        "--dump-embeddings", str(work / "wl.tsv"),
        "--out", str(out),
        "--report", str(work / "report.tsv"),
    )
    return out

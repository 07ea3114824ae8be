import numpy as np
import pytest

from graphdistill import (
    byte_size,
    generate_synthetic,
    graph_from_edges,
    induced_subgraph,
    l_hop_neighborhood,
    load_graph,
    write_graph,
)
from graphdistill.graph import GraphFormatError

from conftest import bfs_ball, path_graph, random_graph, star_graph


def write_files(tmp_path, nodes_text, edges_text):
    np_, ep = tmp_path / "nodes.tsv", tmp_path / "edges.tsv"
    np_.write_text(nodes_text)
    ep.write_text(edges_text)
    return np_, ep


class TestLoadGraph:
    def test_smallest_connected_graph(self, tmp_path):
        g = load_graph(*write_files(tmp_path, "0\t-1\t1.5\n1\t-1\t1.5\n", "0\t1\n"))
        assert g.num_nodes == 2
        assert g.num_edges == 2  # both directions
        assert g.labels is None
        assert list(g.neighbors(0)) == [1]
        assert list(g.neighbors(1)) == [0]

    def test_edgeless_graph(self, tmp_path):
        g = load_graph(*write_files(tmp_path, "0\t0\t1\n1\t1\t2\n2\t0\t3\n", ""))
        assert g.num_edges == 0
        assert all(g.neighbors(v).size == 0 for v in range(3))
        assert list(g.labels) == [0, 1, 0]

    def test_feature_dim_mismatch_names_line(self, tmp_path):
        files = write_files(tmp_path, "0\t-1\t1,2,3\n1\t-1\t1,2,3,4\n", "")
        with pytest.raises(GraphFormatError, match="nodes.tsv:2"):
            load_graph(*files)

    def test_malformed_line_number(self, tmp_path):
        files = write_files(tmp_path, "0\t-1\t1\n1\t-1\tnope\n", "")
        with pytest.raises(GraphFormatError, match=":2"):
            load_graph(*files)

    def test_non_contiguous_ids(self, tmp_path):
        files = write_files(tmp_path, "0\t-1\t1\n2\t-1\t1\n", "")
        with pytest.raises(GraphFormatError, match="contiguous"):
            load_graph(*files)

    def test_edge_to_unknown_node(self, tmp_path):
        files = write_files(tmp_path, "0\t-1\t1\n1\t-1\t1\n", "0\t5\n")
        with pytest.raises(GraphFormatError, match="edges.tsv:1"):
            load_graph(*files)

    def test_duplicate_edge_rejected(self, tmp_path):
        files = write_files(tmp_path, "0\t-1\t1\n1\t-1\t1\n", "0\t1\n1\t0\n")
        with pytest.raises(GraphFormatError, match="duplicate"):
            load_graph(*files)

    def test_self_loop_single_slot(self, tmp_path):
        g = load_graph(*write_files(tmp_path, "0\t-1\t1\n1\t-1\t1\n", "0\t0\n0\t1\n"))
        assert g.num_edges == 3  # self-loop once, undirected edge twice
        assert list(g.neighbors(0)) == [0, 1]

    def test_unordered_node_lines(self, tmp_path):
        g = load_graph(*write_files(tmp_path, "1\t4\t2\n0\t3\t1\n", ""))
        assert g.features[0, 0] == 1.0 and g.features[1, 0] == 2.0
        assert list(g.labels) == [3, 4]


def test_round_trip_bit_exact(tmp_path):
    g = generate_synthetic("planted-clusters", 120, seed=7, feature_dim=5)
    write_graph(g, tmp_path / "nodes.tsv", tmp_path / "edges.tsv")
    g2 = load_graph(tmp_path / "nodes.tsv", tmp_path / "edges.tsv")
    assert np.array_equal(g.features, g2.features)
    assert np.array_equal(g.csr_offsets, g2.csr_offsets)
    assert np.array_equal(g.csr_targets, g2.csr_targets)
    assert np.array_equal(g.labels, g2.labels)
    # a second write must reproduce the same bytes
    write_graph(g2, tmp_path / "nodes2.tsv", tmp_path / "edges2.tsv")
    assert (tmp_path / "nodes.tsv").read_bytes() == (tmp_path / "nodes2.tsv").read_bytes()
    assert (tmp_path / "edges.tsv").read_bytes() == (tmp_path / "edges2.tsv").read_bytes()


class TestInducedSubgraph:
    def test_non_adjacent_pair(self):
        d = induced_subgraph(path_graph(3), [0, 2])
        assert d.num_nodes == 2
        assert d.graph.num_edges == 0

    def test_full_set_is_identity(self):
        g = graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])
        d = induced_subgraph(g, [0, 1, 2])
        assert np.array_equal(d.origin_ids, [0, 1, 2])
        assert np.array_equal(d.graph.csr_offsets, g.csr_offsets)
        assert np.array_equal(d.graph.csr_targets, g.csr_targets)

    def test_star_subset_matches_edge_enumeration(self):
        g = star_graph(4)
        selected = {0, 1, 2}
        d = induced_subgraph(g, selected)
        # oracle: walk every source edge, keep those with both endpoints selected
        expected = set()
        for u in range(g.num_nodes):
            for v in g.neighbors(u):
                if u in selected and int(v) in selected and u <= v:
                    expected.add((u, int(v)))
        got = set()
        for i in range(d.num_nodes):
            for j in d.graph.neighbors(i):
                a, b = int(d.origin_ids[i]), int(d.origin_ids[j])
                if a <= b:
                    got.add((a, b))
        assert got == expected == {(0, 1), (0, 2)}

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            induced_subgraph(path_graph(3), [])

    def test_edges_exist_in_source(self):
        rng = np.random.default_rng(3)
        g = random_graph(rng, 30, 0.15)
        ids = rng.choice(30, size=12, replace=False)
        d = induced_subgraph(g, ids)
        for i in range(d.num_nodes):
            for j in d.graph.neighbors(i):
                u, v = int(d.origin_ids[i]), int(d.origin_ids[j])
                assert v in set(int(x) for x in g.neighbors(u))


class TestLHopNeighborhood:
    def test_radius_zero(self):
        g = path_graph(4)
        assert list(l_hop_neighborhood(g, 2, 0)) == [2]

    def test_path_bfs(self):
        assert list(l_hop_neighborhood(path_graph(4), 0, 2)) == [0, 1, 2]

    def test_monotone_and_reaches_component(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            g = random_graph(rng, 25, 0.1)
            root = int(rng.integers(25))
            prev = set()
            for depth in range(26):
                ball = set(int(v) for v in l_hop_neighborhood(g, root, depth))
                assert prev <= ball
                assert ball == bfs_ball(g, root, depth)
                prev = ball
            assert prev == bfs_ball(g, root, 25)  # full component at L >= diameter


class TestByteSize:
    def test_single_node_no_labels(self):
        g = graph_from_edges(1, [], features=np.zeros((1, 1)))
        assert byte_size(g) == 12

    def test_two_nodes_one_edge_labeled(self):
        g = graph_from_edges(2, [(0, 1)], features=np.zeros((2, 2)), labels=[0, 1])
        assert byte_size(g) == 56

    def test_strict_subset_is_smaller(self):
        rng = np.random.default_rng(5)
        g = random_graph(rng, 20, 0.2)
        d = induced_subgraph(g, list(range(10)))
        assert byte_size(d) < byte_size(g)

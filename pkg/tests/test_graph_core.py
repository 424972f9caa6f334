"""
Tests for the graph data model and the synthetic benchmark generator.
"""

import networkx as nx
import numpy as np
import pytest

from semigraph.core.generator import FAMILIES, SyntheticGraphGenerator
from semigraph.core.graph import Dataset, Graph, SplitDataset, degree_features
from semigraph.errors import DatasetFormatError


class TestGraph:
    """Test suite for Graph construction and transformations."""

    def test_from_edges_canonicalizes(self):
        """Self-loops and reversed duplicates are dropped."""
        graph = Graph.from_edges(3, [(0, 1), (1, 0), (1, 1), (2, 1)])
        assert graph.num_edges == 2
        assert graph.edges.tolist() == [[0, 1], [1, 2]]
        assert graph.features.shape == (3, 1)

    def test_endpoint_out_of_range(self):
        with pytest.raises(DatasetFormatError):
            Graph(3, np.array([[0, 5]]), np.ones((3, 1)))

    def test_feature_rows_must_match_nodes(self):
        with pytest.raises(DatasetFormatError):
            Graph(3, np.zeros((0, 2)), np.ones((2, 1)))

    def test_duplicate_edges_rejected(self):
        with pytest.raises(DatasetFormatError):
            Graph(3, np.array([[0, 1], [1, 0]]), np.ones((3, 1)))

    def test_arrays_are_read_only(self, triangle):
        with pytest.raises(ValueError):
            triangle.edges[0, 0] = 2
        with pytest.raises(ValueError):
            triangle.features[0, 0] = 5.0

    def test_adjacency_and_degrees(self, path_graph):
        adjacency = path_graph.adjacency
        assert np.array_equal(adjacency, adjacency.T)
        assert np.all(np.diag(adjacency) == 0)
        assert path_graph.degrees.tolist() == [1, 2, 2, 2, 1]
        assert path_graph.neighbors(2).tolist() == [1, 3]

    def test_induced_subgraph_reindexes(self, path_graph):
        sub = path_graph.induced_subgraph([1, 2, 3])
        assert sub.num_nodes == 3
        assert sub.edges.tolist() == [[0, 1], [1, 2]]
        assert np.array_equal(sub.features, path_graph.features[[1, 2, 3]])
        assert sub.label == path_graph.label
        assert sub.graph_id == path_graph.graph_id

    def test_permute_keeps_structure(self, path_graph):
        permuted = path_graph.permute([4, 3, 2, 1, 0])
        assert permuted.num_edges == path_graph.num_edges
        assert np.array_equal(permuted.features, path_graph.features[::-1])
        assert sorted(permuted.degrees.tolist()) == sorted(path_graph.degrees.tolist())

    def test_permute_rejects_non_permutation(self, path_graph):
        with pytest.raises(ValueError):
            path_graph.permute([0, 0, 1, 2, 3])

    def test_degree_features_clamp(self):
        star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        featured = degree_features(star, max_degree=2)
        assert featured.features.shape == (4, 3)
        assert featured.features[0].tolist() == [0.0, 0.0, 1.0]
        assert featured.features[1].tolist() == [0.0, 1.0, 0.0]


class TestDataset:
    """Test suite for Dataset and SplitDataset containers."""

    def test_inconsistent_feature_dims(self, triangle):
        other = Graph.from_edges(2, [(0, 1)], features=np.ones((2, 3)), label=1)
        with pytest.raises(DatasetFormatError):
            Dataset(graphs=(triangle, other), num_classes=2)

    def test_class_count_mismatch(self, triangle, single_edge):
        with pytest.raises(DatasetFormatError):
            Dataset(graphs=(triangle, single_edge), num_classes=3)

    def test_labels_and_mean_features(self, triangle, single_edge):
        dataset = Dataset(graphs=(triangle, single_edge), num_classes=2)
        assert len(dataset) == 2
        assert dataset.labels.tolist() == [0, 1]
        assert dataset.feature_dim == 1
        assert dataset.mean_features().tolist() == [1.0]

    def test_split_parts_must_be_disjoint(self):
        with pytest.raises(ValueError):
            SplitDataset((0, 1), (1, 2), (3,), (4,))

    def test_split_sizes(self):
        split = SplitDataset((0,), (1, 2), (3,), (4, 5))
        assert split.sizes() == (1, 2, 1, 2)
        assert split.all_indices() == [0, 1, 2, 3, 4, 5]


class TestSyntheticGraphGenerator:
    """Test suite for the cycles / stars / near-complete benchmark."""

    def test_balanced_labels(self):
        dataset = SyntheticGraphGenerator(seed=3).generate(30)
        assert dataset.num_classes == len(FAMILIES)
        assert np.bincount(dataset.labels).tolist() == [10, 10, 10]
        assert [g.graph_id for g in dataset.graphs] == list(range(30))

    def test_family_structure(self):
        dataset = SyntheticGraphGenerator(seed=5, size_range=(6, 9)).generate(12)
        for graph in dataset.graphs:
            n = graph.num_nodes
            assert 6 <= n <= 9
            if graph.label == 0:
                assert set(graph.degrees.tolist()) == {2}
            elif graph.label == 1:
                assert graph.num_edges == n - 1
                assert graph.degrees.max() == n - 1
            else:
                complete = n * (n - 1) // 2
                assert graph.num_edges == complete - int(np.floor(0.1 * complete))

    def test_connected_graphs(self):
        dataset = SyntheticGraphGenerator(seed=2).generate(9)
        for graph in dataset.graphs:
            structure = nx.Graph()
            structure.add_nodes_from(range(graph.num_nodes))
            structure.add_edges_from(graph.edges.tolist())
            assert nx.is_connected(structure)

    def test_seeded_generation_is_deterministic(self):
        first = SyntheticGraphGenerator(seed=11).generate(12)
        second = SyntheticGraphGenerator(seed=11).generate(12)
        assert all(a.same_structure(b) for a, b in zip(first.graphs, second.graphs))

    def test_invalid_size_range(self):
        with pytest.raises(ValueError):
            SyntheticGraphGenerator(size_range=(2, 5))

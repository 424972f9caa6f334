"""
Tests for the TU dataset reader and writer.
"""

import numpy as np
import pytest

from semigraph.core.graph import Dataset
from semigraph.errors import DatasetFormatError
from semigraph.ingestion.tu_format import load_tu_dataset, write_tu_dataset


class TestLoadTuDataset:
    """Test suite for reading TU-format directories."""

    def test_loads_graphs_and_labels(self, tu_directory):
        dataset = load_tu_dataset(tu_directory)
        assert dataset.name == "TOY"
        assert len(dataset) == 2
        assert dataset.num_classes == 2
        # labels remapped in sorted order: -1 -> 0, 1 -> 1
        assert dataset.labels.tolist() == [1, 0]
        triangle, edge = dataset.graphs
        assert triangle.num_nodes == 3 and triangle.num_edges == 3
        assert edge.num_nodes == 2 and edge.edges.tolist() == [[0, 1]]

    def test_degree_features_without_node_files(self, tu_directory):
        dataset = load_tu_dataset(tu_directory, max_degree=4)
        assert dataset.feature_dim == 5
        assert dataset.featurization.startswith("degree_onehot")
        assert dataset.graphs[0].features[:, 2].tolist() == [1.0, 1.0, 1.0]

    def test_node_labels_one_hot(self, tu_directory):
        (tu_directory / "TOY_node_labels.txt").write_text("3\n3\n5\n7\n7\n")
        dataset = load_tu_dataset(tu_directory)
        assert dataset.feature_dim == 3
        assert dataset.graphs[0].features.tolist() == [[1, 0, 0], [1, 0, 0], [0, 1, 0]]
        assert dataset.featurization == "node_label_onehot"

    def test_node_attributes_appended(self, tu_directory):
        (tu_directory / "TOY_node_labels.txt").write_text("0\n1\n0\n1\n0\n")
        (tu_directory / "TOY_node_attributes.txt").write_text("0.5, 1.5\n1, 2\n3, 4\n5, 6\n7, 8\n")
        dataset = load_tu_dataset(tu_directory)
        assert dataset.feature_dim == 4
        assert dataset.graphs[1].features.tolist() == [[0.0, 1.0, 5.0, 6.0], [1.0, 0.0, 7.0, 8.0]]

    def test_missing_mandatory_file(self, tu_directory):
        (tu_directory / "TOY_graph_labels.txt").unlink()
        with pytest.raises(DatasetFormatError, match="graph_labels"):
            load_tu_dataset(tu_directory)

    def test_edge_crossing_graphs(self, tu_directory):
        (tu_directory / "TOY_A.txt").write_text("1, 4\n4, 1\n")
        with pytest.raises(DatasetFormatError, match="crosses"):
            load_tu_dataset(tu_directory)

    def test_non_numeric_entry(self, tu_directory):
        (tu_directory / "TOY_graph_indicator.txt").write_text("1\n1\nx\n2\n2\n")
        with pytest.raises(DatasetFormatError):
            load_tu_dataset(tu_directory)

    def test_label_count_mismatch(self, tu_directory):
        (tu_directory / "TOY_graph_labels.txt").write_text("1\n")
        with pytest.raises(DatasetFormatError):
            load_tu_dataset(tu_directory)

    def test_several_datasets_need_a_name(self, tu_directory):
        (tu_directory / "OTHER_A.txt").write_text("1, 2\n")
        with pytest.raises(DatasetFormatError, match="several"):
            load_tu_dataset(tu_directory)
        assert len(load_tu_dataset(tu_directory, name="TOY")) == 2

    def test_missing_directory(self, temp_dir):
        with pytest.raises(DatasetFormatError):
            load_tu_dataset(temp_dir / "absent")


class TestWriteTuDataset:
    """Test suite for writing TU-format directories."""

    def test_written_dataset_loads_back(self, tiny_dataset, temp_dir):
        write_tu_dataset(tiny_dataset, temp_dir / "out")
        loaded = load_tu_dataset(temp_dir / "out")
        assert loaded.name == tiny_dataset.name
        assert loaded.num_classes == tiny_dataset.num_classes
        assert all(a.same_structure(b) for a, b in zip(loaded.graphs, tiny_dataset.graphs))

    def test_edges_written_in_both_directions(self, triangle, single_edge, temp_dir):
        write_tu_dataset(Dataset(graphs=(triangle, single_edge), num_classes=2, name="PAIR"), temp_dir)
        rows = np.loadtxt(temp_dir / "PAIR_A.txt", delimiter=",", dtype=int)
        assert len(rows) == 2 * (triangle.num_edges + single_edge.num_edges)
        assert [4, 5] in rows.tolist() and [5, 4] in rows.tolist()

"""
Pytest configuration and shared fixtures for semigraph tests.
"""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from semigraph.core.generator import SyntheticGraphGenerator
from semigraph.core.graph import Dataset, Graph
from semigraph.schemas.base import RunConfig


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], label=0, graph_id=0)


@pytest.fixture
def single_edge() -> Graph:
    return Graph.from_edges(2, [(0, 1)], label=1, graph_id=1)


@pytest.fixture
def path_graph() -> Graph:
    """Path 0-1-2-3-4 with distinct two-column features."""
    features = np.arange(10, dtype=np.float64).reshape(5, 2)
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], features=features, label=0, graph_id=7)


def make_labeled_dataset(counts, name: str = "BALANCED") -> Dataset:
    """``counts[c]`` single-edge graphs of class ``c``."""
    graphs = []
    for label, count in enumerate(counts):
        for _ in range(count):
            graphs.append(Graph.from_edges(2, [(0, 1)], label=label, graph_id=len(graphs)))
    return Dataset(graphs=tuple(graphs), num_classes=len(counts), name=name)


@pytest.fixture
def balanced_dataset() -> Dataset:
    """100 graphs, two classes of 50."""
    return make_labeled_dataset([50, 50])


@pytest.fixture
def tiny_dataset() -> Dataset:
    """15 small synthetic graphs over three classes."""
    return SyntheticGraphGenerator(seed=0, size_range=(4, 6), max_degree=8).generate(15, name="TINY")


@pytest.fixture
def tiny_config() -> RunConfig:
    """A configuration small enough to train in well under a second per epoch."""
    return RunConfig(
        hidden_dim=8,
        num_layers=2,
        num_hidden_graphs=3,
        hidden_graph_size=3,
        walk_length=2,
        epochs=2,
        batch_size=4,
        bank_capacity=16,
        seeds=[1],
        learning_rate=0.01,
    )


@pytest.fixture
def tu_directory(temp_dir) -> Path:
    """Two graphs in TU format: a triangle (label 1) and an edge (label -1)."""
    directory = temp_dir / "TOY"
    directory.mkdir()
    (directory / "TOY_A.txt").write_text("1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n")
    (directory / "TOY_graph_indicator.txt").write_text("1\n1\n1\n2\n2\n")
    (directory / "TOY_graph_labels.txt").write_text("1\n-1\n")
    return directory


@pytest.fixture
def make_dataset():
    """Factory for datasets of single-edge graphs with given per-class counts."""
    return make_labeled_dataset

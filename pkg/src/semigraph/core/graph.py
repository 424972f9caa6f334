"""
Graph and dataset data model.

Graphs are immutable: edge and feature arrays are made read-only on
construction, and every transformation returns a new graph.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DatasetFormatError


def _canonical_edges(edges: Iterable[Tuple[int, int]]) -> np.ndarray:
    """Unordered, deduplicated, self-loop-free pairs sorted as (u < v)."""
    pairs = {(min(u, v), max(u, v)) for u, v in ((int(a), int(b)) for a, b in edges) if u != v}
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(sorted(pairs), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Graph:
    """An undirected graph with dense node features and an optional class label."""

    num_nodes: int
    edges: np.ndarray
    features: np.ndarray
    label: Optional[int] = None
    graph_id: Optional[int] = None

    def __post_init__(self):
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        features = np.array(self.features, dtype=np.float64)
        if features.ndim != 2:
            features = features.reshape(self.num_nodes, -1)
        edges.setflags(write=False)
        features.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "features", features)
        self.validate()

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: Iterable[Tuple[int, int]],
        features: Optional[np.ndarray] = None,
        label: Optional[int] = None,
        graph_id: Optional[int] = None,
    ) -> "Graph":
        """Build a graph from raw pairs, dropping self-loops and duplicates."""
        if features is None:
            features = np.ones((num_nodes, 1))
        return cls(num_nodes, _canonical_edges(edges), features, label, graph_id)

    def validate(self) -> None:
        if self.num_nodes < 0:
            raise DatasetFormatError(f"negative node count {self.num_nodes}")
        if self.features.shape[0] != self.num_nodes:
            raise DatasetFormatError(
                f"feature rows ({self.features.shape[0]}) != num_nodes ({self.num_nodes})"
            )
        if len(self.edges):
            if self.edges.min() < 0 or self.edges.max() >= self.num_nodes:
                raise DatasetFormatError("edge endpoint out of range")
            if np.any(self.edges[:, 0] == self.edges[:, 1]):
                raise DatasetFormatError("self-loops are not allowed")
            canonical = np.sort(self.edges, axis=1)
            if len(np.unique(canonical, axis=0)) != len(canonical):
                raise DatasetFormatError("duplicate undirected edges")
        if self.label is not None and self.label < 0:
            raise DatasetFormatError(f"negative class label {self.label}")

    @property
    def num_edges(self) -> int:
        return int(len(self.edges))

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix."""
        matrix = np.zeros((self.num_nodes, self.num_nodes))
        if len(self.edges):
            matrix[self.edges[:, 0], self.edges[:, 1]] = 1.0
            matrix[self.edges[:, 1], self.edges[:, 0]] = 1.0
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    def neighbors(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[node])

    def replace(self, **changes) -> "Graph":
        """Copy with selected fields replaced."""
        values = {
            "num_nodes": self.num_nodes,
            "edges": self.edges,
            "features": self.features,
            "label": self.label,
            "graph_id": self.graph_id,
        }
        values.update(changes)
        return Graph(**values)

    def induced_subgraph(self, nodes: Sequence[int]) -> "Graph":
        """Keep ``nodes`` (in the given order) and every edge between them, reindexed densely."""
        keep = np.asarray(nodes, dtype=np.int64)
        position = np.full(self.num_nodes, -1, dtype=np.int64)
        position[keep] = np.arange(len(keep))
        if len(self.edges):
            mapped = position[self.edges]
            mapped = mapped[(mapped >= 0).all(axis=1)]
        else:
            mapped = np.zeros((0, 2), dtype=np.int64)
        return self.replace(
            num_nodes=len(keep),
            edges=_canonical_edges(mapped),
            features=self.features[keep],
        )

    def permute(self, order: Sequence[int]) -> "Graph":
        """Relabel nodes so that new node ``i`` is old node ``order[i]``."""
        order = np.asarray(order, dtype=np.int64)
        if sorted(order.tolist()) != list(range(self.num_nodes)):
            raise ValueError("order must be a permutation of the node indices")
        return self.induced_subgraph(order)

    def same_structure(self, other: "Graph") -> bool:
        """Identical node count, edge set, features and label."""
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.features, other.features)
            and self.label == other.label
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """A named collection of graphs with a shared feature dimension."""

    graphs: Tuple[Graph, ...]
    num_classes: int
    name: str = "dataset"
    featurization: str = "provided"

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        dims = {g.feature_dim for g in self.graphs}
        if len(dims) > 1:
            raise DatasetFormatError(f"{self.name}: inconsistent feature dims {sorted(dims)}")
        labels = {g.label for g in self.graphs if g.label is not None}
        if labels and len(labels) != self.num_classes:
            raise DatasetFormatError(
                f"{self.name}: num_classes={self.num_classes} but {len(labels)} labels observed"
            )
        if any(label >= self.num_classes for label in labels):
            raise DatasetFormatError(f"{self.name}: label outside [0, {self.num_classes})")

    def __len__(self) -> int:
        return len(self.graphs)

    def __getitem__(self, index: int) -> Graph:
        return self.graphs[index]

    @property
    def feature_dim(self) -> int:
        return self.graphs[0].feature_dim if self.graphs else 0

    @property
    def labels(self) -> np.ndarray:
        return np.array([-1 if g.label is None else g.label for g in self.graphs], dtype=np.int64)

    def mean_features(self) -> np.ndarray:
        """Mean feature row over every node of every graph."""
        rows = [g.features for g in self.graphs if g.num_nodes]
        if not rows:
            return np.zeros(self.feature_dim)
        return np.concatenate(rows).mean(axis=0)


@dataclass(frozen=True)
class SplitDataset:
    """Disjoint index lists into ``Dataset.graphs``.

    Graphs in ``unlabeled_train`` keep their labels in the dataset but the
    trainer never reads them.
    """

    labeled_train: Tuple[int, ...]
    unlabeled_train: Tuple[int, ...]
    validation: Tuple[int, ...]
    test: Tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        parts = [tuple(int(i) for i in p) for p in self.parts()]
        for name, part in zip(("labeled_train", "unlabeled_train", "validation", "test"), parts):
            object.__setattr__(self, name, part)
        flat: List[int] = [i for part in parts for i in part]
        if len(flat) != len(set(flat)):
            raise ValueError("split parts overlap")

    def parts(self) -> Tuple[Tuple[int, ...], ...]:
        return (self.labeled_train, self.unlabeled_train, self.validation, self.test)

    def sizes(self) -> Tuple[int, int, int, int]:
        return tuple(len(p) for p in self.parts())  # type: ignore[return-value]

    def all_indices(self) -> List[int]:
        return sorted(i for part in self.parts() for i in part)


def degree_features(graph: Graph, max_degree: int = 64) -> Graph:
    """Copy of ``graph`` whose features are one-hot degrees clamped at ``max_degree``."""
    if max_degree < 1:
        raise ValueError(f"max_degree must be >= 1, got {max_degree}")
    buckets = np.minimum(graph.degrees, max_degree)
    features = np.zeros((graph.num_nodes, max_degree + 1))
    features[np.arange(graph.num_nodes), buckets] = 1.0
    return graph.replace(features=features)

"""
Disjoint-union batching of graphs for the encoders.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core.graph import Graph
from ..errors import ShapeError


@dataclass(frozen=True, eq=False)
class GraphBatch:
    """Several graphs stacked as one disjoint-union graph.

    ``sources``/``targets`` list every undirected edge in both directions with
    node indices offset into the stack; ``segments[v]`` is the graph that
    stacked node ``v`` belongs to.
    """

    graphs: Sequence[Graph]
    features: np.ndarray
    sources: np.ndarray
    targets: np.ndarray
    segments: np.ndarray
    node_counts: np.ndarray

    @classmethod
    def from_graphs(cls, graphs: Sequence[Graph]) -> "GraphBatch":
        if not graphs:
            raise ShapeError("cannot batch an empty graph list")
        if any(g.num_nodes < 1 for g in graphs):
            raise ShapeError("every graph in a batch needs at least one node")
        dims = {g.feature_dim for g in graphs}
        if len(dims) != 1:
            raise ShapeError(f"graphs in a batch disagree on feature_dim: {sorted(dims)}")
        counts = np.array([g.num_nodes for g in graphs], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        edges = np.concatenate([g.edges + offset for g, offset in zip(graphs, offsets)], axis=0)
        sources = np.concatenate([edges[:, 0], edges[:, 1]])
        targets = np.concatenate([edges[:, 1], edges[:, 0]])
        features = np.concatenate([g.features for g in graphs], axis=0)
        segments = np.repeat(np.arange(len(graphs)), counts)
        return cls(list(graphs), features, sources, targets, segments, counts)

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def total_nodes(self) -> int:
        return int(self.node_counts.sum())

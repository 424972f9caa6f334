"""
Synthetic graph-classification benchmark.

Three structurally separable families (cycles, stars, near-complete graphs)
with sizes drawn uniformly from a range. Used for end-to-end tests and as the
``dataset = synthetic`` source in run configurations.
"""

from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
from loguru import logger

from .graph import Dataset, Graph, degree_features

FAMILIES = ("cycle", "star", "near_complete")


class SyntheticGraphGenerator:
    """Seeded generator of labeled synthetic graph datasets."""

    def __init__(
        self,
        seed: int = 0,
        size_range: Tuple[int, int] = (6, 12),
        near_complete_drop: float = 0.1,
        max_degree: int = 16,
    ):
        """
        Args:
            seed: Seed for the generator's random stream.
            size_range: Inclusive range of node counts.
            near_complete_drop: Fraction of edges removed from a complete graph.
            max_degree: Clamp for the one-hot degree features.
        """
        low, high = size_range
        if low < 3 or high < low:
            raise ValueError(f"size_range must satisfy 3 <= low <= high, got {size_range}")
        self.rng = np.random.default_rng(seed)
        self.size_range = (low, high)
        self.near_complete_drop = near_complete_drop
        self.max_degree = max_degree
        self._builders: Dict[str, Callable[[int], nx.Graph]] = {
            "cycle": nx.cycle_graph,
            "star": lambda n: nx.star_graph(n - 1),
            "near_complete": self._near_complete,
        }

    def _near_complete(self, n: int) -> nx.Graph:
        graph = nx.complete_graph(n)
        edges = list(graph.edges())
        drop = int(np.floor(self.near_complete_drop * len(edges)))
        for index in self.rng.choice(len(edges), size=drop, replace=False):
            graph.remove_edge(*edges[index])
        return graph

    def generate_graph(self, family: str, label: int, graph_id: Optional[int] = None) -> Graph:
        n = int(self.rng.integers(self.size_range[0], self.size_range[1] + 1))
        structure = self._builders[family](n)
        graph = Graph.from_edges(n, structure.edges(), label=label, graph_id=graph_id)
        return degree_features(graph, self.max_degree)

    def generate(self, num_graphs: int = 300, name: str = "SYNTHETIC") -> Dataset:
        """Generate ``num_graphs`` graphs split evenly (round-robin) across the families."""
        graphs: List[Graph] = []
        for index in range(num_graphs):
            label = index % len(FAMILIES)
            graphs.append(self.generate_graph(FAMILIES[label], label, graph_id=index))
        order = self.rng.permutation(num_graphs)
        graphs = [graphs[i].replace(graph_id=position) for position, i in enumerate(order)]
        dataset = Dataset(
            graphs=tuple(graphs),
            num_classes=min(num_graphs, len(FAMILIES)),
            name=name,
            featurization=f"degree_onehot(max_degree={self.max_degree})",
        )
        logger.info(f"Generated synthetic dataset {name}: {num_graphs} graphs, families={FAMILIES}")
        return dataset

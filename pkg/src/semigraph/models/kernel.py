"""
Random-walk kernel encoder with trainable hidden graphs.

The ``p``-step kernel between an input graph ``G`` and a hidden graph ``A'``
counts common walks of length ``p`` in their direct product graph. For
unlabeled graphs the product adjacency is the Kronecker product, so

    e^T (A x A')^p e = (e^T A^p e) * (e^T A'^p e) = s_p(G) * s_p(A')

and the encoder only needs per-graph walk counts. ``H[i, p]`` holds the kernel
against hidden graph ``i`` for ``p = 0..P``; the flattened ``H`` goes through a
fully-connected head.
"""

from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from ..autodiff import Tensor, as_tensor, no_grad, ops
from ..core.graph import Graph
from ..errors import ShapeError
from ..schemas.base import EncoderKind
from .batch import GraphBatch
from .layers import Linear, Module
from .mpnn import GraphEmbedding

DEFAULT_PRODUCT_CAP = 4096

AdjacencyLike = Union[Graph, np.ndarray, Tensor]


def _adjacency(value: AdjacencyLike) -> Tensor:
    if isinstance(value, Graph):
        return Tensor(value.adjacency)
    return as_tensor(value)


def walk_counts(adjacency: AdjacencyLike, P: int) -> Tensor:
    """``[n, e^T A e, ..., e^T A^P e]`` as a differentiable vector of length ``P + 1``."""
    a = _adjacency(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"walk_counts needs a square matrix, got {a.shape}")
    n = a.shape[0]
    counts = [Tensor(np.array([float(n)]))]
    for power in ops.matrix_power_chain(a, P):
        counts.append(ops.reshape(ops.sum(power), (1,)))
    return ops.concat(counts)


def kernel_value(graph: AdjacencyLike, hidden: AdjacencyLike, p: int) -> Tensor:
    """Common length-``p`` walks of ``graph`` and ``hidden``, via the Kronecker factorization."""
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    pick = np.eye(p + 1)[p]
    return ops.matmul(walk_counts(graph, p), pick) * ops.matmul(walk_counts(hidden, p), pick)


def direct_product_graph(graph: AdjacencyLike, hidden: AdjacencyLike) -> nx.Graph:
    """
    Explicit direct product: nodes ``(v, v')``, an edge between ``(v, v')`` and
    ``(u, u')`` when ``{v, u}`` is an edge of the first graph and ``{v', u'}`` of
    the second. Edge weights multiply.
    """
    left = _adjacency(graph).data
    right = _adjacency(hidden).data
    product = nx.Graph()
    product.add_nodes_from((v, w) for v in range(left.shape[0]) for w in range(right.shape[0]))
    left_edges = [(v, u) for v, u in zip(*np.nonzero(left))]
    right_edges = [(w, x) for w, x in zip(*np.nonzero(right))]
    for v, u in left_edges:
        for w, x in right_edges:
            product.add_edge((v, w), (u, x), weight=float(left[v, u] * right[w, x]))
    return product


def direct_product_oracle(
    graph: AdjacencyLike,
    hidden: AdjacencyLike,
    p: int,
    weights: Optional[Sequence[float]] = None,
    max_product_nodes: int = DEFAULT_PRODUCT_CAP,
) -> float:
    """
    Reference kernel built from the materialized product graph.

    Returns ``e^T A_x^p e``, or ``sum_q weights[q] * e^T A_x^q e`` when weights
    are given. Only meant for small graphs.
    """
    left = _adjacency(graph).data
    right = _adjacency(hidden).data
    size = left.shape[0] * right.shape[0]
    if size > max_product_nodes:
        raise ValueError(f"product graph would have {size} nodes, above the cap of {max_product_nodes}")
    product = direct_product_graph(left, right)
    nodes = sorted(product.nodes())
    matrix = nx.to_numpy_array(product, nodelist=nodes, weight="weight")
    ones = np.ones(len(nodes))
    if weights is None:
        return float(ones @ np.linalg.matrix_power(matrix, p) @ ones)
    total, walk = 0.0, ones.copy()
    for q, omega in enumerate(weights):
        if q:
            walk = matrix @ walk
        total += float(omega) * float(ones @ walk)
    return total


class HiddenGraphSet(Module):
    """
    ``N`` trainable undirected weighted graphs.

    Each graph is stored as free weights over its strict upper triangle; the
    effective adjacency is ``relu`` of those weights mirrored across the
    diagonal, so it is symmetric, non-negative and loop-free.
    """

    def __init__(self, sizes: Sequence[int], rng: np.random.Generator, init_range: Tuple[float, float] = (0.1, 1.0)):
        super().__init__()
        if not sizes or any(n < 2 for n in sizes):
            raise ValueError(f"hidden graphs need at least 2 nodes each, got {list(sizes)}")
        self.sizes = tuple(int(n) for n in sizes)
        self.free = [
            self.add_parameter(str(i), rng.uniform(*init_range, size=n * (n - 1) // 2))
            for i, n in enumerate(self.sizes)
        ]
        self._build_scatter()

    def _build_scatter(self) -> None:
        """Constant maps from the concatenated free weights to the block-diagonal adjacency."""
        total = sum(self.sizes)
        free_total = sum(n * (n - 1) // 2 for n in self.sizes)
        scatter = np.zeros((total * total, free_total))
        membership = np.zeros((len(self.sizes), total))
        offset, column = 0, 0
        for index, n in enumerate(self.sizes):
            membership[index, offset : offset + n] = 1.0
            for i, j in zip(*np.triu_indices(n, k=1)):
                row, col = offset + i, offset + j
                scatter[row * total + col, column] = 1.0
                scatter[col * total + row, column] = 1.0
                column += 1
            offset += n
        self._scatter = scatter
        self.membership = membership
        self.total_nodes = total

    def __len__(self) -> int:
        return len(self.sizes)

    def block_adjacency(self) -> Tensor:
        """Block-diagonal matrix of all effective adjacencies."""
        free = ops.relu(ops.concat(self.free))
        return ops.reshape(ops.matmul(self._scatter, free), (self.total_nodes, self.total_nodes))

    def adjacency(self, index: int) -> np.ndarray:
        """Effective adjacency of one hidden graph as a plain array."""
        n = self.sizes[index]
        matrix = np.zeros((n, n))
        matrix[np.triu_indices(n, k=1)] = np.maximum(self.free[index].data, 0.0)
        return matrix + matrix.T

    def walk_counts(self, P: int) -> Tensor:
        """``(N, P + 1)`` walk counts of every hidden graph, one tape for all of them."""
        block = self.block_adjacency()
        ones = np.ones(self.total_nodes)
        columns = [Tensor(self.membership @ ones)]
        for power in ops.matrix_power_chain(block, P):
            columns.append(ops.matmul(self.membership, ops.matmul(power, ones)))
        return ops.transpose(ops.reshape(ops.concat(columns), (P + 1, len(self.sizes))))


class RandomWalkKernelEncoder(Module):
    """Parameters and forward pass of the kernel encoder."""

    kind = EncoderKind.KERNEL

    def __init__(
        self,
        hidden_dim: int = 64,
        num_hidden_graphs: int = 16,
        hidden_graph_size: int = 5,
        walk_length: int = 3,
        log1p: bool = False,
        rng: Optional[np.random.Generator] = None,
        hidden_sizes: Optional[Sequence[int]] = None,
    ):
        super().__init__()
        if walk_length < 1:
            raise ValueError(f"walk_length must be >= 1, got {walk_length}")
        rng = rng if rng is not None else np.random.default_rng(0)
        sizes = list(hidden_sizes) if hidden_sizes is not None else [hidden_graph_size] * num_hidden_graphs
        self.hidden_dim = hidden_dim
        self.walk_length = walk_length
        self.log1p = log1p
        self.hidden = self.add_module("hidden", HiddenGraphSet(sizes, rng))
        self.head = self.add_module("head", Linear(len(sizes) * (walk_length + 1), hidden_dim, rng))
        logger.info(
            f"RandomWalkKernelEncoder: hidden_graphs={len(sizes)}, sizes={sorted(set(sizes))}, "
            f"P={walk_length}, hidden_dim={hidden_dim}, log1p={log1p}"
        )

    @property
    def num_hidden_graphs(self) -> int:
        return len(self.hidden)

    def input_walk_counts(self, graphs: Sequence[Graph]) -> np.ndarray:
        """``(B, P + 1)`` walk counts of the input graphs; constants for differentiation."""
        with no_grad():
            return np.stack([walk_counts(g, self.walk_length).data for g in graphs])

    def kernel_features(self, graphs: Sequence[Graph]) -> Tensor:
        """``(B, N * (P + 1))``: each graph's ``H`` flattened row-major."""
        per_input = self.input_walk_counts(graphs)
        per_hidden = self.hidden.walk_counts(self.walk_length)
        flat = ops.reshape(per_hidden, (1, self.num_hidden_graphs * (self.walk_length + 1)))
        features = np.tile(per_input, (1, self.num_hidden_graphs)) * flat
        if self.log1p:
            features = ops.log(features + 1.0)
        return features

    def encode(self, batch: GraphBatch) -> Tensor:
        return self.head(self.kernel_features(batch.graphs))

    def __call__(self, graphs: Sequence[Graph]) -> Tensor:
        return self.head(self.kernel_features(graphs))


def kernel_forward(graph: Graph, params: RandomWalkKernelEncoder) -> GraphEmbedding:
    """Embed a single graph with the kernel encoder."""
    if graph.num_nodes < 1:
        raise ShapeError("kernel_forward needs a graph with at least one node")
    vector = ops.reshape(params([graph]), (params.hidden_dim,))
    return GraphEmbedding(vector, graph.graph_id)


def hidden_graph_edges(params: RandomWalkKernelEncoder, threshold: float = 0.0) -> List[List[Tuple[int, int, float]]]:
    """Per hidden graph, ``(u, v, weight)`` for every pair with weight above ``threshold``."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    edges = []
    for index, n in enumerate(params.hidden.sizes):
        matrix = params.hidden.adjacency(index)
        rows, cols = np.triu_indices(n, k=1)
        edges.append([(int(u), int(v), float(matrix[u, v])) for u, v in zip(rows, cols) if matrix[u, v] > threshold])
    return edges


def export_hidden_graphs(params: RandomWalkKernelEncoder, threshold: float = 0.0) -> List[str]:
    """DOT text per hidden graph, keeping edges with weight above ``threshold``."""
    documents = []
    for index, edge_list in enumerate(hidden_graph_edges(params, threshold)):
        graph = nx.Graph(name=f"hidden_{index}")
        graph.add_nodes_from(range(params.hidden.sizes[index]))
        graph.add_weighted_edges_from((u, v, round(w, 6)) for u, v, w in edge_list)
        documents.append(nx.nx_pydot.to_pydot(graph).to_string())
    return documents

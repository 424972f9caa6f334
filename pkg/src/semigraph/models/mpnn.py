"""
Message-passing graph encoder.

Each layer updates every node to ``COM_k(h_v + sum of neighbour states)``
where ``COM_k`` is a two-layer perceptron. The graph vector is an attention
readout over the last layer: nodes whose score ``t . h_v`` is not positive are
pruned, the rest are softmax-weighted. A graph whose scores are all
non-positive falls back to mean pooling.

Neighbour sums, dense layers and readout sums are all evaluated with
order-independent reductions, so relabelling the nodes of a graph leaves its
embedding unchanged bit for bit.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..autodiff import Tensor, ops
from ..core.graph import Graph
from ..errors import ShapeError
from ..schemas.base import EncoderKind
from .batch import GraphBatch
from .layers import MLP, Module


@dataclass
class GraphEmbedding:
    """Embedding of one graph plus the readout weights that produced it."""

    vector: Tensor
    graph_id: Optional[int] = None
    attention: Optional[np.ndarray] = None


def attention_readout(
    node_states: Tensor,
    t: Tensor,
    segments: Optional[np.ndarray] = None,
    mask: Optional[np.ndarray] = None,
    num_graphs: Optional[int] = None,
) -> Tuple[Tensor, np.ndarray, np.ndarray]:
    """
    Masked-softmax pooling of node states into graph vectors.

    Args:
        node_states: ``(n, d)`` stacked node states.
        t: ``(d,)`` attention vector.
        segments: Graph index of every row; ``None`` pools all rows into one graph.
        mask: Boolean keep-mask over nodes. Computed as ``scores > 0`` when omitted;
            pass the forward mask to hold it fixed (it is constant for differentiation).
        num_graphs: Number of graphs; defaults to ``max(segments) + 1``.

    Returns:
        ``(vectors, weights, mask)`` with vectors ``(B, d)``, or ``(d,)`` when
        ``segments`` is None.
    """
    if node_states.ndim != 2 or t.shape != (node_states.shape[1],):
        raise ShapeError(f"attention_readout: states {node_states.shape} vs t {t.shape}")
    single = segments is None
    n = node_states.shape[0]
    if single:
        segments, num_graphs = np.zeros(n, dtype=np.int64), 1
    segments = np.asarray(segments, dtype=np.int64)
    if num_graphs is None:
        num_graphs = int(segments.max()) + 1
    counts = np.bincount(segments, minlength=num_graphs).astype(np.float64)

    scores = ops.matmul(node_states, t, row_exact=True)
    if mask is None:
        mask = scores.data > 0
    mask = np.asarray(mask, dtype=bool)

    fallback = np.bincount(segments[mask], minlength=num_graphs) == 0
    if fallback.any():
        logger.debug(f"attention readout: {int(fallback.sum())} graph(s) without positive scores, mean pooling")
    shift = np.zeros(num_graphs)
    if mask.any():
        masked_max = np.full(num_graphs, -np.inf)
        np.maximum.at(masked_max, segments[mask], scores.data[mask])
        shift = np.where(fallback, 0.0, masked_max)

    fallback_node = fallback[segments].astype(np.float64)
    exps = ops.exp(scores - shift[segments]) * mask.astype(np.float64)
    denom = ops.take_rows(ops.segment_sum(exps, segments, num_graphs), segments) + fallback_node
    weights = exps / denom + fallback_node / counts[segments]
    pooled = ops.segment_sum(ops.reshape(weights, (n, 1)) * node_states, segments, num_graphs)
    if single:
        pooled = ops.reshape(pooled, (node_states.shape[1],))
    return pooled, weights.numpy(), mask


class MessagePassingEncoder(Module):
    """Parameters and forward pass of the message-passing encoder."""

    kind = EncoderKind.MPNN

    def __init__(
        self,
        input_dim: int,
        hidden_dim: int = 64,
        num_layers: int = 3,
        rng: Optional[np.random.Generator] = None,
    ):
        super().__init__()
        if num_layers < 1:
            raise ValueError(f"num_layers must be >= 1, got {num_layers}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.num_layers = num_layers
        self.combine = [
            self.add_module(
                f"com{k}",
                MLP([input_dim if k == 0 else hidden_dim, hidden_dim, hidden_dim], rng, row_exact=True),
            )
            for k in range(num_layers)
        ]
        limit = np.sqrt(3.0 / hidden_dim)
        self.attention = self.add_parameter("attention", rng.uniform(-limit, limit, size=hidden_dim))
        logger.info(
            f"MessagePassingEncoder: input_dim={input_dim}, hidden_dim={hidden_dim}, "
            f"layers={num_layers}, parameters={self.num_parameters()}"
        )

    def node_states(self, batch: GraphBatch) -> Tensor:
        if batch.features.shape[1] != self.input_dim:
            raise ShapeError(f"expected feature_dim {self.input_dim}, got {batch.features.shape[1]}")
        h = Tensor(batch.features)
        for com in self.combine:
            messages = ops.segment_sum(ops.take_rows(h, batch.sources), batch.targets, batch.total_nodes)
            h = com(h + messages)
        return h

    def encode_batch(
        self, batch: GraphBatch, mask: Optional[np.ndarray] = None
    ) -> Tuple[Tensor, np.ndarray, np.ndarray]:
        """``(B, d)`` embeddings plus readout weights and mask for every stacked node."""
        return attention_readout(self.node_states(batch), self.attention, batch.segments, mask, len(batch))

    def encode(self, batch: GraphBatch) -> Tensor:
        return self.encode_batch(batch)[0]

    def __call__(self, graphs: Sequence[Graph]) -> Tensor:
        return self.encode(GraphBatch.from_graphs(graphs))


def mpnn_forward(graph: Graph, params: MessagePassingEncoder, mask: Optional[np.ndarray] = None) -> GraphEmbedding:
    """Embed a single graph."""
    if graph.num_nodes < 1:
        raise ShapeError("mpnn_forward needs a graph with at least one node")
    vectors, weights, _ = params.encode_batch(GraphBatch.from_graphs([graph]), mask)
    return GraphEmbedding(ops.reshape(vectors, (params.hidden_dim,)), graph.graph_id, weights)

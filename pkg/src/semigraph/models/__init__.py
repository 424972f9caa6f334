"""Graph encoders and dense layers."""

from .batch import GraphBatch
from .kernel import (
    HiddenGraphSet,
    RandomWalkKernelEncoder,
    direct_product_graph,
    direct_product_oracle,
    export_hidden_graphs,
    hidden_graph_edges,
    kernel_forward,
    kernel_value,
    walk_counts,
)
from .layers import MLP, Linear, Module
from .mpnn import GraphEmbedding, MessagePassingEncoder, attention_readout, mpnn_forward

__all__ = [
    "GraphBatch",
    "GraphEmbedding",
    "Module",
    "Linear",
    "MLP",
    "MessagePassingEncoder",
    "attention_readout",
    "mpnn_forward",
    "HiddenGraphSet",
    "RandomWalkKernelEncoder",
    "walk_counts",
    "kernel_value",
    "kernel_forward",
    "direct_product_graph",
    "direct_product_oracle",
    "hidden_graph_edges",
    "export_hidden_graphs",
]

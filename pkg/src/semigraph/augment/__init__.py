"""Graph augmentations."""

from .views import AugmentSpec, GraphAugmenter, attr_mask, edge_drop, identity, node_drop, subgraph

__all__ = ["AugmentSpec", "GraphAugmenter", "edge_drop", "node_drop", "attr_mask", "subgraph", "identity"]

"""
Stochastic graph augmentations used to build correlated training views.

Every function is pure given its random generator. Per-view generators are
derived from ``(seed, graph id, epoch, view index)`` so views do not depend on
the order in which graphs are processed.
"""

import hashlib
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..core.graph import Graph
from ..schemas.base import AugmentKind

_EPS = 1e-9


def _check_ratio(ratio: float) -> None:
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"augmentation ratio must lie in [0, 1], got {ratio}")


def _count(ratio: float, total: int) -> int:
    return int(math.floor(ratio * total + _EPS))


def edge_drop(graph: Graph, ratio: float, rng: np.random.Generator) -> Graph:
    """Remove ``floor(ratio * |E|)`` uniformly chosen edges."""
    _check_ratio(ratio)
    drop = _count(ratio, graph.num_edges)
    if drop == 0:
        return graph
    keep = np.sort(rng.permutation(graph.num_edges)[drop:])
    return graph.replace(edges=graph.edges[keep])


def node_drop(graph: Graph, ratio: float, rng: np.random.Generator) -> Graph:
    """Remove ``floor(ratio * |V|)`` random nodes (at least one node always survives)."""
    _check_ratio(ratio)
    drop = min(_count(ratio, graph.num_nodes), max(graph.num_nodes - 1, 0))
    if drop == 0:
        return graph
    keep = np.sort(rng.permutation(graph.num_nodes)[drop:])
    return graph.induced_subgraph(keep)


def attr_mask(graph: Graph, ratio: float, rng: np.random.Generator, fill: np.ndarray) -> Graph:
    """Overwrite the feature rows of ``floor(ratio * |V|)`` random nodes with ``fill``."""
    _check_ratio(ratio)
    masked = _count(ratio, graph.num_nodes)
    if masked == 0:
        return graph
    fill = np.asarray(fill, dtype=np.float64)
    if fill.shape != (graph.feature_dim,):
        raise ValueError(f"fill vector has shape {fill.shape}, expected ({graph.feature_dim},)")
    features = graph.features.copy()
    features[rng.permutation(graph.num_nodes)[:masked]] = fill
    return graph.replace(features=features)


def _has_frontier(graph: Graph, kept: set) -> bool:
    return any(int(u) not in kept for v in kept for u in graph.neighbors(v))


def subgraph(graph: Graph, ratio: float, rng: np.random.Generator) -> Graph:
    """
    Induced subgraph on ``ceil((1 - ratio) * |V|)`` nodes grown by a random walk.

    The walk starts at a random node; when it stops finding new nodes it
    restarts from a random kept node. Growth ends early if the reached
    component has no unvisited neighbours left.
    """
    _check_ratio(ratio)
    n = graph.num_nodes
    if n == 0:
        return graph
    target = max(1, math.ceil((1.0 - ratio) * n - _EPS))
    current = int(rng.integers(n))
    kept = [current]
    seen = {current}
    stall = 0
    while len(kept) < target:
        neighbours = graph.neighbors(current)
        if len(neighbours) == 0 or stall > n:
            if not _has_frontier(graph, seen):
                break
            current = int(kept[rng.integers(len(kept))])
            stall = 0
            continue
        current = int(rng.choice(neighbours))
        if current in seen:
            stall += 1
        else:
            seen.add(current)
            kept.append(current)
            stall = 0
    return graph.induced_subgraph(sorted(kept))


def identity(graph: Graph, ratio: float = 0.0, rng: Optional[np.random.Generator] = None) -> Graph:
    return graph


@dataclass(frozen=True)
class AugmentSpec:
    """One concrete augmentation: which kind, at what ratio, with which seed."""

    kind: AugmentKind
    ratio: float = 0.2
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", AugmentKind(self.kind))
        if self.kind != AugmentKind.IDENTITY:
            _check_ratio(self.ratio)

    def apply(self, graph: Graph, fill: Optional[np.ndarray] = None) -> Graph:
        rng = np.random.default_rng(self.rng_seed)
        if self.kind == AugmentKind.EDGE_DROP:
            return edge_drop(graph, self.ratio, rng)
        if self.kind == AugmentKind.NODE_DROP:
            return node_drop(graph, self.ratio, rng)
        if self.kind == AugmentKind.ATTR_MASK:
            if fill is None:
                fill = graph.features.mean(axis=0) if graph.num_nodes else np.zeros(graph.feature_dim)
            return attr_mask(graph, self.ratio, rng, fill)
        if self.kind == AugmentKind.SUBGRAPH:
            return subgraph(graph, self.ratio, rng)
        return graph


class GraphAugmenter:
    """Draws one enabled augmentation uniformly at random per view."""

    def __init__(
        self,
        kinds: Sequence[AugmentKind],
        ratios: Mapping[AugmentKind, float],
        fill: np.ndarray,
        seed: int = 0,
    ):
        if not kinds:
            raise ValueError("at least one augmentation kind is required")
        self.kinds: Tuple[AugmentKind, ...] = tuple(AugmentKind(k) for k in kinds)
        self.ratios: Dict[AugmentKind, float] = {AugmentKind(k): float(v) for k, v in ratios.items()}
        for kind in self.kinds:
            if kind != AugmentKind.IDENTITY:
                _check_ratio(self.ratios.get(kind, 0.0))
        self.fill = np.asarray(fill, dtype=np.float64)
        self.seed = seed
        logger.info(
            "GraphAugmenter: "
            + ", ".join(f"{k.value}={self.ratios.get(k, 0.0)}" for k in self.kinds)
        )

    @property
    def is_identity(self) -> bool:
        return all(k == AugmentKind.IDENTITY for k in self.kinds)

    @staticmethod
    def stream_key(graph: Graph) -> int:
        """The graph id, or a digest of its structure and features when it has none."""
        if graph.graph_id is not None:
            return int(graph.graph_id)
        digest = hashlib.sha256()
        digest.update(np.int64(graph.num_nodes).tobytes())
        digest.update(np.ascontiguousarray(graph.edges).tobytes())
        digest.update(np.ascontiguousarray(graph.features).tobytes())
        return int.from_bytes(digest.digest()[:8], "little")

    def view_rng(self, graph_id: int, epoch: int, view: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, graph_id, epoch, view]))

    def random_augment(self, graph: Graph, rng: np.random.Generator) -> Tuple[Graph, AugmentKind]:
        """Apply one uniformly chosen kind at its configured ratio."""
        kind = self.kinds[int(rng.integers(len(self.kinds)))]
        ratio = self.ratios.get(kind, 0.0)
        if kind == AugmentKind.EDGE_DROP:
            return edge_drop(graph, ratio, rng), kind
        if kind == AugmentKind.NODE_DROP:
            return node_drop(graph, ratio, rng), kind
        if kind == AugmentKind.ATTR_MASK:
            return attr_mask(graph, ratio, rng, self.fill), kind
        if kind == AugmentKind.SUBGRAPH:
            return subgraph(graph, ratio, rng), kind
        return graph, kind

    def view(self, graph: Graph, epoch: int, view: int) -> Graph:
        """Deterministic view ``view`` of ``graph`` for ``epoch``."""
        return self.random_augment(graph, self.view_rng(self.stream_key(graph), epoch, view))[0]

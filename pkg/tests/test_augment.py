"""
Tests for graph augmentations and view generation.
"""

from collections import Counter
from itertools import combinations
from typing import Optional

import networkx as nx
import numpy as np
import pytest

from semigraph.augment.views import (
    AugmentSpec,
    GraphAugmenter,
    attr_mask,
    edge_drop,
    identity,
    node_drop,
    subgraph,
)
from semigraph.core.graph import Graph
from semigraph.schemas.base import AugmentKind


def _path(n: int, graph_id: Optional[int] = 0) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], features=np.eye(n), graph_id=graph_id)


def _connected(graph: Graph) -> bool:
    structure = nx.Graph()
    structure.add_nodes_from(range(graph.num_nodes))
    structure.add_edges_from(graph.edges.tolist())
    return nx.is_connected(structure)


class TestAugmentations:
    """Test suite for the individual augmentation functions."""

    def test_edge_drop_count(self, rng):
        graph = _path(11)
        dropped = edge_drop(graph, 0.2, rng)
        assert dropped.num_edges == 8
        assert {tuple(e) for e in dropped.edges} <= {tuple(e) for e in graph.edges}
        assert dropped.num_nodes == graph.num_nodes
        assert graph.num_edges == 10

    @pytest.mark.parametrize("seed", range(5))
    def test_node_drop_triangle_leaves_single_edge(self, seed):
        triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], features=np.eye(3))
        dropped = node_drop(triangle, 0.34, np.random.default_rng(seed))
        survivors = np.argmax(dropped.features, axis=1)
        assert dropped.num_nodes == 2
        assert dropped.edges.tolist() == [[0, 1]]
        assert len(set(survivors.tolist())) == 2

    def test_subgraph_is_induced(self, rng):
        structure = nx.gnp_random_graph(12, 0.4, seed=7)
        graph = Graph.from_edges(12, structure.edges(), features=np.eye(12))
        original = {tuple(e) for e in graph.edges.tolist()}
        for _ in range(10):
            sub = subgraph(graph, 0.5, rng)
            kept = np.argmax(sub.features, axis=1)
            pairs = {(int(kept[u]), int(kept[v])) for u, v in combinations(range(sub.num_nodes), 2)}
            expected = {pair for pair in pairs if pair in original}
            actual = {(int(kept[u]), int(kept[v])) for u, v in sub.edges.tolist()}
            assert actual == expected

    def test_node_drop_keeps_one_node(self, triangle, rng):
        assert node_drop(triangle, 1.0, rng).num_nodes == 1

    def test_attr_mask_rows(self, rng):
        graph = Graph.from_edges(4, [(0, 1)], features=np.arange(8.0).reshape(4, 2))
        fill = np.array([9.0, 9.0])
        masked = attr_mask(graph, 0.5, rng, fill)
        assert int(np.all(masked.features == fill, axis=1).sum()) == 2
        assert np.array_equal(masked.edges, graph.edges)

    def test_attr_mask_fill_shape(self, triangle, rng):
        with pytest.raises(ValueError):
            attr_mask(triangle, 0.5, rng, np.zeros(3))

    def test_subgraph_size_and_connectivity(self, rng):
        graph = _path(10)
        for _ in range(5):
            sub = subgraph(graph, 0.2, rng)
            assert sub.num_nodes == 8
            assert _connected(sub)

    def test_subgraph_stays_in_component(self, rng):
        edges = [(i, i + 1) for i in range(4)] + [(i, i + 1) for i in range(5, 9)]
        graph = Graph.from_edges(10, edges)
        assert subgraph(graph, 0.2, rng).num_nodes == 5

    def test_zero_ratio_is_noop(self, path_graph, rng):
        assert edge_drop(path_graph, 0.0, rng) is path_graph
        assert node_drop(path_graph, 0.0, rng) is path_graph
        assert identity(path_graph) is path_graph

    @pytest.mark.parametrize("fn", [edge_drop, node_drop, subgraph])
    def test_ratio_out_of_range(self, fn, path_graph, rng):
        with pytest.raises(ValueError):
            fn(path_graph, 1.5, rng)


class TestAugmentSpec:
    """Test suite for AugmentSpec."""

    def test_seeded_application_is_deterministic(self):
        spec = AugmentSpec(AugmentKind.EDGE_DROP, ratio=0.3, rng_seed=5)
        graph = _path(12)
        assert spec.apply(graph).same_structure(spec.apply(graph))

    def test_attr_mask_defaults_to_mean(self):
        graph = Graph.from_edges(2, [(0, 1)], features=np.array([[0.0], [2.0]]))
        masked = AugmentSpec("attr_mask", ratio=0.5).apply(graph)
        assert 1.0 in masked.features[:, 0]


class TestGraphAugmenter:
    """Test suite for per-view random augmentation."""

    @pytest.fixture
    def augmenter(self) -> GraphAugmenter:
        ratios = {AugmentKind.EDGE_DROP: 0.2, AugmentKind.NODE_DROP: 0.2}
        return GraphAugmenter([AugmentKind.EDGE_DROP, AugmentKind.NODE_DROP], ratios, np.zeros(20), seed=3)

    def test_views_are_deterministic(self, augmenter):
        graph = _path(20, graph_id=4)
        assert augmenter.view(graph, epoch=2, view=0).same_structure(augmenter.view(graph, epoch=2, view=0))

    def test_views_differ(self, augmenter):
        graph = _path(20, graph_id=4)
        views = [augmenter.view(graph, epoch=e, view=v) for e in range(3) for v in range(2)]
        assert any(not views[0].same_structure(other) for other in views[1:])

    def test_views_do_not_mutate_input(self, augmenter):
        graph = _path(20, graph_id=1)
        before = graph.edges.copy()
        augmenter.view(graph, 0, 0)
        assert np.array_equal(graph.edges, before)

    def test_identity_augmenter(self, path_graph):
        augmenter = GraphAugmenter([AugmentKind.IDENTITY], {}, np.zeros(2))
        assert augmenter.is_identity
        assert augmenter.view(path_graph, 0, 1) is path_graph

    def test_requires_kinds(self):
        with pytest.raises(ValueError):
            GraphAugmenter([], {}, np.zeros(1))

    def test_random_augment_picks_kinds_uniformly(self, path_graph):
        kinds = [AugmentKind.EDGE_DROP, AugmentKind.NODE_DROP, AugmentKind.ATTR_MASK, AugmentKind.SUBGRAPH]
        augmenter = GraphAugmenter(kinds, {k: 0.2 for k in kinds}, np.zeros(path_graph.feature_dim))
        rng = np.random.default_rng(11)
        draws = 10_000
        counts = Counter(augmenter.random_augment(path_graph, rng)[1] for _ in range(draws))
        for kind in kinds:
            assert counts[kind] / draws == pytest.approx(0.25, abs=0.02)

    def test_graphs_without_id_get_their_own_streams(self, augmenter):
        path = _path(20, graph_id=None)
        cycle = Graph.from_edges(20, [(i, (i + 1) % 20) for i in range(20)], features=np.eye(20))
        assert augmenter.stream_key(path) != augmenter.stream_key(cycle)
        assert augmenter.stream_key(path) == augmenter.stream_key(_path(20, graph_id=None))
        assert augmenter.stream_key(_path(20, graph_id=9)) == 9

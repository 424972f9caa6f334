"""
Tests for stratified splitting and label-ratio reduction.
"""

import numpy as np
import pytest

from semigraph.core.graph import Dataset, Graph
from semigraph.errors import SplitError
from semigraph.ingestion.splits import apply_label_ratio, split_dataset


class TestSplitDataset:
    """Test suite for the four-way stratified split."""

    def test_default_ratio_sizes(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=0)
        assert split.sizes() == (20, 50, 10, 20)

    def test_small_dataset_sizes(self, make_dataset):
        split = split_dataset(make_dataset([5, 5]), seed=0)
        assert split.sizes() == (2, 5, 1, 2)

    def test_parts_are_disjoint_and_cover(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=4)
        assert split.all_indices() == list(range(len(balanced_dataset)))

    def test_stratified_by_class(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=1)
        labels = balanced_dataset.labels
        for part in split.parts():
            counts = np.bincount(labels[list(part)], minlength=2)
            assert counts[0] == counts[1]

    def test_labeled_part_covers_every_class(self, make_dataset):
        dataset = make_dataset([40, 6, 4])
        split = split_dataset(dataset, seed=2)
        assert set(dataset.labels[list(split.labeled_train)].tolist()) == {0, 1, 2}

    def test_seed_determinism(self, balanced_dataset):
        assert split_dataset(balanced_dataset, seed=9) == split_dataset(balanced_dataset, seed=9)
        assert split_dataset(balanced_dataset, seed=9) != split_dataset(balanced_dataset, seed=10)

    def test_too_few_graphs_for_classes(self, make_dataset):
        with pytest.raises(SplitError):
            split_dataset(make_dataset([2, 2, 1]), seed=0)

    def test_invalid_ratios(self, balanced_dataset):
        with pytest.raises(SplitError):
            split_dataset(balanced_dataset, ratios=(2, 5, 0, 2))
        with pytest.raises(SplitError):
            split_dataset(balanced_dataset, ratios=(2, 5, 1))

    def test_unlabeled_graphs_rejected(self):
        graphs = tuple(Graph.from_edges(2, [(0, 1)]) for _ in range(10))
        with pytest.raises(SplitError):
            split_dataset(Dataset(graphs=graphs, num_classes=2), seed=0)


class TestApplyLabelRatio:
    """Test suite for shrinking the labeled part."""

    def test_half_ratio(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=0)
        reduced = apply_label_ratio(split, balanced_dataset, 0.5, seed=0)
        assert reduced.sizes() == (10, 60, 10, 20)
        assert set(reduced.labeled_train) <= set(split.labeled_train)
        assert reduced.validation == split.validation and reduced.test == split.test
        assert reduced.all_indices() == split.all_indices()

    def test_keeps_one_per_class(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=0)
        reduced = apply_label_ratio(split, balanced_dataset, 0.1, seed=0)
        assert len(reduced.labeled_train) == 2
        assert sorted(balanced_dataset.labels[list(reduced.labeled_train)].tolist()) == [0, 1]

    def test_absolute_limit(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=0)
        reduced = apply_label_ratio(split, balanced_dataset, 1.0, seed=0, limit=3)
        assert len(reduced.labeled_train) == 3

    def test_full_ratio_is_unchanged(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=0)
        assert apply_label_ratio(split, balanced_dataset, 1.0) is split

    def test_invalid_ratio(self, balanced_dataset):
        split = split_dataset(balanced_dataset, seed=0)
        with pytest.raises(SplitError):
            apply_label_ratio(split, balanced_dataset, 0.0)

"""
Tests for the twin model and the semi-supervised trainer.
"""

import math

import numpy as np
import pytest

from semigraph.autodiff import no_grad
from semigraph.core.graph import SplitDataset
from semigraph.errors import DivergenceError, SplitError
from semigraph.ingestion.splits import split_dataset
from semigraph.models.batch import GraphBatch
from semigraph.schemas.base import EncoderKind, Variant
from semigraph.training.trainer import VARIANT_ENCODERS, SemiSupervisedTrainer, TwinModel


def _trainer(dataset, config, variant=Variant.FULL, seed=0, **updates):
    config = config.model_copy(update={"variant": variant, **updates})
    return SemiSupervisedTrainer(dataset, config, seed=seed)


def _states_equal(first, second) -> bool:
    return first.keys() == second.keys() and all(np.array_equal(first[k], second[k]) for k in first)


class TestTwinModel:
    """Test suite for the variant-to-encoder wiring."""

    @pytest.mark.parametrize("variant", list(Variant))
    def test_roles(self, variant, tiny_config, rng):
        model = TwinModel(variant, tiny_config, input_dim=9, num_classes=3, rng=rng)
        primary, secondary = VARIANT_ENCODERS[variant]
        assert model.roles()["primary"] == primary.value
        assert model.roles()["secondary"] == (None if secondary is None else secondary.value)

    def test_full_variant_pairs_mpnn_with_kernel(self, tiny_config, rng):
        model = TwinModel(Variant.FULL, tiny_config, input_dim=9, num_classes=3, rng=rng)
        assert model.primary.kind == EncoderKind.MPNN
        assert model.secondary.kind == EncoderKind.KERNEL
        names = model.state_dict().keys()
        assert any(name.startswith("secondary.hidden.") for name in names)
        assert any(name.startswith("classifier.") for name in names)


class TestTrainStep:
    """Test suite for single optimization steps."""

    def test_first_step_skips_consistency(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config)
        labeled, unlabeled = list(tiny_dataset.graphs[:3]), list(tiny_dataset.graphs[3:7])
        report = trainer.train_step(labeled, unlabeled)
        assert report.con_loss == 0.0
        assert report.bank_size == 0
        assert report.total_loss == pytest.approx(report.sup_loss)
        assert len(trainer.bank) == 3
        assert trainer.bank.graph_ids() == [g.graph_id for g in labeled]

    def test_second_step_uses_bank(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config)
        labeled, unlabeled = list(tiny_dataset.graphs[:3]), list(tiny_dataset.graphs[3:7])
        trainer.train_step(labeled, unlabeled, epoch=1, step=0)
        report = trainer.train_step(labeled, unlabeled, epoch=1, step=1)
        assert report.bank_size == 3
        assert report.con_loss >= 0.0
        assert report.total_loss == pytest.approx(report.sup_loss + tiny_config.consistency_weight * report.con_loss)

    def test_bank_anchors_come_from_pre_update_parameters(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config)
        labeled, unlabeled = list(tiny_dataset.graphs[:3]), list(tiny_dataset.graphs[3:7])
        trainer.train_step(labeled, unlabeled, epoch=1, step=0)
        before = trainer.model.secondary.state_dict()
        with no_grad():
            expected_z = trainer.model.primary.encode(GraphBatch.from_graphs(trainer._views(labeled, 1, 0))).numpy()
            expected_w = trainer.model.secondary.encode(GraphBatch.from_graphs(trainer._views(labeled, 1, 1))).numpy()
        trainer.train_step(labeled, unlabeled, epoch=1, step=1)
        assert not _states_equal(before, trainer.model.secondary.state_dict())
        assert np.array_equal(trainer.bank.z_anchors()[-3:], expected_z)
        assert np.array_equal(trainer.bank.w_anchors()[-3:], expected_w)

    def test_variant_given_as_text(self, tiny_dataset, tiny_config):
        trainer = SemiSupervisedTrainer(tiny_dataset, tiny_config.model_copy(update={"variant": "gk-sup"}))
        assert trainer.config.variant is Variant.GK_SUP
        assert trainer.model.roles() == {"primary": "kernel", "secondary": None}
        assert trainer.train_step(list(tiny_dataset.graphs[:3]), list(tiny_dataset.graphs[3:7])).con_loss == 0.0

    def test_supervised_only_variant(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config, Variant.MP_SUP)
        labeled, unlabeled = list(tiny_dataset.graphs[:3]), list(tiny_dataset.graphs[3:7])
        for step in range(3):
            assert trainer.train_step(labeled, unlabeled, step=step).con_loss == 0.0

    def test_step_updates_parameters(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config)
        before = trainer.model.state_dict()
        trainer.train_step(list(tiny_dataset.graphs[:3]), [])
        assert not _states_equal(before, trainer.model.state_dict())

    def test_zero_weight_freezes_secondary(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config, consistency_weight=0.0)
        before = trainer.model.secondary.state_dict()
        labeled, unlabeled = list(tiny_dataset.graphs[:3]), list(tiny_dataset.graphs[3:7])
        for step in range(3):
            trainer.train_step(labeled, unlabeled, step=step)
        assert _states_equal(before, trainer.model.secondary.state_dict())

    def test_non_finite_loss_raises_divergence(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config)
        trainer.model.classifier.layers[0].weight.data[:] = np.nan
        with pytest.raises(DivergenceError) as info:
            trainer.train_step(list(tiny_dataset.graphs[:3]), [], epoch=4, step=2)
        assert math.isnan(info.value.report.sup_loss)
        assert info.value.report.epoch == 4

    def test_requires_labeled_graphs(self, tiny_dataset, tiny_config):
        with pytest.raises(ValueError):
            _trainer(tiny_dataset, tiny_config).train_step([], list(tiny_dataset.graphs[:2]))


class TestFit:
    """Test suite for the training loop and evaluation."""

    def test_history_and_selection(self, tiny_dataset, tiny_config):
        split = split_dataset(tiny_dataset, seed=1)
        trainer = _trainer(tiny_dataset, tiny_config)
        result = trainer.fit(split)
        assert [row.epoch for row in result.history] == [1, 2]
        assert 0 <= result.best_epoch <= 2
        assert _states_equal(result.state, trainer.model.state_dict())
        steps_per_epoch = math.ceil(len(split.unlabeled_train) / tiny_config.batch_size)
        assert len(result.steps) == 2 * steps_per_epoch

    def test_seeded_runs_are_reproducible(self, tiny_dataset, tiny_config):
        split = split_dataset(tiny_dataset, seed=1)
        first = _trainer(tiny_dataset, tiny_config, seed=5).fit(split)
        second = _trainer(tiny_dataset, tiny_config, seed=5).fit(split)
        assert [r.total_loss for r in first.history] == [r.total_loss for r in second.history]
        assert _states_equal(first.state, second.state)

    def test_without_validation_selects_last_epoch(self, tiny_dataset, tiny_config):
        split = split_dataset(tiny_dataset, seed=1)
        no_validation = SplitDataset(
            split.labeled_train, split.unlabeled_train + split.validation, (), split.test, split.seed
        )
        result = _trainer(tiny_dataset, tiny_config).fit(no_validation)
        assert result.best_epoch == tiny_config.epochs

    def test_no_labeled_graphs(self, tiny_dataset, tiny_config):
        split = SplitDataset((), tuple(range(10)), (10,), (11,))
        with pytest.raises(SplitError):
            _trainer(tiny_dataset, tiny_config).fit(split)

    def test_evaluate_leaves_state_alone(self, tiny_dataset, tiny_config):
        trainer = _trainer(tiny_dataset, tiny_config)
        trainer.train_step(list(tiny_dataset.graphs[:3]), [])
        before, bank_size = trainer.model.state_dict(), len(trainer.bank)
        result = trainer.evaluate(range(len(tiny_dataset)))
        assert 0.0 <= result.accuracy <= 1.0
        assert result.num_graphs == len(tiny_dataset)
        assert np.array(result.confusion).shape == (3, 3)
        assert sum(result.per_class_total) == len(tiny_dataset)
        assert _states_equal(before, trainer.model.state_dict())
        assert len(trainer.bank) == bank_size

    def test_anchor_vote(self, tiny_dataset, tiny_config):
        indices, anchors = list(range(10)), list(range(10, 15))
        vote = _trainer(tiny_dataset, tiny_config).anchor_vote_evaluate(indices, anchors)
        assert vote is not None and vote.num_graphs == 10
        assert _trainer(tiny_dataset, tiny_config, Variant.GK_SUP).anchor_vote_evaluate(indices, anchors) is None

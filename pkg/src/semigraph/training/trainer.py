"""
Semi-supervised joint training of a primary and a secondary graph encoder.

Each step builds two augmented views of every graph in a labeled and an
unlabeled minibatch. The primary encoder embeds view 1 and feeds the
classifier (supervised loss). For unlabeled graphs the primary view-1
embedding and the secondary view-2 embedding each get a similarity
distribution over the memory bank's anchors; the consistency loss is their
symmetric KL divergence. The labeled batch's embeddings in both spaces,
computed with the pre-update parameters, are pushed into the bank after the
update.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from sklearn.metrics import accuracy_score, confusion_matrix

from ..augment.views import GraphAugmenter
from ..autodiff import AdamState, Tensor, adam_step, backward, no_grad
from ..core.graph import Dataset, Graph, SplitDataset
from ..errors import DivergenceError, NonFiniteError, SplitError
from ..models.batch import GraphBatch
from ..models.kernel import RandomWalkKernelEncoder
from ..models.layers import MLP, Module
from ..models.mpnn import MessagePassingEncoder
from ..schemas.base import AugmentKind, EncoderKind, EvaluationResult, HistoryRow, LossReport, RunConfig, Variant
from .losses import anchor_vote_predictions, consistency_loss, similarity_distribution, supervised_loss
from .memory_bank import MemoryBank

EVAL_BATCH = 256

VARIANT_ENCODERS: Dict[Variant, tuple] = {
    Variant.FULL: (EncoderKind.MPNN, EncoderKind.KERNEL),
    Variant.NO_AUG: (EncoderKind.MPNN, EncoderKind.KERNEL),
    Variant.MP_SUP: (EncoderKind.MPNN, None),
    Variant.GK_SUP: (EncoderKind.KERNEL, None),
    Variant.MP_ENSEMBLE: (EncoderKind.MPNN, EncoderKind.MPNN),
    Variant.GK_ENSEMBLE: (EncoderKind.KERNEL, EncoderKind.KERNEL),
}


def build_encoder(kind: EncoderKind, config: RunConfig, input_dim: int, rng: np.random.Generator) -> Module:
    if kind == EncoderKind.MPNN:
        return MessagePassingEncoder(input_dim, config.hidden_dim, config.num_layers, rng)
    return RandomWalkKernelEncoder(
        hidden_dim=config.hidden_dim,
        num_hidden_graphs=config.num_hidden_graphs,
        hidden_graph_size=config.hidden_graph_size,
        walk_length=config.walk_length,
        log1p=config.kernel_log1p,
        rng=rng,
    )


class TwinModel(Module):
    """Primary encoder with classifier, plus an optional secondary encoder."""

    def __init__(
        self,
        variant: Variant,
        config: RunConfig,
        input_dim: int,
        num_classes: int,
        rng: np.random.Generator,
    ):
        super().__init__()
        primary_kind, secondary_kind = VARIANT_ENCODERS[Variant(variant)]
        self.variant = Variant(variant)
        self.num_classes = num_classes
        self.primary = self.add_module("primary", build_encoder(primary_kind, config, input_dim, rng))
        self.secondary: Optional[Module] = None
        if secondary_kind is not None:
            self.secondary = self.add_module("secondary", build_encoder(secondary_kind, config, input_dim, rng))
        self.classifier = self.add_module("classifier", MLP([config.hidden_dim, config.hidden_dim, num_classes], rng))

    def roles(self) -> Dict[str, Optional[str]]:
        return {
            "primary": self.primary.kind.value,
            "secondary": None if self.secondary is None else self.secondary.kind.value,
        }

    def logits(self, batch: GraphBatch) -> Tensor:
        return self.classifier(self.primary.encode(batch))


@dataclass
class FitResult:
    """Trained parameters (best validation epoch) and the per-epoch history."""

    state: Dict[str, np.ndarray]
    history: List[HistoryRow] = field(default_factory=list)
    steps: List[LossReport] = field(default_factory=list)
    best_epoch: int = 0
    best_val_accuracy: float = 0.0


def make_augmenter(config: RunConfig, dataset: Dataset, seed: int) -> GraphAugmenter:
    kinds = [AugmentKind.IDENTITY] if config.variant == Variant.NO_AUG else list(config.augmentations)
    return GraphAugmenter(kinds, config.augment_ratios(), dataset.mean_features(), seed=seed)


class SemiSupervisedTrainer:
    """Owns the model parameters, the optimizer state and the memory bank of one run."""

    def __init__(
        self,
        dataset: Dataset,
        config: RunConfig,
        seed: int = 0,
        model: Optional[TwinModel] = None,
        augmenter: Optional[GraphAugmenter] = None,
    ):
        self.dataset = dataset
        config = RunConfig(**config.model_dump())
        self.config = config
        self.seed = seed
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
        self.model = model or TwinModel(config.variant, config, dataset.feature_dim, dataset.num_classes, rng)
        self.augmenter = augmenter or make_augmenter(config, dataset, seed)
        self.bank = MemoryBank(config.bank_capacity)
        self.optimizer = AdamState(
            learning_rate=config.learning_rate,
            beta1=config.beta1,
            beta2=config.beta2,
            epsilon=config.adam_epsilon,
        )
        self._batch_rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
        logger.info(
            f"SemiSupervisedTrainer: variant={config.variant.value}, roles={self.model.roles()}, "
            f"parameters={self.model.num_parameters()}, seed={seed}"
        )

    # Steps

    def _views(self, graphs: Sequence[Graph], epoch: int, view: int) -> List[Graph]:
        return [self.augmenter.view(g, epoch, view) for g in graphs]

    def train_step(
        self,
        labeled: Sequence[Graph],
        unlabeled: Sequence[Graph],
        epoch: int = 0,
        step: int = 0,
    ) -> LossReport:
        """One update of all parameters on a labeled and an unlabeled minibatch."""
        if not labeled:
            raise ValueError("train_step needs at least one labeled graph")
        weight = self.config.consistency_weight
        bank_size = len(self.bank)
        secondary = self.model.secondary

        labeled_first = GraphBatch.from_graphs(self._views(labeled, epoch, 0))
        labels = [g.label for g in labeled]
        try:
            z_labeled = self.model.primary.encode(labeled_first)
            sup = supervised_loss(self.model.classifier(z_labeled), labels)
            con_value = 0.0
            total = sup
            if secondary is not None and unlabeled and not self.bank.is_empty:
                z_unlabeled = self.model.primary.encode(GraphBatch.from_graphs(self._views(unlabeled, epoch, 0)))
                w_unlabeled = secondary.encode(GraphBatch.from_graphs(self._views(unlabeled, epoch, 1)))
                p = similarity_distribution(z_unlabeled, self.bank.z_anchors(), self.config.tau)
                q = similarity_distribution(w_unlabeled, self.bank.w_anchors(), self.config.tau)
                con = consistency_loss(p, q)
                con_value = con.item()
                total = sup + con * weight
            elif secondary is not None and unlabeled:
                logger.debug(f"epoch {epoch} step {step}: memory bank empty, consistency skipped")
        except NonFiniteError as exc:
            failed = LossReport(
                sup_loss=math.nan, con_loss=math.nan, total_loss=math.nan, epoch=epoch, step=step, bank_size=bank_size
            )
            raise DivergenceError(f"non-finite value at epoch {epoch}, step {step}: {exc}", failed) from exc

        report = LossReport(
            sup_loss=sup.item(),
            con_loss=con_value,
            total_loss=sup.item() + weight * con_value,
            epoch=epoch,
            step=step,
            bank_size=bank_size,
        )
        if not math.isfinite(report.total_loss):
            raise DivergenceError(f"non-finite loss at epoch {epoch}, step {step}", report)

        w_labeled = None
        if secondary is not None:
            with no_grad():
                w_labeled = secondary.encode(GraphBatch.from_graphs(self._views(labeled, epoch, 1)))

        backward(total)
        adam_step(self.model.parameters(), self.optimizer)
        self.bank.push([g.graph_id for g in labeled], z_labeled, w_labeled, labels)
        logger.debug(
            f"epoch {epoch} step {step}: sup={report.sup_loss:.4f} con={report.con_loss:.4f} "
            f"total={report.total_loss:.4f} bank={len(self.bank)}"
        )
        return report

    # Loop

    def _labeled_batches(self, indices: np.ndarray, steps: int) -> List[np.ndarray]:
        size = self.config.batch_size
        if len(indices) < size:
            return [self._batch_rng.choice(indices, size=size, replace=True) for _ in range(steps)]
        batches: List[np.ndarray] = []
        order = self._batch_rng.permutation(indices)
        cursor = 0
        while len(batches) < steps:
            if cursor + size > len(order):
                order = self._batch_rng.permutation(indices)
                cursor = 0
            batches.append(order[cursor : cursor + size])
            cursor += size
        return batches

    def fit(self, split: SplitDataset) -> FitResult:
        """Train for ``config.epochs`` epochs and keep the best-validation parameters."""
        labeled = np.asarray(split.labeled_train, dtype=np.int64)
        unlabeled = np.asarray(split.unlabeled_train, dtype=np.int64)
        if len(labeled) == 0:
            raise SplitError("fit needs at least one labeled graph")
        self.bank.clear()
        size = self.config.batch_size
        steps_per_epoch = max(math.ceil(len(unlabeled) / size), math.ceil(len(labeled) / size), 1)

        best_val = self.evaluate(split.validation).accuracy if split.validation else 0.0
        result = FitResult(state=self.model.state_dict(), best_epoch=0, best_val_accuracy=best_val)
        logger.info(
            f"Training {self.config.epochs} epochs x {steps_per_epoch} steps "
            f"(labeled={len(labeled)}, unlabeled={len(unlabeled)}), initial val_acc={best_val:.4f}"
        )

        for epoch in range(1, self.config.epochs + 1):
            unlabeled_order = self._batch_rng.permutation(unlabeled)
            labeled_batches = self._labeled_batches(labeled, steps_per_epoch)
            reports = []
            for step in range(steps_per_epoch):
                chunk = unlabeled_order[step * size : (step + 1) * size]
                reports.append(
                    self.train_step(
                        [self.dataset[int(i)] for i in labeled_batches[step]],
                        [self.dataset[int(i)] for i in chunk],
                        epoch=epoch,
                        step=step,
                    )
                )
            result.steps.extend(reports)
            val_acc = self.evaluate(split.validation).accuracy if split.validation else 0.0
            row = HistoryRow(
                epoch=epoch,
                sup_loss=float(np.mean([r.sup_loss for r in reports])),
                con_loss=float(np.mean([r.con_loss for r in reports])),
                total_loss=float(np.mean([r.total_loss for r in reports])),
                val_acc=val_acc,
            )
            result.history.append(row)
            if val_acc > result.best_val_accuracy or (not split.validation and epoch == self.config.epochs):
                result.best_val_accuracy = val_acc
                result.best_epoch = epoch
                result.state = self.model.state_dict()
            logger.info(
                f"epoch {epoch}/{self.config.epochs}: sup={row.sup_loss:.4f} con={row.con_loss:.4f} "
                f"val_acc={val_acc:.4f}"
            )

        self.model.load_state_dict(result.state)
        logger.info(f"Selected epoch {result.best_epoch} (val_acc={result.best_val_accuracy:.4f})")
        return result

    # Evaluation

    def _embed(self, encoder: Module, graphs: Sequence[Graph]) -> np.ndarray:
        with no_grad():
            chunks = [
                encoder.encode(GraphBatch.from_graphs(graphs[i : i + EVAL_BATCH])).data
                for i in range(0, len(graphs), EVAL_BATCH)
            ]
        return np.concatenate(chunks) if chunks else np.zeros((0, self.config.hidden_dim))

    def predict(self, indices: Sequence[int]) -> np.ndarray:
        """Classifier predictions on the clean graphs."""
        graphs = [self.dataset[int(i)] for i in indices]
        if not graphs:
            return np.zeros(0, dtype=np.int64)
        embeddings = self._embed(self.model.primary, graphs)
        with no_grad():
            logits = self.model.classifier(Tensor(embeddings)).data
        return np.argmax(logits, axis=1)

    def _result(self, truth: np.ndarray, predictions: np.ndarray) -> EvaluationResult:
        classes = list(range(self.dataset.num_classes))
        if len(truth) == 0:
            return EvaluationResult(accuracy=0.0, num_graphs=0)
        matrix = confusion_matrix(truth, predictions, labels=classes)
        return EvaluationResult(
            accuracy=float(accuracy_score(truth, predictions)),
            num_graphs=len(truth),
            per_class_correct=[int(matrix[c, c]) for c in classes],
            per_class_total=[int(matrix[c].sum()) for c in classes],
            confusion=matrix.tolist(),
        )

    def evaluate(self, indices: Sequence[int]) -> EvaluationResult:
        """Accuracy of the classifier on clean graphs; parameters and bank are untouched."""
        truth = self.dataset.labels[np.asarray(indices, dtype=np.int64)] if len(indices) else np.zeros(0, np.int64)
        return self._result(truth, self.predict(indices))

    def anchor_vote_evaluate(
        self, indices: Sequence[int], anchor_indices: Sequence[int], use_secondary: bool = True
    ) -> Optional[EvaluationResult]:
        """
        Accuracy of predicting each graph's class by similarity-weighted votes of
        labeled anchors, in the secondary (or primary) encoder space.
        """
        encoder = self.model.secondary if use_secondary else self.model.primary
        if encoder is None or not len(anchor_indices) or not len(indices):
            return None
        anchors = self._embed(encoder, [self.dataset[int(i)] for i in anchor_indices])
        queries = self._embed(encoder, [self.dataset[int(i)] for i in indices])
        with no_grad():
            probs = similarity_distribution(Tensor(queries), anchors, self.config.tau).data
        predictions = anchor_vote_predictions(probs, self.dataset.labels[list(anchor_indices)], self.dataset.num_classes)
        truth = self.dataset.labels[np.asarray(indices, dtype=np.int64)]
        return self._result(truth, predictions)

"""Memory bank, losses and the semi-supervised trainer."""

from .losses import anchor_vote_predictions, consistency_loss, similarity_distribution, supervised_loss
from .memory_bank import BankEntry, MemoryBank
from .trainer import VARIANT_ENCODERS, FitResult, SemiSupervisedTrainer, TwinModel, build_encoder, make_augmenter

__all__ = [
    "BankEntry",
    "MemoryBank",
    "similarity_distribution",
    "consistency_loss",
    "supervised_loss",
    "anchor_vote_predictions",
    "TwinModel",
    "SemiSupervisedTrainer",
    "FitResult",
    "VARIANT_ENCODERS",
    "build_encoder",
    "make_augmenter",
]

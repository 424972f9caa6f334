"""
Anchor-similarity distributions and the training losses.
"""

from typing import Sequence

import numpy as np

from ..autodiff import Tensor, as_tensor, ops
from ..errors import ShapeError

PROBABILITY_FLOOR = 1e-12


def similarity_distribution(embeddings: Tensor, anchors: np.ndarray, tau: float = 0.5) -> Tensor:
    """
    Softmax over anchors of ``cos(embedding, anchor) / tau``.

    ``embeddings`` is ``(d,)`` or ``(B, d)``; ``anchors`` is an ``(m, d)``
    constant. Zero vectors have cosine 0 with everything. The result has one
    probability row per embedding.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    anchors = np.asarray(anchors, dtype=np.float64)
    if anchors.ndim != 2 or anchors.shape[0] == 0:
        raise ValueError("similarity_distribution needs at least one anchor (empty memory bank)")
    embeddings = as_tensor(embeddings)
    if embeddings.shape[-1] != anchors.shape[1]:
        raise ShapeError(f"embedding width {embeddings.shape[-1]} != anchor width {anchors.shape[1]}")
    unit_anchors = ops.l2_normalize(anchors).data
    cosine = ops.matmul(ops.l2_normalize(embeddings), unit_anchors.T)
    return ops.row_softmax(cosine * (1.0 / tau))


def consistency_loss(p: Tensor, q: Tensor) -> Tensor:
    """
    Symmetric KL divergence ``(KL(p||q) + KL(q||p)) / 2``, averaged over rows.

    Written as ``sum((p - q) * (log p - log q)) / 2`` with probabilities clamped
    at ``PROBABILITY_FLOOR`` inside the logs; swapping the arguments negates
    both factors, so the value is exactly symmetric.
    """
    p, q = as_tensor(p), as_tensor(q)
    if p.shape != q.shape:
        raise ShapeError(f"consistency_loss: distributions differ in shape, {p.shape} vs {q.shape}")
    log_ratio = ops.log(ops.maximum(p, PROBABILITY_FLOOR)) - ops.log(ops.maximum(q, PROBABILITY_FLOOR))
    per_row = ops.sum((p - q) * log_ratio, axis=-1) * 0.5
    return ops.mean(per_row)


def supervised_loss(logits: Tensor, labels: Sequence[int]) -> Tensor:
    """Mean cross-entropy of ``logits`` (``(B, C)``) against integer ``labels``."""
    logits = as_tensor(logits)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or len(labels) != logits.shape[0]:
        raise ShapeError(f"supervised_loss: {len(labels)} labels for logits of shape {logits.shape}")
    num_classes = logits.shape[1]
    if len(labels) and (labels.min() < 0 or labels.max() >= num_classes):
        raise ValueError(f"labels must lie in [0, {num_classes})")
    one_hot = np.eye(num_classes)[labels]
    picked = ops.sum(ops.log_softmax(logits) * one_hot, axis=1)
    return -ops.mean(picked)


def anchor_vote_predictions(probs: np.ndarray, anchor_labels: np.ndarray, num_classes: int) -> np.ndarray:
    """Class with the largest similarity mass among anchors; ties go to the lower class."""
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    anchor_labels = np.asarray(anchor_labels, dtype=np.int64)
    if probs.shape[1] != len(anchor_labels):
        raise ShapeError(f"{probs.shape[1]} probabilities for {len(anchor_labels)} anchors")
    votes = probs @ np.eye(num_classes)[anchor_labels]
    return np.argmax(votes, axis=1)

"""
Stratified labeled / unlabeled / validation / test splits.
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from ..core.graph import Dataset, SplitDataset
from ..errors import SplitError

DEFAULT_RATIOS = (2, 5, 1, 2)
_PART_NAMES = ("labeled_train", "unlabeled_train", "validation", "test")


def _apportion(
    total: int,
    weights: np.ndarray,
    capacity: np.ndarray,
    floor: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Largest-remainder allocation of ``total`` over classes, respecting capacities."""
    quota = np.zeros(len(weights), dtype=np.int64) if floor is None else np.minimum(floor, capacity)
    exact = total * weights / weights.sum()
    while quota.sum() < total:
        room = capacity > quota
        if not room.any():
            break
        deficit = np.where(room, exact - quota, -np.inf)
        quota[int(np.argmax(deficit))] += 1
    return quota


def split_dataset(
    dataset: Dataset,
    ratios: Sequence[int] = DEFAULT_RATIOS,
    seed: int = 0,
) -> SplitDataset:
    """
    Split graph indices into labeled-train, unlabeled-train, validation and test.

    Part sizes are ``floor(n * r_k / sum(r))`` for the labeled, validation and
    test parts; every remaining graph goes to unlabeled-train. Within each part
    the per-class counts follow the class proportions (largest remainder), and
    the labeled part holds at least one graph of every class.
    """
    if len(ratios) != 4 or any(int(r) <= 0 for r in ratios):
        raise SplitError(f"ratios must be four positive integers, got {tuple(ratios)}")
    ratios = np.asarray([int(r) for r in ratios], dtype=np.float64)
    labels = dataset.labels
    if np.any(labels < 0):
        raise SplitError("every graph needs a label to build a stratified split")
    n = len(labels)
    classes = np.arange(dataset.num_classes)
    class_members = [np.flatnonzero(labels == c) for c in classes]
    class_sizes = np.array([len(m) for m in class_members], dtype=np.int64)
    present = class_sizes > 0

    targets = np.floor(n * ratios / ratios.sum() + 1e-9).astype(np.int64)
    targets[1] = n - targets[0] - targets[2] - targets[3]
    if targets[0] < int(present.sum()):
        raise SplitError(
            f"{dataset.name}: {n} graphs give a labeled split of {targets[0]}, "
            f"fewer than the {int(present.sum())} classes present"
        )

    capacity = class_sizes.copy()
    weights = class_sizes.astype(np.float64)
    quotas: Dict[int, np.ndarray] = {}
    for part in (0, 2, 3):
        floor = present.astype(np.int64) if part == 0 else None
        quotas[part] = _apportion(int(targets[part]), weights, capacity, floor)
        capacity = capacity - quotas[part]
    quotas[1] = capacity

    rng = np.random.default_rng(seed)
    assigned: List[List[int]] = [[], [], [], []]
    for c, members in zip(classes, class_members):
        shuffled = rng.permutation(members)
        start = 0
        for part in (0, 1, 2, 3):
            count = int(quotas[part][c])
            assigned[part].extend(int(i) for i in shuffled[start : start + count])
            start += count

    split = SplitDataset(*(tuple(sorted(part)) for part in assigned), seed=seed)
    logger.info(
        f"Split {dataset.name} (seed={seed}): "
        + ", ".join(f"{name}={size}" for name, size in zip(_PART_NAMES, split.sizes()))
    )
    return split


def apply_label_ratio(
    split: SplitDataset,
    dataset: Dataset,
    ratio: float = 1.0,
    seed: int = 0,
    limit: Optional[int] = None,
) -> SplitDataset:
    """
    Shrink the labeled part to ``ceil(ratio * |labeled|)`` graphs (optionally capped
    at ``limit``), stratified by class with at least one graph per class where
    possible; the removed graphs join the unlabeled part.
    """
    if not 0.0 < ratio <= 1.0:
        raise SplitError(f"label_ratio must lie in (0, 1], got {ratio}")
    labeled = np.asarray(split.labeled_train, dtype=np.int64)
    keep_total = math.ceil(ratio * len(labeled) - 1e-9)
    if limit is not None:
        keep_total = min(keep_total, int(limit))
    if keep_total >= len(labeled):
        return split

    labels = dataset.labels[labeled]
    classes = np.unique(labels)
    class_members = [labeled[labels == c] for c in classes]
    sizes = np.array([len(m) for m in class_members], dtype=np.int64)
    floor = np.ones(len(classes), dtype=np.int64) if keep_total >= len(classes) else None
    quota = _apportion(keep_total, sizes.astype(np.float64), sizes, floor)

    rng = np.random.default_rng(seed)
    kept: List[int] = []
    for members, count in zip(class_members, quota):
        kept.extend(int(i) for i in rng.permutation(members)[: int(count)])
    moved = sorted(set(split.labeled_train) - set(kept))
    logger.info(f"Label ratio {ratio}: keeping {len(kept)} labeled graphs, moving {len(moved)} to unlabeled")
    return SplitDataset(
        labeled_train=tuple(sorted(kept)),
        unlabeled_train=tuple(sorted(split.unlabeled_train + tuple(moved))),
        validation=split.validation,
        test=split.test,
        seed=split.seed,
    )

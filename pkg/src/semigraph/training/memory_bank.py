"""
FIFO memory bank of anchor embeddings.
"""

from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional, Sequence, Union

import numpy as np
from loguru import logger

from ..autodiff import Tensor
from ..errors import ShapeError

ArrayOrTensor = Union[np.ndarray, Tensor]


def _constant(value: ArrayOrTensor) -> np.ndarray:
    """Detached read-only copy."""
    array = np.array(value.data if isinstance(value, Tensor) else value, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BankEntry:
    """One anchor: the source graph and its embeddings in both encoder spaces."""

    graph_id: int
    z: np.ndarray
    w: Optional[np.ndarray] = None
    label: Optional[int] = None


class MemoryBank:
    """
    Fixed-capacity queue of anchors.

    Stored vectors are plain read-only arrays, never tensors, so nothing
    computed from them can carry gradient back into the bank.
    """

    def __init__(self, capacity: int = 256):
        if capacity < 1:
            raise ValueError(f"bank capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._entries: Deque[BankEntry] = deque(maxlen=capacity)
        logger.debug(f"MemoryBank initialized with capacity {capacity}")

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def is_empty(self) -> bool:
        return not self._entries

    def clear(self) -> None:
        self._entries.clear()

    def push(
        self,
        graph_ids: Sequence[int],
        z: ArrayOrTensor,
        w: Optional[ArrayOrTensor] = None,
        labels: Optional[Sequence[int]] = None,
    ) -> None:
        """Enqueue one anchor per row, evicting the oldest entries beyond capacity."""
        z = _constant(z)
        w = _constant(w) if w is not None else None
        if z.ndim != 2 or len(z) != len(graph_ids):
            raise ShapeError(f"expected one z row per graph id, got {z.shape} for {len(graph_ids)} ids")
        if w is not None and w.shape[0] != len(graph_ids):
            raise ShapeError(f"expected one w row per graph id, got {w.shape}")
        for row, graph_id in enumerate(graph_ids):
            self._entries.append(
                BankEntry(
                    graph_id=int(graph_id),
                    z=z[row],
                    w=None if w is None else w[row],
                    label=None if labels is None else int(labels[row]),
                )
            )

    def graph_ids(self) -> List[int]:
        return [entry.graph_id for entry in self._entries]

    def z_anchors(self) -> np.ndarray:
        """``(m, d)`` anchors in the primary space, oldest first."""
        return np.stack([entry.z for entry in self._entries]) if self._entries else np.zeros((0, 0))

    def w_anchors(self) -> np.ndarray:
        """``(m, d)`` anchors in the secondary space, oldest first."""
        if any(entry.w is None for entry in self._entries):
            raise ValueError("bank entries carry no secondary embedding")
        return np.stack([entry.w for entry in self._entries]) if self._entries else np.zeros((0, 0))

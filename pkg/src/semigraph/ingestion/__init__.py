"""Dataset ingestion and splitting."""

from .splits import DEFAULT_RATIOS, apply_label_ratio, split_dataset
from .tu_format import load_tu_dataset, write_tu_dataset

__all__ = ["load_tu_dataset", "write_tu_dataset", "split_dataset", "apply_label_ratio", "DEFAULT_RATIOS"]

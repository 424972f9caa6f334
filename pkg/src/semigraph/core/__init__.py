"""Graph data model and synthetic datasets."""

from .generator import FAMILIES, SyntheticGraphGenerator
from .graph import Dataset, Graph, SplitDataset, degree_features

__all__ = ["Graph", "Dataset", "SplitDataset", "degree_features", "SyntheticGraphGenerator", "FAMILIES"]

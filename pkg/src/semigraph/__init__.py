"""
semigraph

Semi-supervised graph classification with two collaborating encoders: a
message-passing network and a random-walk kernel network with trainable
hidden graphs, trained jointly with a memory-bank consistency loss.
"""

__version__ = "0.1.0"
__license__ = "MIT"

from .core.graph import Dataset, Graph, SplitDataset
from .experiments.runner import run_experiment, sweep
from .schemas.base import RunConfig, RunReport, Variant
from .training.trainer import SemiSupervisedTrainer, TwinModel

__all__ = [
    "Graph",
    "Dataset",
    "SplitDataset",
    "RunConfig",
    "RunReport",
    "Variant",
    "TwinModel",
    "SemiSupervisedTrainer",
    "run_experiment",
    "sweep",
]

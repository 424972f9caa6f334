"""
Base schemas and enums for semigraph runs.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Variant(str, Enum):
    """Model variants: the full twin-encoder model and its ablations."""
    FULL = "full"                # message passing + kernel, consistency between them
    MP_SUP = "mp-sup"            # message passing + classifier, supervised only
    GK_SUP = "gk-sup"            # kernel + classifier, supervised only
    MP_ENSEMBLE = "mp-ensemble"  # two message-passing encoders
    GK_ENSEMBLE = "gk-ensemble"  # two kernel encoders
    NO_AUG = "no-aug"            # full model with identity views


class EncoderKind(str, Enum):
    """Graph encoder families."""
    MPNN = "mpnn"
    KERNEL = "kernel"


class AugmentKind(str, Enum):
    """Graph augmentation strategies."""
    EDGE_DROP = "edge_drop"
    NODE_DROP = "node_drop"
    ATTR_MASK = "attr_mask"
    SUBGRAPH = "subgraph"
    IDENTITY = "identity"


class SweepParameter(str, Enum):
    """Parameters accepted by ``sweep``, keyed by their short names."""
    D = "d"
    P = "P"
    LABEL_RATIO = "label_ratio"
    LAMBDA = "lambda"
    M = "M"

    @property
    def config_key(self) -> str:
        return {
            "d": "hidden_dim",
            "P": "walk_length",
            "label_ratio": "label_ratio",
            "lambda": "consistency_weight",
            "M": "bank_capacity",
        }[self.value]

    @classmethod
    def parse(cls, name: str) -> "SweepParameter":
        aliases = {"λ": "lambda", "hidden_dim": "d", "walk_length": "P",
                   "consistency_weight": "lambda", "bank_capacity": "M"}
        return cls(aliases.get(name, name))


DEFAULT_AUGMENTATIONS = [
    AugmentKind.EDGE_DROP,
    AugmentKind.NODE_DROP,
    AugmentKind.ATTR_MASK,
    AugmentKind.SUBGRAPH,
]

_LIST_FIELDS = ("split_ratios", "seeds", "augmentations")


class RunConfig(BaseModel):
    """Validated run configuration. Every field is a key of the flat config file."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, use_enum_values=False)

    # data
    dataset: str = Field(default="synthetic", description="TU dataset directory, or 'synthetic'")
    dataset_name: Optional[str] = Field(default=None, description="TU dataset prefix when the directory holds several")
    max_degree: int = Field(default=64, ge=1, description="Clamp for one-hot degree features")
    synthetic_graphs: int = Field(default=300, ge=3, description="Graph count for the synthetic dataset")
    split_ratios: List[int] = Field(default_factory=lambda: [2, 5, 1, 2], description="labeled:unlabeled:val:test")
    split_seed: Optional[int] = Field(default=None, description="Fixed split seed; defaults to the run seed")
    seeds: List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5], description="Run seeds")
    label_ratio: float = Field(default=1.0, description="Fraction of the labeled split kept labeled")
    labeled_limit: Optional[int] = Field(default=None, ge=1, description="Absolute cap on labeled graphs")

    # encoders
    hidden_dim: int = Field(default=64, ge=1, description="Embedding dimension d")
    num_layers: int = Field(default=3, ge=1, description="Message-passing layers K")
    num_hidden_graphs: int = Field(default=16, ge=1, description="Hidden graphs N")
    hidden_graph_size: int = Field(default=5, ge=2, description="Nodes per hidden graph")
    walk_length: int = Field(default=3, ge=1, description="Maximum walk length P")
    kernel_log1p: bool = Field(default=False, description="Apply log1p to walk-count features")

    # objective
    tau: float = Field(default=0.5, gt=0, description="Similarity temperature")
    consistency_weight: float = Field(default=1.0, ge=0, description="Weight of the consistency loss")
    bank_capacity: int = Field(default=256, ge=1, description="Memory bank capacity M")

    # augmentation
    edge_drop_ratio: float = Field(default=0.2, ge=0, le=1)
    node_drop_ratio: float = Field(default=0.2, ge=0, le=1)
    attr_mask_ratio: float = Field(default=0.2, ge=0, le=1)
    subgraph_ratio: float = Field(default=0.2, ge=0, le=1)
    augmentations: List[AugmentKind] = Field(
        default_factory=lambda: list(DEFAULT_AUGMENTATIONS),
        description="Augmentation kinds drawn uniformly per view",
    )

    # optimization
    epochs: int = Field(default=300, ge=0)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, gt=0, lt=1)
    beta2: float = Field(default=0.999, gt=0, lt=1)
    adam_epsilon: float = Field(default=1e-8, gt=0)

    # run
    variant: Variant = Field(default=Variant.FULL, description="Model variant")
    output_dir: str = Field(default="runs", description="Directory for reports, histories and checkpoints")
    workers: int = Field(default=1, ge=1, description="Seeds trained concurrently")

    @field_validator(*_LIST_FIELDS, mode="before")
    @classmethod
    def split_comma_lists(cls, v):
        """Accept ``"1, 2, 3"`` as well as real lists."""
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        if isinstance(v, int):
            return [v]
        return v

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v):
        if not v:
            raise ValueError("seeds must not be empty")
        return v

    @field_validator("split_ratios")
    @classmethod
    def validate_split_ratios(cls, v):
        if len(v) != 4 or any(r <= 0 for r in v):
            raise ValueError("split_ratios must be four positive integers")
        return v

    @field_validator("label_ratio")
    @classmethod
    def validate_label_ratio(cls, v):
        if not 0.0 < v <= 1.0:
            raise ValueError("label_ratio must lie in (0, 1]")
        return v

    @field_validator("augmentations")
    @classmethod
    def validate_augmentations(cls, v):
        """Ensure kinds are unique and non-empty."""
        if not v:
            raise ValueError("at least one augmentation kind must be enabled")
        return list(dict.fromkeys(v))

    def augment_ratios(self) -> Dict[AugmentKind, float]:
        return {
            AugmentKind.EDGE_DROP: self.edge_drop_ratio,
            AugmentKind.NODE_DROP: self.node_drop_ratio,
            AugmentKind.ATTR_MASK: self.attr_mask_ratio,
            AugmentKind.SUBGRAPH: self.subgraph_ratio,
            AugmentKind.IDENTITY: 0.0,
        }

    def echo(self) -> Dict[str, Any]:
        """Plain-JSON view of the configuration for reports and checkpoints."""
        return self.model_dump(mode="json")


class LossReport(BaseModel):
    """Loss values of one training step."""

    sup_loss: float = Field(description="Supervised cross-entropy")
    con_loss: float = Field(description="Consistency loss (0 when skipped)")
    total_loss: float = Field(description="sup_loss + weight * con_loss")
    epoch: int = Field(ge=0)
    step: int = Field(ge=0)
    bank_size: int = Field(default=0, ge=0, description="Bank entries available at the step")


class HistoryRow(BaseModel):
    """Per-epoch training record written to the history CSV."""

    epoch: int
    sup_loss: float
    con_loss: float
    total_loss: float
    val_acc: float


class EvaluationResult(BaseModel):
    """Accuracy and per-class counts on a set of graphs."""

    accuracy: float = Field(ge=0, le=1)
    num_graphs: int = Field(ge=0)
    per_class_correct: List[int] = Field(default_factory=list)
    per_class_total: List[int] = Field(default_factory=list)
    confusion: List[List[int]] = Field(default_factory=list, description="rows: true class, columns: predicted")


class SeedResult(BaseModel):
    """Outcome of one seed of a run."""

    seed: int
    test_accuracy: float
    best_epoch: int = Field(description="Epoch of the selected parameters (0 = initial)")
    best_val_accuracy: float
    split_sizes: List[int]
    secondary_vote_accuracy: Optional[float] = Field(
        default=None, description="Anchor-vote test accuracy of the secondary encoder"
    )
    history_path: Optional[str] = None
    checkpoint_path: Optional[str] = None


class RunReport(BaseModel):
    """Aggregate of a multi-seed run."""

    variant: Variant
    dataset: str
    seeds: List[int]
    accuracies: List[float]
    mean: float
    std: float = Field(description="Population standard deviation over the seeds")
    per_seed: List[SeedResult] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)
    conventions: Dict[str, str] = Field(default_factory=dict)
    wall_time: float = Field(default=0.0, ge=0, description="Seconds")

    @model_validator(mode="after")
    def check_seed_alignment(self):
        if len(self.accuracies) != len(self.seeds):
            raise ValueError("one accuracy per seed is required")
        return self


class CheckResult(BaseModel):
    """Outcome of one self-check."""

    name: str
    passed: bool
    value: Optional[float] = Field(default=None, description="Measured quantity, e.g. max relative error")
    threshold: Optional[float] = None
    detail: str = ""

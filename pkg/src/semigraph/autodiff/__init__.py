"""
Dense reverse-mode differentiation core.
"""

from . import ops
from .checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from .gradcheck import finite_diff_check
from .optim import AdamState, adam_step
from .tensor import Tensor, as_tensor, backward, is_grad_enabled, no_grad

__all__ = [
    "ops",
    "Tensor",
    "as_tensor",
    "backward",
    "no_grad",
    "is_grad_enabled",
    "finite_diff_check",
    "AdamState",
    "adam_step",
    "save_checkpoint",
    "load_checkpoint",
    "FORMAT_VERSION",
]

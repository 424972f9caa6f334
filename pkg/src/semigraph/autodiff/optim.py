"""
Adam optimizer over tensor parameters.
"""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor


@dataclass
class AdamState:
    """Bias-corrected Adam moments for an ordered parameter list."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: List[np.ndarray] = field(default_factory=list)
    second_moment: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 < self.beta1 < 1.0 or not 0.0 < self.beta2 < 1.0:
            raise ValueError(f"Adam betas must lie in (0, 1), got {self.beta1}, {self.beta2}")
        if self.epsilon <= 0.0:
            raise ValueError(f"Adam epsilon must be positive, got {self.epsilon}")
        if self.learning_rate <= 0.0:
            raise ValueError(f"Adam learning rate must be positive, got {self.learning_rate}")

    def _ensure_moments(self, params: Sequence[Tensor]) -> None:
        if not self.first_moment:
            self.first_moment = [np.zeros_like(p.data) for p in params]
            self.second_moment = [np.zeros_like(p.data) for p in params]
            return
        if len(self.first_moment) != len(params):
            raise ShapeError(
                f"Adam state tracks {len(self.first_moment)} parameters, got {len(params)}"
            )
        for moment, param in zip(self.first_moment, params):
            if moment.shape != param.shape:
                raise ShapeError(f"Adam moment shape {moment.shape} != parameter {param.shape}")


def adam_step(params: Sequence[Tensor], state: AdamState) -> None:
    """Apply one in-place Adam update and clear the gradients.

    A parameter without a gradient is treated as having a zero gradient.
    """
    state._ensure_moments(params)
    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step

    for index, param in enumerate(params):
        grad = param.grad if param.grad is not None else np.zeros_like(param.data)
        m = state.first_moment[index]
        v = state.second_moment[index]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        param.data -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
        param.grad = None

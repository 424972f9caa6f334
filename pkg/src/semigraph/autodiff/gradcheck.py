"""
Central finite-difference oracle for checking analytic gradients.
"""

from typing import Callable, Sequence, Union

import numpy as np

from .tensor import Tensor, backward, no_grad


def finite_diff_check(
    f: Callable[[], Tensor],
    params: Union[Tensor, Sequence[Tensor]],
    step: float = 1e-5,
) -> float:
    """
    Compare ``backward`` gradients of ``f`` against central differences.

    Args:
        f: Deterministic closure returning a scalar tensor computed from ``params``.
        params: Tensor or tensors whose entries are perturbed in place.
        step: Perturbation size, must be positive.

    Returns:
        Maximum over all entries of ``|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)``.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    tensors = [params] if isinstance(params, Tensor) else list(params)

    for tensor in tensors:
        tensor.grad = None
    backward(f())
    analytic = [
        tensor.grad.copy() if tensor.grad is not None else np.zeros_like(tensor.data)
        for tensor in tensors
    ]
    for tensor in tensors:
        tensor.grad = None

    worst = 0.0
    with no_grad():
        for tensor, grad in zip(tensors, analytic):
            flat = tensor.data.reshape(-1)
            for index in range(flat.size):
                original = flat[index]
                flat[index] = original + step
                upper = f().item()
                flat[index] = original - step
                lower = f().item()
                flat[index] = original
                numeric = (upper - lower) / (2.0 * step)
                exact = float(grad.reshape(-1)[index])
                scale = max(abs(exact), abs(numeric), 1e-8)
                worst = max(worst, abs(exact - numeric) / scale)
    return worst

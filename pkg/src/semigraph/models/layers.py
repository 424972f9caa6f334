"""
Parameter containers and dense layers on top of the autodiff core.
"""

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..autodiff import Tensor, ops
from ..errors import CheckpointError, ShapeError


class Module:
    """
    Named tree of trainable tensors.

    Parameters and child modules are registered in insertion order, so
    :meth:`parameters` and :meth:`state_dict` have a stable ordering that the
    optimizer state and checkpoints rely on.
    """

    def __init__(self):
        self._parameters: Dict[str, Tensor] = {}
        self._modules: Dict[str, "Module"] = {}

    def add_parameter(self, name: str, value: np.ndarray) -> Tensor:
        tensor = Tensor(value, requires_grad=True, name=name)
        self._parameters[name] = tensor
        return tensor

    def add_module(self, name: str, module: "Module") -> "Module":
        self._modules[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for name, tensor in self._parameters.items():
            yield f"{prefix}{name}", tensor
        for name, module in self._modules.items():
            yield from module.named_parameters(f"{prefix}{name}.")

    def parameters(self) -> List[Tensor]:
        return [tensor for _, tensor in self.named_parameters()]

    def num_parameters(self) -> int:
        return sum(t.size for t in self.parameters())

    def zero_grad(self) -> None:
        for tensor in self.parameters():
            tensor.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: tensor.numpy() for name, tensor in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray], strict: bool = True) -> None:
        """Copy arrays into the existing parameters (shapes must match)."""
        own = dict(self.named_parameters())
        missing = set(own) - set(state)
        if strict and missing:
            raise CheckpointError(f"missing parameters: {sorted(missing)}")
        for name, tensor in own.items():
            if name not in state:
                continue
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != tensor.shape:
                raise CheckpointError(f"{name}: expected shape {tensor.shape}, got {value.shape}")
            tensor.data = value.copy()
            tensor.grad = None


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Linear(Module):
    """``x @ W + b`` with Glorot-uniform weights and zero bias."""

    def __init__(
        self, in_dim: int, out_dim: int, rng: np.random.Generator, bias: bool = True, row_exact: bool = False
    ):
        super().__init__()
        self.row_exact = row_exact
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = self.add_parameter("weight", glorot_uniform(rng, in_dim, out_dim))
        self.bias: Optional[Tensor] = self.add_parameter("bias", np.zeros(out_dim)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.in_dim:
            raise ShapeError(f"Linear expects {self.in_dim} input columns, got shape {x.shape}")
        out = ops.matmul(x, self.weight, row_exact=self.row_exact)
        return out + self.bias if self.bias is not None else out


class MLP(Module):
    """Stack of :class:`Linear` layers with relu between consecutive layers."""

    def __init__(self, dims: Sequence[int], rng: np.random.Generator, row_exact: bool = False):
        super().__init__()
        if len(dims) < 2:
            raise ValueError(f"MLP needs at least input and output widths, got {list(dims)}")
        self.dims = tuple(int(d) for d in dims)
        self.layers = [
            self.add_module(str(i), Linear(a, b, rng, row_exact=row_exact))
            for i, (a, b) in enumerate(zip(self.dims[:-1], self.dims[1:]))
        ]

    def __call__(self, x: Tensor) -> Tensor:
        for index, layer in enumerate(self.layers):
            x = layer(x)
            if index < len(self.layers) - 1:
                x = ops.relu(x)
        return x

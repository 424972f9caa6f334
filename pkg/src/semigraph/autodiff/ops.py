"""
Differentiable primitives.

Each primitive computes its forward value with numpy, checks it is finite and,
when any input requires grad and recording is enabled, attaches a closure that
maps the output gradient to exact analytic input gradients.
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from ..errors import NonFiniteError, ShapeError
from .tensor import ArrayLike, BackwardFn, Tensor, as_tensor, is_grad_enabled

Axis = Optional[Union[int, Tuple[int, ...]]]


def _result(data: np.ndarray, op: str, parents: Sequence[Tensor], backward_fn: BackwardFn) -> Tensor:
    data = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"{op} produced non-finite values")
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, _parents=tuple(parents), _backward=backward_fn)
    return Tensor(data)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeError(f"{op}: cannot broadcast {a.shape} with {b.shape}") from exc


# Elementwise binary

def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def backward(g: np.ndarray):
        return (
            _unbroadcast(g, a.shape) if a.requires_grad else None,
            _unbroadcast(g, b.shape) if b.requires_grad else None,
        )

    return _result(a.data + b.data, "add", (a, b), backward)


def subtract(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("subtract", a, b)

    def backward(g: np.ndarray):
        return (
            _unbroadcast(g, a.shape) if a.requires_grad else None,
            _unbroadcast(-g, b.shape) if b.requires_grad else None,
        )

    return _result(a.data - b.data, "subtract", (a, b), backward)


def elementwise_multiply(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("elementwise_multiply", a, b)

    def backward(g: np.ndarray):
        return (
            _unbroadcast(g * b.data, a.shape) if a.requires_grad else None,
            _unbroadcast(g * a.data, b.shape) if b.requires_grad else None,
        )

    return _result(a.data * b.data, "elementwise_multiply", (a, b), backward)


def divide(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("divide", a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a.data / b.data

    def backward(g: np.ndarray):
        return (
            _unbroadcast(g / b.data, a.shape) if a.requires_grad else None,
            _unbroadcast(-g * a.data / (b.data * b.data), b.shape) if b.requires_grad else None,
        )

    return _result(out, "divide", (a, b), backward)


def maximum(a: ArrayLike, floor: float) -> Tensor:
    """Clamp from below by a constant; gradient passes where ``a > floor``."""
    a = as_tensor(a)
    passed = a.data > floor

    def backward(g: np.ndarray):
        return (g * passed,)

    return _result(np.maximum(a.data, floor), "maximum", (a,), backward)


# Linear algebra and shape

def matmul(a: ArrayLike, b: ArrayLike, row_exact: bool = False) -> Tensor:
    """
    Matrix product. With ``row_exact`` each output row is accumulated over the
    inner dimension in a fixed order, so it depends only on the matching input
    row and not on its position in ``a``.
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim not in (1, 2) or b.ndim not in (1, 2):
        raise ShapeError(f"matmul supports 1-D and 2-D operands, got {a.shape} and {b.shape}")
    left = a.data if a.ndim == 2 else a.data[None, :]
    right = b.data if b.ndim == 2 else b.data[:, None]
    if left.shape[1] != right.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ for {a.shape} @ {b.shape}")
    if row_exact:
        product = np.zeros((left.shape[0], right.shape[1]))
        for k in range(left.shape[1]):
            product += left[:, k : k + 1] * right[k]
    else:
        product = left @ right
    if a.ndim == 1 and b.ndim == 1:
        out = product[0, 0]
    elif a.ndim == 1:
        out = product[0]
    elif b.ndim == 1:
        out = product[:, 0]
    else:
        out = product

    def backward(g: np.ndarray):
        upstream = np.asarray(g).reshape(product.shape)
        return (
            (upstream @ right.T).reshape(a.shape) if a.requires_grad else None,
            (left.T @ upstream).reshape(b.shape) if b.requires_grad else None,
        )

    return _result(out, "matmul", (a, b), backward)


def transpose(a: ArrayLike) -> Tensor:
    a = as_tensor(a)

    def backward(g: np.ndarray):
        return (np.asarray(g).T,)

    return _result(a.data.T, "transpose", (a,), backward)


def reshape(a: ArrayLike, shape: Tuple[int, ...]) -> Tensor:
    a = as_tensor(a)
    try:
        out = a.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(f"reshape: cannot view {a.shape} as {shape}") from exc

    def backward(g: np.ndarray):
        return (np.asarray(g).reshape(a.shape),)

    return _result(out, "reshape", (a,), backward)


def concat(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    if not parts:
        raise ShapeError("concat needs at least one tensor")
    try:
        out = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError as exc:
        raise ShapeError(f"concat: incompatible shapes {[p.shape for p in parts]}") from exc
    cuts = np.cumsum([p.shape[axis] for p in parts])[:-1]

    def backward(g: np.ndarray):
        pieces = np.split(np.asarray(g), cuts, axis=axis)
        return tuple(piece if part.requires_grad else None for part, piece in zip(parts, pieces))

    return _result(out, "concat", parts, backward)


def take_rows(a: ArrayLike, index: Sequence[int]) -> Tensor:
    """Rows ``a[index]``; repeated indices accumulate their gradients."""
    a = as_tensor(a)
    index = np.asarray(index, dtype=np.int64)
    if a.ndim not in (1, 2):
        raise ShapeError(f"take_rows supports 1-D and 2-D tensors, got {a.shape}")

    def backward(g: np.ndarray):
        grad = np.zeros(a.shape)
        np.add.at(grad, index, np.asarray(g))
        return (grad,)

    return _result(a.data[index], "take_rows", (a,), backward)


# Reductions

def sum(a: ArrayLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    a = as_tensor(a)

    def backward(g: np.ndarray):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _result(a.data.sum(axis=axis, keepdims=keepdims), "sum", (a,), backward)


def _ordered_segment_sum(values: np.ndarray, segments: np.ndarray, num_segments: int) -> np.ndarray:
    """Per-segment column sums whose summands are added in ascending value order."""
    out = np.zeros((num_segments, values.shape[1]))
    if len(segments) == 0:
        return out
    by_value = np.argsort(values, axis=0, kind="stable")
    by_segment = np.argsort(segments[by_value], axis=0, kind="stable")
    order = np.take_along_axis(by_value, by_segment, axis=0)
    ordered = np.take_along_axis(values, order, axis=0)
    ids = np.sort(segments)
    starts = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
    out[ids[starts]] = np.add.reduceat(ordered, starts, axis=0)
    return out


def segment_sum(a: ArrayLike, segments: Sequence[int], num_segments: int) -> Tensor:
    """
    Sum the rows of ``a`` sharing a segment id into row ``segments[i]`` of a
    ``(num_segments, ...)`` result. Each segment's summands are sorted before
    reduction, so the result does not depend on the order of the rows.
    """
    a = as_tensor(a)
    segments = np.asarray(segments, dtype=np.int64)
    if a.ndim not in (1, 2) or a.shape[0] != len(segments):
        raise ShapeError(f"segment_sum: {len(segments)} segment ids for tensor of shape {a.shape}")
    if len(segments) and (segments.min() < 0 or segments.max() >= num_segments):
        raise ShapeError(f"segment_sum: ids must lie in [0, {num_segments})")
    values = a.data if a.ndim == 2 else a.data[:, None]
    out = _ordered_segment_sum(values, segments, num_segments)
    if a.ndim == 1:
        out = out[:, 0]

    def backward(g: np.ndarray):
        return (np.asarray(g)[segments],)

    return _result(out, "segment_sum", (a,), backward)


def mean(a: ArrayLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.size if axis is None else a.shape[axis]
    if count == 0:
        raise ShapeError("mean over an empty axis")
    return sum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


# Elementwise unary

def relu(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    active = a.data > 0

    def backward(g: np.ndarray):
        return (g * active,)

    return _result(np.where(active, a.data, 0.0), "relu", (a,), backward)


def sigmoid(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out = special.expit(a.data)

    def backward(g: np.ndarray):
        return (g * out * (1.0 - out),)

    return _result(out, "sigmoid", (a,), backward)


def softplus(a: ArrayLike) -> Tensor:
    a = as_tensor(a)

    def backward(g: np.ndarray):
        return (g * special.expit(a.data),)

    return _result(np.logaddexp(0.0, a.data), "softplus", (a,), backward)


def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    with np.errstate(over="ignore"):
        out = np.exp(a.data)

    def backward(g: np.ndarray):
        return (g * out,)

    return _result(out, "exp", (a,), backward)


def log(a: ArrayLike) -> Tensor:
    """Natural log; inputs must be strictly positive (clamp with :func:`maximum`)."""
    a = as_tensor(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(a.data)

    def backward(g: np.ndarray):
        return (g / a.data,)

    return _result(out, "log", (a,), backward)


# Row-wise normalizations (last axis)

def row_softmax(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out = special.softmax(a.data, axis=-1)

    def backward(g: np.ndarray):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return _result(out, "row_softmax", (a,), backward)


def log_softmax(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out = a.data - special.logsumexp(a.data, axis=-1, keepdims=True)
    probs = np.exp(out)

    def backward(g: np.ndarray):
        return (g - probs * g.sum(axis=-1, keepdims=True),)

    return _result(out, "log_softmax", (a,), backward)


def l2_normalize(a: ArrayLike, eps: float = 1e-12) -> Tensor:
    """Scale rows to unit norm; rows with norm <= eps map to zero."""
    a = as_tensor(a)
    norm = np.sqrt((a.data * a.data).sum(axis=-1, keepdims=True))
    live = norm > eps
    safe_norm = np.where(live, norm, 1.0)
    out = np.where(live, a.data / safe_norm, 0.0)

    def backward(g: np.ndarray):
        radial = (g * out).sum(axis=-1, keepdims=True)
        return (np.where(live, (g - out * radial) / safe_norm, 0.0),)

    return _result(out, "l2_normalize", (a,), backward)


def matrix_power_chain(a: ArrayLike, p: int) -> List[Tensor]:
    """Return ``[A, A^2, ..., A^p]`` built by repeated multiplication."""
    a = as_tensor(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"matrix_power_chain needs a square matrix, got {a.shape}")
    if p < 1:
        return []
    powers = [a]
    for _ in range(p - 1):
        powers.append(matmul(powers[-1], a))
    return powers

"""
Tests for the Adam optimizer.
"""

import numpy as np
import pytest

from semigraph.autodiff import AdamState, Tensor, adam_step, backward, ops
from semigraph.errors import ShapeError


class TestAdam:
    """Test suite for adam_step and AdamState."""

    def test_first_step_moves_by_learning_rate(self):
        param = Tensor([1.0], requires_grad=True)
        param.grad = np.array([0.5])
        state = AdamState(learning_rate=0.1)
        adam_step([param], state)
        assert param.data[0] == pytest.approx(0.9, abs=1e-6)
        assert state.step == 1

    def test_gradients_cleared(self):
        param = Tensor(np.ones(3), requires_grad=True)
        param.grad = np.ones(3)
        adam_step([param], AdamState())
        assert param.grad is None

    def test_missing_gradient_is_zero(self):
        param = Tensor([2.0, -1.0], requires_grad=True)
        adam_step([param], AdamState(learning_rate=0.5))
        assert param.data.tolist() == [2.0, -1.0]

    def test_minimizes_quadratic(self):
        x = Tensor([5.0], requires_grad=True)
        state = AdamState(learning_rate=0.1)
        for _ in range(1000):
            shifted = x - 2.0
            backward(ops.sum(shifted * shifted))
            adam_step([x], state)
        assert abs(x.data[0] - 2.0) < 0.1

    def test_parameter_count_mismatch(self):
        a = Tensor(np.ones(2), requires_grad=True)
        b = Tensor(np.ones(2), requires_grad=True)
        state = AdamState()
        adam_step([a], state)
        with pytest.raises(ShapeError):
            adam_step([a, b], state)

    @pytest.mark.parametrize("kwargs", [{"beta1": 1.0}, {"beta2": 0.0}, {"epsilon": 0.0}, {"learning_rate": -1.0}])
    def test_invalid_hyperparameters(self, kwargs):
        with pytest.raises(ValueError):
            AdamState(**kwargs)

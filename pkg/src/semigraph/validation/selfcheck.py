"""
Self-check suite: gradient checks, kernel oracle, loss invariants and memory
bank behaviour. Backs the ``semigraph check`` command.
"""

import time
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from ..autodiff import Tensor, backward, finite_diff_check, no_grad, ops
from ..core.graph import Graph
from ..models.batch import GraphBatch
from ..models.kernel import RandomWalkKernelEncoder, direct_product_oracle, kernel_value
from ..models.mpnn import MessagePassingEncoder
from ..schemas.base import CheckResult, RunConfig
from ..training.losses import consistency_loss, similarity_distribution, supervised_loss
from ..training.memory_bank import MemoryBank
from ..training.trainer import TwinModel

GRADIENT_TOLERANCE = 1e-4
ORACLE_TOLERANCE = 1e-9
PROBABILITY_TOLERANCE = 1e-12


def random_graph(rng: np.random.Generator, num_nodes: int, feature_dim: int = 3, edge_prob: float = 0.5) -> Graph:
    """Erdos-Renyi style graph with Gaussian features."""
    rows, cols = np.triu_indices(num_nodes, k=1)
    keep = rng.random(len(rows)) < edge_prob
    return Graph.from_edges(
        num_nodes,
        zip(rows[keep], cols[keep]),
        features=rng.normal(size=(num_nodes, feature_dim)),
    )


def _projected(out: Tensor, weights: np.ndarray) -> Tensor:
    return ops.sum(out * weights)


def away_from_zero(rng: np.random.Generator, shape) -> np.ndarray:
    """Gaussian draws with entries below 0.1 in magnitude replaced by 0.5."""
    values = rng.normal(size=shape)
    return np.where(np.abs(values) < 0.1, 0.5, values)


def primitive_cases(rng: np.random.Generator) -> Dict[str, Tuple[Callable[..., Tensor], List[np.ndarray]]]:
    """Primitive name -> (function of input tensors, random inputs) with inputs kept off kinks."""

    def off_zero(shape):
        return away_from_zero(rng, shape)

    square = rng.normal(size=(4, 4)) * 0.5
    return {
        "matmul": (ops.matmul, [rng.normal(size=(3, 4)), rng.normal(size=(4, 2))]),
        "add": (ops.add, [rng.normal(size=(3, 4)), rng.normal(size=(4,))]),
        "subtract": (ops.subtract, [rng.normal(size=(3, 4)), rng.normal(size=(3, 1))]),
        "elementwise_multiply": (ops.elementwise_multiply, [off_zero((3, 4)), off_zero((3, 4))]),
        "divide": (ops.divide, [rng.normal(size=(3, 4)), rng.uniform(0.5, 2.0, size=(3, 4))]),
        "relu": (ops.relu, [off_zero((3, 4))]),
        "maximum": (lambda a: ops.maximum(a, 0.0), [off_zero((3, 4))]),
        "sigmoid": (ops.sigmoid, [rng.normal(size=(3, 4))]),
        "softplus": (ops.softplus, [rng.normal(size=(3, 4))]),
        "exp": (ops.exp, [rng.normal(size=(3, 4))]),
        "log": (ops.log, [rng.uniform(0.5, 2.0, size=(3, 4))]),
        "sum": (lambda a: ops.sum(a, axis=1), [rng.normal(size=(3, 4))]),
        "mean": (lambda a: ops.mean(a, axis=0), [rng.normal(size=(3, 4))]),
        "concat": (lambda a, b: ops.concat([a, b], axis=1), [rng.normal(size=(3, 2)), rng.normal(size=(3, 4))]),
        "transpose": (ops.transpose, [rng.normal(size=(3, 4))]),
        "reshape": (lambda a: ops.reshape(a, (4, 3)), [rng.normal(size=(3, 4))]),
        "row_softmax": (ops.row_softmax, [rng.normal(size=(3, 4))]),
        "log_softmax": (ops.log_softmax, [rng.normal(size=(3, 4))]),
        "l2_normalize": (ops.l2_normalize, [rng.normal(size=(3, 4))]),
        "matrix_power_chain": (lambda a: ops.concat(ops.matrix_power_chain(a, 3)), [square]),
        "take_rows": (lambda a: ops.take_rows(a, [2, 0, 2, 1]), [rng.normal(size=(3, 4))]),
        "segment_sum": (lambda a: ops.segment_sum(a, [1, 0, 1, 3, 1], 4), [rng.normal(size=(5, 3))]),
    }


class SelfCheckSuite:
    """Runs the numerical self-checks and collects :class:`CheckResult` records."""

    def __init__(self, seed: int = 0, instances: int = 100, oracle_pairs: int = 100,
                 distribution_trials: int = 1000, bank_sequences: int = 10000):
        self.seed = seed
        self.instances = instances
        self.oracle_pairs = oracle_pairs
        self.distribution_trials = distribution_trials
        self.bank_sequences = bank_sequences
        logger.info(f"SelfCheckSuite initialized (seed={seed}, instances={instances})")

    def _rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, salt]))

    # Gradients

    def check_primitives(self) -> List[CheckResult]:
        rng = self._rng(1)
        worst: Dict[str, float] = {}
        for _ in range(self.instances):
            for name, (fn, inputs) in primitive_cases(rng).items():
                tensors = [Tensor(x, requires_grad=True) for x in inputs]
                projection = away_from_zero(rng, fn(*tensors).shape)
                error = finite_diff_check(lambda: _projected(fn(*tensors), projection), tensors)
                worst[name] = max(worst.get(name, 0.0), error)
        return [
            CheckResult(name=f"gradient:{name}", passed=error < GRADIENT_TOLERANCE,
                        value=error, threshold=GRADIENT_TOLERANCE)
            for name, error in worst.items()
        ]

    def check_encoders(self) -> List[CheckResult]:
        rng = self._rng(2)
        graph = random_graph(rng, 6, feature_dim=3)
        mpnn = MessagePassingEncoder(3, hidden_dim=4, num_layers=2, rng=rng)
        batch = GraphBatch.from_graphs([graph])
        with no_grad():
            _, _, mask = mpnn.encode_batch(batch)
        projection = rng.normal(size=(1, 4))
        mpnn_error = finite_diff_check(
            lambda: _projected(mpnn.encode_batch(batch, mask)[0], projection), mpnn.parameters()
        )

        kernel = RandomWalkKernelEncoder(hidden_dim=4, num_hidden_graphs=3, hidden_graph_size=4, walk_length=3, rng=rng)
        kernel_error = finite_diff_check(lambda: _projected(kernel([graph]), projection), kernel.parameters())
        return [
            CheckResult(name="gradient:message_passing_encoder", passed=mpnn_error < GRADIENT_TOLERANCE,
                        value=mpnn_error, threshold=GRADIENT_TOLERANCE),
            CheckResult(name="gradient:kernel_encoder", passed=kernel_error < GRADIENT_TOLERANCE,
                        value=kernel_error, threshold=GRADIENT_TOLERANCE),
        ]

    def check_total_loss(self) -> CheckResult:
        """End-to-end gradient of sup + weight * con on a 2-labeled / 2-unlabeled micro-batch."""
        rng = self._rng(3)
        config = RunConfig(hidden_dim=4, num_layers=2, num_hidden_graphs=3, hidden_graph_size=4, walk_length=2)
        model = TwinModel(config.variant, config, input_dim=3, num_classes=2, rng=rng)
        labeled = GraphBatch.from_graphs([random_graph(rng, n) for n in (5, 6)])
        unlabeled = GraphBatch.from_graphs([random_graph(rng, n) for n in (4, 6)])
        with no_grad():
            z_anchors, _, labeled_mask = model.primary.encode_batch(labeled)
            _, _, unlabeled_mask = model.primary.encode_batch(unlabeled)
            w_anchors = model.secondary.encode(labeled)
        z_anchors, w_anchors = z_anchors.numpy(), w_anchors.numpy()

        def total() -> Tensor:
            logits = model.classifier(model.primary.encode_batch(labeled, labeled_mask)[0])
            sup = supervised_loss(logits, [0, 1])
            p = similarity_distribution(model.primary.encode_batch(unlabeled, unlabeled_mask)[0], z_anchors, config.tau)
            q = similarity_distribution(model.secondary.encode(unlabeled), w_anchors, config.tau)
            return sup + consistency_loss(p, q) * config.consistency_weight

        error = finite_diff_check(total, model.parameters())
        return CheckResult(name="gradient:total_loss", passed=error < GRADIENT_TOLERANCE,
                           value=error, threshold=GRADIENT_TOLERANCE)

    # Kernel

    def check_kernel_oracle(self) -> List[CheckResult]:
        rng = self._rng(4)
        triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        edge = np.array([[0.0, 1.0], [1.0, 0.0]])
        with no_grad():
            factorized = kernel_value(triangle, edge, 1).item()
        oracle = direct_product_oracle(triangle, edge, 1)
        results = [CheckResult(
            name="kernel:triangle_x_edge", passed=factorized == 12.0 and oracle == 12.0,
            value=factorized, detail=f"oracle={oracle}",
        )]

        worst = 0.0
        for _ in range(self.oracle_pairs):
            graph = random_graph(rng, int(rng.integers(1, 7)))
            size = int(rng.integers(1, 6))
            hidden = np.triu(rng.uniform(0.0, 1.0, size=(size, size)) * (rng.random((size, size)) < 0.6), k=1)
            hidden = hidden + hidden.T
            p = int(rng.integers(0, 5))
            with no_grad():
                fast = kernel_value(graph, hidden, p).item()
            slow = direct_product_oracle(graph, hidden, p)
            worst = max(worst, abs(fast - slow) / max(abs(slow), 1e-300) if slow else abs(fast))
        results.append(CheckResult(
            name="kernel:oracle_random_pairs", passed=worst < ORACLE_TOLERANCE,
            value=worst, threshold=ORACLE_TOLERANCE, detail=f"{self.oracle_pairs} pairs",
        ))
        return results

    # Distributions and losses

    def check_distributions(self) -> List[CheckResult]:
        rng = self._rng(5)
        worst_sum, min_loss, worst_asym, zero_ok = 0.0, np.inf, 0.0, True
        with no_grad():
            for _ in range(self.distribution_trials):
                d = int(rng.integers(2, 8))
                m = int(rng.integers(1, 10))
                anchors = rng.normal(size=(m, d))
                tau = float(rng.uniform(0.1, 2.0))
                p = similarity_distribution(rng.normal(size=(2, d)), anchors, tau)
                q = similarity_distribution(rng.normal(size=(2, d)), anchors, tau)
                worst_sum = max(worst_sum, float(np.abs(p.data.sum(axis=1) - 1.0).max()))
                forward = consistency_loss(p, q).item()
                reverse = consistency_loss(q, p).item()
                min_loss = min(min_loss, forward)
                worst_asym = max(worst_asym, abs(forward - reverse))
                zero_ok = zero_ok and consistency_loss(p, p).item() == 0.0
        return [
            CheckResult(name="distribution:normalized", passed=worst_sum < PROBABILITY_TOLERANCE,
                        value=worst_sum, threshold=PROBABILITY_TOLERANCE),
            CheckResult(name="consistency:nonnegative", passed=min_loss >= 0.0, value=min_loss),
            CheckResult(name="consistency:symmetric", passed=worst_asym == 0.0, value=worst_asym),
            CheckResult(name="consistency:zero_on_equal", passed=zero_ok),
        ]

    # Memory bank

    def check_memory_bank(self) -> List[CheckResult]:
        rng = self._rng(6)
        fifo_ok = True
        for _ in range(self.bank_sequences):
            capacity = int(rng.integers(1, 6))
            bank = MemoryBank(capacity)
            reference: List[int] = []
            next_id = 0
            for _ in range(int(rng.integers(1, 5))):
                count = int(rng.integers(1, 4))
                ids = list(range(next_id, next_id + count))
                next_id += count
                bank.push(ids, np.zeros((count, 2)))
                reference = (reference + ids)[-capacity:]
            fifo_ok = fifo_ok and bank.graph_ids() == reference and len(bank) <= capacity

        embeddings = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
        bank = MemoryBank(4)
        bank.push([0, 1, 2], ops.relu(embeddings), ops.relu(embeddings))
        snapshot = bank.z_anchors().copy()
        probs = similarity_distribution(embeddings, bank.z_anchors(), 0.5)
        backward(ops.sum(probs * rng.normal(size=probs.shape)))
        detached = (
            all(isinstance(entry.z, np.ndarray) and not entry.z.flags.writeable for entry in bank)
            and np.array_equal(snapshot, bank.z_anchors())
            and embeddings.grad is not None
        )
        return [
            CheckResult(name="bank:fifo", passed=fifo_ok, detail=f"{self.bank_sequences} sequences"),
            CheckResult(name="bank:detached", passed=bool(detached)),
        ]

    def run(self, include: Sequence[str] = ("primitives", "encoders", "total", "kernel", "distributions", "bank")) -> List[CheckResult]:
        """Run the selected groups and return every result."""
        groups: Dict[str, Callable[[], object]] = {
            "primitives": self.check_primitives,
            "encoders": self.check_encoders,
            "total": self.check_total_loss,
            "kernel": self.check_kernel_oracle,
            "distributions": self.check_distributions,
            "bank": self.check_memory_bank,
        }
        results: List[CheckResult] = []
        for name in include:
            started = time.perf_counter()
            outcome = groups[name]()
            batch = outcome if isinstance(outcome, list) else [outcome]
            results.extend(batch)
            failed = [r.name for r in batch if not r.passed]
            logger.info(f"check group {name}: {len(batch) - len(failed)}/{len(batch)} passed "
                        f"in {time.perf_counter() - started:.2f}s")
            if failed:
                logger.warning(f"failed checks: {failed}")
        return results

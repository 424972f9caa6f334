"""
Multi-seed experiment runner and parameter sweeps.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..autodiff import save_checkpoint
from ..config.settings import write_config
from ..core.generator import SyntheticGraphGenerator
from ..core.graph import Dataset
from ..ingestion.splits import apply_label_ratio, split_dataset
from ..ingestion.tu_format import load_tu_dataset
from ..schemas.base import RunConfig, RunReport, SeedResult, SweepParameter, Variant
from ..training.trainer import SemiSupervisedTrainer

SYNTHETIC = "synthetic"
DATASET_SEED = 0


def load_dataset(config: RunConfig) -> Dataset:
    """Resolve ``config.dataset`` to a TU directory or the synthetic benchmark."""
    if config.dataset.lower() == SYNTHETIC:
        generator = SyntheticGraphGenerator(seed=DATASET_SEED, max_degree=config.max_degree)
        return generator.generate(config.synthetic_graphs)
    return load_tu_dataset(config.dataset, name=config.dataset_name, max_degree=config.max_degree)


def conventions(config: RunConfig, dataset: Dataset) -> Dict[str, str]:
    """Choices the method description leaves open, as recorded in every report."""
    return {
        "featurization": dataset.featurization,
        "combine_function": f"two-layer perceptron {config.hidden_dim}-wide, relu between layers",
        "readout_fallback": "mean pooling when no node has a positive attention score",
        "hidden_graphs": f"{config.num_hidden_graphs} x {config.hidden_graph_size} nodes, relu(free upper triangle), init U(0.1, 1.0)",
        "kernel_features": "raw walk counts" + (" with log1p" if config.kernel_log1p else ""),
        "augmentation": ", ".join(f"{k.value}={v}" for k, v in config.augment_ratios().items() if k in config.augmentations)
        if config.variant != Variant.NO_AUG else "identity",
        "subgraph_rule": "random-walk growth with restart from a kept node on stall",
        "memory_bank": f"FIFO capacity {config.bank_capacity}, labeled augmented-view embeddings pushed after each step",
        "consistency_estimate": "minibatch mean over unlabeled graphs",
        "ensemble_wiring": "two same-type encoders compared through the same consistency loss",
        "model_selection": "best validation accuracy, earliest epoch on ties",
    }


def _split_for(config: RunConfig, dataset: Dataset, seed: int):
    split_seed = config.split_seed if config.split_seed is not None else seed
    split = split_dataset(dataset, config.split_ratios, seed=split_seed)
    if config.label_ratio < 1.0 or config.labeled_limit is not None:
        split = apply_label_ratio(split, dataset, config.label_ratio, seed=split_seed, limit=config.labeled_limit)
    return split


def run_seed(
    config: RunConfig,
    dataset: Dataset,
    seed: int,
    output_dir: Optional[Path] = None,
) -> SeedResult:
    """Split, train, select and evaluate one seed."""
    split = _split_for(config, dataset, seed)
    trainer = SemiSupervisedTrainer(dataset, config, seed=seed)
    fitted = trainer.fit(split)
    test = trainer.evaluate(split.test)
    vote = trainer.anchor_vote_evaluate(split.test, split.labeled_train)
    result = SeedResult(
        seed=seed,
        test_accuracy=test.accuracy,
        best_epoch=fitted.best_epoch,
        best_val_accuracy=fitted.best_val_accuracy,
        split_sizes=list(split.sizes()),
        secondary_vote_accuracy=None if vote is None else vote.accuracy,
    )
    if output_dir is not None:
        seed_dir = Path(output_dir) / f"seed_{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        history = seed_dir / "history.csv"
        pd.DataFrame([row.model_dump() for row in fitted.history],
                     columns=["epoch", "sup_loss", "con_loss", "total_loss", "val_acc"]).to_csv(history, index=False)
        checkpoint = save_checkpoint(
            seed_dir / "model.npz",
            trainer.model.state_dict(),
            {
                "variant": config.variant.value,
                "roles": trainer.model.roles(),
                "input_dim": dataset.feature_dim,
                "num_classes": dataset.num_classes,
                "seed": seed,
                "best_epoch": fitted.best_epoch,
                "config": config.echo(),
            },
        )
        result.history_path = str(history)
        result.checkpoint_path = str(checkpoint)
    logger.info(
        f"seed {seed}: test_acc={test.accuracy:.4f} (epoch {fitted.best_epoch}, "
        f"val_acc={fitted.best_val_accuracy:.4f})"
    )
    return result


def run_experiment(
    config: RunConfig,
    dataset: Optional[Dataset] = None,
    output_dir: Optional[Union[str, Path]] = None,
) -> RunReport:
    """Train and evaluate every seed of ``config`` and aggregate test accuracy."""
    started = time.perf_counter()
    config = RunConfig(**config.model_dump())
    dataset = dataset if dataset is not None else load_dataset(config)
    notes = conventions(config, dataset)
    for key, value in notes.items():
        logger.info(f"convention {key}: {value}")
    out = Path(output_dir) if output_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_config(config, out / "config.txt")

    def job(seed: int) -> SeedResult:
        return run_seed(config, dataset, seed, out)

    if config.workers > 1 and len(config.seeds) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results: List[SeedResult] = list(pool.map(job, config.seeds))
    else:
        results = [job(seed) for seed in config.seeds]

    accuracies = [r.test_accuracy for r in results]
    report = RunReport(
        variant=config.variant,
        dataset=dataset.name,
        seeds=list(config.seeds),
        accuracies=accuracies,
        mean=float(np.mean(accuracies)),
        std=float(np.std(accuracies)),
        per_seed=results,
        config=config.echo(),
        conventions=notes,
        wall_time=time.perf_counter() - started,
    )
    if out is not None:
        save_report(report, out)
    logger.info(f"{config.variant.value} on {dataset.name}: {report.mean:.4f} +/- {report.std:.4f}")
    return report


def report_frame(report: RunReport) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump(exclude={"split_sizes"}) for r in report.per_seed])


def save_report(report: RunReport, output_dir: Union[str, Path]) -> Path:
    """Write ``report.json`` and the per-seed ``report.csv``."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    (output_dir / "report.json").write_text(report.model_dump_json(indent=2))
    report_frame(report).to_csv(output_dir / "report.csv", index=False)
    return output_dir / "report.json"


def sweep(
    config: RunConfig,
    parameter: Union[str, SweepParameter],
    values: Sequence[Union[int, float]],
    dataset: Optional[Dataset] = None,
    output_dir: Optional[Union[str, Path]] = None,
) -> pd.DataFrame:
    """One run per value of ``parameter``; one table row per run."""
    try:
        parameter = parameter if isinstance(parameter, SweepParameter) else SweepParameter.parse(parameter)
    except ValueError:
        raise ValueError(
            f"unsupported sweep parameter {parameter!r}; choose from {[p.value for p in SweepParameter]}"
        ) from None
    columns = ["parameter", "value", "mean", "std", "accuracies", "wall_time"]
    if not values:
        return pd.DataFrame(columns=columns)
    dataset = dataset if dataset is not None else load_dataset(config)
    rows = []
    for value in values:
        run_config = config.model_copy(update={parameter.config_key: value})
        sub_dir = Path(output_dir) / f"{parameter.value}_{value}" if output_dir is not None else None
        report = run_experiment(run_config, dataset, sub_dir)
        rows.append({
            "parameter": parameter.value,
            "value": value,
            "mean": report.mean,
            "std": report.std,
            "accuracies": ";".join(f"{a:.6f}" for a in report.accuracies),
            "wall_time": report.wall_time,
        })
    table = pd.DataFrame(rows, columns=columns)
    if output_dir is not None:
        path = Path(output_dir) / f"sweep_{parameter.value}.csv"
        table.to_csv(path, index=False)
        logger.info(f"Sweep table written to {path}")
    return table

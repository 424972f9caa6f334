"""
Export of trained runs: hidden graphs as DOT files plus a manifest.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np
from loguru import logger

from ..autodiff import load_checkpoint
from ..errors import CheckpointError
from ..models.kernel import RandomWalkKernelEncoder, export_hidden_graphs, hidden_graph_edges
from ..schemas.base import RunConfig
from ..training.trainer import TwinModel


def restore_model(path: Union[str, Path]) -> Tuple[TwinModel, Dict[str, Any]]:
    """Rebuild the model described by a checkpoint and load its parameters."""
    state, metadata = load_checkpoint(path)
    try:
        config = RunConfig(**metadata["config"])
        input_dim = int(metadata["input_dim"])
        num_classes = int(metadata["num_classes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"checkpoint metadata in {path} is incomplete: {exc}") from exc
    model = TwinModel(config.variant, config, input_dim, num_classes, np.random.default_rng(0))
    model.load_state_dict(state)
    return model, metadata


def export_run(
    checkpoint: Union[str, Path],
    output_dir: Union[str, Path],
    threshold: float = 0.0,
) -> Path:
    """
    Write one DOT file per hidden graph of every kernel encoder in the
    checkpoint and a ``manifest.json`` indexing them. Returns the manifest path.
    """
    model, metadata = restore_model(checkpoint)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    entries: List[Dict[str, Any]] = []
    for role in ("primary", "secondary"):
        encoder = getattr(model, role)
        if not isinstance(encoder, RandomWalkKernelEncoder):
            continue
        documents = export_hidden_graphs(encoder, threshold)
        edges = hidden_graph_edges(encoder, threshold)
        for index, (document, edge_list) in enumerate(zip(documents, edges)):
            name = f"{role}_hidden_{index:02d}.dot"
            (output_dir / name).write_text(document)
            entries.append({
                "file": name,
                "role": role,
                "index": index,
                "num_nodes": encoder.hidden.sizes[index],
                "num_edges": len(edge_list),
            })

    manifest = {
        "checkpoint": str(checkpoint),
        "variant": metadata.get("variant"),
        "roles": metadata.get("roles"),
        "threshold": threshold,
        "parameters": {name: list(value.shape) for name, value in model.state_dict().items()},
        "hidden_graphs": entries,
    }
    path = output_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    if not entries:
        logger.warning(f"{checkpoint}: variant {metadata.get('variant')} has no kernel encoder, nothing to draw")
    logger.info(f"Exported {len(entries)} hidden graphs to {output_dir}")
    return path

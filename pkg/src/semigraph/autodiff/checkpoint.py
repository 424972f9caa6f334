"""
Parameter checkpoint container.

Checkpoints are numpy ``.npz`` archives holding one array per named parameter
plus two reserved entries: ``__format_version__`` and ``__metadata__`` (JSON).
"""

import json
import zipfile
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
from loguru import logger

from ..errors import CheckpointError

FORMAT_VERSION = "semigraph-checkpoint/1"
_VERSION_KEY = "__format_version__"
_METADATA_KEY = "__metadata__"


def save_checkpoint(
    path: Union[str, Path],
    state: Dict[str, np.ndarray],
    metadata: Dict[str, Any],
) -> Path:
    """Write named arrays and JSON metadata to ``path``."""
    path = Path(path)
    reserved = {_VERSION_KEY, _METADATA_KEY} & set(state)
    if reserved:
        raise CheckpointError(f"parameter names collide with reserved keys: {sorted(reserved)}")
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {name: np.asarray(value, dtype=np.float64) for name, value in state.items()}
    arrays[_VERSION_KEY] = np.array(FORMAT_VERSION)
    arrays[_METADATA_KEY] = np.array(json.dumps(metadata, sort_keys=True, default=str))
    with open(path, "wb") as handle:
        np.savez(handle, **arrays)
    logger.debug(f"Checkpoint written: {path} ({len(state)} arrays)")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    """Read a checkpoint, returning ``(state, metadata)``."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as archive:
            contents = {name: archive[name] for name in archive.files}
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc

    version = contents.pop(_VERSION_KEY, None)
    if version is None or str(version) != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version in {path}: {version}")
    raw_metadata = contents.pop(_METADATA_KEY, None)
    try:
        metadata = json.loads(str(raw_metadata)) if raw_metadata is not None else {}
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"unreadable checkpoint metadata in {path}") from exc
    return contents, metadata

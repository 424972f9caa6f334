"""
Reader and writer for the TU graph-benchmark text format.

A dataset ``DS`` lives in one directory as ``DS_A.txt`` (1-based ``u, v``
pairs), ``DS_graph_indicator.txt`` (1-based graph id per node),
``DS_graph_labels.txt`` (one label per graph) and optionally
``DS_node_labels.txt`` and ``DS_node_attributes.txt``.
"""

from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..core.graph import Dataset, Graph, degree_features
from ..errors import DatasetFormatError

DEFAULT_MAX_DEGREE = 64


def _detect_name(directory: Path) -> str:
    candidates = sorted(directory.glob("*_A.txt"))
    if not candidates:
        raise DatasetFormatError(f"no *_A.txt file found in {directory}")
    if len(candidates) > 1:
        raise DatasetFormatError(
            f"several datasets in {directory}: {[c.name for c in candidates]}; pass name explicitly"
        )
    return candidates[0].name[: -len("_A.txt")]


def _read_table(path: Path, integer: bool) -> np.ndarray:
    """Parse a comma-separated numeric table into a 2-D array."""
    try:
        frame = pd.read_csv(path, header=None, skipinitialspace=True, dtype=str)
    except pd.errors.EmptyDataError:
        return np.zeros((0, 0), dtype=np.int64 if integer else np.float64)
    frame = frame.apply(lambda column: column.str.strip())
    try:
        values = frame.astype(np.float64).to_numpy()
    except ValueError as exc:
        raise DatasetFormatError(f"{path.name}: non-numeric entry ({exc})") from exc
    if not integer:
        return values
    if np.isnan(values).any() or not np.all(values == np.round(values)):
        raise DatasetFormatError(f"{path.name}: expected integer indices")
    return values.astype(np.int64)


def _required(directory: Path, name: str, suffix: str) -> Path:
    path = directory / f"{name}_{suffix}.txt"
    if not path.exists():
        raise DatasetFormatError(f"missing mandatory file {path.name} in {directory}")
    return path


def load_tu_dataset(
    path: Union[str, Path],
    name: Optional[str] = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> Dataset:
    """
    Load a TU-format dataset.

    Node labels are one-hot encoded (sorted distinct values) and node attributes
    are appended after them. When neither file exists, nodes get one-hot degree
    features clamped at ``max_degree``. Graph labels are remapped to
    ``0..C-1`` in sorted order.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise DatasetFormatError(f"dataset directory not found: {directory}")
    name = name or _detect_name(directory)
    logger.info(f"Loading TU dataset {name} from {directory}")

    edges = _read_table(_required(directory, name, "A"), integer=True)
    indicator = _read_table(_required(directory, name, "graph_indicator"), integer=True)
    graph_labels = _read_table(_required(directory, name, "graph_labels"), integer=True)

    if indicator.size == 0:
        raise DatasetFormatError(f"{name}: empty graph indicator")
    indicator = indicator[:, 0]
    graph_labels = graph_labels[:, 0] if graph_labels.size else np.zeros(0, dtype=np.int64)
    num_nodes_total = len(indicator)
    graph_ids = np.unique(indicator)
    if len(graph_ids) != len(graph_labels):
        raise DatasetFormatError(
            f"{name}: {len(graph_ids)} graph ids but {len(graph_labels)} graph labels"
        )
    if edges.size and edges.shape[1] != 2:
        raise DatasetFormatError(f"{name}_A.txt: expected two columns, got {edges.shape[1]}")
    if edges.size and (edges.min() < 1 or edges.max() > num_nodes_total):
        raise DatasetFormatError(f"{name}_A.txt: node index outside 1..{num_nodes_total}")

    blocks: List[np.ndarray] = []
    featurization = []
    node_label_path = directory / f"{name}_node_labels.txt"
    if node_label_path.exists():
        node_labels = _read_table(node_label_path, integer=True)
        if len(node_labels) != num_nodes_total:
            raise DatasetFormatError(
                f"{name}: {len(node_labels)} node labels for {num_nodes_total} nodes"
            )
        values, codes = np.unique(node_labels[:, 0], return_inverse=True)
        blocks.append(np.eye(len(values))[codes])
        featurization.append("node_label_onehot")
    attribute_path = directory / f"{name}_node_attributes.txt"
    if attribute_path.exists():
        attributes = _read_table(attribute_path, integer=False)
        if len(attributes) != num_nodes_total:
            raise DatasetFormatError(
                f"{name}: {len(attributes)} attribute rows for {num_nodes_total} nodes"
            )
        blocks.append(attributes)
        featurization.append("node_attributes")
    features = np.concatenate(blocks, axis=1) if blocks else None

    class_values = np.unique(graph_labels)
    class_index = {int(value): index for index, value in enumerate(class_values)}

    # nodes of one graph are contiguous in the TU layout, but tolerate any order
    node_graph = np.searchsorted(graph_ids, indicator)
    order = np.argsort(node_graph, kind="stable")
    counts = np.bincount(node_graph, minlength=len(graph_ids))
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    local_index = np.empty(num_nodes_total, dtype=np.int64)
    local_index[order] = np.arange(num_nodes_total) - starts[node_graph[order]]

    edge_lists: List[List[tuple]] = [[] for _ in graph_ids]
    for u, v in (edges - 1 if edges.size else np.zeros((0, 2), dtype=np.int64)):
        graph_u, graph_v = node_graph[u], node_graph[v]
        if graph_u != graph_v:
            raise DatasetFormatError(f"{name}: edge ({u + 1}, {v + 1}) crosses graphs")
        edge_lists[graph_u].append((local_index[u], local_index[v]))

    graphs = []
    for position in range(len(graph_ids)):
        members = order[starts[position] : starts[position] + counts[position]]
        graph_features = features[members] if features is not None else np.ones((len(members), 1))
        graph = Graph.from_edges(
            int(counts[position]),
            edge_lists[position],
            features=graph_features,
            label=class_index[int(graph_labels[position])],
            graph_id=position,
        )
        if features is None:
            graph = degree_features(graph, max_degree)
        graphs.append(graph)

    if features is None:
        featurization.append(f"degree_onehot(max_degree={max_degree})")
        logger.warning(f"{name}: no node labels or attributes, using one-hot degree features")

    dataset = Dataset(
        graphs=tuple(graphs),
        num_classes=len(class_values),
        name=name,
        featurization="+".join(featurization),
    )
    logger.info(
        f"Loaded {name}: {len(dataset)} graphs, {dataset.num_classes} classes, "
        f"feature_dim={dataset.feature_dim}"
    )
    return dataset


def write_tu_dataset(dataset: Dataset, directory: Union[str, Path], name: Optional[str] = None) -> Path:
    """Write ``dataset`` in TU format; features are stored as node attributes."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    name = name or dataset.name

    edge_rows, indicator_rows, attribute_rows, label_rows = [], [], [], []
    offset = 0
    for position, graph in enumerate(dataset.graphs):
        for u, v in graph.edges:
            edge_rows.append((offset + u + 1, offset + v + 1))
            edge_rows.append((offset + v + 1, offset + u + 1))
        indicator_rows.extend([position + 1] * graph.num_nodes)
        attribute_rows.append(graph.features)
        label_rows.append(-1 if graph.label is None else graph.label)
        offset += graph.num_nodes

    pd.DataFrame(edge_rows).to_csv(directory / f"{name}_A.txt", header=False, index=False, sep=",")
    pd.DataFrame(indicator_rows).to_csv(directory / f"{name}_graph_indicator.txt", header=False, index=False)
    pd.DataFrame(label_rows).to_csv(directory / f"{name}_graph_labels.txt", header=False, index=False)
    attributes = np.concatenate(attribute_rows) if attribute_rows else np.zeros((0, 0))
    pd.DataFrame(attributes).to_csv(
        directory / f"{name}_node_attributes.txt", header=False, index=False, float_format="%.17g"
    )
    logger.info(f"Wrote {len(dataset)} graphs in TU format to {directory}")
    return directory

import os
from pathlib import Path

import numpy as np
import pytest

from nicgraph.graph import LabeledGraph
from nicgraph.nic import LabelModel

DATA_DIR_ENV = "NICGRAPH_DATA_DIR"


def undirected(labels, edge_pairs, num_classes=None):
    """Build an undirected LabeledGraph from one orientation of each edge."""
    labels = np.asarray(labels, dtype=np.int64)
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size else 0
    pairs = list(edge_pairs)
    both = pairs + [(b, a) for a, b in pairs]
    edges = np.asarray(both, dtype=np.int64).reshape(-1, 2)
    return LabeledGraph(labels=labels, edges=edges, num_classes=num_classes)


def directed(labels, edge_pairs, num_classes=None, mode="out_neighbors"):
    labels = np.asarray(labels, dtype=np.int64)
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size else 0
    edges = np.asarray(list(edge_pairs), dtype=np.int64).reshape(-1, 2)
    return LabeledGraph(labels=labels, edges=edges, num_classes=num_classes, direction_mode=mode)


def random_label_model(rng, num_classes, max_degree, alpha=1.0):
    """Dirichlet-random model rows; every z row defined."""
    p = rng.dirichlet(np.full(num_classes, alpha))
    z = rng.dirichlet(np.full(num_classes, alpha), size=num_classes)
    q = rng.dirichlet(np.full(max_degree + 1, alpha), size=num_classes)
    return LabelModel.from_arrays(p, z, q)


def random_model_with_c(rng, num_classes, max_degree):
    """Model whose z derives from explicit pairwise connection probabilities."""
    p = rng.dirichlet(np.full(num_classes, 5.0))
    c = rng.uniform(0.05, 1.0, size=(num_classes, num_classes))
    weighted = p[None, :] * c
    z = weighted / weighted.sum(axis=1, keepdims=True)
    q = rng.dirichlet(np.full(max_degree + 1, 2.0), size=num_classes)
    return LabelModel.from_arrays(p, z, q, c=c)


def random_small_graph(rng, max_nodes=12, force_undirected=None):
    """Random labeled graph for property checks; may have isolated nodes."""
    n = int(rng.integers(2, max_nodes + 1))
    c = int(rng.integers(1, min(n, 4) + 1))
    labels = rng.integers(0, c, size=n)
    labels[:c] = np.arange(c)  # every class observed
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    keep = rng.random(len(pairs)) < 0.3
    chosen = [pairs[k] for k in np.flatnonzero(keep)]
    if not chosen:
        chosen = [(0, 1 % n)]
    undirected_graph = bool(rng.integers(0, 2)) if force_undirected is None else force_undirected
    if undirected_graph:
        return undirected(labels, chosen, num_classes=c)
    return directed(labels, chosen, num_classes=c)


@pytest.fixture(scope="session")
def data_dir():
    """Root folder holding the real dataset folders, if the user provides it."""
    root = os.environ.get(DATA_DIR_ENV)
    if not root or not Path(root).is_dir():
        pytest.skip(
            f"real datasets not available; set ${DATA_DIR_ENV} to a folder "
            "holding the Geom-GCN style dataset directories"
        )
    return Path(root)


def dataset_folder(root: Path, name: str):
    """Resolve one dataset folder, tolerating common alias names."""
    aliases = {"actor": ("actor", "film"), "film": ("film", "actor")}
    for candidate in aliases.get(name, (name,)):
        p = root / candidate
        if p.is_dir():
            return p
    return None

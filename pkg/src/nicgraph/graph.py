"""Labeled graph container, ingestion from disk formats, and structural
transforms (direction handling, self-loop policy, label compaction).

Node ids are dense integers 0..N-1. Edges are stored as an array of ordered
(src, dst) pairs with multiplicity 1; an undirected graph stores both
orientations of every edge, so degree sums count each undirected edge twice.

Supported on-disk formats:

* plain edge list: one "src dst" pair per line, '#' comments ignored,
  with a companion labels file of "node_id<TAB>label" lines;
* Geom-GCN dataset folders: one ``*graph_edges*`` file of "src<TAB>dst"
  lines and one ``*node_feature*label*`` file of
  "node_id<TAB>feature_blob<TAB>label" lines (a non-numeric header row is
  tolerated, the feature blob is not interpreted);
* a canonical JSON document
  ``{num_nodes, num_classes, direction_mode, labels, edges}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DuplicateLabel, FormatMismatch, MalformedLine, MissingLabel

DIRECTION_MODES = ("undirected", "out_neighbors", "in_neighbors")


@dataclass(frozen=True)
class IngestOptions:
    """Pure ingestion configuration; identical options and files load
    byte-deterministically.

    strip_self_loops
        Drop (i, i) edges. A node's own label inside its neighborhood
        trivially inflates every label-mixing statistic, so this is on by
        default.
    symmetrize
        Store both orientations of every edge and mark the graph undirected.
    label_compaction
        Remap sparse label ids to dense 0..C-1, keeping the original
        vocabulary in a side map for reporting.
    """

    strip_self_loops: bool = True
    symmetrize: bool = True
    label_compaction: bool = True


def _canonical_edges(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(arr, axis=0)


@dataclass(frozen=True)
class LabeledGraph:
    """Immutable node-labeled graph with neighborhood queries.

    ``labels[i]`` is the class id of node i, in 0..num_classes-1. ``edges``
    is a duplicate-free, lexicographically sorted (src, dst) array. The
    ``direction_mode`` selects which orientation defines neighborhoods:
    successors (``out_neighbors``), predecessors (``in_neighbors``), or the
    symmetric closure (``undirected``, which requires the stored edge set to
    be symmetric).
    """

    labels: np.ndarray
    edges: np.ndarray
    num_classes: int
    direction_mode: str = "undirected"
    label_vocabulary: tuple | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        edges = _canonical_edges(self.edges)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", edges)
        labels.setflags(write=False)
        edges.setflags(write=False)

        if self.direction_mode not in DIRECTION_MODES:
            raise ValueError(f"unknown direction_mode {self.direction_mode!r}")
        n = labels.shape[0]
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-D array")
        if n and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ValueError("labels must lie in 0..num_classes-1")
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoints must be valid node ids")
            if self.direction_mode == "undirected":
                fwd = edges[:, 0] * n + edges[:, 1]
                rev = edges[:, 1] * n + edges[:, 0]
                if not np.array_equal(np.sort(fwd), np.sort(rev)):
                    raise ValueError("undirected graph requires a symmetric edge set")

    # -- basic queries ---------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return int(self.labels.shape[0])

    @property
    def num_edges(self) -> int:
        """Number of stored ordered pairs (an undirected edge counts twice)."""
        return int(self.edges.shape[0])

    @property
    def has_self_loops(self) -> bool:
        return bool(self.edges.size) and bool(np.any(self.edges[:, 0] == self.edges[:, 1]))

    def adjacency_pairs(self) -> np.ndarray:
        """(node, neighbor) pairs under the active direction mode."""
        if self.direction_mode == "in_neighbors":
            return self.edges[:, ::-1]
        return self.edges

    @cached_property
    def _csr(self):
        pairs = self.adjacency_pairs()
        if self.direction_mode == "in_neighbors":
            order = np.lexsort((pairs[:, 1], pairs[:, 0]))
            pairs = pairs[order]
        deg = np.bincount(pairs[:, 0], minlength=self.num_nodes)
        indptr = np.concatenate([[0], np.cumsum(deg)])
        return indptr, pairs[:, 1]

    def neighborhood(self, i: int) -> np.ndarray:
        """Neighbors of node i under the active direction mode, ascending."""
        if not 0 <= i < self.num_nodes:
            raise IndexError(f"node id {i} out of range 0..{self.num_nodes - 1}")
        indptr, nbrs = self._csr
        return nbrs[indptr[i] : indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        """Degree of every node under the active direction mode."""
        pairs = self.adjacency_pairs()
        return np.bincount(pairs[:, 0], minlength=self.num_nodes)

    # -- transforms ------------------------------------------------------

    def without_self_loops(self) -> "LabeledGraph":
        keep = self.edges[:, 0] != self.edges[:, 1]
        return replace(self, edges=self.edges[keep])

    def symmetrized(self) -> "LabeledGraph":
        """Union of both orientations; result is undirected."""
        both = np.concatenate([self.edges, self.edges[:, ::-1]])
        return replace(self, edges=both, direction_mode="undirected")

    def with_direction(self, mode: str) -> "LabeledGraph":
        """Reinterpret the stored edges under another direction mode.

        Switching to ``undirected`` symmetrizes; switching between directed
        modes only changes which orientation defines neighborhoods.
        """
        if mode == self.direction_mode:
            return self
        if mode == "undirected":
            return self.symmetrized()
        return replace(self, direction_mode=mode)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "num_classes": int(self.num_classes),
            "direction_mode": self.direction_mode,
            "labels": [int(x) for x in self.labels],
            "edges": [[int(s), int(d)] for s, d in self.edges],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()) + "\n")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LabeledGraph":
        labels = np.asarray(doc["labels"], dtype=np.int64)
        if len(labels) != doc["num_nodes"]:
            raise FormatMismatch("labels length disagrees with num_nodes")
        return cls(
            labels=labels,
            edges=np.asarray(doc["edges"], dtype=np.int64).reshape(-1, 2),
            num_classes=int(doc["num_classes"]),
            direction_mode=doc["direction_mode"],
        )


def load_graph_json(path) -> LabeledGraph:
    """Load a graph from the canonical JSON document."""
    return LabeledGraph.from_json_dict(json.loads(Path(path).read_text()))


# -- text-format ingestion -----------------------------------------------


def _data_lines(path):
    """Yield (line_no, stripped_line), skipping blanks and '#' comments."""
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield line_no, line


def _parse_label_lines(path, lines) -> dict[int, int]:
    by_node: dict[int, int] = {}
    for line_no, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(path, line_no, f"expected 2 fields, got {len(parts)}")
        try:
            node, lab = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(path, line_no, f"non-integer field in {line!r}") from None
        if node < 0:
            raise MalformedLine(path, line_no, f"negative node id {node}")
        if node in by_node and by_node[node] != lab:
            raise DuplicateLabel(node, (by_node[node], lab))
        by_node[node] = lab
    return by_node


def _labels_array(by_node: dict[int, int]) -> np.ndarray:
    if not by_node:
        return np.empty(0, dtype=np.int64)
    n = max(by_node) + 1
    for i in range(n):
        if i not in by_node:
            raise MissingLabel(i)
    return np.array([by_node[i] for i in range(n)], dtype=np.int64)


def _compact(labels: np.ndarray, compaction: bool):
    """Return dense labels, num_classes, and the original-id vocabulary."""
    if labels.size == 0:
        return labels, 0, ()
    if not compaction:
        if labels.min() < 0:
            raise FormatMismatch("negative label ids require label compaction")
        return labels, int(labels.max()) + 1, None
    vocab, dense = np.unique(labels, return_inverse=True)
    return dense.astype(np.int64), int(vocab.size), tuple(int(v) for v in vocab)


def _assemble(labels, raw_edges, opts: IngestOptions) -> LabeledGraph:
    labels, num_classes, vocab = _compact(labels, opts.label_compaction)
    edges = _canonical_edges(raw_edges)
    if edges.size:
        bad = edges[(edges < 0) | (edges >= labels.size)]
        if bad.size:
            raise MissingLabel(int(bad.flat[0]))
    if opts.strip_self_loops and edges.size:
        edges = edges[edges[:, 0] != edges[:, 1]]
    if opts.symmetrize:
        edges = np.concatenate([edges, edges[:, ::-1]]) if edges.size else edges
        mode = "undirected"
    else:
        mode = "out_neighbors"
    return LabeledGraph(
        labels=labels,
        edges=edges,
        num_classes=num_classes,
        direction_mode=mode,
        label_vocabulary=vocab,
    )


def load_edge_list(edges_path, labels_path, opts: IngestOptions = IngestOptions()) -> LabeledGraph:
    """Load a graph from a whitespace edge list plus a node labels file.

    Parameters
    ----------
    edges_path : path
        One "src dst" integer pair per line; '#' comments and blank lines
        are ignored.
    labels_path : path
        One "node_id<TAB>label" pair per line covering all ids 0..N-1.
    opts : IngestOptions
        Self-loop, symmetrization, and label-compaction policy.
    """
    by_node = _parse_label_lines(labels_path, _data_lines(labels_path))
    labels = _labels_array(by_node)

    rows = []
    for line_no, line in _data_lines(edges_path):
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(edges_path, line_no, f"expected 2 fields, got {len(parts)}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise MalformedLine(edges_path, line_no, f"non-integer field in {line!r}") from None
    return _assemble(labels, rows, opts)


def _find_one(directory: Path, what: str, predicate) -> Path:
    hits = sorted(p for p in directory.iterdir() if p.is_file() and predicate(p.name))
    if len(hits) != 1:
        raise FormatMismatch(
            f"expected exactly one {what} file in {directory}, found {len(hits)}"
        )
    return hits[0]


def _is_int(text: str) -> bool:
    try:
        int(text)
        return True
    except ValueError:
        return False


def load_geomgcn_folder(directory, opts: IngestOptions = IngestOptions()) -> LabeledGraph:
    """Load a Geom-GCN style dataset folder.

    The folder must contain one graph-edges file ("src<TAB>dst" lines) and
    one node-feature-label file ("node_id<TAB>feature_blob<TAB>label"
    lines). A header row whose first field is not an integer is skipped.
    The comma-separated feature blob is not interpreted; labels come from
    the last field. Node lines must all carry the same number of
    tab-separated fields, else FormatMismatch is raised.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FormatMismatch(f"{directory} is not a directory")
    edge_file = _find_one(directory, "graph-edges", lambda n: "graph_edges" in n)
    node_file = _find_one(
        directory, "node-feature-label", lambda n: "node_feature" in n and "label" in n
    )

    by_node: dict[int, int] = {}
    n_fields = None
    for line_no, line in _data_lines(node_file):
        parts = line.split("\t")
        if line_no == 1 and not _is_int(parts[0]):
            continue  # header row
        if n_fields is None:
            n_fields = len(parts)
        if len(parts) != n_fields:
            raise FormatMismatch(
                f"{node_file}:{line_no}: {len(parts)} fields, expected {n_fields}"
            )
        if n_fields < 2:
            raise FormatMismatch(f"{node_file}:{line_no}: too few fields")
        try:
            node, lab = int(parts[0]), int(parts[-1])
        except ValueError:
            raise FormatMismatch(f"{node_file}:{line_no}: non-integer id or label") from None
        if node in by_node and by_node[node] != lab:
            raise DuplicateLabel(node, (by_node[node], lab))
        by_node[node] = lab
    labels = _labels_array(by_node)

    rows = []
    for line_no, line in _data_lines(edge_file):
        parts = line.split()
        if line_no == 1 and not _is_int(parts[0]):
            continue  # header row
        if len(parts) != 2:
            raise FormatMismatch(f"{edge_file}:{line_no}: expected 2 fields, got {len(parts)}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FormatMismatch(f"{edge_file}:{line_no}: non-integer endpoint") from None
    return _assemble(labels, rows, opts)

"""Classical label-mixing statistics.

Edge homophily is the fraction of edges whose endpoints share a label, node
homophily the mean over nodes of each node's same-label neighbor fraction,
and the assortativity coefficient

    r = (Tr E - ||E||^2) / (1 - ||E||^2)

is computed from the class-pair mixing matrix E with ||.|| the Frobenius
norm. All three are estimated from (node, neighbor) pairs under the graph's
active direction mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMixing, EmptyGraph
from .graph import LabeledGraph

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class MixingMatrix:
    """e[i, j] = fraction of edges from a class-i node to a class-j node."""

    e: np.ndarray

    @property
    def is_symmetric(self) -> bool:
        return bool(np.all(np.abs(self.e - self.e.T) <= _SYM_TOL))


@dataclass(frozen=True)
class HomophilyReport:
    h_edge: float
    h_node: float
    assortativity: float | None
    mixing: MixingMatrix
    excluded_zero_degree_nodes: int
    degenerate_mixing: bool = False

    def to_json_dict(self) -> dict:
        return {
            "h_edge": self.h_edge,
            "h_node": self.h_node,
            "assortativity": self.assortativity,
            "mixing_matrix": [[float(x) for x in row] for row in self.mixing.e],
            "mixing_symmetric": self.mixing.is_symmetric,
            "excluded_zero_degree_nodes": self.excluded_zero_degree_nodes,
            "degenerate_mixing": self.degenerate_mixing,
        }


def _pair_classes(g: LabeledGraph):
    pairs = g.adjacency_pairs()
    if pairs.shape[0] == 0:
        raise EmptyGraph("graph has no edges")
    return g.labels[pairs[:, 0]], g.labels[pairs[:, 1]]


def mixing_matrix(g: LabeledGraph) -> MixingMatrix:
    src, dst = _pair_classes(g)
    c = g.num_classes
    counts = np.bincount(src * c + dst, minlength=c * c).reshape(c, c)
    return MixingMatrix(counts / counts.sum())


def edge_homophily(g: LabeledGraph) -> float:
    """Fraction of edges whose endpoints share a label."""
    src, dst = _pair_classes(g)
    return float(np.count_nonzero(src == dst)) / src.shape[0]


def _node_homophily_detail(g: LabeledGraph) -> tuple[float, int]:
    if g.num_nodes == 0:
        raise EmptyGraph("graph has no nodes")
    pairs = g.adjacency_pairs()
    same = (g.labels[pairs[:, 0]] == g.labels[pairs[:, 1]]).astype(np.float64)
    deg = np.bincount(pairs[:, 0], minlength=g.num_nodes).astype(np.float64)
    same_counts = np.bincount(pairs[:, 0], weights=same, minlength=g.num_nodes)
    active = deg > 0
    excluded = int(g.num_nodes - np.count_nonzero(active))
    if not np.any(active):
        raise EmptyGraph("every node has degree zero")
    fractions = same_counts[active] / deg[active]
    return float(fractions.mean()), excluded


def node_homophily(g: LabeledGraph) -> float:
    """Mean same-label neighbor fraction; degree-0 nodes are excluded."""
    return _node_homophily_detail(g)[0]


def assortativity(g: LabeledGraph) -> float:
    """Mixing-matrix assortativity coefficient in [-1, 1].

    Raises DegenerateMixing when 1 - ||E||^2 vanishes, i.e. when every edge
    joins the same ordered class pair.
    """
    e = mixing_matrix(g).e
    trace = math.fsum(float(e[i, i]) for i in range(e.shape[0]))
    frob2 = math.fsum(float(x) * float(x) for x in e.ravel())
    denom = 1.0 - frob2
    if abs(denom) < 1e-15:
        raise DegenerateMixing("all edges join one ordered class pair")
    return (trace - frob2) / denom


def homophily_report(g: LabeledGraph) -> HomophilyReport:
    """All three mixing statistics plus the mixing matrix in one record."""
    h_edge = edge_homophily(g)
    h_node, excluded = _node_homophily_detail(g)
    mixing = mixing_matrix(g)
    try:
        r = assortativity(g)
        degenerate = False
    except DegenerateMixing:
        r = None
        degenerate = True
    return HomophilyReport(
        h_edge=h_edge,
        h_node=h_node,
        assortativity=r,
        mixing=mixing,
        excluded_zero_degree_nodes=excluded,
        degenerate_mixing=degenerate,
    )

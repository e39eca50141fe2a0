"""Exact mutual information between a node's label and its neighborhood
label multiset, by brute-force enumeration of all unordered configurations.

A configuration is a vector of per-class neighbor counts summing to at most
the model's maximum degree D. The conditional probability of a
configuration given the node's class s is q[s, d] times the multinomial
weight of the counts under z[s]. Enumerating every configuration gives the
conditional and marginal entropies by direct summation, hence the exact MI.
The enumeration refuses to run past a configured cap rather than subsample:
an inexact oracle cannot certify a bound.

Also provides a model-faithful graph sampler, used to check that model
estimation inverts generation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import entr, gammaln, xlogy

from .errors import EnumerationTooLarge, ModelIncomplete
from .graph import LabeledGraph
from .nic import LabelModel

DEFAULT_ENUM_CAP = 5_000_000


@dataclass(frozen=True)
class ConfigEnumeration:
    """All neighbor-count vectors with total 0..max_degree, one per row.

    Rows are grouped by total degree in ascending order; inside a degree
    block they descend lexicographically (first class count runs from d down
    to 0).
    """

    num_classes: int
    max_degree: int
    counts: np.ndarray

    @property
    def entries(self) -> np.ndarray:
        return self.counts

    def __len__(self) -> int:
        return int(self.counts.shape[0])


@dataclass(frozen=True)
class ExactMiResult:
    mi_nats: float
    h_marginal: float
    h_conditional: float
    num_configs: int

    def to_json_dict(self) -> dict:
        return {
            "mi_nats": self.mi_nats,
            "h_marginal": self.h_marginal,
            "h_conditional": self.h_conditional,
            "num_configs": self.num_configs,
        }


def _compositions(total: int, parts: int):
    """Count vectors of length `parts` summing to `total`, first part descending."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def enumerate_configs(
    num_classes: int, max_degree: int, cap: int = DEFAULT_ENUM_CAP
) -> ConfigEnumeration:
    """Enumerate S^D, the unordered neighborhood label configurations.

    The entry count is sum_{d=0..D} binom(d + C - 1, C - 1); the size guard
    uses the cruder bound binom(D + C - 1, C - 1) * (D + 1) so it can refuse
    before allocating anything.
    """
    if num_classes < 1 or max_degree < 0:
        raise ValueError("need num_classes >= 1 and max_degree >= 0")
    estimate = math.comb(max_degree + num_classes - 1, num_classes - 1) * (max_degree + 1)
    if estimate >= cap:
        raise EnumerationTooLarge(estimate, cap)
    rows = [
        cfg
        for d in range(max_degree + 1)
        for cfg in _compositions(d, num_classes)
    ]
    return ConfigEnumeration(
        num_classes=num_classes,
        max_degree=max_degree,
        counts=np.array(rows, dtype=np.int64).reshape(len(rows), num_classes),
    )


def config_prob_given_label(m: LabelModel, counts, s: int) -> float:
    """P(neighborhood has these per-class counts | node class is s).

    Multinomial in the counts with success probabilities z[s], scaled by the
    degree probability q[s, d]; zero counts on zero-probability classes
    contribute a factor 1.
    """
    counts = [int(x) for x in np.asarray(counts).ravel()]
    d = sum(counts)
    if d > m.max_degree:
        raise ValueError(f"configuration size {d} exceeds max degree {m.max_degree}")
    degree_prob = float(m.q[s, d])
    if degree_prob == 0.0:
        return 0.0
    if not m.z_defined[s]:
        return degree_prob if d == 0 else 0.0
    coef = math.factorial(d)
    for k in counts:
        coef //= math.factorial(k)
    prob = 1.0
    for z_k, n_k in zip(m.z[s], counts):
        if n_k:
            prob *= float(z_k) ** n_k
    return degree_prob * coef * prob


def _conditional_matrix(m: LabelModel, enum: ConfigEnumeration) -> np.ndarray:
    """Rows: class s; columns: P(config | s) over the whole enumeration."""
    counts = enum.counts
    d = counts.sum(axis=1)
    log_coef = gammaln(d + 1) - gammaln(counts + 1).sum(axis=1)
    cond = np.zeros((m.num_classes, counts.shape[0]))
    with np.errstate(divide="ignore"):
        log_q = np.log(m.q)
    for s in range(m.num_classes):
        if m.z_defined[s]:
            log_mult = xlogy(counts, m.z[s][None, :]).sum(axis=1)
            cond[s] = np.exp(log_q[s, d] + log_coef + log_mult)
        else:
            cond[s] = np.where(d == 0, m.q[s, 0], 0.0)
    return cond


def exact_mi(m: LabelModel, cap: int = DEFAULT_ENUM_CAP) -> ExactMiResult:
    """Exact MI(node label; neighborhood label multiset) in nats."""
    m.validate()
    enum = enumerate_configs(m.num_classes, m.max_degree, cap)
    cond = _conditional_matrix(m, enum)
    h_conditional = float(m.p @ entr(cond).sum(axis=1))
    marginal = m.p @ cond
    h_marginal = float(entr(marginal).sum())
    return ExactMiResult(
        mi_nats=h_marginal - h_conditional,
        h_marginal=h_marginal,
        h_conditional=h_conditional,
        num_configs=len(enum),
    )


def bhattacharyya_by_enumeration(m: LabelModel, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """BD matrix by direct summation of sqrt(P(cfg|s) * P(cfg|r)).

    Independent route against the closed form in nic.bhattacharyya_matrix.
    """
    enum = enumerate_configs(m.num_classes, m.max_degree, cap)
    cond = _conditional_matrix(m, enum)
    root = np.sqrt(cond)
    return root @ root.T


def sample_graph_from_model(m: LabelModel, num_nodes: int, seed: int) -> LabeledGraph:
    """Draw a graph whose neighborhoods follow the model exactly.

    Labels are i.i.d. from p; each node draws a degree from its class's q
    row and fills its neighborhood with distinct non-self nodes whose class
    proportions follow z. Neighborhoods are realized independently per node
    as out-edges, which is the idealization under which the bound is derived
    rather than a globally consistent simple graph.
    """
    if m.q is None or m.q.size == 0:
        raise ModelIncomplete("model has no degree distribution")
    z = m.z
    z_defined = m.z_defined
    if z is None or z.size == 0:
        if m.c is None:
            raise ModelIncomplete("model defines neither z nor c")
        weighted = m.p[None, :] * m.c
        denom = weighted.sum(axis=1)
        z_defined = denom > 0
        z = np.divide(weighted, denom[:, None], out=np.zeros_like(weighted), where=z_defined[:, None])
    if m.max_degree > 0 and num_nodes < 50 * m.max_degree:
        warnings.warn(
            f"num_nodes={num_nodes} is small next to max degree {m.max_degree}; "
            "the label-dependent connectivity assumptions need N >> D",
            stacklevel=2,
        )

    rng = np.random.default_rng(seed)
    p = m.p / m.p.sum()
    labels = rng.choice(m.num_classes, size=num_nodes, p=p)
    members = [np.flatnonzero(labels == k) for k in range(m.num_classes)]

    degrees = np.zeros(num_nodes, dtype=np.int64)
    for k in range(m.num_classes):
        if members[k].size:
            q_row = m.q[k] / m.q[k].sum()
            degrees[members[k]] = rng.choice(m.max_degree + 1, size=members[k].size, p=q_row)

    src: list[int] = []
    dst: list[int] = []
    for i in range(num_nodes):
        d = int(degrees[i])
        if d == 0:
            continue
        s = int(labels[i])
        if not z_defined[s]:
            raise ModelIncomplete(f"class {s} draws degree {d} but has undefined z")
        z_row = z[s] / z[s].sum()
        class_draws = rng.multinomial(d, z_row)
        picked: list[int] = []
        for k in np.flatnonzero(class_draws):
            pool = members[k]
            # self is never a candidate in its own class pool
            available = int(pool.size) - (1 if k == s else 0)
            want = min(int(class_draws[k]), available)
            taken = 0
            while taken < want:
                j = int(pool[rng.integers(pool.size)])
                if j != i and j not in picked:
                    picked.append(j)
                    taken += 1
        src.extend([i] * len(picked))
        dst.extend(picked)

    edges = np.column_stack([src, dst]) if src else np.empty((0, 2), dtype=np.int64)
    return LabeledGraph(
        labels=np.asarray(labels, dtype=np.int64),
        edges=edges,
        num_classes=m.num_classes,
        direction_mode="out_neighbors",
    )

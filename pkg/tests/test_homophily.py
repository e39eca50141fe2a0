import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nicgraph.errors import DegenerateMixing, EmptyGraph
from nicgraph.homophily import (
    assortativity,
    edge_homophily,
    homophily_report,
    mixing_matrix,
    node_homophily,
)

from conftest import directed, random_small_graph, undirected


def two_cliques(k=3):
    """Two disjoint same-label cliques of size k, classes 0 and 1."""
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(i + k, j + k) for i, j in edges]
    return undirected([0] * k + [1] * k, edges)


def test_all_one_class_is_fully_homophilous():
    g = undirected([0, 0, 0], [(0, 1), (1, 2), (0, 2)])
    assert edge_homophily(g) == 1.0
    assert node_homophily(g) == 1.0


def test_two_node_crossing_edge():
    g = undirected([0, 1], [(0, 1)])
    assert edge_homophily(g) == 0.0


def test_star_node_homophily_zero():
    g = undirected([0, 1, 1, 1, 1], [(0, i) for i in range(1, 5)])
    assert node_homophily(g) == 0.0
    assert edge_homophily(g) == 0.0


def test_equal_degree_graph_node_equals_edge():
    # cycles are 2-regular, so the node and edge statistics coincide
    n = 8
    labels = [0, 1, 1, 0, 2, 2, 0, 1]
    g = undirected(labels, [(i, (i + 1) % n) for i in range(n)])
    assert node_homophily(g) == pytest.approx(edge_homophily(g), abs=1e-12)


def test_degree_zero_nodes_excluded():
    g = undirected([0, 0, 1], [(0, 1)], num_classes=2)
    report = homophily_report(g)
    assert report.excluded_zero_degree_nodes == 1
    assert report.h_node == 1.0


def test_mixing_matrix_properties():
    g = undirected([0, 1, 0, 1], [(0, 1), (1, 2), (2, 3), (3, 0)])
    mm = mixing_matrix(g)
    assert mm.e.sum() == pytest.approx(1.0, abs=1e-12)
    assert mm.is_symmetric
    assert edge_homophily(g) == pytest.approx(np.trace(mm.e), abs=1e-12)


def test_perfectly_assortative_cliques():
    assert assortativity(two_cliques()) == pytest.approx(1.0, abs=1e-12)


def test_complete_bipartite_is_perfectly_disassortative():
    g = undirected([0, 0, 1, 1], [(0, 2), (0, 3), (1, 2), (1, 3)])
    mm = mixing_matrix(g)
    assert np.allclose(mm.e, [[0.0, 0.5], [0.5, 0.0]])
    assert assortativity(g) == pytest.approx(-1.0, abs=1e-12)


def test_single_class_mixing_is_degenerate():
    g = undirected([0, 0, 0], [(0, 1), (1, 2)])
    with pytest.raises(DegenerateMixing):
        assortativity(g)
    report = homophily_report(g)
    assert report.degenerate_mixing and report.assortativity is None


def test_diagonal_mixing_with_two_classes_gives_one():
    # diagonal mixing with at least two populated classes pins r at 1
    g = two_cliques(k=4)
    assert assortativity(g) == 1.0


def test_empty_graph_errors():
    g = undirected([0, 1], [], num_classes=2)
    with pytest.raises(EmptyGraph):
        edge_homophily(g)
    with pytest.raises(EmptyGraph):
        node_homophily(g)


def test_directed_mixing_uses_ordered_pairs():
    g = directed([0, 1], [(0, 1)])
    mm = mixing_matrix(g)
    assert mm.e[0, 1] == 1.0
    assert not mm.is_symmetric


@given(st.integers(0, 2**32 - 1), st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_label_permutation_invariance(seed, perm_seed):
    g = random_small_graph(np.random.default_rng(seed))
    perm = np.random.default_rng(perm_seed).permutation(g.num_classes)
    relabeled = type(g)(
        labels=perm[g.labels],
        edges=g.edges,
        num_classes=g.num_classes,
        direction_mode=g.direction_mode,
    )
    assert edge_homophily(relabeled) == pytest.approx(edge_homophily(g), abs=1e-12)
    assert node_homophily(relabeled) == pytest.approx(node_homophily(g), abs=1e-12)
    try:
        expected = assortativity(g)
    except DegenerateMixing:
        with pytest.raises(DegenerateMixing):
            assortativity(relabeled)
    else:
        assert assortativity(relabeled) == pytest.approx(expected, abs=1e-9)

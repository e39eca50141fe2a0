import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nicgraph.errors import EnumerationTooLarge, ModelIncomplete
from nicgraph.nic import LabelModel, bhattacharyya_matrix, estimate_model, nic
from nicgraph.oracle import (
    bhattacharyya_by_enumeration,
    config_prob_given_label,
    enumerate_configs,
    exact_mi,
    sample_graph_from_model,
)

from conftest import random_label_model, random_model_with_c


def test_enumeration_two_classes_degree_two():
    enum = enumerate_configs(2, 2)
    assert enum.counts.tolist() == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]


def test_enumeration_single_class():
    enum = enumerate_configs(1, 3)
    assert enum.counts.tolist() == [[0], [1], [2], [3]]


def test_enumeration_three_classes_degree_two():
    enum = enumerate_configs(3, 2)
    assert len(enum) == 10  # 1 + 3 + 6


@given(st.integers(1, 4), st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_enumeration_is_complete_and_duplicate_free(c, d):
    enum = enumerate_configs(c, d)
    expected = sum(math.comb(k + c - 1, c - 1) for k in range(d + 1))
    assert len(enum) == expected
    assert len({tuple(row) for row in enum.counts.tolist()}) == expected
    assert int(enum.counts.sum(axis=1).max(initial=0)) <= d


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        enumerate_configs(10, 50, cap=1000)


def test_config_prob_empty_configuration():
    m = LabelModel.from_arrays(p=[1.0], z=[[1.0]], q=[[0.3, 0.7]])
    assert config_prob_given_label(m, [0], 0) == pytest.approx(0.3)


def test_config_prob_deterministic_neighborhood():
    m = LabelModel.from_arrays(
        p=[0.5, 0.5],
        z=[[1.0, 0.0], [0.0, 1.0]],
        q=[[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
    )
    assert config_prob_given_label(m, [2, 0], 0) == pytest.approx(1.0)


def test_config_prob_multinomial_weight():
    m = LabelModel.from_arrays(
        p=[0.5, 0.5],
        z=[[0.5, 0.5], [0.5, 0.5]],
        q=[[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
    )
    assert config_prob_given_label(m, [1, 1], 0) == pytest.approx(0.5)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_conditional_distribution_normalizes(seed):
    rng = np.random.default_rng(seed)
    m = random_label_model(rng, int(rng.integers(2, 4)), int(rng.integers(1, 6)))
    enum = enumerate_configs(m.num_classes, m.max_degree)
    for s in range(m.num_classes):
        total = sum(config_prob_given_label(m, row, s) for row in enum.counts)
        assert total == pytest.approx(1.0, abs=1e-9)


def test_exact_mi_single_class_is_zero():
    m = LabelModel.from_arrays(p=[1.0], z=[[1.0]], q=[[0.2, 0.8]])
    assert exact_mi(m).mi_nats == pytest.approx(0.0, abs=1e-12)


def test_exact_mi_deterministic_channel():
    m = LabelModel.from_arrays(
        p=[0.5, 0.5],
        z=[[1.0, 0.0], [0.0, 1.0]],
        q=[[0.0, 1.0], [0.0, 1.0]],
    )
    result = exact_mi(m)
    assert result.mi_nats == pytest.approx(np.log(2), abs=1e-12)
    assert result.mi_nats == pytest.approx(result.h_marginal - result.h_conditional, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_mi_entropy_chain(seed):
    rng = np.random.default_rng(seed)
    m = random_label_model(rng, int(rng.integers(2, 4)), int(rng.integers(1, 6)))
    result = exact_mi(m)
    assert result.mi_nats >= -1e-12
    assert result.h_marginal >= result.h_conditional - 1e-12
    assert result.mi_nats <= m.label_entropy() + 1e-9
    assert nic(m).nic_nats <= result.mi_nats + 1e-9


def test_bd_closed_form_matches_enumeration():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        m = random_label_model(rng, int(rng.integers(2, 4)), int(rng.integers(1, 7)))
        direct = bhattacharyya_by_enumeration(m)
        closed = bhattacharyya_matrix(m)
        assert np.max(np.abs(direct - closed)) <= 1e-9


def test_degree_zero_mass_requires_the_full_sum():
    # with mass on empty neighborhoods, dropping the d=0 term understates BD
    m = LabelModel.from_arrays(
        p=[0.5, 0.5],
        z=[[0.9, 0.1], [0.1, 0.9]],
        q=[[0.4, 0.6], [0.4, 0.6]],
    )
    enumerated = bhattacharyya_by_enumeration(m)[0, 1]
    closed = bhattacharyya_matrix(m)[0, 1]
    assert closed == pytest.approx(enumerated, abs=1e-12)
    no_zero = closed - math.sqrt(m.q[0, 0] * m.q[1, 0])
    assert no_zero < enumerated - 0.1


def test_sampler_exact_degree_single_class():
    m = LabelModel.from_arrays(p=[1.0], z=[[1.0]], q=[[0.0, 0.0, 1.0]])
    g = sample_graph_from_model(m, num_nodes=100, seed=1)
    assert g.direction_mode == "out_neighbors"
    assert np.all(g.degrees() == 2)
    assert not g.has_self_loops


def test_sampler_requires_distributions():
    m = LabelModel(
        num_classes=2,
        max_degree=1,
        p=np.array([0.5, 0.5]),
        z=np.empty((0, 0)),
        q=np.array([[0.0, 1.0], [0.0, 1.0]]),
        z_defined=np.array([True, True]),
        c=None,
    )
    with pytest.raises(ModelIncomplete):
        sample_graph_from_model(m, num_nodes=10, seed=0)


def test_sampler_derives_z_from_c():
    rng = np.random.default_rng(3)
    with_c = random_model_with_c(rng, 2, 2)
    bare = LabelModel(
        num_classes=2,
        max_degree=2,
        p=with_c.p,
        z=np.empty((0, 0)),
        q=with_c.q,
        z_defined=np.array([True, True]),
        c=with_c.c,
    )
    g = sample_graph_from_model(bare, num_nodes=500, seed=2)
    assert g.num_nodes == 500


def test_sampler_warns_on_small_population():
    m = LabelModel.from_arrays(p=[1.0], z=[[1.0]], q=[[0.0, 0.0, 1.0]])
    with pytest.warns(UserWarning, match="small next to max degree"):
        sample_graph_from_model(m, num_nodes=60, seed=0)


def test_sampler_statistics_recovered_quickly():
    rng = np.random.default_rng(11)
    m = random_model_with_c(rng, 2, 3)
    g = sample_graph_from_model(m, num_nodes=20_000, seed=4)
    est = estimate_model(g)
    assert np.max(np.abs(est.p - m.p)) <= 0.02
    assert np.max(np.abs(est.z[est.z_defined] - m.z[est.z_defined])) <= 0.05

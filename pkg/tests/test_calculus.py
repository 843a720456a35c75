import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracsob.calculus import (
    ScalarField,
    apply_p,
    ball_average,
    dirichlet_energy,
    edge_seminorm,
    energy_p,
    gradient_field,
    lp_norm,
    pseudo_average_field,
)
from fracsob.errors import InsufficientRoom, ValidationError
from fracsob.experiments import random_fields
from fracsob.generators import lattice_box, path_graph, vicsek
from fracsob.graph import ball


def test_apply_p_examples(path3, single_edge):
    np.testing.assert_array_equal(apply_p(path3, np.full(3, 2.5)), 2.5)
    np.testing.assert_array_equal(apply_p(path3, [0, 1, 0]), [1, 0, 1])
    np.testing.assert_array_equal(apply_p(single_edge, [1, 0]), [0, 1])


def test_gradient_examples(single_edge, long_path):
    np.testing.assert_array_equal(gradient_field(single_edge, [3, 3]), 0)
    np.testing.assert_allclose(gradient_field(single_edge, [1, 0]), [2 ** -0.5] * 2)
    grad = gradient_field(long_path, np.arange(401.0))
    assert grad[200] == pytest.approx(2 ** -0.5)


def test_lp_norm_examples(single_edge, path3):
    assert lp_norm(path3, np.zeros(3), 2) == 0
    assert lp_norm(single_edge, [1, 0], 1) == 1
    assert lp_norm(path3, [1, 1, 1], 2) == pytest.approx(2.0)
    assert lp_norm(path3, [1, -3, 2], math.inf) == 3
    assert lp_norm(path3, [1, -3, 2], 1, restrict_to=[0, 2]) == 3
    with pytest.raises(ValidationError):
        lp_norm(path3, [1, 1, 1], 0.5)


def test_edge_seminorm_examples(single_edge, path3):
    assert edge_seminorm(path3, [4, 4, 4], 2) == 0
    for p in (1, 2, 3.5):
        assert edge_seminorm(single_edge, [1, 0], p) == pytest.approx(2 ** (1 / p))
    assert edge_seminorm(path3, [0, 1, 0], 1) == 4


def test_ball_average_examples(path3):
    assert ball_average(path3, [0, 1, 0], 1, 1) == 0.5
    assert ball_average(path3, [7, 7, 7], 0, 2) == 7
    m = vicsek(2, 1)
    f = np.zeros(5)
    f[m.center] = 1
    assert ball_average(m.graph, f, m.center, 1) == 0.5


def test_pseudo_average_constant_and_guard(long_path):
    f = ScalarField(np.where(np.abs(np.arange(401) - 200) <= 20, 1.0, 0.0))
    fn = pseudo_average_field(long_path, f, 3)
    np.testing.assert_allclose(fn[190:211], 1.0)
    assert fn[150] == 0
    edge = ScalarField(np.eye(401)[2])
    with pytest.raises(InsufficientRoom, match="vertex 0"):
        pseudo_average_field(long_path, edge, 3)


def test_pseudo_average_matches_ball_average(v2_4):
    g = v2_4.graph
    members = ball(g, v2_4.center, 6).members
    f = random_fields(g, members, 1, 3, smoothing=(0,))[0]
    fn = pseudo_average_field(g, f, 2)
    for x in members[::7]:
        assert fn[x] == pytest.approx(ball_average(g, f, x, 2), rel=1e-13)


def test_dirichlet_energy_examples(single_edge, v2_3):
    assert dirichlet_energy(single_edge, [2, 2]) == 0
    assert dirichlet_energy(single_edge, [1, 0]) == pytest.approx(1.0)
    g = v2_3.graph
    for f in random_fields(g, np.arange(g.vertex_count), 100, 1):
        e1 = dirichlet_energy(g, f)
        e2 = lp_norm(g, gradient_field(g, f), 2) ** 2
        assert e1 == pytest.approx(e2, rel=1e-10)


@pytest.mark.parametrize("graph", [vicsek(2, 3).graph, lattice_box(2, 8), path_graph(30)],
                         ids=["vicsek", "lattice", "path"])
@pytest.mark.parametrize("p", [1, 1.5, 2, 3])
def test_gradient_seminorm_equivalence(graph, p):
    c2, N = graph.controlled_weight_constant, graph.max_degree
    lo, hi = 2 ** (p / 2) * c2, 2 ** (p / 2) * N * c2 ** (-p / 2)
    for f in random_fields(graph, np.arange(graph.vertex_count), 100, 9):
        ratio = edge_seminorm(graph, f, p) ** p / energy_p(graph, f, p)
        assert lo <= ratio <= hi


def test_ball_average_minimizes_l2(v2_3):
    g = v2_3.graph
    f = random_fields(g, np.arange(g.vertex_count), 1, 4)[0]
    b = ball(g, v2_3.center, 4)
    mean = ball_average(g, f, v2_3.center, 4)
    best = lp_norm(g, f.values - mean, 2, b.members)
    for c in np.linspace(mean - 1, mean + 1, 41):
        assert lp_norm(g, f.values - c, 2, b.members) >= best - 1e-14


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=21, max_size=21), st.floats(-50, 50))
def test_apply_p_contraction_and_constants(values, c):
    g = vicsek(2, 2).graph
    f = np.array(values)
    assert np.abs(apply_p(g, f)).max() <= np.abs(f).max() + 1e-9
    np.testing.assert_allclose(apply_p(g, np.full(21, c)), c, rtol=1e-14, atol=1e-12)


def test_scalar_field_support_checked():
    with pytest.raises(ValidationError):
        ScalarField([1.0, 0.0, 2.0], support=[0])
    f = ScalarField([1.0, 0.0, 2.0], support=[2, 0])
    assert f.support.tolist() == [0, 2]

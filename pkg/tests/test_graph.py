import itertools

import numpy as np
import pytest

from fracsob.errors import (
    DisconnectedGraph,
    DuplicateEdge,
    EmptyDomain,
    NonPositiveWeight,
    SelfLoop,
    ValidationError,
)
from fracsob.graph import ball, build_graph, distance, distances_from, make_domain


def test_single_edge(single_edge):
    g = single_edge
    assert list(g.measure) == [1.0, 1.0]
    assert g.probs.tolist() == [1.0, 1.0]
    assert g.controlled_weight_constant == 1.0
    assert g.max_degree == 1


def test_path_kernel_values(path3):
    g = path3
    assert g.measure[1] == 2
    row = dict(zip(g.neighbors(1).tolist(), g.probs[g.indptr[1]:g.indptr[2]].tolist()))
    assert row == {0: 0.5, 2: 0.5}


@pytest.mark.parametrize(
    "edges, error",
    [
        ([(0, 1, 1), (1, 0, 1)], DuplicateEdge),
        ([(0, 0, 1)], SelfLoop),
        ([(0, 1, 0.0)], NonPositiveWeight),
        ([(0, 1, -2.0)], NonPositiveWeight),
        ([(0, 1, 1), (2, 3, 1)], DisconnectedGraph),
        ([], ValidationError),
    ],
)
def test_build_graph_rejects(edges, error):
    with pytest.raises(error) as exc:
        build_graph(edges)
    if edges:
        assert any(ch.isdigit() for ch in str(exc.value))


def test_isolated_vertex_rejected():
    with pytest.raises(DisconnectedGraph, match="vertex 2"):
        build_graph([(0, 1, 1.0)], vertex_count=3)


def test_weighted_invariants():
    g = build_graph([(0, 1, 2.0), (1, 2, 0.5), (2, 0, 1.5), (2, 3, 4.0)])
    W = g.weight_matrix.toarray()
    assert np.array_equal(W, W.T)
    np.testing.assert_array_equal(g.measure, W.sum(axis=1))
    np.testing.assert_allclose(g.transition_matrix.sum(axis=1).A.ravel(), 1.0, atol=1e-12)
    assert g.controlled_weight_constant == pytest.approx(0.5 / 6.0)  # p(2, 1), mu(2) = 0.5 + 1.5 + 4
    assert not g.measure.flags.writeable


def test_distance_examples(path3, v2_3):
    assert distance(path3, 1, 1) == 0
    assert distance(path3, 0, 2) == 2
    from fracsob.generators import vicsek
    m = vicsek(2, 2)
    assert {distance(m.graph, m.center, c) for c in m.corners} == {3}


def test_distance_is_metric(v2_3):
    g = v2_3.graph
    full = np.array([distances_from(g, x) for x in range(g.vertex_count)])
    assert np.all(np.diag(full) == 0)
    assert np.array_equal(full, full.T)
    # triangle inequality, exhaustive over all triples
    assert np.all(full[:, None, :] <= full[:, :, None] + full[None, :, :])


def test_ball_examples(long_path):
    from fracsob.generators import vicsek
    b0 = ball(long_path, 7, 0)
    assert b0.members.tolist() == [7]
    m = vicsek(2, 1)
    b = ball(m.graph, m.center, 1)
    assert len(b) == 5 and b.measure(m.graph) == 8
    from fracsob.generators import path_graph
    assert ball(path_graph(5), 2, 1).members.tolist() == [1, 2, 3]


def test_ball_monotone_and_exhaustive(v2_3):
    g = v2_3.graph
    sizes = [len(ball(g, 11, n)) for n in range(0, 40)]
    assert sizes == sorted(sizes)
    diameter = max(distances_from(g, x).max() for x in range(g.vertex_count))
    assert len(ball(g, 11, diameter)) == g.vertex_count
    assert ball(g, 11, 4).distances.max() <= 4


def test_domain_examples(long_path, v2_3):
    d1 = make_domain(long_path, [100])
    assert d1.inradius == 0 and d1.measure == 2
    d3 = make_domain(long_path, [100, 101, 102])
    assert d3.boundary_measure == 2 and d3.measure == 6 and d3.inradius == 1
    block, _ = v2_3.central_block(1)
    db = make_domain(v2_3.graph, block)
    assert db.measure == 4 + 4 * 2
    assert db.inradius == 1
    with pytest.raises(EmptyDomain):
        make_domain(long_path, [])


def brute_inradius(g, members):
    inside = set(members)
    best = -1
    for x in members:
        for r in itertools.count():
            if set(ball(g, x, r).members.tolist()) <= inside:
                best = max(best, r)
            else:
                break
    return best


@pytest.mark.parametrize("seed", range(6))
def test_inradius_brute_force(v2_3, grid, seed):
    rng = np.random.default_rng(seed)
    for g in (v2_3.graph, grid):
        start = int(rng.integers(g.vertex_count))
        members = ball(g, start, int(rng.integers(1, 5))).members
        # drop a few vertices to make ragged domains
        keep = members[rng.random(len(members)) > 0.2]
        if keep.size == 0 or keep.size == g.vertex_count:
            continue
        assert make_domain(g, keep).inradius == brute_inradius(g, keep.tolist())


def test_domain_covering_graph_rejected(path3):
    with pytest.raises(ValidationError):
        make_domain(path3, [0, 1, 2])

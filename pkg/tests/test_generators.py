import math

import numpy as np
import pytest

from fracsob.errors import SizeCapExceeded, ValidationError
from fracsob.experiments import fit_exponent, volume_sweep
from fracsob.generators import lattice_box, path_graph, vicsek, vicsek_counts
from fracsob.graph import distances_from, frontier_distance


def test_vicsek_gen1():
    m = vicsek(2, 1)
    g = m.graph
    assert (g.vertex_count, g.edge_count) == (5, 4)
    assert g.degrees[m.center] == 4
    assert all(g.degrees[c] == 1 for c in m.corners)


def test_vicsek_gen2():
    m = vicsek(2, 2)
    assert (m.graph.vertex_count, m.graph.edge_count) == (21, 20)
    assert m.diagonal_length == 3


def test_vicsek_d1_is_path():
    m = vicsek(1, 2)
    g = m.graph
    assert (g.vertex_count, g.edge_count) == (7, 6)
    assert g.max_degree == 2
    assert m.dimension_D == pytest.approx(1.0)


@pytest.mark.parametrize("d, kmax", [(1, 6), (2, 6), (3, 5)])
def test_vicsek_invariants(d, kmax):
    for k in range(1, kmax + 1):
        m = vicsek(d, k)
        g = m.graph
        V, E = vicsek_counts(d, k)
        assert g.vertex_count == V and g.edge_count == E
        assert g.edge_count == g.vertex_count - 1
        dist = distances_from(g, m.center)
        assert len(m.corners) == 2 ** d
        assert {int(dist[c]) for c in m.corners} == {3 ** (k - 1)}
        np.testing.assert_allclose(g.transition_matrix.sum(axis=1).A.ravel(), 1.0, atol=1e-12)


def test_vicsek_recurrence():
    for d in (1, 2, 3, 4):
        V, E = vicsek_counts(d, 1)
        assert V == 2 ** d + 1
        for k in range(2, 6):
            Vk, Ek = vicsek_counts(d, k)
            assert Vk == (2 ** d + 1) * V - 2 ** d
            assert Ek == 2 ** d * (2 ** d + 1) ** (k - 1)
            V = Vk


def test_vicsek_d3_gen6():
    m = vicsek(3, 6)
    assert m.graph.vertex_count == vicsek_counts(3, 6)[0]


def test_vicsek_deterministic():
    a, b = vicsek(2, 4), vicsek(2, 4)
    assert a.graph.edges() == b.graph.edges()
    assert np.array_equal(a.graph.coordinates, b.graph.coordinates)
    keys = [tuple(c) for c in a.graph.coordinates.tolist()]
    assert keys == sorted(keys)


def test_vicsek_caps(monkeypatch):
    with pytest.raises(SizeCapExceeded):
        vicsek(2, 6, max_vertices_cap=1000)
    monkeypatch.setenv("FRACSOB_MAX_VERTICES", "100")
    with pytest.raises(SizeCapExceeded):
        vicsek(2, 4)
    with pytest.raises(ValidationError):
        vicsek(7, 1)


def test_lattice_box():
    g = lattice_box(1, 5)
    assert g.edges() == [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]
    g2 = lattice_box(2, 3)
    assert (g2.vertex_count, g2.edge_count) == (9, 12)


def test_lattice_volume_exponent():
    g = lattice_box(2, 100)
    c = g.markers["center"]
    fit = fit_exponent(volume_sweep(g, c, [4, 8, 16, 32, 48]))
    assert fit.slope == pytest.approx(2.0, abs=0.1)


def test_frontier_distance(v2_4):
    m = vicsek(2, 2)
    assert frontier_distance(m, m.center) == 3
    assert frontier_distance(path_graph(5), 2) == 2
    assert frontier_distance(m.graph, m.corners[0]) == 0
    assert frontier_distance(lattice_box(2, 9), 0) == 0


def test_volume_law(v2_6):
    fit = fit_exponent(volume_sweep(v2_6.graph, v2_6.center, [3 ** m for m in range(1, 6)]), 0)
    assert abs(fit.slope - math.log(5, 3)) <= 0.1


def test_central_block(v2_4):
    members, corners = v2_4.central_block(2)
    assert len(members) == 21 and len(corners) == 4
    assert v2_4.block_diagonal_length(2) == 3

import math

import numpy as np
import pytest
import scipy.linalg as la
from scipy.sparse.csgraph import shortest_path

from fracsob.calculus import ScalarField
from fracsob.errors import BallTooLarge, InsufficientRoom, ZeroField, ZeroGradient
from fracsob.experiments import extremal_field, poincare_candidate, random_fields
from fracsob.generators import lattice_box, vicsek
from fracsob.graph import ball, build_graph, make_domain
from fracsob.inequalities import (
    _dirichlet_blocks,
    _log_quotient,
    faber_krahn_lambda1,
    maximize_sobolev_quotient,
    path_kernel_bound,
    path_kernel_k,
    poincare_exponent,
    poincare_quotient,
    pseudo_poincare_quotient,
    sobolev_exponent,
    sobolev_quotient,
)

D2 = math.log(5, 3)


def brute_poincare(g, f, x, n, p):
    """Both norms from explicit neighbor loops and all-pairs distances."""
    dist = shortest_path(g.weight_matrix, unweighted=True, indices=[x])[0]
    nbrs = {v: [] for v in range(g.vertex_count)}
    for u, v, w in g.edges():
        nbrs[u].append((v, w))
        nbrs[v].append((u, w))
    mu = {v: sum(w for _, w in nbrs[v]) for v in nbrs}
    inner = [v for v in nbrs if dist[v] <= n]
    outer = [v for v in nbrs if dist[v] <= 2 * n]
    mean = sum(f[v] * mu[v] for v in inner) / sum(mu[v] for v in inner)
    num = sum(abs(f[v] - mean) ** p * mu[v] for v in inner) ** (1 / p)
    grad = {v: math.sqrt(0.5 * sum(w / mu[v] * (f[v] - f[y]) ** 2 for y, w in nbrs[v])) for v in outer}
    den = sum(grad[v] ** p * mu[v] for v in outer) ** (1 / p)
    return num / den


def test_poincare_path_example(long_path):
    f = np.arange(401.0) - 200
    # numerator^2 = 2 + 0 + 2, denominator^2 = 5 vertices * mu 2 * |grad|^2 1/2
    assert poincare_quotient(long_path, f, 200, 1, 2) == pytest.approx(math.sqrt(4 / 5))


def test_poincare_degenerate(long_path):
    with pytest.raises(ZeroGradient):
        poincare_quotient(long_path, np.ones(401), 200, 3, 2)
    with pytest.raises(InsufficientRoom):
        poincare_quotient(long_path, np.arange(401.0), 5, 3, 2)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_poincare_vicsek_against_brute_force(v2_4, p):
    f = poincare_candidate(v2_4, 9)
    q = poincare_quotient(v2_4.graph, f, v2_4.center, 9, p)
    assert 0 < q < math.inf
    assert q == pytest.approx(brute_poincare(v2_4.graph, f.values, v2_4.center, 9, p), rel=1e-12)


def test_pseudo_poincare_examples(long_path, v2_6):
    f = ScalarField(np.eye(401)[200])
    assert pseudo_poincare_quotient(long_path, f, 0, 1) == 0
    # f_1 = 1/3 on {199, 200, 201}: ||f - f_1||_1 = 2*(2/3) + 2*2*(1/3) = 8/3
    # ||grad f||_1 = 2 * 2**-0.5 + 2 * (2 * 1/2) = sqrt(2) + 2
    assert pseudo_poincare_quotient(long_path, f, 1, 1) == pytest.approx((8 / 3) / (2 + math.sqrt(2)))
    m = vicsek(2, 5)
    F3 = extremal_field(m, 3)
    q = pseudo_poincare_quotient(m.graph, F3, 9, 2)
    assert 0 < q < math.inf


def test_sobolev_lattice_indicator():
    g = lattice_box(2, 9)
    x = g.markers["center"]
    f = ScalarField(np.eye(g.vertex_count)[x], [x])
    # ||f||_1 = mu(x) = 4; |grad f|(x) = 2**-0.5, each of the 4 neighbors has |grad f| = 1/sqrt(8)
    expected = 4 / (4 * 2 ** -0.5 + 4 * 4 * 8 ** -0.5)
    assert sobolev_quotient(g, f, 1) == pytest.approx(expected)
    assert sobolev_quotient(g, f, 1) == pytest.approx(1 / (2 ** -0.5 + math.sqrt(2)))


@pytest.mark.parametrize("p", [1, 2, 3, 1.5])
def test_sobolev_f1_embedded(v2_3, p):
    F1 = extremal_field(v2_3, 1)
    # center: mu 4, |grad|^2 = 1/2 ; four corners of degree 2: mu 2, |grad|^2 = 1/4
    expected = 4 ** (1 / p) / (4 * 2 ** (-p / 2) + 8 * 2 ** -p) ** (1 / p)
    assert sobolev_quotient(v2_3.graph, F1, p) == pytest.approx(expected, rel=1e-13)


def test_quotients_homogeneous(v2_4):
    g = v2_4.graph
    members, _ = v2_4.central_block(3)
    for f in random_fields(g, members, 5, 2):
        for c in (2.0, -0.37, 1e3):
            for p in (1, 2, 3):
                assert sobolev_quotient(g, f.scaled(c), p) == pytest.approx(sobolev_quotient(g, f, p), rel=1e-12)
                a = poincare_quotient(g, f.scaled(c), v2_4.center, 4, p)
                assert a == pytest.approx(poincare_quotient(g, f, v2_4.center, 4, p), rel=1e-12)


def test_sobolev_zero_field(v2_3):
    with pytest.raises(ZeroField):
        sobolev_quotient(v2_3.graph, np.zeros(v2_3.graph.vertex_count), 2)


def test_faber_krahn_single_vertex(long_path):
    assert faber_krahn_lambda1(long_path, make_domain(long_path, [200])).lambda1 == pytest.approx(1.0)


def test_faber_krahn_two_vertices(long_path):
    fk = faber_krahn_lambda1(long_path, make_domain(long_path, [200, 201]))
    assert fk.lambda1 == pytest.approx(0.5, rel=1e-12)


def dense_lambda1(g, dom):
    A, d = _dirichlet_blocks(g, dom)
    return la.eigh(A.toarray(), np.diag(d), eigvals_only=True)[0]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_faber_krahn_dense_oracle(v2_4, n):
    g = v2_4.graph
    dom = make_domain(g, v2_4.central_block(n)[0])
    assert faber_krahn_lambda1(g, dom).lambda1 == pytest.approx(dense_lambda1(g, dom), rel=1e-8)


def test_faber_krahn_ragged_domain(grid):
    dom = make_domain(grid, [v for v in ball(grid, 40, 3).members if v % 3])
    assert faber_krahn_lambda1(grid, dom).lambda1 == pytest.approx(dense_lambda1(grid, dom), rel=1e-8)


def test_faber_krahn_inequality(v2_4):
    g = v2_4.graph
    dom = make_domain(g, v2_4.central_block(3)[0])
    assert faber_krahn_lambda1(g, dom).lambda1 * dom.inradius * dom.measure > 1


def test_faber_krahn_rejects_frontier(v2_3):
    with pytest.raises(InsufficientRoom):
        faber_krahn_lambda1(v2_3.graph, make_domain(v2_3.graph, v2_3.central_block(2)[0].tolist() + [v2_3.corners[0]]))


def test_maximize_p2_two_vertices(long_path):
    rep = maximize_sobolev_quotient(long_path, make_domain(long_path, [200, 201]), 2)
    assert rep.value ** 2 == pytest.approx(2.0, rel=1e-10)


def test_maximize_keeps_true_extremizer():
    g = build_graph([(i, i + 1, 1.0) for i in range(9)])
    dom = make_domain(g, [3, 4, 5])
    vec = np.zeros(10)
    vec[[3, 4, 5]] = [1, math.sqrt(2), 1]  # Dirichlet eigenvector of the 3-vertex path
    seed_q = sobolev_quotient(g, ScalarField(vec, dom.members), 2)
    rep = maximize_sobolev_quotient(g, dom, 2, seeds=[vec])
    assert rep.value >= seed_q - 1e-12
    assert rep.value == pytest.approx(seed_q, rel=1e-9)
    rep3 = maximize_sobolev_quotient(g, dom, 3, seeds=[vec])
    assert rep3.value >= sobolev_quotient(g, ScalarField(vec, dom.members), 3)


def test_maximize_p3_beats_seed(v2_4):
    g = v2_4.graph
    F3 = extremal_field(v2_4, 3)
    dom = make_domain(g, F3.support)
    rep = maximize_sobolev_quotient(g, dom, 3, seeds=[F3], iters=1500)
    assert rep.value >= sobolev_quotient(g, F3, 3)
    assert rep.value == pytest.approx(sobolev_quotient(g, rep.witness, 3), rel=1e-8)


def test_maximize_p1_evaluates_seeds(v2_4):
    g = v2_4.graph
    F2 = extremal_field(v2_4, 2)
    dom = make_domain(g, F2.support)
    rep = maximize_sobolev_quotient(g, dom, 1, seeds=[F2])
    assert rep.value == sobolev_quotient(g, F2, 1)
    with pytest.raises(ZeroField):
        maximize_sobolev_quotient(g, dom, 1)


def test_maximize_p2_matches_lambda1(v2_4):
    g = v2_4.graph
    for n in (2, 3):
        dom = make_domain(g, v2_4.central_block(n)[0])
        rep = maximize_sobolev_quotient(g, dom, 2)
        assert rep.value == pytest.approx(dense_lambda1(g, dom) ** -0.5, rel=1e-6)
        assert rep.value == pytest.approx(sobolev_quotient(g, rep.witness, 2), rel=1e-8)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_log_quotient_gradient_finite_differences(v2_3, p):
    g = v2_3.graph
    idx = v2_3.central_block(2)[0]
    v = random_fields(g, idx, 1, 17, smoothing=(1,))[0].values.copy()
    _, grad, _ = _log_quotient(g, v, p, idx)
    h = 1e-6
    for k in range(0, len(idx), 4):
        e = np.zeros_like(v)
        e[idx[k]] = h
        fd = (_log_quotient(g, v + e, p, idx)[0] - _log_quotient(g, v - e, p, idx)[0]) / (2 * h)
        assert grad[k] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_path_kernel_example(long_path):
    # {199, 200, 201}, mu = 2: K = 4 * (1+2+1+1+2+1) = 32
    assert path_kernel_k(long_path, 200, 1, 2) == 32
    assert path_kernel_bound(long_path, 200, 1, 2) == 72
    assert path_kernel_k(long_path, 200, 1, 1) == ball(long_path, 200, 1).measure(long_path) ** 2


def test_path_kernel_brute_force(v2_4, grid):
    rng = np.random.default_rng(0)
    for g in (v2_4.graph, grid):
        for _ in range(10):
            x = int(rng.integers(g.vertex_count))
            room = g.frontier_distances[x]
            if room < 3:
                continue
            n = int(rng.integers(1, (room - 1) // 2 + 1))
            members = ball(g, x, n).members
            if len(members) > 60:
                continue
            dist = shortest_path(g.weight_matrix, unweighted=True, indices=members)[:, members]
            mu = g.measure[members]
            for p in (1, 2, 3):
                expected = sum(
                    (dist[i, j] ** (p - 1) if i != j or p == 1 else 0) * mu[i] * mu[j]
                    for i in range(len(members)) for j in range(len(members))
                )
                got = path_kernel_k(g, x, n, p)
                assert got == expected
                assert got <= path_kernel_bound(g, x, n, p)


def test_path_kernel_guards(long_path):
    with pytest.raises(BallTooLarge):
        path_kernel_k(long_path, 200, 50, 2, max_ball=10)
    with pytest.raises(InsufficientRoom):
        path_kernel_k(long_path, 3, 2, 2)


def test_exponents():
    assert poincare_exponent(2, D2) == pytest.approx((D2 + 1) / 2)
    assert poincare_exponent(1, D2) == D2
    assert sobolev_exponent(1, D2) == 1
    assert sobolev_exponent(2, D2) == pytest.approx(0.5 + 1 / (2 * D2))
    assert sobolev_exponent(2, D2) == pytest.approx(0.8413, abs=1e-4)

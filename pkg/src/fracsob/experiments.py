"""Scaling experiments on Vicsek graphs and log-log exponent fits.

The extremal field ``F_n`` on the central generation-``n`` block is 1 at the
center, 0 at the block corners, linear along each center-to-corner diagonal
and constant on the branches hanging off a diagonal. Distances along the
diagonals use the measured block diagonal length.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .calculus import ScalarField, apply_p, fsum
from .errors import GenerationTooSmall, InsufficientRoom, NoConvergence, TooFewSamples, ValidationError
from .generators import VicsekModel, vicsek
from .graph import WeightedGraph, ball, distances_from, require_room
from .inequalities import poincare_quotient, sobolev_quotient


@dataclass(frozen=True)
class ScalingSample:
    scale: float
    value: float
    label: str

    def __post_init__(self):
        if not (self.scale > 0 and self.value > 0):
            raise ValidationError(
                f"{self.label} sample needs positive scale and value, got ({self.scale}, {self.value})"
            )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    count: int


def _map(fn, items, parallelism):
    if parallelism and parallelism > 1:
        with ThreadPoolExecutor(parallelism) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def diagonal_attachment(g: WeightedGraph, center: int, corners) -> np.ndarray:
    """For every vertex, the distance from ``center`` of its attachment point.

    The diagonals are the shortest paths from ``center`` to each corner; a
    vertex off the diagonals attaches at its nearest diagonal vertex. Intended
    for trees, where both notions are unique.
    """
    dist = distances_from(g, center)
    diagonal = {center}
    for c in corners:
        v = int(c)
        while v != center:
            diagonal.add(v)
            nbrs = g.neighbors(v)
            v = int(nbrs[np.flatnonzero(dist[nbrs] == dist[v] - 1)[0]])
    diag = np.array(sorted(diagonal), dtype=np.int64)
    _, origin = kernels.bfs_distances(g.indptr, g.indices, diag, -1)
    return dist[diag[origin]]


def extremal_field(model: VicsekModel, n: int) -> ScalarField:
    """``F_n`` supported on the central generation-``n`` block of ``model``."""
    if n < 1 or n > model.generation:
        raise GenerationTooSmall(f"F_{n} needs 1 <= n <= generation {model.generation}")
    members, corners = model.central_block(n)
    t = diagonal_attachment(model.graph, model.center, corners)
    length = int(distances_from(model.graph, model.center)[corners[0]])
    values = np.zeros(model.graph.vertex_count)
    values[members] = (length - t[members]) / length
    return ScalarField(values, members)


def harmonic_residual(g: WeightedGraph, f, exclude=()) -> float:
    """``max |(I - P) f|`` over the support of ``f`` minus ``exclude``."""
    v = f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=np.float64)
    support = f.nonzero_support() if isinstance(f, ScalarField) else np.flatnonzero(v)
    keep = np.setdiff1d(support, np.asarray(exclude, dtype=np.int64))
    r = (v - apply_p(g, v))[keep]
    return float(np.abs(r).max()) if r.size else 0.0


def poincare_candidate(model: VicsekModel, r: int) -> ScalarField:
    """Tent ``max(0, 1 - t/r)`` along the global diagonals, ``t`` the attachment distance."""
    r = int(r)
    fd = model.graph.frontier_distances[model.center]
    if r < 1 or r > fd:
        raise InsufficientRoom(f"candidate radius {r} must lie in [1, {int(fd)}]")
    t = diagonal_attachment(model.graph, model.center, model.corners)
    values = np.maximum(0.0, 1.0 - t / r)
    return ScalarField(values)


def sobolev_optimality_sweep(d, generations, p, parallelism=1) -> list[ScalingSample]:
    """Samples ``(mu(Omega_n), |||grad F_n|||_p / ||F_n||_p)``.

    ``Omega_n`` is the central block of ``vicsek(d, n + 1)`` so its corners keep
    their interior degree.
    """
    generations = [int(n) for n in generations]
    if not generations or min(generations) < 1:
        raise GenerationTooSmall("sweep generations must be >= 1")

    def one(n):
        model = vicsek(d, n + 1)
        F = extremal_field(model, n)
        q = sobolev_quotient(model.graph, F, p)
        mass = fsum(model.graph.measure[F.support])
        return ScalingSample(mass, 1.0 / q, "sobolev")

    return _map(one, generations, parallelism)


def poincare_optimality_sweep(d, generation, radii, p, parallelism=1) -> list[ScalingSample]:
    """Samples ``(r, poincare_quotient(candidate_r, z0, r, p))`` on ``vicsek(d, generation)``."""
    model = vicsek(d, generation)
    radii = [int(r) for r in radii]
    require_room(model.graph, model.center, 2 * max(radii), "poincare sweep")

    def one(r):
        f = poincare_candidate(model, r)
        return ScalingSample(r, poincare_quotient(model.graph, f, model.center, r, p), "poincare")

    return _map(one, radii, parallelism)


def return_probabilities(g: WeightedGraph, x, kmax) -> np.ndarray:
    """``p_k(x, x)`` for ``k = 0..kmax`` by repeated application of ``P`` to ``1_x``."""
    x, kmax = g.check_vertex(x), int(kmax)
    require_room(g, x, kmax, "return probability")
    v = np.zeros(g.vertex_count)
    v[x] = 1.0
    out = np.empty(kmax + 1)
    out[0] = 1.0
    for k in range(1, kmax + 1):
        v = apply_p(g, v)
        out[k] = v[x]
    return out


def return_probability(g: WeightedGraph, x, kmax) -> list[ScalingSample]:
    """Even-step samples ``(2k, p_2k(x, x))``; odd steps vanish on bipartite graphs."""
    probs = return_probabilities(g, x, kmax)
    return [ScalingSample(k, probs[k], "walk") for k in range(2, len(probs), 2)]


def _exit_system(g, members):
    W = g.weight_matrix[members][:, members].tocsr()
    d = g.measure[members]
    return (sp.diags(d) - W).tocsc(), d, W


def escape_time(g: WeightedGraph, x, r, tol=1e-10, method="direct", max_iter=10_000_000) -> float:
    """Mean exit time ``T(x, r)`` of the walk from ``B(x, r)``.

    Solves ``u = P_B u + 1`` on the ball with ``u = 0`` outside. ``method="direct"``
    uses a sparse LU solve followed by iterative refinement until the fixed-point
    residual is below ``tol`` (relative to ``u``). ``method="fixed-point"`` runs
    the monotone iteration ``u <- P_B u + 1`` from zero; it needs about ``T``
    times ``log(1/tol)`` sweeps.
    """
    x, r = g.check_vertex(x), int(r)
    require_room(g, x, r + 1, "escape time")
    members = ball(g, x, r).members
    A, d, W = _exit_system(g, members)
    P_B = sp.diags(1.0 / d) @ W
    pos = int(np.searchsorted(members, x))

    def residual(u):
        return float(np.abs(P_B @ u + 1.0 - u).max())

    if method == "fixed-point":
        u = np.zeros(len(members))
        for it in range(max_iter):
            nxt = P_B @ u + 1.0
            if np.abs(nxt - u).max() <= tol * max(1.0, nxt.max()):
                return float(nxt[pos])
            u = nxt
        raise NoConvergence(f"fixed-point iteration did not converge in {max_iter} sweeps", max_iter, u[pos])
    if method != "direct":
        raise ValidationError(f"unknown method {method!r}")
    lu = spla.splu(A)
    u = lu.solve(d)
    for it in range(10):
        res = residual(u)
        if res <= tol * max(1.0, float(u.max())):
            return float(u[pos])
        u = u + lu.solve(d * (P_B @ u + 1.0 - u))
    raise NoConvergence(f"exit-time residual {residual(u):.3e} above tolerance", 10, u[pos])


def volume_sweep(g: WeightedGraph, x, radii) -> list[ScalingSample]:
    """Samples ``(r, mu(B(x, r)))``; every ball must stay inside the truncation."""
    x = g.check_vertex(x)
    radii = [int(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] < 1:
        raise ValidationError("radii must be positive and strictly increasing")
    if g.frontier_distances[x] < radii[-1]:
        raise InsufficientRoom(
            f"B({x}, {radii[-1]}) reaches past the frontier at distance {int(g.frontier_distances[x])}"
        )
    vols = [kernels.ball_sums(g.indptr, g.indices, [x], r, g.measure)[0, 0] for r in radii]
    return [ScalingSample(r, v, "volume") for r, v in zip(radii, vols)]


def fit_exponent(samples, skip_smallest=1) -> FitResult:
    """Least-squares line through ``(log scale, log value)``, skipping the smallest scales."""
    pts = sorted(samples, key=lambda s: s.scale)[int(skip_smallest):]
    if len(pts) < 2:
        raise TooFewSamples(f"need at least 2 samples after skipping, have {len(pts)}")
    xs = np.log([s.scale for s in pts])
    ys = np.log([s.value for s in pts])
    if np.ptp(xs) == 0:
        raise TooFewSamples("all samples share one scale")
    xm, ym = fsum(xs) / len(xs), fsum(ys) / len(ys)
    sxx = fsum((xs - xm) ** 2)
    sxy = fsum((xs - xm) * (ys - ym))
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_tot = fsum((ys - ym) ** 2)
    ss_res = fsum((ys - intercept - slope * xs) ** 2)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(slope, intercept, r2, len(pts))


def random_fields(g: WeightedGraph, support, count, seed, smoothing=(0, 2, 8)) -> list[ScalarField]:
    """Seeded random test fields supported on ``support``.

    Uses numpy's PCG64 generator seeded with ``seed``. Field ``i`` draws iid
    uniform values on ``[-1, 1]`` and is then smoothed by
    ``smoothing[i % len(smoothing)]`` applications of ``P`` restricted to the
    support, so the family mixes rough and slowly varying fields.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    support = np.unique(np.asarray(support, dtype=np.int64))
    mask = np.zeros(g.vertex_count, dtype=bool)
    mask[support] = True
    out = []
    for i in range(count):
        v = np.zeros(g.vertex_count)
        v[support] = rng.uniform(-1.0, 1.0, size=len(support))
        for _ in range(smoothing[i % len(smoothing)]):
            v = np.where(mask, apply_p(g, v), 0.0)
        if not np.any(v):
            v[support[0]] = 1.0
        out.append(ScalarField(v, support))
    return out

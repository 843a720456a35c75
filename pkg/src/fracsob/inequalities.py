"""Poincare, pseudo-Poincare, Sobolev and Faber-Krahn quotients.

Quotients put the function side over the gradient side, so an inequality
``||f|| <= C s^a ||grad f||`` holds at scale ``s`` exactly when every quotient
is at most ``C s^a``. Gradients are the vertex gradient ``|grad f|`` of
:mod:`fracsob.calculus`, summed over the whole host graph unless a ball is
named.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .calculus import (
    ScalarField,
    as_values,
    ball_average,
    energy_p,
    fsum,
    gradient_field,
    lp_norm,
    pseudo_average_field,
)
from .errors import BallTooLarge, NoConvergence, ValidationError, ZeroField, ZeroGradient
from .graph import Domain, WeightedGraph, ball, require_room

DEFAULT_MAX_BALL = 5000


def holder_conjugate(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1)


def poincare_exponent(p: float, D: float) -> float:
    """``D/p + 1/p'``: the radius exponent in the Poincare inequality."""
    return D / p + (1 - 1 / p)


def sobolev_exponent(p: float, D: float) -> float:
    """``1/p + 1/(p' D)``: the volume exponent in the Sobolev inequality."""
    return 1 / p + (1 - 1 / p) / D


def _check_p(p):
    p = float(p)
    if not 1 <= p < math.inf:
        raise ValidationError(f"quotients need finite p >= 1, got {p}")
    return p


def poincare_quotient(g: WeightedGraph, f, x, n, p) -> float:
    """``||f - f_B||_{L^p(B(x,n))} / |||grad f|||_{L^p(B(x,2n))}``.

    Raises
    ------
    InsufficientRoom
        If ``B(x, 2n)`` could reach the frontier.
    ZeroGradient
        If ``f`` is constant on ``B(x, 2n)`` and its neighbors.
    """
    p = _check_p(p)
    x, n = g.check_vertex(x), int(n)
    require_room(g, x, 2 * n, "poincare quotient")
    v = as_values(g, f)
    inner = ball(g, x, n)
    outer = ball(g, x, 2 * n)
    mean = ball_average(g, v, x, n)
    num = lp_norm(g, v - mean, p, inner.members)
    den = energy_p(g, v, p, outer.members) ** (1 / p)
    if den == 0:
        raise ZeroGradient(f"gradient vanishes on B({x}, {2 * n})")
    return num / den


def pseudo_poincare_quotient(g: WeightedGraph, f, n, p, room=None) -> float:
    """``||f - f_n||_p / |||grad f|||_p`` for finitely supported ``f``."""
    p = _check_p(p)
    n = int(n)
    v = as_values(g, f)
    den = energy_p(g, v, p) ** (1 / p)
    if den == 0:
        raise ZeroGradient("gradient of the field vanishes identically")
    if n == 0:
        return 0.0
    field_ = f if isinstance(f, ScalarField) else ScalarField(v)
    fn = pseudo_average_field(g, field_, n, room)
    return lp_norm(g, v - fn, p) / den


def sobolev_quotient(g: WeightedGraph, f, p) -> float:
    """``||f||_p / |||grad f|||_p`` for ``f`` supported in a domain.

    The support and its neighbors must avoid the frontier so every gradient
    term is computed with the true local degrees.
    """
    p = _check_p(p)
    v = as_values(g, f)
    support = f.nonzero_support() if isinstance(f, ScalarField) else np.flatnonzero(v)
    if not np.any(v):
        raise ZeroField("field vanishes identically")
    require_room(g, support, 1, "sobolev quotient")
    den = energy_p(g, v, p) ** (1 / p)
    if den == 0:
        raise ZeroGradient("gradient of the field vanishes identically")
    return lp_norm(g, v, p) / den


@dataclass
class FaberKrahnResult:
    lambda1: float
    iterations: int
    witness: np.ndarray


def _dirichlet_blocks(g: WeightedGraph, domain: Domain):
    """``(D - W)`` restricted to the domain, and the diagonal ``D``."""
    idx = domain.members
    W = g.weight_matrix[idx][:, idx].tocsr()
    d = g.measure[idx]
    return (sp.diags(d) - W).tocsr(), d


def faber_krahn_lambda1(g: WeightedGraph, domain: Domain, tol=1e-10, max_iter=100_000) -> FaberKrahnResult:
    """Smallest Dirichlet eigenvalue of ``I - P`` on the domain.

    Inverse power iteration on ``(D - W) u = lambda D u`` with a Jacobi
    preconditioned conjugate-gradient inner solve, starting from the all-ones
    vector and stopping when the Rayleigh quotient changes by less than
    ``tol`` (relative).

    Raises
    ------
    NoConvergence
        After ``max_iter`` outer iterations; carries the last estimate.
    """
    require_room(g, domain.members, 0, "faber-krahn domain")
    A, d = _dirichlet_blocks(g, domain)
    m = len(d)
    if m == 1:
        w = np.zeros(g.vertex_count)
        w[domain.members] = 1.0
        return FaberKrahnResult(float(A[0, 0] / d[0]), 0, w)
    precond = spla.LinearOperator((m, m), matvec=lambda r: r / d, dtype=np.float64)
    u = np.ones(m)
    lam = float(u @ (A @ u)) / float(u @ (d * u))
    for it in range(1, max_iter + 1):
        rhs = d * u
        y, info = spla.cg(A, rhs, x0=u / lam, rtol=1e-14, atol=0.0, maxiter=20 * m, M=precond)
        if info < 0:
            raise NoConvergence("inner CG solve broke down", it, lam)
        y /= math.sqrt(float(y @ (d * y)))
        new = float(y @ (A @ y))
        u = y
        if abs(new - lam) <= tol * abs(new):
            lam = new
            break
        lam = new
    else:
        raise NoConvergence(f"inverse iteration did not converge in {max_iter} steps", max_iter, lam)
    w = np.zeros(g.vertex_count)
    w[domain.members] = np.abs(u)
    return FaberKrahnResult(lam, it, w)


@dataclass
class QuotientReport:
    p: float
    scale: float
    value: float
    witness: ScalarField
    kind: str
    converged: bool = True
    iterations: int = 0
    seed_values: list = field(default_factory=list)


def _energy_and_grad(g, v, p):
    diff = v[g.rows] - v[g.indices]
    sq = 0.5 * np.bincount(g.rows, weights=g.probs * diff * diff, minlength=g.vertex_count)
    energy = fsum(g.measure * sq ** (p / 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(sq > 0, g.measure * (p / 2) * sq ** (p / 2 - 1), 0.0)
    term = c[g.rows] * g.probs * diff
    grad = np.bincount(g.rows, weights=term, minlength=g.vertex_count)
    grad -= np.bincount(g.indices, weights=term, minlength=g.vertex_count)
    return energy, grad


def _log_quotient(g, v, p, idx):
    mass = fsum(np.abs(v[idx]) ** p * g.measure[idx])
    energy, egrad = _energy_and_grad(g, v, p)
    mgrad = p * g.measure[idx] * np.abs(v[idx]) ** (p - 1) * np.sign(v[idx])
    grad = mgrad / mass - egrad[idx] / energy
    return math.log(mass) - math.log(energy), grad, mass


def maximize_sobolev_quotient(g: WeightedGraph, domain: Domain, p, seeds=(), iters=5000,
                              tol=1e-9, patience=50) -> QuotientReport:
    """Search ``C_0(Omega)`` for a large Sobolev quotient ``||f||_p / |||grad f|||_p``.

    The result is a lower bound on the best constant for ``Omega``. ``p = 2`` is
    solved exactly through :func:`faber_krahn_lambda1`; ``p = 1`` only evaluates
    the seeds; other ``p > 1`` run normalized gradient ascent on the log
    quotient from every seed, halving the step whenever it fails to improve and
    stopping once the gain over ``patience`` iterations drops below ``tol``
    (relative).
    """
    p = _check_p(p)
    require_room(g, domain.members, 0, "sobolev domain")
    idx = domain.members
    seeds = [as_values(g, s) for s in seeds]
    for s in seeds:
        if np.any(np.delete(s, idx)):
            raise ValidationError("seed is not supported in the domain")
    seed_values = [sobolev_quotient(g, ScalarField(s, idx), p) for s in seeds if np.any(s)]

    best_v, best_q, converged, total_iters = None, -math.inf, True, 0
    for s, q in zip(seeds, seed_values):
        if q > best_q:
            best_v, best_q = s, q

    if p == 2:
        fk = faber_krahn_lambda1(g, domain)
        q = fk.lambda1 ** -0.5
        total_iters = fk.iterations
        if q >= best_q:
            best_v, best_q = fk.witness, q
    elif p > 1:
        starts = seeds if seeds else [np.where(domain.mask, 1.0, 0.0)]
        for s in starts:
            v, q, ok, n_it = _ascend(g, idx, p, s, iters, tol, patience)
            total_iters += n_it
            converged &= ok
            if q > best_q:
                best_v, best_q = v, q
    if best_v is None:
        raise ZeroField("no nonzero seed supplied for p = 1")
    return QuotientReport(p, domain.measure, best_q, ScalarField(best_v, idx), "sobolev",
                          converged, total_iters, seed_values)


def _ascend(g, idx, p, start, iters, tol, patience):
    v = np.zeros(g.vertex_count)
    v[idx] = start[idx]
    if not np.any(v):
        v[idx] = 1.0
    logq, grad, mass = _log_quotient(g, v, p, idx)
    step = 0.1 * np.abs(v[idx]).max() / max(np.abs(grad / g.measure[idx]).max(), 1e-300)
    history = [logq]
    converged = False
    it = 0
    for it in range(1, iters + 1):
        trial = v.copy()
        trial[idx] = v[idx] + step * grad / g.measure[idx]
        if not np.any(trial[idx]):
            step *= 0.5
            history.append(logq)
            continue
        tq, tgrad, tmass = _log_quotient(g, trial, p, idx)
        if tq > logq:
            scale = tmass ** (-1 / p)
            v = trial * scale
            logq, grad, mass = tq, tgrad / scale, 1.0
            step *= 1.5
        else:
            step *= 0.5
        history.append(logq)
        if len(history) > patience and history[-1] - history[-1 - patience] < tol:
            converged = True
            break
        if step == 0:
            converged = True
            break
    return v, math.exp(logq / p), converged, it


def path_kernel_k(g: WeightedGraph, x, n, p, max_ball=DEFAULT_MAX_BALL) -> float:
    """``K(x, n) = sum_{y,z in B(x,n)} d(y,z)^(p-1) mu(y) mu(z)`` over ordered pairs.

    Only shortest-path lengths enter, so no path family is materialized.
    """
    p = _check_p(p)
    x, n = g.check_vertex(x), int(n)
    require_room(g, x, 2 * n, "path kernel")
    b = ball(g, x, n)
    if len(b) > max_ball:
        raise BallTooLarge(f"B({x}, {n}) has {len(b)} vertices, cap is {max_ball}")
    value = kernels.pair_distance_sum(g.indptr, g.indices, b.members, g.measure[b.members],
                                      p - 1, 2 * n)
    if math.isnan(value):
        raise AssertionError("ball pair farther apart than its diameter bound")
    return value


def path_kernel_bound(g: WeightedGraph, x, n, p) -> float:
    """``(2n)^(p-1) mu(B(x,n))^2``."""
    vol = ball(g, x, n).measure(g)
    return (2 * n) ** (p - 1) * vol * vol

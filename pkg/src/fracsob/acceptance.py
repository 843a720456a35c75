"""End-to-end scaling checks run by ``fracsob verify`` and the test suite.

Each check returns a :class:`CheckResult`; none raises on a failed
criterion. Sweeps fit with :func:`fit_exponent`'s default of skipping the
smallest scale unless the check names its own window.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.sparse.csgraph import shortest_path

from .calculus import dirichlet_energy, edge_seminorm, energy_p, gradient_field, lp_norm
from .experiments import (
    ScalingSample,
    escape_time,
    extremal_field,
    fit_exponent,
    poincare_candidate,
    poincare_optimality_sweep,
    random_fields,
    return_probabilities,
    sobolev_optimality_sweep,
    volume_sweep,
)
from .generators import lattice_box, path_graph, vicsek
from .graph import ball, make_domain
from .inequalities import (
    _dirichlet_blocks,
    faber_krahn_lambda1,
    path_kernel_bound,
    path_kernel_k,
    poincare_exponent,
    poincare_quotient,
    sobolev_exponent,
    sobolev_quotient,
)

D2 = math.log(5, 3)
PS = (1, 2, 3)


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.seconds:.2f}s): " + "; ".join(self.details)


def _timed(name, budget=None):
    def wrap(fn):
        def run(**kwargs):
            t0 = time.perf_counter()
            passed, details = fn(**kwargs)
            elapsed = time.perf_counter() - t0
            if budget is not None:
                ok = elapsed < budget
                details.append(f"runtime {elapsed:.2f}s < {budget}s: {ok}")
                passed = passed and ok
            return CheckResult(name, passed, details, elapsed)
        run.__name__ = fn.__name__
        run.check_name = name
        return run
    return wrap


@_timed("volume", budget=5)
def check_volume():
    model = vicsek(2, 6)
    samples = volume_sweep(model.graph, model.center, [3 ** m for m in range(1, 6)])
    fit = fit_exponent(samples)
    ok = abs(fit.slope - D2) <= 0.10 and fit.r_squared >= 0.99
    return ok, [f"slope {fit.slope:.4f} vs D={D2:.4f}+-0.10, R2={fit.r_squared:.5f} (>=0.99)",
                f"all-points slope {fit_exponent(samples, 0).slope:.4f}"]


@_timed("sobolev-optimality", budget=30)
def check_sobolev_optimality():
    ok, details = True, []
    for p in PS:
        fit = fit_exponent(sobolev_optimality_sweep(2, [2, 3, 4, 5], p))
        target = -sobolev_exponent(p, D2)
        good = abs(fit.slope - target) <= 0.10
        ok &= good
        details.append(f"p={p} slope {fit.slope:.4f} vs {target:.4f}+-0.10 {'ok' if good else 'off'}")
    return ok, details


def _sobolev_constants(p, blocks=(2, 3, 4, 5), count=200, seed=20240101):
    model = vicsek(2, 6)
    g = model.graph
    e = sobolev_exponent(p, D2)
    out = {}
    for n in blocks:
        members, _ = model.central_block(n)
        mass = math.fsum(g.measure[members])
        fields = random_fields(g, members, count, seed + n) + [extremal_field(model, n)]
        out[n] = max(sobolev_quotient(g, f, p) for f in fields) / mass ** e
    return out


@_timed("sobolev-bound")
def check_sobolev_bound():
    ok, details = True, []
    for p in PS:
        C = _sobolev_constants(p)
        good = all(math.isfinite(c) and c > 0 for c in C.values()) and C[5] <= 1.2 * C[3]
        ok &= good
        details.append(f"p={p} C(3)={C[3]:.4f} C(5)={C[5]:.4f} ratio {C[5] / C[3]:.3f} (<=1.2)")
    return ok, details


def _poincare_constants(model, p, radii, count=200, seed=7):
    g = model.graph
    e = poincare_exponent(p, D2)
    out = {}
    for r in radii:
        members = ball(g, model.center, 2 * r).members
        fields = random_fields(g, members, count, seed + r) + [poincare_candidate(model, r)]
        out[r] = max(poincare_quotient(g, f, model.center, r, p) for f in fields) / r ** e
    return out


@_timed("poincare", budget=60)
def check_poincare():
    ok, details = True, []
    radii = [3 ** m for m in range(1, 5)]
    model = vicsek(2, 6)
    for p in PS:
        fit = fit_exponent(poincare_optimality_sweep(2, 6, radii, p))
        target = poincare_exponent(p, D2)
        C = _poincare_constants(model, p, radii)
        good = abs(fit.slope - target) <= 0.15 and C[81] <= 1.2 * C[9]
        ok &= good
        details.append(
            f"p={p} slope {fit.slope:.4f} vs {target:.4f}+-0.15, C(9)={C[9]:.4f} C(81)={C[81]:.4f}"
        )
    return ok, details


@_timed("faber-krahn")
def check_faber_krahn():
    model = vicsek(2, 6)
    g = model.graph
    products = {}
    for n in (2, 3, 4, 5):
        dom = make_domain(g, model.central_block(n)[0])
        products[n] = faber_krahn_lambda1(g, dom).lambda1 * dom.inradius * dom.measure
    vals = list(products.values())
    band = max(vals) / min(vals)
    dom2 = make_domain(g, model.central_block(2)[0])
    A, d = _dirichlet_blocks(g, dom2)
    dense = la.eigh(A.toarray(), np.diag(d), eigvals_only=True)[0]
    lam = faber_krahn_lambda1(g, dom2).lambda1
    rel = abs(lam - dense) / dense
    ok = min(vals) > 0 and band <= 3 and rel <= 1e-8 and len(dom2) <= 101
    return ok, [
        "lambda1*r*mu: " + ", ".join(f"n={n}: {v:.4f}" for n, v in products.items()),
        f"max/min {band:.3f} (<=3)",
        f"dense oracle on Omega_2 ({len(dom2)} vertices) rel err {rel:.2e} (<=1e-8)",
    ]


@_timed("return-probability", budget=60)
def check_return_probability():
    model = vicsek(2, 6)
    probs = return_probabilities(model.graph, model.center, 200)
    samples = [ScalingSample(2 * k, probs[2 * k], "walk") for k in range(20, 101)]
    fit = fit_exponent(samples, skip_smallest=0)
    target = -D2 / (D2 + 1)
    ok = abs(fit.slope - target) <= 0.10 and fit.r_squared >= 0.98
    return ok, [f"slope {fit.slope:.4f} vs -D/(D+1)={target:.4f}+-0.10, R2={fit.r_squared:.5f} (>=0.98)"]


@_timed("escape-time")
def check_escape_time():
    model = vicsek(2, 6)
    samples = [ScalingSample(3 ** m, escape_time(model.graph, model.center, 3 ** m), "escape")
               for m in range(1, 5)]
    fit = fit_exponent(samples)
    target = D2 + 1
    path = path_graph(401)
    errs = [abs(escape_time(path, 200, r) - (r + 1) ** 2) / (r + 1) ** 2 for r in (0, 1, 5, 20, 100, 198)]
    ok = abs(fit.slope - target) <= 0.15 and max(errs) <= 1e-8
    return ok, [f"beta {fit.slope:.4f} vs D+1={target:.4f}+-0.15 (all-points {fit_exponent(samples, 0).slope:.4f})",
                f"path T=(r+1)^2 max rel err {max(errs):.1e} (<=1e-8)"]


def _pair_oracle(g, members, p):
    dist = shortest_path(g.weight_matrix, unweighted=True, indices=members)[:, members]
    mu = g.measure[members]
    total = 0
    for i in range(len(members)):
        for j in range(len(members)):
            dij = int(dist[i, j])
            total += dij ** (p - 1) * int(mu[i]) * int(mu[j]) if dij or p == 1 else 0
    return total


@_timed("path-kernel")
def check_path_kernel(samples=50, seed=11):
    rng = np.random.Generator(np.random.PCG64(seed))
    graphs = [vicsek(2, 4).graph, vicsek(3, 3).graph, lattice_box(2, 15), lattice_box(3, 7)]
    ok, checked, worst = True, 0, 0.0
    for i in range(samples):
        g = graphs[i % len(graphs)]
        while True:
            x = int(rng.integers(g.vertex_count))
            room = g.frontier_distances[x]
            if room > 2:
                break
        n = int(rng.integers(1, int((room - 1) // 2) + 1))
        members = ball(g, x, n).members
        for p in PS:
            K = path_kernel_k(g, x, n, p)
            exact = _pair_oracle(g, members, p)
            bound = path_kernel_bound(g, x, n, p)
            ok &= K == exact and K <= bound
            worst = max(worst, K / bound)
            checked += 1
    return ok, [f"{checked} (x,n,p) cases exact vs pair enumeration, max K/bound {worst:.3f} (<=1)"]


@_timed("identities")
def check_identities(count=100, seed=5):
    graphs = {"vicsek": vicsek(2, 4).graph, "lattice": lattice_box(2, 20), "path": path_graph(200)}
    ok, details = True, []
    for name, g in graphs.items():
        fields = random_fields(g, np.arange(g.vertex_count), count, seed)
        c2, N = g.controlled_weight_constant, g.max_degree
        worst = 0.0
        ratios = {p: [] for p in PS}
        for f in fields:
            e1 = dirichlet_energy(g, f)
            e2 = lp_norm(g, gradient_field(g, f), 2) ** 2
            worst = max(worst, abs(e1 - e2) / abs(e2))
            for p in PS:
                ratios[p].append(edge_seminorm(g, f, p) ** p / energy_p(g, f, p))
        inside = all(
            2 ** (p / 2) * c2 <= min(r) and max(r) <= 2 ** (p / 2) * N * c2 ** (-p / 2)
            for p, r in ratios.items()
        )
        ok &= worst <= 1e-10 and inside
        rng_txt = ", ".join(f"p={p}: [{min(r):.3f}, {max(r):.3f}]" for p, r in ratios.items())
        details.append(f"{name}: energy rel err {worst:.1e}; seminorm/gradient ratios {rng_txt}")
    return ok, details


CHECKS = {
    "volume": check_volume,
    "sobolev-optimality": check_sobolev_optimality,
    "sobolev-bound": check_sobolev_bound,
    "poincare": check_poincare,
    "faber-krahn": check_faber_krahn,
    "return-probability": check_return_probability,
    "escape-time": check_escape_time,
    "path-kernel": check_path_kernel,
    "identities": check_identities,
}


def run_all(only=None) -> list[CheckResult]:
    names = list(CHECKS) if not only else list(only)
    return [CHECKS[name]() for name in names]

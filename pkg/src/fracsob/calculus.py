"""Discrete calculus on weighted graphs.

Gradient, weighted L^p norms, ball and moving averages, the Markov operator
``P`` and the Dirichlet energy. Averages are mu-weighted:
``f_n(x) = sum_{y in B(x,n)} f(y) mu(y) / mu(B(x,n))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError
from .graph import WeightedGraph, ball, distances_from, require_room


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values on the vertices of a host graph, optionally with declared support."""

    values: np.ndarray
    support: np.ndarray | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.support is not None:
            support = np.unique(np.asarray(self.support, dtype=np.int64))
            outside = np.ones(len(values), dtype=bool)
            outside[support] = False
            if np.any(values[outside] != 0):
                bad = int(np.flatnonzero(outside & (values != 0))[0])
                raise ValidationError(f"field is nonzero at vertex {bad} outside its declared support")
            object.__setattr__(self, "support", support)

    def __len__(self):
        return len(self.values)

    def nonzero_support(self) -> np.ndarray:
        """Declared support, or the set where the field is nonzero."""
        if self.support is not None:
            return self.support
        return np.flatnonzero(self.values)

    def scaled(self, c: float) -> "ScalarField":
        return ScalarField(self.values * c, self.support)


def as_values(g: WeightedGraph, f) -> np.ndarray:
    values = f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=np.float64)
    if values.shape != (g.vertex_count,):
        raise ValidationError(
            f"field has shape {values.shape}, host graph has {g.vertex_count} vertices"
        )
    return values


def fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=np.float64).ravel())


def apply_p(g: WeightedGraph, f) -> np.ndarray:
    """``Pf(x) = sum_y p(x, y) f(y)``."""
    return g.transition_matrix @ as_values(g, f)


def gradient_field(g: WeightedGraph, f) -> np.ndarray:
    """``|grad f|(x) = (1/2 sum_y p(x,y) |f(x) - f(y)|^2)^(1/2)``."""
    v = as_values(g, f)
    diff = v[g.rows] - v[g.indices]
    sq = np.bincount(g.rows, weights=g.probs * diff * diff, minlength=g.vertex_count)
    return np.sqrt(0.5 * sq)


def lp_norm(g: WeightedGraph, f, p, restrict_to=None) -> float:
    """Weighted norm ``(sum_x |f(x)|^p mu(x))^(1/p)``; ``p = inf`` gives the sup."""
    v = np.abs(as_values(g, f))
    mu = g.measure
    if restrict_to is not None:
        idx = np.asarray(restrict_to, dtype=np.int64)
        v, mu = v[idx], mu[idx]
    p = float(p)
    if p < 1:
        raise ValidationError(f"p must be >= 1 or inf, got {p}")
    if math.isinf(p):
        return float(v.max()) if v.size else 0.0
    scale = float(v.max()) if v.size else 0.0
    if scale == 0.0:
        return 0.0
    # factor out the max to keep |f|^p in range for large p
    return scale * fsum((v / scale) ** p * mu) ** (1.0 / p)


def edge_seminorm(g: WeightedGraph, f, p) -> float:
    """``(sum over ordered adjacent pairs |f(x)-f(y)|^p mu_xy)^(1/p)``."""
    p = float(p)
    if not 1 <= p < math.inf:
        raise ValidationError(f"edge seminorm needs finite p >= 1, got {p}")
    v = as_values(g, f)
    diff = np.abs(v[g.rows] - v[g.indices])
    return fsum(diff ** p * g.weights) ** (1.0 / p)


def energy_p(g: WeightedGraph, f, p, restrict_to=None) -> float:
    """``sum_x |grad f|(x)^p mu(x)``, the p-th power of the gradient norm."""
    grad = gradient_field(g, f)
    mu = g.measure
    if restrict_to is not None:
        idx = np.asarray(restrict_to, dtype=np.int64)
        grad, mu = grad[idx], mu[idx]
    return fsum(grad ** float(p) * mu)


def ball_average(g: WeightedGraph, f, x, n) -> float:
    """mu-weighted mean of ``f`` over ``B(x, n)``."""
    v = as_values(g, f)
    b = ball(g, x, n)
    mu = g.measure[b.members]
    return fsum(v[b.members] * mu) / fsum(mu)


def pseudo_average_field(g: WeightedGraph, f, n, room=None) -> np.ndarray:
    """Moving average ``f_n`` evaluated where it can be nonzero.

    ``f_n`` vanishes farther than ``n`` from the support of ``f``; it is computed
    on the ``n``-neighborhood of the support. Every evaluated vertex must be at
    frontier distance greater than ``room`` (default ``n``) so that its ball is
    untouched by the truncation.

    Raises
    ------
    InsufficientRoom
        Names the evaluated vertex closest to the frontier.
    """
    v = as_values(g, f)
    n = int(n)
    if n < 0:
        raise ValidationError(f"radius must be >= 0, got {n}")
    support = f.nonzero_support() if isinstance(f, ScalarField) else np.flatnonzero(v)
    out = np.zeros(g.vertex_count)
    if support.size == 0:
        return out
    if n == 0:
        return v.copy()
    near = np.flatnonzero(distances_from(g, support, n) >= 0)
    require_room(g, near, n if room is None else int(room), "pseudo average")
    sums = kernels.ball_sums(g.indptr, g.indices, near, n, np.vstack([v * g.measure, g.measure]))
    out[near] = sums[:, 0] / sums[:, 1]
    return out


def dirichlet_energy(g: WeightedGraph, f) -> float:
    """``<(I - P) f, f>`` in ``L^2(mu)``, computed from the kernel."""
    v = as_values(g, f)
    return fsum((v - apply_p(g, v)) * v * g.measure)

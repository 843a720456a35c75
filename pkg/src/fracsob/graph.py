"""Immutable weighted graphs, metric balls and finite domains.

Vertices are dense integer ids ``0..n-1``. Adjacency is stored in CSR form
with each undirected edge present in both directions with the same weight.
The vertex measure is ``mu(x) = sum_y mu_xy`` and the transition kernel is
``p(x, y) = mu_xy / mu(x)``.

Finite graphs stand in for infinite ones. A graph may declare a *frontier*
(the vertices where the truncation happened); operations that need room call
:func:`require_room` so truncation effects are rejected instead of silently
absorbed.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import (
    DisconnectedGraph,
    DuplicateEdge,
    EmptyDomain,
    InsufficientRoom,
    InvalidVertex,
    NonPositiveWeight,
    SelfLoop,
    ValidationError,
)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric weighted graph in CSR form. Build with :func:`build_graph`."""

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    measure: np.ndarray
    coordinates: np.ndarray | None = None
    frontier: tuple = ()
    family: str = "custom"
    parameters: dict = field(default_factory=dict)
    markers: dict = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @cached_property
    def rows(self) -> np.ndarray:
        """Source vertex of every CSR entry."""
        return np.repeat(np.arange(self.vertex_count, dtype=np.int64), self.degrees)

    @cached_property
    def probs(self) -> np.ndarray:
        """``p(x, y)`` for every CSR entry ``(x, y)``."""
        return self.weights / self.measure[self.rows]

    @property
    def controlled_weight_constant(self) -> float:
        return float(self.probs.min())

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def transition_matrix(self) -> sp.csr_matrix:
        n = self.vertex_count
        return sp.csr_matrix((self.probs, self.indices, self.indptr), shape=(n, n))

    @cached_property
    def weight_matrix(self) -> sp.csr_matrix:
        n = self.vertex_count
        return sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(n, n))

    def neighbors(self, x: int) -> np.ndarray:
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    def edges(self) -> list[tuple[int, int, float]]:
        """Undirected edges ``(u, v, w)`` with ``u < v``, sorted."""
        mask = self.rows < self.indices
        return [
            (int(u), int(v), float(w))
            for u, v, w in zip(self.rows[mask], self.indices[mask], self.weights[mask])
        ]

    @cached_property
    def frontier_distances(self) -> np.ndarray:
        """Hop distance from every vertex to the frontier (``inf`` if none declared)."""
        if not self.frontier:
            return np.full(self.vertex_count, np.inf)
        dist, _ = kernels.bfs_distances(self.indptr, self.indices, np.asarray(self.frontier), -1)
        return dist.astype(np.float64)

    @cached_property
    def digest(self) -> str:
        """SHA-256 of the canonical edge list; identifies the graph in field files."""
        h = hashlib.sha256()
        h.update(str(self.vertex_count).encode())
        mask = self.rows < self.indices
        for u, v, w in zip(self.rows[mask], self.indices[mask], self.weights[mask]):
            h.update(f";{u},{v},{float(w)!r}".encode())
        return h.hexdigest()

    def check_vertex(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.vertex_count:
            raise InvalidVertex(f"vertex {x} out of range [0, {self.vertex_count})")
        return x


def build_graph(edges, vertex_count=None, *, coordinates=None, frontier=(),
                family="custom", parameters=None, markers=None) -> WeightedGraph:
    """Validate an undirected edge list ``[(u, v, w), ...]`` and build the graph.

    Raises
    ------
    SelfLoop, NonPositiveWeight, DuplicateEdge, DisconnectedGraph
        The message names the offending edge or vertex.
    """
    arr = np.asarray(edges, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("edge list is empty")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError("edges must be (u, v, weight) triples")
    u = arr[:, 0].astype(np.int64)
    v = arr[:, 1].astype(np.int64)
    w = arr[:, 2]
    if np.any(u != arr[:, 0]) or np.any(v != arr[:, 1]) or u.min() < 0 or v.min() < 0:
        raise InvalidVertex("vertex ids must be non-negative integers")
    n = int(max(u.max(), v.max())) + 1 if vertex_count is None else int(vertex_count)
    if max(u.max(), v.max()) >= n:
        raise InvalidVertex(f"edge endpoint exceeds vertex count {n}")

    loops = np.flatnonzero(u == v)
    if loops.size:
        raise SelfLoop(f"self-loop at vertex {u[loops[0]]}")
    bad = np.flatnonzero(~(w > 0) | ~np.isfinite(w))
    if bad.size:
        i = bad[0]
        raise NonPositiveWeight(f"edge ({u[i]}, {v[i]}) has non-positive weight {w[i]}")
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    key = lo * n + hi
    order = np.argsort(key, kind="stable")
    dup = np.flatnonzero(np.diff(key[order]) == 0)
    if dup.size:
        i = order[dup[0] + 1]
        raise DuplicateEdge(f"duplicate edge ({lo[i]}, {hi[i]})")

    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    ww = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    src, dst, ww = src[order], dst[order], ww[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    isolated = np.flatnonzero(np.diff(indptr) == 0)
    if isolated.size:
        raise DisconnectedGraph(f"vertex {isolated[0]} is isolated")
    measure = np.array([math.fsum(ww[indptr[x]:indptr[x + 1]]) for x in range(n)])

    dist, _ = kernels.bfs_distances(indptr, dst, np.array([0]), -1)
    unreached = np.flatnonzero(dist < 0)
    if unreached.size:
        raise DisconnectedGraph(f"vertex {unreached[0]} is not connected to vertex 0")

    for a in (indptr, dst, ww, measure):
        a.setflags(write=False)
    if coordinates is not None:
        coordinates = np.asarray(coordinates, dtype=np.int64)
        coordinates.setflags(write=False)
    return WeightedGraph(
        indptr=indptr,
        indices=dst,
        weights=ww,
        measure=measure,
        coordinates=coordinates,
        frontier=tuple(int(x) for x in frontier),
        family=family,
        parameters=dict(parameters or {}),
        markers=dict(markers or {}),
    )


def distances_from(g: WeightedGraph, x, maxdepth=-1) -> np.ndarray:
    """BFS hop distances from ``x`` (or a set of sources); -1 beyond ``maxdepth``."""
    sources = np.atleast_1d(np.asarray(x, dtype=np.int64))
    for s in sources:
        g.check_vertex(s)
    dist, _ = kernels.bfs_distances(g.indptr, g.indices, sources, int(maxdepth))
    return dist


def distance(g: WeightedGraph, x, y) -> int:
    x, y = g.check_vertex(x), g.check_vertex(y)
    return int(distances_from(g, x)[y])


@dataclass(frozen=True)
class Ball:
    center: int
    radius: int
    members: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.members)

    def measure(self, g: WeightedGraph) -> float:
        return math.fsum(g.measure[self.members])


def ball(g: WeightedGraph, x, n) -> Ball:
    """Metric ball ``B(x, n)``; members sorted by vertex id."""
    x = g.check_vertex(x)
    n = int(n)
    if n < 0:
        raise ValidationError(f"radius must be >= 0, got {n}")
    dist = distances_from(g, x, n)
    members = np.flatnonzero(dist >= 0)
    return Ball(center=x, radius=n, members=members, distances=dist[members])


def frontier_distance(g, x) -> float:
    """Distance from ``x`` to the truncation frontier (``inf`` when none)."""
    g = getattr(g, "graph", g)
    return g.frontier_distances[g.check_vertex(x)]


def require_room(g: WeightedGraph, vertices, needed, what="operation"):
    """Raise InsufficientRoom unless every vertex is farther than ``needed`` from the frontier."""
    vertices = np.atleast_1d(np.asarray(vertices, dtype=np.int64))
    fd = g.frontier_distances[vertices]
    if fd.size and fd.min() <= needed:
        worst = int(vertices[np.argmin(fd)])
        raise InsufficientRoom(
            f"{what}: vertex {worst} is at frontier distance {int(fd.min())}, "
            f"needs more than {needed}"
        )


@dataclass(frozen=True, eq=False)
class Domain:
    """Finite vertex set with measure, inradius and edge-boundary measure."""

    members: np.ndarray
    mask: np.ndarray
    measure: float
    inradius: int
    boundary_measure: float

    def __len__(self):
        return len(self.members)


def make_domain(g: WeightedGraph, members) -> Domain:
    """Build a :class:`Domain`.

    The inradius is ``max_{x in Omega} d(x, V \\ Omega) - 1`` and the boundary
    measure sums ``mu_xy`` over edges with exactly one endpoint in ``Omega``.
    """
    members = np.unique(np.asarray(list(members), dtype=np.int64))
    if members.size == 0:
        raise EmptyDomain("domain has no vertices")
    for x in (members[0], members[-1]):
        g.check_vertex(x)
    mask = np.zeros(g.vertex_count, dtype=bool)
    mask[members] = True
    outside = np.flatnonzero(~mask)
    if outside.size == 0:
        raise ValidationError("domain covers the whole graph; its inradius is undefined on a truncation")
    dist, _ = kernels.bfs_distances(g.indptr, g.indices, outside, -1)
    inradius = int(dist[members].max()) - 1
    crossing = mask[g.rows] != mask[g.indices]
    # each crossing edge appears once with its inside endpoint as source
    boundary = math.fsum(g.weights[crossing & mask[g.rows]])
    return Domain(
        members=members,
        mask=mask,
        measure=math.fsum(g.measure[members]),
        inradius=inradius,
        boundary_measure=boundary,
    )

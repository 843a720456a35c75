"""Deterministic graph constructors: Vicsek graphs and lattice controls.

Vicsek coordinates are doubled so that every generation lives on an integer
grid: generation ``k`` occupies the cube ``[0, 2*3**(k-1)]**d`` and the
generation-1 star has its center at ``(1, ..., 1)``. Coincident corner vertices
are merged by exact coordinate deduplication, and vertex ids follow the
lexicographic order of the final coordinates.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GenerationTooSmall, SizeCapExceeded, ValidationError
from .graph import WeightedGraph, build_graph, distances_from

DEFAULT_MAX_VERTICES = 2_000_000


def max_vertices() -> int:
    """Generator size cap; ``FRACSOB_MAX_VERTICES`` overrides the default."""
    raw = os.environ.get("FRACSOB_MAX_VERTICES")
    return int(raw) if raw else DEFAULT_MAX_VERTICES


def vicsek_counts(d: int, k: int) -> tuple[int, int]:
    """Vertex and edge counts of generation ``k`` from the recurrences."""
    q = 2 ** d + 1
    V = q
    for _ in range(k - 1):
        V = q * V - 2 ** d
    return V, 2 ** d * q ** (k - 1)


def _encode(coords, base):
    key = np.zeros(len(coords), dtype=np.int64)
    for i in range(coords.shape[1]):
        key = key * base + coords[:, i]
    return key


@dataclass(frozen=True, eq=False)
class VicsekModel:
    graph: WeightedGraph
    dimension: int
    generation: int
    center: int
    corners: tuple
    diagonal_length: int

    @property
    def dimension_D(self) -> float:
        return math.log(2 ** self.dimension + 1, 3)

    @property
    def side(self) -> int:
        """Side of the bounding cube in (doubled) integer coordinates."""
        return 2 * 3 ** (self.generation - 1)

    @cached_property
    def _center_coord(self):
        return self.graph.coordinates[self.center]

    def central_block(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Members and corners of the generation-``n`` block centered at ``z0``.

        Corners are returned in lexicographic coordinate order.
        """
        if not 1 <= n <= self.generation:
            raise GenerationTooSmall(
                f"block generation {n} must lie in [1, {self.generation}]"
            )
        half = 3 ** (n - 1)
        coords = self.graph.coordinates
        lo = self._center_coord - half
        hi = self._center_coord + half
        inside = np.all((coords >= lo) & (coords <= hi), axis=1)
        members = np.flatnonzero(inside)
        at_corner = np.all((coords == lo) | (coords == hi), axis=1) & inside
        return members, np.flatnonzero(at_corner)

    def block_diagonal_length(self, n: int) -> int:
        _, corners = self.central_block(n)
        dist = distances_from(self.graph, self.center)
        return int(dist[corners[0]])


def vicsek(d: int, k: int, max_vertices_cap: int | None = None) -> VicsekModel:
    """Generation-``k`` Vicsek graph in dimension ``d`` with standard weights.

    Raises
    ------
    SizeCapExceeded
        If the vertex count from the recurrence exceeds the cap.
    """
    d, k = int(d), int(k)
    if not 1 <= d <= 6:
        raise ValidationError(f"dimension d must lie in [1, 6], got {d}")
    if k < 1:
        raise ValidationError(f"generation k must be >= 1, got {k}")
    cap = max_vertices() if max_vertices_cap is None else max_vertices_cap
    V, E = vicsek_counts(d, k)
    if V > cap:
        raise SizeCapExceeded(f"vicsek({d}, {k}) has {V} vertices, cap is {cap}")
    side = 2 * 3 ** (k - 1)
    base = side + 1
    if base ** d >= 2 ** 62:
        raise SizeCapExceeded(f"vicsek({d}, {k}) coordinates overflow the integer key")

    corner_set = np.array(np.meshgrid(*([[0, 1]] * d), indexing="ij")).reshape(d, -1).T
    coords = np.vstack([np.ones((1, d), dtype=np.int64), 2 * corner_set]).astype(np.int64)
    edges = np.column_stack([np.zeros(2 ** d, dtype=np.int64), np.arange(1, 2 ** d + 1)])
    s = 2
    for _ in range(k - 1):
        offsets = np.vstack([2 * s * corner_set, np.full((1, d), s)])
        nV = len(coords)
        coords = np.vstack([coords + off for off in offsets])
        edges = np.vstack([edges + i * nV for i in range(len(offsets))])
        keys = _encode(coords, base)
        uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        coords = coords[first]
        edges = inverse.reshape(-1)[edges]
        s *= 3

    # final numbering: lexicographic in coordinates
    order = np.argsort(_encode(coords, base), kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    coords = coords[order]
    edges = np.sort(rank[edges], axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]

    center = int(np.flatnonzero(np.all(coords == side // 2, axis=1))[0])
    corners = tuple(int(i) for i in np.flatnonzero(np.all((coords == 0) | (coords == side), axis=1)))
    triples = np.column_stack([edges, np.ones(len(edges))])
    g = build_graph(
        triples,
        len(coords),
        coordinates=coords,
        frontier=corners,
        family="vicsek",
        parameters={"d": d, "generation": k},
        markers={"center": center, "corners": list(corners)},
    )

    if g.vertex_count != V or g.edge_count != E or g.edge_count != g.vertex_count - 1:
        raise AssertionError(f"vicsek({d}, {k}) failed its count invariants")
    dist = distances_from(g, center)
    lengths = {int(dist[c]) for c in corners}
    if lengths != {3 ** (k - 1)} or len(corners) != 2 ** d:
        raise AssertionError(f"vicsek({d}, {k}) corner distances {lengths} not uniform")
    return VicsekModel(g, d, k, center, corners, lengths.pop())


def model_from_graph(g: WeightedGraph) -> VicsekModel:
    """Recover the :class:`VicsekModel` view of a loaded Vicsek graph file."""
    if g.family != "vicsek" or g.coordinates is None:
        raise ValidationError("graph is not a Vicsek graph with coordinates")
    center = int(g.markers["center"])
    corners = tuple(int(c) for c in g.markers["corners"])
    dist = distances_from(g, center)
    return VicsekModel(
        g, int(g.parameters["d"]), int(g.parameters["generation"]), center, corners,
        int(dist[corners[0]]),
    )


def lattice_box(d: int, side: int, family: str = "lattice") -> WeightedGraph:
    """Nearest-neighbor grid ``{0..side-1}**d`` with unit weights.

    Facet vertices form the frontier; the coordinate-median vertex is stored as
    the ``center`` marker.
    """
    d, side = int(d), int(side)
    if d < 1 or side < 2:
        raise ValidationError(f"need d >= 1 and side >= 2, got d={d}, side={side}")
    if side ** d > max_vertices():
        raise SizeCapExceeded(f"latticeBox({d}, {side}) has {side ** d} vertices, cap is {max_vertices()}")
    coords = np.indices((side,) * d).reshape(d, -1).T.astype(np.int64)
    ids = np.arange(side ** d).reshape((side,) * d)
    chunks = []
    for axis in range(d):
        a = np.take(ids, np.arange(side - 1), axis=axis).ravel()
        b = np.take(ids, np.arange(1, side), axis=axis).ravel()
        chunks.append(np.column_stack([a, b]))
    edges = np.vstack(chunks)
    triples = np.column_stack([edges, np.ones(len(edges))])
    frontier = np.flatnonzero(np.any((coords == 0) | (coords == side - 1), axis=1))
    center = int(ids[(side // 2,) * d])
    params = {"d": d, "side": side} if family == "lattice" else {"length": side}
    return build_graph(
        triples,
        side ** d,
        coordinates=coords,
        frontier=frontier,
        family=family,
        parameters=params,
        markers={"center": center, "corners": []},
    )


def path_graph(length: int) -> WeightedGraph:
    """Path on ``length`` vertices; endpoints are the frontier."""
    return lattice_box(1, length, family="path")

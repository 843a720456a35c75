"""Pure-Python BFS kernels.

Reference implementations of the routines in ``_ckernels.pyx``. They share
signatures and return types so :mod:`fracsob.kernels` can swap one for the
other at import time.
"""
from collections import deque

import numpy as np


def bfs_distances(indptr, indices, sources, maxdepth):
    """Multi-source BFS truncated at ``maxdepth`` (negative means unbounded).

    Returns ``(dist, origin)``: ``dist[v]`` is the hop distance to the nearest
    source (-1 if not reached) and ``origin[v]`` the position in ``sources`` of
    the source that reached ``v`` first.
    """
    n = len(indptr) - 1
    dist = [-1] * n
    origin = [-1] * n
    queue = deque()
    for pos, s in enumerate(sources):
        s = int(s)
        if dist[s] < 0:
            dist[s] = 0
            origin[s] = pos
            queue.append(s)
    indptr = indptr.tolist() if hasattr(indptr, "tolist") else indptr
    indices = indices.tolist() if hasattr(indices, "tolist") else indices
    while queue:
        u = queue.popleft()
        du = dist[u]
        if 0 <= maxdepth <= du:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if dist[v] < 0:
                dist[v] = du + 1
                origin[v] = origin[u]
                queue.append(v)
    return np.asarray(dist, dtype=np.int64), np.asarray(origin, dtype=np.int64)


def _ball(indptr, indices, center, radius, mark, stamp):
    members = [center]
    depth = [0]
    mark[center] = stamp
    head = 0
    while head < len(members):
        u = members[head]
        du = depth[head]
        head += 1
        if du >= radius:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if mark[v] != stamp:
                mark[v] = stamp
                members.append(v)
                depth.append(du + 1)
    return members, depth


def ball_sums(indptr, indices, centers, radius, values):
    """Sum each row of ``values`` (shape ``(m, V)``) over ``B(c, radius)`` per center.

    Returns an array of shape ``(len(centers), m)``.
    """
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    m = values.shape[0]
    n = len(indptr) - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    cols = [values[i].tolist() for i in range(m)]
    mark = [-1] * n
    out = np.zeros((len(centers), m))
    for ci, c in enumerate(centers):
        members, _ = _ball(indptr, indices, int(c), radius, mark, ci)
        for i in range(m):
            col = cols[i]
            out[ci, i] = _neumaier(col[v] for v in members)
    return out


def pair_distance_sum(indptr, indices, members, weights, exponent, maxdepth):
    """Return ``sum_{y,z} d(y,z)**exponent * w_y * w_z`` over ordered member pairs.

    Distances are graph distances in the full graph, found by BFS truncated at
    ``maxdepth`` (negative means unbounded); ``0**0`` is taken as 1. Returns
    ``nan`` if some pair is farther apart than ``maxdepth``.
    """
    n = len(indptr) - 1
    if maxdepth < 0:
        maxdepth = n
    indptr = indptr.tolist()
    indices = indices.tolist()
    members = [int(v) for v in members]
    weights = [float(w) for w in weights]
    wmap = [0.0] * n
    inset = [False] * n
    for v, w in zip(members, weights):
        wmap[v] = w
        inset[v] = True
    mark = [-1] * n
    terms = []
    for stamp, y in enumerate(members):
        ball, depth = _ball(indptr, indices, y, maxdepth, mark, stamp)
        wy = wmap[y]
        found = 0
        for v, dv in zip(ball, depth):
            if inset[v]:
                found += 1
                terms.append((float(dv) ** exponent if dv > 0 else (1.0 if exponent == 0 else 0.0)) * wy * wmap[v])
        if found != len(members):
            return float("nan")
    return _neumaier(terms)


def _neumaier(values):
    total = 0.0
    comp = 0.0
    for x in values:
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp

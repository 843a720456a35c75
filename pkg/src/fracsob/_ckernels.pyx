# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled BFS kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, NAN

cnp.import_array()


cdef inline double _nadd(double total, double x, double* comp) nogil:
    cdef double t = total + x
    if fabs(total) >= fabs(x):
        comp[0] += (total - t) + x
    else:
        comp[0] += (x - t) + total
    return t


def bfs_distances(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                  sources, long maxdepth):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.int64_t[::1] src = np.ascontiguousarray(sources, dtype=np.int64)
    dist_arr = np.full(n, -1, dtype=np.int64)
    origin_arr = np.full(n, -1, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] origin = origin_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, pos, j
    cdef cnp.int64_t u, v, s, du
    with nogil:
        for pos in range(src.shape[0]):
            s = src[pos]
            if dist[s] < 0:
                dist[s] = 0
                origin[s] = pos
                queue[tail] = s
                tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if maxdepth >= 0 and du >= maxdepth:
                continue
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0:
                    dist[v] = du + 1
                    origin[v] = origin[u]
                    queue[tail] = v
                    tail += 1
    return dist_arr, origin_arr


cdef Py_ssize_t _ball(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                      cnp.int64_t center, long radius, cnp.int64_t[::1] mark,
                      cnp.int64_t stamp, cnp.int64_t[::1] members,
                      cnp.int64_t[::1] depth) nogil:
    cdef Py_ssize_t head = 0, tail = 1, j
    cdef cnp.int64_t u, v, du
    members[0] = center
    depth[0] = 0
    mark[center] = stamp
    while head < tail:
        u = members[head]
        du = depth[head]
        head += 1
        if du >= radius:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if mark[v] != stamp:
                mark[v] = stamp
                members[tail] = v
                depth[tail] = du + 1
                tail += 1
    return tail


def ball_sums(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
              centers, long radius, values):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef const double[:, ::1] vals = np.ascontiguousarray(np.atleast_2d(values), dtype=np.float64)
    cdef cnp.int64_t[::1] cs = np.ascontiguousarray(centers, dtype=np.int64)
    cdef Py_ssize_t m = vals.shape[0]
    out_arr = np.zeros((cs.shape[0], m))
    cdef double[:, ::1] out = out_arr
    cdef cnp.int64_t[::1] mark = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] members = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] depth = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t ci, i, k, size
    cdef double total, comp
    with nogil:
        for ci in range(cs.shape[0]):
            size = _ball(indptr, indices, cs[ci], radius, mark, ci, members, depth)
            for i in range(m):
                total = 0.0
                comp = 0.0
                for k in range(size):
                    total = _nadd(total, vals[i, members[k]], &comp)
                out[ci, i] = total + comp
    return out_arr


def pair_distance_sum(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                      members, weights, double exponent, long maxdepth):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.int64_t[::1] mem = np.ascontiguousarray(members, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] wmap = np.zeros(n)
    cdef cnp.int8_t[::1] inset = np.zeros(n, dtype=np.int8)
    cdef cnp.int64_t[::1] mark = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] ball = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] depth = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, k, size, found
    cdef cnp.int64_t v, dv
    cdef double total = 0.0, comp = 0.0, wy, term
    cdef bint short = False
    if maxdepth < 0:
        maxdepth = n
    for i in range(mem.shape[0]):
        wmap[mem[i]] = w[i]
        inset[mem[i]] = 1
    with nogil:
        for i in range(mem.shape[0]):
            size = _ball(indptr, indices, mem[i], maxdepth, mark, i, ball, depth)
            wy = wmap[mem[i]]
            found = 0
            for k in range(size):
                v = ball[k]
                if inset[v]:
                    found += 1
                    dv = depth[k]
                    if dv > 0:
                        term = pow(<double>dv, exponent)
                    elif exponent == 0:
                        term = 1.0
                    else:
                        term = 0.0
                    total = _nadd(total, term * wy * wmap[v], &comp)
            if found != mem.shape[0]:
                short = True
                break
    if short:
        return NAN
    return total + comp

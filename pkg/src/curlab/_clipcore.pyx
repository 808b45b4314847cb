# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled triangle/disk clipping kernel (same algorithm as _clippy)."""

from libc.math cimport atan2, sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef double _edge_contrib(double ax, double ay, double bx, double by,
                          double r2) nogil:
    cdef double dx = bx - ax
    cdef double dy = by - ay
    cdef double qa = dx * dx + dy * dy
    cdef double ts0 = -1.0, ts1 = -1.0
    cdef double qb, qc, disc, sq, t0, t1
    cdef int nts = 0
    if qa > 0.0:
        qb = ax * dx + ay * dy
        qc = ax * ax + ay * ay - r2
        disc = qb * qb - qa * qc
        if disc > 0.0:
            sq = sqrt(disc)
            t0 = (-qb - sq) / qa
            t1 = (-qb + sq) / qa
            if 0.0 < t0 < 1.0:
                if nts == 0:
                    ts0 = t0
                nts += 1
            if 0.0 < t1 < 1.0:
                if nts == 0:
                    ts0 = t1
                else:
                    ts1 = t1
                nts += 1
    cdef double total = 0.0
    cdef double t_prev = 0.0
    cdef double px = ax, py = ay
    cdef double t, qx, qy, mx, my, cross, dot
    cdef int k
    for k in range(nts + 1):
        if k == 0 and nts >= 1:
            t = ts0
        elif k == 1 and nts == 2:
            t = ts1
        else:
            t = 1.0
        qx = ax + t * dx
        qy = ay + t * dy
        mx = ax + 0.5 * (t_prev + t) * dx
        my = ay + 0.5 * (t_prev + t) * dy
        cross = px * qy - py * qx
        if mx * mx + my * my <= r2:
            total += 0.5 * cross
        else:
            dot = px * qx + py * qy
            total += 0.5 * r2 * atan2(cross, dot)
        px = qx
        py = qy
        t_prev = t
    return total


def tri_disk_area(double ax, double ay, double bx, double by,
                  double cx, double cy, double r):
    """Signed area of triangle (A,B,C) intersected with the disk |P| <= r."""
    cdef double r2 = r * r
    return (_edge_contrib(ax, ay, bx, by, r2)
            + _edge_contrib(bx, by, cx, cy, r2)
            + _edge_contrib(cx, cy, ax, ay, r2))


def tri_disk_areas(tris, double r):
    """Batch version: tris is (n, 3, 2); returns signed areas, shape (n,)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=3] T = np.ascontiguousarray(
        tris, dtype=np.float64)
    cdef Py_ssize_t n = T.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double r2 = r * r
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = (_edge_contrib(T[k, 0, 0], T[k, 0, 1],
                                T[k, 1, 0], T[k, 1, 1], r2)
                  + _edge_contrib(T[k, 1, 0], T[k, 1, 1],
                                  T[k, 2, 0], T[k, 2, 1], r2)
                  + _edge_contrib(T[k, 2, 0], T[k, 2, 1],
                                  T[k, 0, 0], T[k, 0, 1], r2))
    return out

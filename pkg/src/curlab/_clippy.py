"""Pure-Python twin of the triangle/disk clipping kernel.

Computes the exact area of a planar triangle intersected with a disk centered
at the origin, by summing per-edge contributions: inside sub-segments add the
signed area of the triangle (0, P0, P1), outside sub-segments add the signed
circular sector between the two rays. Exact up to roundoff; no subdivision.
"""

from math import atan2, sqrt

import numpy as np


def _edge_contrib(ax, ay, bx, by, r2, r):
    # sub-segment split points where |P| = r along A + t(B - A)
    dx = bx - ax
    dy = by - ay
    qa = dx * dx + dy * dy
    ts = []
    if qa > 0.0:
        qb = ax * dx + ay * dy
        qc = ax * ax + ay * ay - r2
        disc = qb * qb - qa * qc
        if disc > 0.0:
            sq = sqrt(disc)
            t0 = (-qb - sq) / qa
            t1 = (-qb + sq) / qa
            if 0.0 < t0 < 1.0:
                ts.append(t0)
            if 0.0 < t1 < 1.0:
                ts.append(t1)
    total = 0.0
    t_prev = 0.0
    px, py = ax, ay
    for t in ts + [1.0]:
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
        px, py = qx, qy
        t_prev = t
    return total


def tri_disk_area(ax, ay, bx, by, cx, cy, r):
    """Signed area of triangle (A,B,C) intersected with the disk |P| <= r."""
    r2 = r * r
    return (
        _edge_contrib(ax, ay, bx, by, r2, r)
        + _edge_contrib(bx, by, cx, cy, r2, r)
        + _edge_contrib(cx, cy, ax, ay, r2, r)
    )


def tri_disk_areas(tris, r):
    """Batch version: tris is (n, 3, 2); returns signed areas, shape (n,)."""
    tris = np.asarray(tris, dtype=float)
    out = np.empty(len(tris))
    for k in range(len(tris)):
        t = tris[k]
        out[k] = tri_disk_area(
            t[0, 0], t[0, 1], t[1, 0], t[1, 1], t[2, 0], t[2, 1], r
        )
    return out

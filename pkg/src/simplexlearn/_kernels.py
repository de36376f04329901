"""Compiled inner loops: triangle clipping and the pairwise Scheffe contests.

Every kernel is a serial loop with a fixed visiting order, so results are
bit-identical regardless of thread settings.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_MAXV = 12
_SNAP_RTOL = 1e-12


@njit(cache=True)
def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@njit(cache=True)
def _ccw(tri, out):
    # copy triangle into out with counter-clockwise orientation
    if _cross(tri[0, 0], tri[0, 1], tri[1, 0], tri[1, 1], tri[2, 0], tri[2, 1]) >= 0:
        for i in range(3):
            out[i, 0] = tri[i, 0]
            out[i, 1] = tri[i, 1]
    else:
        for i in range(3):
            out[i, 0] = tri[2 - i, 0]
            out[i, 1] = tri[2 - i, 1]


@njit(cache=True)
def polygon_area(poly, n):
    s = 0.0
    for i in range(n):
        j = (i + 1) % n
        s += poly[i, 0] * poly[j, 1] - poly[j, 0] * poly[i, 1]
    return abs(s) * 0.5


@njit(cache=True)
def triangle_intersection_area(a, b):
    """Area of the intersection of two triangles: clip ``a`` by the half-planes of ``b``, then shoelace."""
    ta = np.empty((3, 2))
    tb = np.empty((3, 2))
    _ccw(a, ta)
    _ccw(b, tb)
    cur = np.empty((_MAXV, 2))
    nxt = np.empty((_MAXV, 2))
    n = 3
    for i in range(3):
        cur[i, 0] = ta[i, 0]
        cur[i, 1] = ta[i, 1]
    for e in range(3):
        if n == 0:
            break
        cx, cy = tb[e, 0], tb[e, 1]
        dx, dy = tb[(e + 1) % 3, 0], tb[(e + 1) % 3, 1]
        m = 0
        sx, sy = cur[n - 1, 0], cur[n - 1, 1]
        s_side = _cross(cx, cy, dx, dy, sx, sy)
        for v in range(n):
            px, py = cur[v, 0], cur[v, 1]
            p_side = _cross(cx, cy, dx, dy, px, py)
            if p_side >= 0:
                if s_side < 0:
                    t = s_side / (s_side - p_side)
                    nxt[m, 0] = sx + t * (px - sx)
                    nxt[m, 1] = sy + t * (py - sy)
                    m += 1
                nxt[m, 0] = px
                nxt[m, 1] = py
                m += 1
            elif s_side >= 0:
                t = s_side / (s_side - p_side)
                nxt[m, 0] = sx + t * (px - sx)
                nxt[m, 1] = sy + t * (py - sy)
                m += 1
            sx, sy, s_side = px, py, p_side
        for v in range(m):
            cur[v, 0] = nxt[v, 0]
            cur[v, 1] = nxt[v, 1]
        n = m
    if n < 3:
        return 0.0
    return polygon_area(cur, n)


@njit(cache=True)
def snap_intersection(inter, vi, vj):
    """Clamp an intersection volume to [0, min(vi, vj)], snapping round-off near containment."""
    cap = vi if vi < vj else vj
    if inter >= cap * (1.0 - _SNAP_RTOL):
        return cap
    return inter if inter > 0.0 else 0.0


@njit(cache=True)
def _contest(vi, vj, inter, ci, cij, n):
    """(P_i(A), P_j(A), mu_n(A)) for A = {f_i > f_j}, with counts of samples in S_i and S_i & S_j."""
    if vi < vj:
        return 1.0, inter / vj, ci / n
    return (vi - inter) / vi, 0.0, (ci - cij) / n


@njit(cache=True, nogil=True)
def tournament_intervals(lo, hi, c_lt_lo, c_le_hi, n, record, p_i, p_j, mu, beats):
    """All pairwise contests for K=1 candidates [lo, hi]; returns win counts."""
    m = lo.shape[0]
    wins = np.zeros(m, dtype=np.int64)
    for i in range(m):
        vi = hi[i] - lo[i]
        ci = c_le_hi[i] - c_lt_lo[i]
        for j in range(i + 1, m):
            vj = hi[j] - lo[j]
            a = lo[i] if lo[i] >= lo[j] else lo[j]
            ca = c_lt_lo[i] if lo[i] >= lo[j] else c_lt_lo[j]
            b = hi[i] if hi[i] <= hi[j] else hi[j]
            cb = c_le_hi[i] if hi[i] <= hi[j] else c_le_hi[j]
            inter = b - a if b > a else 0.0
            cij = cb - ca if cb > ca else 0
            pi, pj, mun = _contest(vi, vj, inter, ci, cij, n)
            i_wins = abs(pi - mun) <= abs(pj - mun)
            if i_wins:
                wins[i] += 1
            else:
                wins[j] += 1
            if record:
                p_i[i, j] = pi
                p_j[i, j] = pj
                mu[i, j] = mun
                beats[i, j] = i_wins
                beats[j, i] = not i_wins
    return wins


@njit(cache=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def _and_count(bits, i, j):
    c = 0
    for w in range(bits.shape[1]):
        c += _popcount64(bits[i, w] & bits[j, w])
    return c


@njit(cache=True, nogil=True)
def tournament_triangles(tris, vols, counts, bits, n, record, p_i, p_j, mu, beats):
    """All pairwise contests for K=2 candidates with exact intersection areas."""
    m = tris.shape[0]
    wins = np.zeros(m, dtype=np.int64)
    for i in range(m):
        vi = vols[i]
        for j in range(i + 1, m):
            vj = vols[j]
            inter = snap_intersection(triangle_intersection_area(tris[i], tris[j]), vi, vj)
            cij = _and_count(bits, i, j) if vi >= vj else 0
            pi, pj, mun = _contest(vi, vj, inter, counts[i], cij, n)
            i_wins = abs(pi - mun) <= abs(pj - mun)
            if i_wins:
                wins[i] += 1
            else:
                wins[j] += 1
            if record:
                p_i[i, j] = pi
                p_j[i, j] = pj
                mu[i, j] = mun
                beats[i, j] = i_wins
                beats[j, i] = not i_wins
    return wins

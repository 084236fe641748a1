"""Minimal marching-squares contour extraction with NaN masking.

Cells with any undefined corner are skipped, which is exactly what the
phase-portrait command needs: holes in the reduced function show up as
gaps in the level curves.
"""
from __future__ import annotations

import math

import numpy as np

# edge index -> (corner, corner); corners are 0:(i,j) 1:(i+1,j) 2:(i+1,j+1) 3:(i,j+1)
_EDGES = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (3, 0)}

# case index (bit k set <=> corner k above level) -> list of edge pairs to join
_CASES = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    8: [(2, 3)], 7: [(2, 3)],
    3: [(3, 1)], 12: [(3, 1)],
    6: [(0, 2)], 9: [(0, 2)],
    5: [(3, 2), (0, 1)],   # saddle; disambiguated by the cell mean
    10: [(3, 0), (1, 2)],
}
_CASES_FLIPPED = {5: [(3, 0), (1, 2)], 10: [(3, 2), (0, 1)]}


def _interp(xa, ya, va, xb, yb, vb, level):
    t = (level - va) / (vb - va)
    t = min(max(t, 0.0), 1.0)
    return (xa + t * (xb - xa), ya + t * (yb - ya))


def contour_segments(x: np.ndarray, y: np.ndarray, z: np.ndarray,
                     level: float) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Line segments of the level set of z (shape (len(y), len(x)))."""
    segs = []
    ny, nx = z.shape
    for j in range(ny - 1):
        for i in range(nx - 1):
            corners = (
                (x[i], y[j], z[j, i]),
                (x[i + 1], y[j], z[j, i + 1]),
                (x[i + 1], y[j + 1], z[j + 1, i + 1]),
                (x[i], y[j + 1], z[j + 1, i]),
            )
            vals = [c[2] for c in corners]
            if any(math.isnan(v) for v in vals):
                continue
            idx = sum(1 << k for k, v in enumerate(vals) if v > level)
            pairs = _CASES[idx]
            if idx in (5, 10):
                if 0.25 * sum(vals) <= level:
                    pairs = _CASES_FLIPPED[idx]
            for ea, eb in pairs:
                ca, cb = _EDGES[ea]
                cc, cd = _EDGES[eb]
                pa = _interp(*corners[ca][:2], vals[ca], *corners[cb][:2], vals[cb], level=level)
                pb = _interp(*corners[cc][:2], vals[cc], *corners[cd][:2], vals[cd], level=level)
                if pa != pb:
                    segs.append((pa, pb))
    return segs


def join_segments(segs, decimals: int = 9) -> list[list[tuple[float, float]]]:
    """Chain segments into polylines by matching rounded endpoints."""
    key = lambda p: (round(p[0], decimals), round(p[1], decimals))
    seen: set[tuple] = set()
    unique = []
    for a, b in segs:
        ka, kb = key(a), key(b)
        if ka == kb:
            continue  # zero length after rounding
        pair = frozenset((ka, kb))
        if pair in seen:
            continue  # duplicate from a level hitting a grid node exactly
        seen.add(pair)
        unique.append((a, b))
    segs = unique
    adjacency: dict[tuple, list[int]] = {}
    for n, (a, b) in enumerate(segs):
        adjacency.setdefault(key(a), []).append(n)
        adjacency.setdefault(key(b), []).append(n)
    used = [False] * len(segs)
    polylines = []
    for start in range(len(segs)):
        if used[start]:
            continue
        used[start] = True
        a, b = segs[start]
        line = [a, b]
        # extend forward then backward
        for end in (True, False):
            while True:
                tip = key(line[-1] if end else line[0])
                nxt = next((m for m in adjacency.get(tip, []) if not used[m]), None)
                if nxt is None:
                    break
                used[nxt] = True
                pa, pb = segs[nxt]
                new_pt = pb if key(pa) == tip else pa
                if end:
                    line.append(new_pt)
                else:
                    line.insert(0, new_pt)
        polylines.append(line)
    return polylines


def contour_polylines(x, y, z, level):
    return join_segments(contour_segments(x, y, z, level))

"""Exact Euclidean distance to the discrete boundary.

Both implementations minimise over the same boundary node set and keep the
squared distances in exact integer arithmetic, so they agree bit-for-bit
after the final square root. The brute-force variant is the ground-truth
oracle; the two-pass variant is the fast path used by the harness.
"""
from __future__ import annotations

import numpy as np

from .grid import BinaryMask, BoundarySet, ScalarField, boundary_mask, validate_mask

_CHUNK = 1 << 21  # cap on (inside x boundary) matrix entries per block


def squared_edt_bruteforce(mask: BinaryMask, boundary: BoundarySet) -> np.ndarray:
    """Integer squared distance to the nearest boundary node, at inside nodes.

    Returns an int64 array aligned with ``np.argwhere(mask.inside)``.
    """
    validate_mask(mask)
    pts = np.argwhere(mask.inside).astype(np.int64)
    bnd = boundary.points.astype(np.int64)
    n = pts.shape[0]
    out = np.empty(n, dtype=np.int64)
    step = max(1, _CHUNK // max(1, bnd.shape[0]))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        dr = pts[lo:hi, 0:1] - bnd[None, :, 0]
        dc = pts[lo:hi, 1:2] - bnd[None, :, 1]
        out[lo:hi] = (dr * dr + dc * dc).min(axis=1)
    return out


def edt_bruteforce(mask: BinaryMask, boundary: BoundarySet) -> ScalarField:
    """Ground-truth distance field: min over boundary nodes of ||x - p|| * h."""
    d2 = squared_edt_bruteforce(mask, boundary)
    return _field_from_squared(mask, d2)


def _column_pass(seeds: np.ndarray) -> np.ndarray:
    """Per-column squared distance to the nearest seed in the same column.

    Columns without a seed get a sentinel larger than any achievable squared
    distance on the grid.
    """
    h, w = seeds.shape
    big = np.int64(2 * (h + w))
    dist = np.full((h, w), big, dtype=np.int64)
    run = np.full(w, big, dtype=np.int64)
    for r in range(h):
        run += 1
        run[seeds[r]] = 0
        np.minimum(run, big, out=run)
        dist[r] = run
    run = np.full(w, big, dtype=np.int64)
    for r in range(h - 1, -1, -1):
        run += 1
        run[seeds[r]] = 0
        np.minimum(run, big, out=run)
        np.minimum(dist[r], run, out=dist[r])
    return dist * dist


def _row_envelope(f: list[int], w: int) -> list[int]:
    """1-D squared-distance transform of row data ``f`` by lower envelope of parabolas.

    Parabola intersections are compared as exact rationals (integer cross
    products), so the output matches brute force in integer arithmetic.
    """
    v = [0] * w  # column of the parabola owning each envelope segment
    zn = [0] * w  # left edge of segment i is zn[i]/zd[i]; segment 0 starts at -inf
    zd = [1] * w
    k = 0
    for q in range(1, w):
        while True:
            p = v[k]
            sn = f[q] + q * q - f[p] - p * p
            sd = 2 * (q - p)
            if k > 0 and sn * zd[k] <= zn[k] * sd:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        zn[k], zd[k] = sn, sd
    out = [0] * w
    j = 0
    for q in range(w):
        while j < k and zn[j + 1] < q * zd[j + 1]:
            j += 1
        out[q] = (q - v[j]) * (q - v[j]) + f[v[j]]
    return out


def squared_edt_fast(mask: BinaryMask, boundary: BoundarySet) -> np.ndarray:
    """Exact two-pass squared distance transform seeded at the boundary nodes."""
    validate_mask(mask)
    seeds = np.zeros(mask.inside.shape, dtype=bool)
    seeds[boundary.points[:, 0], boundary.points[:, 1]] = True
    d1 = _column_pass(seeds)
    h, w = seeds.shape
    d2 = np.empty((h, w), dtype=np.int64)
    for r in range(h):
        d2[r] = _row_envelope([int(x) for x in d1[r]], w)
    return d2[mask.inside]


def edt_fast(mask: BinaryMask, boundary: BoundarySet) -> ScalarField:
    """Fast exact distance field; values equal :func:`edt_bruteforce` bit-for-bit."""
    d2 = squared_edt_fast(mask, boundary)
    return _field_from_squared(mask, d2)


def medial_axis(mask: BinaryMask, boundary: BoundarySet) -> np.ndarray:
    """Bool array marking inside nodes with more than one nearest boundary node.

    Ties are decided in exact integer arithmetic on squared distances, so the
    result is the discrete skeleton where the distance gradient is
    discontinuous.
    """
    validate_mask(mask)
    pts = np.argwhere(mask.inside).astype(np.int64)
    bnd = boundary.points.astype(np.int64)
    n = pts.shape[0]
    ties = np.empty(n, dtype=np.int64)
    step = max(1, _CHUNK // max(1, bnd.shape[0]))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        dr = pts[lo:hi, 0:1] - bnd[None, :, 0]
        dc = pts[lo:hi, 1:2] - bnd[None, :, 1]
        d2 = dr * dr + dc * dc
        ties[lo:hi] = (d2 == d2.min(axis=1, keepdims=True)).sum(axis=1)
    out = np.zeros(mask.inside.shape, dtype=bool)
    out[pts[:, 0], pts[:, 1]] = ties >= 2
    return out


def _field_from_squared(mask: BinaryMask, d2_inside: np.ndarray) -> ScalarField:
    values = np.full(mask.inside.shape, np.nan)
    values[mask.inside] = np.sqrt(d2_inside.astype(np.float64)) * mask.spacing
    bnd = boundary_mask(mask)
    values[bnd] = 0.0
    return ScalarField(mask=mask, values=values, defined=mask.inside | bnd)

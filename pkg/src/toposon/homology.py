"""Betti numbers beta0/beta1 over GF(2) by boundary-matrix ranks.

beta0 = s0 - rank d1 and beta1 = s1 - rank d1 - rank d2, so only the
2-skeleton ever enters the linear algebra.  beta0_unionfind is a separate
connectivity route kept as a cross-check of the rank path.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels

__all__ = [
    "BettiPair",
    "BitMatrix",
    "boundary_matrix",
    "rank_gf2",
    "betti",
    "betti_from_skeleton",
    "beta0_unionfind",
]


class BettiPair(NamedTuple):
    beta0: int
    beta1: int


class BitMatrix:
    """Dense GF(2) matrix, rows packed into uint64 words (LSB first)."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows, cols):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        self.words = np.zeros((rows, max(1, (cols + 63) // 64)), dtype=np.uint64)

    def set(self, i, j):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("bit out of range")
        self.words[i, j >> 6] |= np.uint64(1 << (j & 63))

    def get(self, i, j):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("bit out of range")
        return bool(self.words[i, j >> 6] >> np.uint64(j & 63) & np.uint64(1))

    def to_dense(self):
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j in range(self.cols):
            out[:, j] = (self.words[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)
        return out


def _pack_columns(n_rows, n_cols, row_idx, col_idx):
    """BitMatrix with the given (row, col) bits set (vectorized)."""
    m = BitMatrix(n_rows, n_cols)
    if len(row_idx):
        r = np.asarray(row_idx, dtype=np.int64)
        c = np.asarray(col_idx, dtype=np.int64)
        np.bitwise_or.at(
            m.words, (r, c >> 6), np.uint64(1) << (c & 63).astype(np.uint64)
        )
    return m


def boundary_matrix(x, k):
    """GF(2) boundary operator d_k: rows are (k-1)-simplices, columns are
    k-simplices, both in lexicographic order."""
    if k < 1:
        raise ValueError("boundary operator needs k >= 1")
    high = x.simplices(k)
    low = x.simplices(k - 1)
    return _boundary_from_lists(low, high, k)


def _boundary_from_lists(low, high, k):
    idx = {t: i for i, t in enumerate(low)}
    rows = []
    cols = []
    for j, t in enumerate(high):
        for drop in range(k + 1):
            f = t[:drop] + t[drop + 1:]
            rows.append(idx[f])
            cols.append(j)
    return _pack_columns(len(low), len(high), rows, cols)


def rank_gf2(m):
    """Rank of a BitMatrix over GF(2); dispatches to the active kernel."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(kernels.rank_u64(m.words.copy()))


def betti_from_skeleton(vertices, edges, triangles):
    """(beta0, beta1) from explicit 2-skeleton lists.

    vertices: vertex count or sorted id list; edges/triangles: sorted tuples.
    Shared by betti() and the planner loops that rebuild skeletons directly.
    """
    if isinstance(vertices, int):
        s0 = vertices
        verts = [(v,) for v in range(s0)]
    else:
        verts = [(v,) for v in vertices]
        s0 = len(verts)
    if s0 == 0:
        return BettiPair(0, 0)
    edges = sorted(edges)
    s1 = len(edges)
    r1 = rank_gf2(_boundary_from_lists(verts, edges, 1)) if s1 else 0
    triangles = sorted(triangles)
    s2 = len(triangles)
    r2 = rank_gf2(_boundary_from_lists(edges, triangles, 2)) if s2 else 0
    return BettiPair(s0 - r1, s1 - r1 - r2)


def betti(x):
    """(beta0, beta1) of a complex; the empty complex gives (0, 0).

    Complexes are value-immutable, so the result is memoized per instance.
    """
    if x._betti_cache is None:
        x._betti_cache = betti_from_skeleton(
            x.vertices(), x.simplices(1), x.simplices(2)
        )
    return x._betti_cache


def beta0_unionfind(x):
    """Connected components of the 1-skeleton via union-find.

    Independent of the boundary-matrix route on purpose; used to
    cross-check beta0.
    """
    parent = {v: v for v in x.vertices()}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for (u, v) in x.simplices(1):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(v) for v in parent})

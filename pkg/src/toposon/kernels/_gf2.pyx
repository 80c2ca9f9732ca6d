# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) rank on uint64-packed bit matrices."""

import numpy as np

cimport numpy as cnp

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


def rank_u64(cnp.uint64_t[:, ::1] m):
    """Rank over GF(2); m is scrambled in place (rows packed LSB-first)."""
    cdef Py_ssize_t nrows = m.shape[0]
    cdef Py_ssize_t nwords = m.shape[1]
    cdef Py_ssize_t i, j, w, pos, p
    cdef int rank = 0
    cdef cnp.uint64_t word
    if nrows == 0 or nwords == 0:
        return 0
    pivot_of_bit = np.full(nwords * 64, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] piv = pivot_of_bit
    with nogil:
        for i in range(nrows):
            w = 0
            while True:
                while w < nwords and m[i, w] == 0:
                    w += 1
                if w == nwords:
                    break  # row reduced to zero
                word = m[i, w]
                pos = w * 64 + __builtin_ctzll(word)
                p = piv[pos]
                if p < 0:
                    piv[pos] = i
                    rank += 1
                    break
                for j in range(w, nwords):
                    m[i, j] ^= m[p, j]
    return rank

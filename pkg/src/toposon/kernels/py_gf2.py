"""Pure-Python GF(2) rank, used when the compiled kernel is absent.

Rows are converted to arbitrary-precision ints so the XOR work still runs
at C speed; only the pivot bookkeeping is interpreted Python.
"""

from bisect import bisect_left


def rank_u64(words):
    """Rank over GF(2) of a row-major uint64-packed bit matrix.

    words: C-contiguous numpy array, shape (rows, nwords), dtype uint64,
    least-significant word first.  Matches the compiled kernel's contract
    (the input may be consumed).
    """
    nrows = words.shape[0]
    if nrows == 0:
        return 0
    raw = words.tobytes()
    stride = words.shape[1] * 8
    rows = [
        int.from_bytes(raw[i * stride : (i + 1) * stride], "little")
        for i in range(nrows)
    ]
    piv_bits = []  # pivot masks, ascending
    piv_rows = []
    rank = 0
    for r in rows:
        while r:
            low = r & -r
            i = bisect_left(piv_bits, low)
            if i < len(piv_bits) and piv_bits[i] == low:
                r ^= piv_rows[i]
            else:
                piv_bits.insert(i, low)
                piv_rows.insert(i, r)
                rank += 1
                break
    return rank

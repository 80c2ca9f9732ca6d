"""GF(2) linear-algebra kernels.

The compiled Cython kernel is preferred; a pure-Python implementation is
selected when the extension is unavailable or TOPOSON_PURE is set.  Both
expose ``rank_u64(words)``: rank over GF(2) of a bit matrix packed row-major
into uint64 words (LSB first).  The input array is scrambled in place, so
callers pass a scratch copy.
"""

import os

from . import py_gf2

if os.environ.get("TOPOSON_PURE"):
    rank_u64 = py_gf2.rank_u64
    BACKEND = "python"
else:
    try:
        from . import _gf2

        rank_u64 = _gf2.rank_u64
        BACKEND = "cython"
    except ImportError:
        rank_u64 = py_gf2.rank_u64
        BACKEND = "python"

__all__ = ["rank_u64", "BACKEND", "py_gf2"]

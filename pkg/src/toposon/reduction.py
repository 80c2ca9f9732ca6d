"""Homology-driven vertex reduction.

The degree of a 2-simplex is the largest dimension of a simplex containing
it; the index of a vertex is the smallest degree over its triangles (-1 if
it has none or is flagged unremovable).  High-index vertices sit deep in
thick regions, so removing them is the cheapest bet that keeps (beta0,
beta1) intact; a removal that would change the pair is rolled back and the
vertex flagged for good.  reduce_with_guards exposes the same loop with
caller-chosen stop/veto predicates so the planners can reuse it.
"""

from __future__ import annotations

from itertools import combinations

from .complexes import maximal_simplices
from .geometry import as_rng
from .homology import betti

__all__ = ["degrees", "indices", "index_max", "ReduceState",
           "reduce_complex", "reduce_with_guards"]


def degrees(x):
    """dict 2-simplex -> degree, from the maximal simplices only (every
    containing simplex lies inside a maximal one)."""
    degs = {}
    for m in maximal_simplices(x):
        d = len(m) - 1
        if d < 2:
            continue
        for t in combinations(m, 3):
            if degs.get(t, -1) < d:
                degs[t] = d
    return degs


def indices(x, flags=(), degs=None):
    """dict vertex -> index: min degree over its 2-cofaces, -1 when the
    vertex has no triangle or is flagged."""
    if degs is None:
        degs = degrees(x)
    acc = {}
    for t, d in degs.items():
        for v in t:
            if acc.get(v, d + 1) > d:
                acc[v] = d
    idx = {v: acc.get(v, -1) for v in x.vertices()}
    for v in flags:
        if v in idx:
            idx[v] = -1
    return idx


def index_max(idx):
    return max(idx.values(), default=-1)


class ReduceState:
    """Loop state handed to stop/veto/fallback callbacks."""

    __slots__ = ("complex", "indices", "flags", "removed", "rng")

    def __init__(self, complex_, indices_, flags, removed, rng):
        self.complex = complex_
        self.indices = indices_
        self.flags = flags
        self.removed = removed
        self.rng = rng


def reduce_with_guards(x, flags, rng_seed, stop=None, veto=None, *,
                       index_floor=2, fallback=None, on_commit=None,
                       trace=None):
    """Guarded vertex-removal loop.

    Repeatedly draws a uniform vertex among those at the maximal index
    while that maximum exceeds index_floor (or asks ``fallback`` for a
    candidate once no index qualifies).  ``stop`` is checked first each
    iteration; a candidate rejected by ``veto`` is flagged (index -1,
    permanent) instead of removed.  Returns (complex, removed ids in
    order).  ``trace`` gets one line per iteration:
    step vertex index action beta0 beta1.
    """
    flags = set(flags)
    unknown = flags - x.vertex_set()
    if unknown:
        raise ValueError(f"flagged ids not in complex: {sorted(unknown)}")
    rng = as_rng(rng_seed)
    removed = []
    idx = indices(x, flags)
    step = 0
    while True:
        state = ReduceState(x, idx, flags, removed, rng)
        if stop is not None and stop(state):
            break
        imax = index_max(idx)
        if imax > index_floor:
            cands = sorted(v for v, i in idx.items() if i == imax)
            w = cands[int(rng.integers(len(cands)))]
        elif fallback is not None:
            w = fallback(state)
            if w is None:
                break
        else:
            break
        w_index = idx[w]
        trial = x.delete_vertex(w)
        if veto is not None and veto(state, w, trial):
            flags.add(w)
            idx[w] = -1
            action = "flagged"
        else:
            x = trial
            removed.append(w)
            if on_commit is not None:
                on_commit(state, w)
            idx = indices(x, flags)
            action = "removed"
        if trace is not None:
            b0, b1 = betti(x)
            trace.write(f"{step} {w} {w_index} {action} {b0} {b1}\n")
        step += 1
    return x, removed


def reduce_complex(x, flags, rng_seed, trace=None):
    """Betti-preserving reduction: remove max-index vertices while the
    index maximum exceeds 2, flagging any removal that changes (beta0,
    beta1).  Flagged boundary ids are never touched."""
    target = betti(x)
    return reduce_with_guards(
        x, flags, rng_seed,
        veto=lambda state, w, trial: betti(trial) != target,
        index_floor=2, trace=trace,
    )

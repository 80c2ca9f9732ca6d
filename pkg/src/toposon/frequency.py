"""Frequency auto-planning on the Rips complex.

Interference is a graph: u and v conflict when either sits inside the
other's rejection disk (strict).  Planning peels the complex in passes:
each pass runs the index-driven removal loop with no homology veto until
the surviving vertices are pairwise conflict-free, hands them the pass
frequency, and recurses on the complex restricted to the removed vertices.
Once a pass's complex has no triangles left every index is -1; the loop
then falls back to removing a random endpoint of a surviving conflict
edge.  greedy_coloring on the interference graph is the baseline.
"""

from __future__ import annotations

import numpy as np

from .complexes import restrict
from .geometry import as_rng
from .reduction import reduce_with_guards

__all__ = [
    "InterferenceGraph",
    "FrequencyPlan",
    "interference_graph",
    "auto_plan",
    "greedy_coloring",
    "coverage_per_frequency",
    "plan_is_valid",
]


class InterferenceGraph:
    """Conflict graph over node ids 0..n-1."""

    __slots__ = ("n", "neighbors")

    def __init__(self, n, edges):
        self.n = n
        self.neighbors = {v: set() for v in range(n)}
        for (u, v) in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad interference edge ({u}, {v})")
            self.neighbors[u].add(v)
            self.neighbors[v].add(u)

    def edges(self):
        return sorted(
            (u, v) for u, nbrs in self.neighbors.items() for v in nbrs if u < v
        )

    def n_edges(self):
        return sum(len(s) for s in self.neighbors.values()) // 2

    def max_degree(self):
        return max((len(s) for s in self.neighbors.values()), default=0)


class FrequencyPlan:
    """Total assignment node id -> frequency 0..n_freqs-1."""

    __slots__ = ("assignment", "n_freqs")

    def __init__(self, assignment, n_freqs):
        self.assignment = dict(assignment)
        self.n_freqs = int(n_freqs)
        used = set(self.assignment.values())
        if used and (min(used) < 0 or max(used) >= self.n_freqs):
            raise ValueError("frequency outside 0..n_freqs-1")


def interference_graph(ns):
    """Edge iff dist(u, v) < r_rej(u) or dist(u, v) < r_rej(v) (strict)."""
    n = ns.n
    edges = []
    if n > 1:
        dx = ns.xs[:, None] - ns.xs[None, :]
        dy = ns.ys[:, None] - ns.ys[None, :]
        d2 = dx * dx + dy * dy
        rr = np.maximum(ns.r_rej[:, None], ns.r_rej[None, :]) ** 2
        hit = d2 < rr
        iu = np.triu_indices(n, k=1)
        for u, v in zip(*iu):
            if hit[u, v]:
                edges.append((int(u), int(v)))
    return InterferenceGraph(n, edges)


def _has_conflict(verts, ig):
    for v in verts:
        if ig.neighbors[v] & verts:
            return True
    return False


def auto_plan(x, ig, rng_seed):
    """Assign frequencies by repeated conflict-free peeling of the complex.

    Requires x's vertex set to equal the interference-graph node set.
    Returns a total FrequencyPlan; survivors of pass i get frequency i.
    """
    if x.n_vertices == 0:
        raise ValueError("cannot plan an empty complex")
    if x.vertex_set() != set(range(ig.n)):
        raise ValueError("complex vertices and interference nodes disagree")
    rng = as_rng(rng_seed)
    assignment = {}
    current = x
    freq = 0
    while True:
        survivors, removed = _peel_pass(current, ig, rng)
        for v in survivors.vertices():
            assignment[v] = freq
        freq += 1
        if not removed:
            break
        current = restrict(current, removed)
    return FrequencyPlan(assignment, freq)


def _peel_pass(x, ig, rng):
    def stop(state):
        return not _has_conflict(state.complex.vertex_set(), ig)

    def fallback(state):
        verts = state.complex.vertex_set()
        conflict_edges = sorted(
            (u, v)
            for u in verts
            for v in ig.neighbors[u] & verts
            if u < v
        )
        if not conflict_edges:
            return None
        e = conflict_edges[int(state.rng.integers(len(conflict_edges)))]
        return e[int(state.rng.integers(2))]

    return reduce_with_guards(
        x, (), rng, stop=stop, veto=None, index_floor=-1, fallback=fallback
    )


def greedy_coloring(ig, order=None):
    """First-fit coloring of the interference graph in the given vertex
    order (ids ascending by default).  Uses at most max_degree + 1 colors."""
    order = list(range(ig.n)) if order is None else list(order)
    if sorted(order) != list(range(ig.n)):
        raise ValueError("order must be a permutation of the node ids")
    color = {}
    n_used = 0
    for v in order:
        taken = {color[u] for u in ig.neighbors[v] if u in color}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
        n_used = max(n_used, c + 1)
    return FrequencyPlan(color, n_used if order else 0)


def plan_is_valid(plan, ig):
    """Total on the node set and conflict-free across every edge."""
    if set(plan.assignment) != set(range(ig.n)):
        return False
    return all(
        plan.assignment[u] != plan.assignment[v] for (u, v) in ig.edges()
    )


def coverage_per_frequency(ns, plan, resolution=256):
    """Fraction of the covered area reached per frequency.

    The square is rasterized at resolution^2 cells; a cell counts for
    frequency i when its center lies strictly inside the communication
    disk of some node with frequency i.  Fractions are relative to the
    cells covered by any node, so they sum to >= 1 with overlap.
    """
    if resolution < 16:
        raise ValueError("resolution below 16 is too coarse to mean anything")
    if set(plan.assignment) != set(range(ns.n)):
        raise ValueError("plan does not cover the node set")
    step = ns.side / resolution
    centers = (np.arange(resolution) + 0.5) * step
    cx = centers[None, :]
    cy = centers[:, None]
    per_freq = np.zeros((plan.n_freqs, resolution, resolution), dtype=bool)
    for i in range(ns.n):
        r = ns.r_comm[i]
        if r <= 0:
            continue
        d2 = (cx - ns.xs[i]) ** 2 + (cy - ns.ys[i]) ** 2
        per_freq[plan.assignment[i]] |= d2 < r * r
    any_cov = per_freq.any(axis=0)
    denom = int(any_cov.sum())
    if denom == 0:
        return np.zeros(plan.n_freqs)
    return per_freq.reshape(plan.n_freqs, -1).sum(axis=1) / denom

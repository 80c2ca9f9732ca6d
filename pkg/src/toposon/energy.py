"""Energy conservation under per-group QoS quotas.

Groups are founded by walking all simplices from largest to smallest
(seeded shuffle inside a size class): a simplex whose vertices are all
still ungrouped founds a group of that size with a quota Q drawn uniform
in {1..size}.  conserve() then switches off nodes with the Betti-guarded
removal loop, additionally vetoing any removal that would drop a group
below its quota, and finally shrinks the coverage radii of the kept nodes
one by one while (beta0, beta1) stays put.
"""

from __future__ import annotations

import numpy as np

from .geometry import as_rng
from .homology import betti, betti_from_skeleton
from .reduction import reduce_with_guards

__all__ = ["QoSGroups", "EnergyResult", "make_qos_groups", "conserve"]


class QoSGroups:
    """Partition of the vertices into groups with sizes and quotas."""

    __slots__ = ("group_of", "size", "quota")

    def __init__(self, group_of, size, quota):
        self.group_of = dict(group_of)
        self.size = dict(size)
        self.quota = dict(quota)
        for g, q in self.quota.items():
            if not 1 <= q <= self.size[g]:
                raise ValueError(f"quota {q} outside 1..size of group {g}")

    @property
    def n_groups(self):
        return len(self.size)

    def n_optimal(self):
        """Sum of the quotas: nodes that must stay on."""
        return sum(self.quota.values())

    def members(self, g):
        return sorted(v for v, gg in self.group_of.items() if gg == g)


class EnergyResult:
    """Outcome of conserve(): kept ids, removal order, shrunk radii."""

    __slots__ = ("kept", "removed", "r_cov", "betti")

    def __init__(self, kept, removed, r_cov, betti_pair):
        self.kept = sorted(kept)
        self.removed = list(removed)
        self.r_cov = dict(r_cov)
        self.betti = betti_pair


def make_qos_groups(x, rng_seed):
    """Found groups greedily on all simplices, largest first.

    Within a size class the order is a seeded shuffle; a simplex founds a
    group only when every vertex is still unassigned, so the 0-simplices
    sweep up any leftovers.  Quotas are drawn at founding time, uniform
    in {1..group size}.  Group ids are 1..n_groups.
    """
    if x.n_vertices == 0:
        raise ValueError("cannot group an empty complex")
    rng = as_rng(rng_seed)
    by_size = {}
    for t in x.all_simplices():
        by_size.setdefault(len(t), []).append(t)
    group_of = {}
    size = {}
    quota = {}
    gid = 0
    for s in sorted(by_size, reverse=True):
        block = sorted(by_size[s])
        rng.shuffle(block)
        for t in block:
            if any(v in group_of for v in t):
                continue
            gid += 1
            for v in t:
                group_of[v] = gid
            size[gid] = s
            quota[gid] = int(rng.integers(1, s + 1))
    return QoSGroups(group_of, size, quota)


def conserve(x, ns, qg, rng_seed, *, shrink_step=0.05, radius_floor=None,
             quota_guard="per_candidate", edge_scale=1.0, trace=None):
    """Switch off and power down nodes while coverage topology holds.

    x must be the Rips complex of ns on the coverage radii; boundary nodes
    are flagged unremovable.  Phase 1 removes max-index vertices, vetoing
    a removal when (beta0, beta1) would change or the vertex's group would
    fall below quota.  quota_guard="literal" instead stops the whole loop
    the first time any group reaches quota-1 (the pre-removal guard
    reading); the default per-candidate veto dominates it otherwise.
    Phase 2 visits the kept nodes in seeded random order and shrinks each
    r_cov multiplicatively by ``shrink_step`` with a floor (side/20 by
    default), backing off one step when the Betti pair moves.  edge_scale
    must match the scale the caller built x with, so the rebuilt skeleton
    uses the same link rule.
    """
    if set(x.vertices()) != set(range(ns.n)):
        raise ValueError("complex vertices and node ids disagree")
    if not 0 < shrink_step < 1:
        raise ValueError("shrink_step must be in (0, 1)")
    if not edge_scale > 0:
        raise ValueError("edge_scale must be positive")
    if quota_guard not in ("per_candidate", "literal"):
        raise ValueError("quota_guard must be 'per_candidate' or 'literal'")
    missing = set(x.vertices()) - set(qg.group_of)
    if missing:
        raise ValueError(f"vertices without a group: {sorted(missing)}")
    rng = as_rng(rng_seed)
    target = betti(x)
    alive = dict(qg.size)

    def quota_veto(w):
        g = qg.group_of[w]
        return alive[g] - 1 < qg.quota[g]

    def veto(state, w, trial):
        return quota_veto(w) or betti(trial) != target

    def on_commit(state, w):
        alive[qg.group_of[w]] -= 1

    stop = None
    if quota_guard == "literal":
        def veto(state, w, trial):  # noqa: F811 - literal variant
            return betti(trial) != target

        def stop(state):
            return any(alive[g] < qg.quota[g] for g in alive)

    reduced, removed = reduce_with_guards(
        x, ns.boundary_ids(), rng, stop=stop, veto=veto,
        on_commit=on_commit, trace=trace,
    )
    kept = reduced.vertices()

    # phase 2: per-node multiplicative radius shrink, Betti-guarded
    floor = ns.side / 20.0 if radius_floor is None else float(radius_floor)
    keep_idx = np.asarray(kept, dtype=int)
    xs = ns.xs[keep_idx]
    ys = ns.ys[keep_idx]
    radii = ns.r_cov[keep_idx].copy()
    d = np.hypot(xs[:, None] - xs[None, :], ys[:, None] - ys[None, :])
    order = list(range(len(kept)))
    rng.shuffle(order)
    for p in order:
        while True:
            nxt = max(radii[p] * (1.0 - shrink_step), floor)
            if nxt >= radii[p]:
                break
            old = radii[p]
            radii[p] = nxt
            if _skeleton_betti(kept, d, radii, edge_scale) != target:
                radii[p] = old
                break
    return EnergyResult(
        kept, removed, {v: float(radii[i]) for i, v in enumerate(kept)},
        target,
    )


def _skeleton_betti(ids, dist, radii, edge_scale=1.0):
    """Betti pair of the Rips complex at the current radii (2-skeleton)."""
    n = len(ids)
    close = dist < edge_scale * (radii[:, None] + radii[None, :])
    np.fill_diagonal(close, False)
    masks = [0] * n
    for i in range(n):
        m = 0
        for j in np.flatnonzero(close[i]):
            m |= 1 << int(j)
        masks[i] = m
    edges = []
    triangles = []
    for i in range(n):
        mi = masks[i] >> (i + 1) << (i + 1)
        m = mi
        while m:
            b = m & -m
            j = b.bit_length() - 1
            m ^= b
            edges.append((ids[i], ids[j]))
            common = masks[i] & ((masks[j] >> (j + 1)) << (j + 1))
            c = common
            while c:
                bb = c & -c
                k = bb.bit_length() - 1
                c ^= bb
                triangles.append((ids[i], ids[j], ids[k]))
    return betti_from_skeleton(list(ids), edges, triangles)

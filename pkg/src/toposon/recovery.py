"""Damaged-network generation, repulsive patching, and a set-cover baseline.

A damaged network is a thinned Poisson field of surviving nodes with a
common coverage radius, fenced by fictional perimeter nodes.  ``recover``
adds repulsively placed nodes until the fenced complex is one connected,
hole-free component, then strips the superfluous additions.  The greedy
baseline instead walks a candidate grid, always plugging the point
farthest from every node.  ``robustness_study`` measures how both
planners' outputs survive a Gaussian shake of the added nodes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .complexes import cech, rips_from_neighbors
from .dpp import GinibreKernel, sample_conditional
from .geometry import NodeSet, Point, as_rng, make_boundary, sample_poisson
from .homology import BettiPair, betti
from .reduction import reduce_complex

__all__ = [
    "DamageScenario",
    "RecoveryError",
    "RecoveryResult",
    "gen_damaged",
    "recover",
    "robustness_study",
    "set_cover_baseline",
]


@dataclass(frozen=True)
class DamageScenario:
    """Target mean coverage fraction of the surviving field."""

    target_coverage_fraction: float
    r: float = 0.5
    a: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.target_coverage_fraction < 1.0:
            raise ValueError("coverage fraction must be in (0, 1)")
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not self.a > 0:
            raise ValueError("a must be positive")

    @property
    def intensity(self):
        """Poisson intensity whose disk union covers the target fraction
        in mean (union of radius-r disks covers 1 - exp(-intensity*pi*r^2))."""
        p = self.target_coverage_fraction
        return -math.log1p(-p) / (math.pi * self.r * self.r)


@dataclass(frozen=True)
class RecoveryResult:
    """Outcome of one patching run."""

    added_final: tuple
    n_added_total: int
    betti_final: BettiPair


class RecoveryError(RuntimeError):
    """Growth loop exhausted its doubling budget; carries diagnostics."""

    def __init__(self, message, n_added_total, last_betti, doublings):
        super().__init__(message)
        self.n_added_total = n_added_total
        self.last_betti = last_betti
        self.doublings = doublings


def gen_damaged(ds, rng_seed=None):
    """Surviving nodes of a damaged network plus a perimeter fence.

    The Poisson field is sampled on the r-dilated window [-r, a+r]^2 so
    disks hanging in from just outside the square contribute to in-square
    coverage exactly as an untruncated field would; the node set's side
    stays a.  All radii equal ds.r; the fence uses the same radius.
    """
    rng = as_rng(rng_seed)
    window = ds.a + 2.0 * ds.r
    raw = sample_poisson(ds.intensity, window, rng)
    n = raw.n
    r = np.full(n, ds.r)
    ns = NodeSet(ds.a, raw.xs - ds.r, raw.ys - ds.r, 2.0 * r, r,
                 np.zeros(n), np.zeros(n, dtype=bool))
    return make_boundary(ns, "square_perimeter", r_boundary=ds.r)


def _coverage_complex(xs, ys, r, side, max_dim=None):
    """Coverage (Cech) complex at common radius r over arbitrary points.

    This is the coverage truth the planners certify against: a simplex
    is present iff its disks share a point.  max_dim=2 suffices for
    Betti checks; the reduction step needs the untruncated complex.
    """
    n = len(xs)
    tmp = NodeSet(side, xs, ys, np.full(n, 2.0 * r), np.full(n, r),
                  np.zeros(n), np.zeros(n, dtype=bool))
    return cech(tmp, r, max_dim=max_dim)


def _rips_common(xs, ys, r):
    """Rips complex at common radius r: edge iff dist < 2r, strict.

    The forgiving approximation of the coverage complex; the robustness
    metric and the baseline's certification are stated against it.
    """
    n = len(xs)
    nl = {i: set() for i in range(n)}
    if n:
        dx = np.asarray(xs)[:, None] - np.asarray(xs)[None, :]
        dy = np.asarray(ys)[:, None] - np.asarray(ys)[None, :]
        close = dx * dx + dy * dy < (2.0 * r) ** 2
        np.fill_diagonal(close, False)
        for i in range(n):
            nl[i] = {int(j) for j in np.flatnonzero(close[i])}
    return rips_from_neighbors(nl)


def _fenced_ids(ns):
    """Ids the planners reason over: the fence plus survivors inside the
    fenced square.

    Survivors beyond the fence (the generator may sample a dilated
    window) belong to the surrounding intact network: they contribute
    coverage statistics but are outside the repair scope, and cycles
    through them could never be filled by in-square additions.
    """
    inside = ((ns.xs >= 0.0) & (ns.xs <= ns.side)
              & (ns.ys >= 0.0) & (ns.ys <= ns.side))
    return np.flatnonzero(inside | ns.boundary)


def recover(ns, r, rng_seed=None, *, mcmc_steps=None, n_modes=None,
            max_doublings=30):
    """Patch a damaged network by repulsive node additions.

    Starting from n_added = max(0, ceil(a^2/(pi r^2)) - N_i) where N_i
    counts the in-square non-fence survivors, every growth iteration
    discards the previous additions and draws the whole batch afresh,
    conditioned on survivors and fence; the batch grows by a doubling
    increment until the coverage complex at common radius r is one
    component with no holes.  A final flag-guarded reduction drops
    superfluous added nodes while preserving that coverage topology.
    Raises RecoveryError when max_doublings is exhausted.

    n_modes defaults to the projection truncation (one mode per point,
    fixed and new together), the most rigid repulsion the kernel family
    offers; richer kernels loosen the spacing of the draws.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    rng = as_rng(rng_seed)
    side = ns.side
    ids = _fenced_ids(ns)
    base_x = ns.xs[ids]
    base_y = ns.ys[ids]
    n_base = len(ids)
    n_initial = int(np.count_nonzero(~ns.boundary[ids]))
    fixed = [Point(float(x), float(y)) for x, y in zip(base_x, base_y)]
    target = BettiPair(1, 0)

    n_added = max(0, math.ceil(side * side / (math.pi * r * r)) - n_initial)
    step = 1
    doublings = 0
    while True:
        total = len(fixed) + n_added
        modes = n_modes if n_modes is not None else total
        modes = max(modes, total, 1)
        kern = GinibreKernel(modes, total / (side * side), side)
        placed = sample_conditional(kern, fixed, n_added, side,
                                    mcmc_steps=mcmc_steps, rng_seed=rng)
        xs = np.concatenate([base_x, [p.x for p in placed.free]])
        ys = np.concatenate([base_y, [p.y for p in placed.free]])
        pair = betti(_coverage_complex(xs, ys, r, side, max_dim=2))
        if pair == target:
            break
        if doublings >= max_doublings:
            raise RecoveryError(
                f"no hole-free connected patch after {doublings} doublings",
                n_added, pair, doublings)
        n_added += step
        step *= 2
        doublings += 1

    flags = list(range(n_base))
    x = _coverage_complex(xs, ys, r, side)
    reduced, _removed = reduce_complex(x, flags, rng)
    kept = [v - n_base for v in reduced.vertices() if v >= n_base]
    added_final = tuple(placed.free[i] for i in kept)
    return RecoveryResult(added_final, n_added, betti(reduced))


def set_cover_baseline(ns, r, grid_step=None):
    """Greedy grid patcher: always add the candidate farthest from every
    node, stopping once the farthest candidate is within r of a node.

    Grid coverage alone can leave the complex disconnected or with thin
    unfilled cycles, so after the coverage loop the same greedy pick
    keeps adding candidates until the complex at the common radius is
    one hole-free component (the result contract all planners share).
    Deterministic; ties resolve to the lexicographically first
    candidate.  grid_step defaults to r/5.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    step = r / 5.0 if grid_step is None else float(grid_step)
    if not step > 0:
        raise ValueError("grid_step must be positive")
    side = ns.side
    ids = _fenced_ids(ns)
    base_x = ns.xs[ids]
    base_y = ns.ys[ids]
    ticks = np.arange(0.0, side + 1e-9, step)
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    cand = np.column_stack([gx.ravel(), gy.ravel()])
    if len(ids):
        d2 = ((cand[:, 0:1] - base_x[None, :]) ** 2
              + (cand[:, 1:2] - base_y[None, :]) ** 2)
        best = np.sqrt(d2.min(axis=1))
    else:
        best = np.full(len(cand), np.inf)
    taken = np.zeros(len(cand), dtype=bool)
    added = []

    def take(i):
        added.append(Point(float(cand[i, 0]), float(cand[i, 1])))
        taken[i] = True
        d = np.hypot(cand[:, 0] - cand[i, 0], cand[:, 1] - cand[i, 1])
        np.minimum(best, d, out=best)

    while True:
        i = int(np.argmax(best))
        if best[i] <= r:
            break
        take(i)

    def pair_now():
        xs = np.concatenate([base_x, [p.x for p in added]])
        ys = np.concatenate([base_y, [p.y for p in added]])
        return betti(_rips_common(xs, ys, r))

    pair = pair_now()
    while pair != BettiPair(1, 0) and not taken.all():
        free = np.flatnonzero(~taken)
        take(int(free[np.argmax(best[free])]))
        pair = pair_now()
    return RecoveryResult(tuple(added), len(added), pair)


def perturbed_beta1(ns, added, r, sigma, rng_seed=None):
    """beta1 of the flag complex at the common radius after a Gaussian
    shake of the added nodes only (survivors and fence stay put).

    Scoped like the planners: the fence plus in-square survivors, with
    the shaken additions wherever they land.  Counting holes on the
    flag complex — the reading a controller gets from pairwise links
    alone — reports only the defects that survive even that forgiving
    approximation.
    """
    rng = as_rng(rng_seed)
    ids = _fenced_ids(ns)
    pts = np.array([[p.x, p.y] for p in added], dtype=float).reshape(-1, 2)
    if len(pts) and sigma > 0:
        pts = pts + rng.normal(0.0, sigma, size=pts.shape)
    xs = np.concatenate([ns.xs[ids], pts[:, 0]])
    ys = np.concatenate([ns.ys[ids], pts[:, 1]])
    return betti(_rips_common(xs, ys, r)).beta1


def robustness_study(planner, ds, sigma, n_seeds, rng_seed=0):
    """Mean beta1 and P(beta1 = 0) after shaking each seed's additions.

    planner(ns, r, rng) -> RecoveryResult runs per seed on a fresh
    damaged network; only the added nodes are perturbed.  Seeds are
    rng_seed .. rng_seed + n_seeds - 1, one generator per seed feeding
    generation, planning and perturbation in that order.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if n_seeds < 1:
        raise ValueError("n_seeds must be positive")
    total = 0.0
    zeros = 0
    for s in range(int(rng_seed), int(rng_seed) + int(n_seeds)):
        rng = as_rng(s)
        ns = gen_damaged(ds, rng)
        res = planner(ns, ds.r, rng)
        b1 = perturbed_beta1(ns, res.added_final, ds.r, sigma, rng)
        total += b1
        zeros += b1 == 0
    return {"mean_beta1": total / n_seeds, "p_beta1_zero": zeros / n_seeds}

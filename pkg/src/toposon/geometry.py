"""Planar node sets for cellular-network simulation.

Nodes live in (or around) a square of side ``side`` and carry three radii:
r_comm (communication), r_cov (coverage) and r_rej (rejection, the
interference reach).  Fictional boundary nodes fence the square so that
holes against the outside world do not count.  All stochastic operations
accept either an integer seed or a numpy Generator, so a scenario can push
one seeded stream through every step in documented call order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Point",
    "NodeSet",
    "as_rng",
    "sample_poisson",
    "assign_radii_uniform",
    "make_boundary",
    "perturb_gaussian",
    "min_enclosing_ball_radius",
]


def as_rng(seed):
    """Return a numpy Generator; accepts an int seed or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Point:
    """A point of the plane."""

    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y


class NodeSet:
    """Nodes with positions, radii and boundary flags over a square.

    Ids are dense 0..n-1.  Parallel numpy arrays keep the geometry kernels
    vectorized; ``node(i)`` gives a per-node view when record access reads
    better.  Real nodes normally sit inside [0, side]^2; damaged-network
    generation may place real nodes in a slightly dilated window so the
    in-square coverage statistics stay free of border bias.
    """

    __slots__ = ("side", "xs", "ys", "r_comm", "r_cov", "r_rej", "boundary")

    def __init__(self, side, xs, ys, r_comm, r_cov, r_rej, boundary):
        self.side = float(side)
        self.xs = np.asarray(xs, dtype=float).copy()
        self.ys = np.asarray(ys, dtype=float).copy()
        self.r_comm = np.asarray(r_comm, dtype=float).copy()
        self.r_cov = np.asarray(r_cov, dtype=float).copy()
        self.r_rej = np.asarray(r_rej, dtype=float).copy()
        self.boundary = np.asarray(boundary, dtype=bool).copy()
        n = len(self.xs)
        if not (
            len(self.ys) == len(self.r_comm) == len(self.r_cov)
            == len(self.r_rej) == len(self.boundary) == n
        ):
            raise ValueError("field arrays disagree on length")
        if self.side <= 0:
            raise ValueError("square side must be positive")
        for arr, name in (
            (self.xs, "x"), (self.ys, "y"), (self.r_comm, "r_comm"),
            (self.r_cov, "r_cov"), (self.r_rej, "r_rej"),
        ):
            if n and not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite {name}")
        if n and np.any(self.r_comm < 0):
            raise ValueError("negative r_comm")
        if n and np.any(self.r_rej > self.r_comm + 1e-12):
            raise ValueError("r_rej exceeds r_comm")

    @classmethod
    def empty(cls, side):
        z = np.zeros(0)
        return cls(side, z, z, z, z, z, np.zeros(0, dtype=bool))

    @property
    def n(self):
        return len(self.xs)

    def __len__(self):
        return self.n

    def ids(self):
        return list(range(self.n))

    def positions(self):
        return np.column_stack([self.xs, self.ys]) if self.n else np.zeros((0, 2))

    def point(self, i):
        return Point(float(self.xs[i]), float(self.ys[i]))

    def node(self, i):
        """Per-node record view: (id, pos, r_comm, r_cov, r_rej, boundary)."""
        return (
            i,
            self.point(i),
            float(self.r_comm[i]),
            float(self.r_cov[i]),
            float(self.r_rej[i]),
            bool(self.boundary[i]),
        )

    def boundary_ids(self):
        return [int(i) for i in np.flatnonzero(self.boundary)]

    def replace(self, **fields):
        """Copy with the given field arrays swapped in."""
        kw = {
            "side": self.side, "xs": self.xs, "ys": self.ys,
            "r_comm": self.r_comm, "r_cov": self.r_cov,
            "r_rej": self.r_rej, "boundary": self.boundary,
        }
        kw.update(fields)
        return NodeSet(**kw)

    def subset(self, keep):
        """Nodes with ids in ``keep`` (ids are re-densified in sorted order)."""
        idx = sorted(keep)
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise ValueError("unknown node id in subset")
        sel = np.asarray(idx, dtype=int)
        return NodeSet(
            self.side, self.xs[sel], self.ys[sel], self.r_comm[sel],
            self.r_cov[sel], self.r_rej[sel], self.boundary[sel],
        )

    def __eq__(self, other):
        if not isinstance(other, NodeSet):
            return NotImplemented
        return self.side == other.side and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("xs", "ys", "r_comm", "r_cov", "r_rej", "boundary")
        )

    # --- text format: header "a=<side>", then one node per line ---------

    def to_text(self):
        lines = [f"a={float(self.side)!r}"]
        for i in range(self.n):
            cells = [float(self.xs[i]), float(self.ys[i]),
                     float(self.r_comm[i]), float(self.r_cov[i]),
                     float(self.r_rej[i])]
            lines.append(f"{i} " + " ".join(repr(c) for c in cells)
                         + f" {int(self.boundary[i])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("a="):
            raise ValueError("node file must start with a=<side>")
        side = float(lines[0][2:])
        rows = {}
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 7:
                raise ValueError(f"bad node line: {ln!r}")
            i = int(parts[0])
            if i in rows:
                raise ValueError(f"duplicate node id {i}")
            if parts[6] not in ("0", "1"):
                raise ValueError(f"boundary flag must be 0 or 1: {ln!r}")
            rows[i] = [float(p) for p in parts[1:6]] + [parts[6] == "1"]
        n = len(rows)
        if sorted(rows) != list(range(n)):
            raise ValueError("node ids must be dense 0..n-1")
        cols = [[rows[i][j] for i in range(n)] for j in range(6)]
        return cls(
            side, cols[0], cols[1], cols[2], cols[3], cols[4],
            np.array(cols[5], dtype=bool),
        )

    def save(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())


def sample_poisson(intensity, side, rng_seed):
    """Homogeneous Poisson sample on [0, side]^2.

    Count ~ Poisson(intensity * side^2), then positions uniform (one (n, 2)
    draw, column 0 = x).  Radii start at zero; assign them separately.
    """
    if intensity < 0 or side <= 0:
        raise ValueError("need intensity >= 0 and side > 0")
    rng = as_rng(rng_seed)
    n = int(rng.poisson(intensity * side * side))
    pos = rng.uniform(0.0, side, size=(n, 2))
    z = np.zeros(n)
    return NodeSet(side, pos[:, 0], pos[:, 1], z, z, z, np.zeros(n, dtype=bool))


def assign_radii_uniform(ns, lo, hi, rng_seed):
    """Draw r_comm ~ U[lo, hi] i.i.d.; set r_cov = r_rej = r_comm / 2.

    Returns a new NodeSet; count, ids and positions are untouched.
    """
    if not (0 < lo <= hi):
        raise ValueError("need 0 < lo <= hi")
    rng = as_rng(rng_seed)
    r = rng.uniform(lo, hi, size=ns.n)
    return ns.replace(r_comm=r, r_cov=r / 2.0, r_rej=r / 2.0)


def _hull_indices(xs, ys):
    """Andrew monotone chain; returns hull vertex indices, ccw."""
    order = sorted(range(len(xs)), key=lambda i: (xs[i], ys[i]))

    def cross(o, a, b):
        return (xs[a] - xs[o]) * (ys[b] - ys[o]) - (ys[a] - ys[o]) * (xs[b] - xs[o])

    lower = []
    for i in order:
        while len(lower) > 1 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    upper = []
    for i in reversed(order):
        while len(upper) > 1 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def make_boundary(ns, mode, spacing=None, r_boundary=None):
    """Mark or append boundary nodes.

    mode="convex_hull": flag the hull vertices of the existing nodes
    (needs >= 3 non-collinear nodes).  mode="square_perimeter": append
    fictional nodes walked along the perimeter of [0, side]^2 with gap
    <= spacing (default side/4, i.e. 16 nodes) and r_cov = r_boundary
    (default side/3).  Fictional nodes never transmit, so r_rej = 0.
    """
    if mode == "convex_hull":
        if ns.n < 3:
            raise ValueError("convex hull needs at least 3 nodes")
        hull = _hull_indices(ns.xs, ns.ys)
        if len(hull) < 3:
            raise ValueError("nodes are collinear; hull is degenerate")
        flags = ns.boundary.copy()
        flags[hull] = True
        return ns.replace(boundary=flags)
    if mode != "square_perimeter":
        raise ValueError(f"unknown boundary mode {mode!r}")
    a = ns.side
    spacing = a / 4.0 if spacing is None else float(spacing)
    r_b = a / 3.0 if r_boundary is None else float(r_boundary)
    if spacing <= 0 or r_b <= 0:
        raise ValueError("spacing and r_boundary must be positive")
    perim = 4.0 * a
    n_b = int(math.ceil(perim / spacing))
    ts = np.arange(n_b) * (perim / n_b)
    bx = np.empty(n_b)
    by = np.empty(n_b)
    for k, t in enumerate(ts):
        if t < a:
            bx[k], by[k] = t, 0.0
        elif t < 2 * a:
            bx[k], by[k] = a, t - a
        elif t < 3 * a:
            bx[k], by[k] = 3 * a - t, a
        else:
            bx[k], by[k] = 0.0, 4 * a - t
    return NodeSet(
        a,
        np.concatenate([ns.xs, bx]),
        np.concatenate([ns.ys, by]),
        np.concatenate([ns.r_comm, np.full(n_b, r_b)]),
        np.concatenate([ns.r_cov, np.full(n_b, r_b)]),
        np.concatenate([ns.r_rej, np.zeros(n_b)]),
        np.concatenate([ns.boundary, np.ones(n_b, dtype=bool)]),
    )


def perturb_gaussian(ns, which, sigma, rng_seed):
    """Displace the selected nodes by N(0, sigma^2) per coordinate.

    Draws are made in sorted-id order (one (k, 2) normal draw).  Positions
    are not clamped to the square.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    ids = sorted(set(int(i) for i in which))
    if ids and (ids[0] < 0 or ids[-1] >= ns.n):
        raise ValueError("unknown node id in perturbation")
    rng = as_rng(rng_seed)
    d = rng.normal(0.0, sigma, size=(len(ids), 2))
    xs = ns.xs.copy()
    ys = ns.ys.copy()
    sel = np.asarray(ids, dtype=int)
    if len(sel):
        xs[sel] += d[:, 0]
        ys[sel] += d[:, 1]
    return ns.replace(xs=xs, ys=ys)


def _circumcircle(ax, ay, bx, by, cx, cy):
    """Center and radius of the circle through three points, or None."""
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    scale = max(abs(ax), abs(ay), abs(bx), abs(by), abs(cx), abs(cy), 1.0)
    if abs(d) < 1e-14 * scale * scale:
        return None
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    return ux, uy, math.hypot(ax - ux, ay - uy)


def min_enclosing_ball_radius(pts):
    """Radius of the smallest disk containing all points.

    In the plane the optimum is supported by two points (diametral) or
    three (circumcircle), so trying every pair and triple is exact; tuple
    sizes here are small, so the quartic scan is immaterial.
    """
    pts = [tuple(p) for p in pts]
    if not pts:
        raise ValueError("empty point tuple")
    if len(pts) == 1:
        return 0.0
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    n = len(pts)
    best = None

    def covers(ux, uy, r):
        r_eps = r + 1e-9 * max(r, 1.0)
        return all(math.hypot(xs[i] - ux, ys[i] - uy) <= r_eps for i in range(n))

    for i in range(n):
        for j in range(i + 1, n):
            ux = (xs[i] + xs[j]) / 2.0
            uy = (ys[i] + ys[j]) / 2.0
            r = math.hypot(xs[i] - xs[j], ys[i] - ys[j]) / 2.0
            if (best is None or r < best) and covers(ux, uy, r):
                best = r
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                cc = _circumcircle(xs[i], ys[i], xs[j], ys[j], xs[k], ys[k])
                if cc is None:
                    continue
                ux, uy, r = cc
                if (best is None or r < best) and covers(ux, uy, r):
                    best = r
    return best

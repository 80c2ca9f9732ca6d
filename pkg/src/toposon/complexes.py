"""Abstract simplicial complexes on integer vertex ids.

Vietoris-Rips complexes are clique complexes of a threshold graph (edge iff
dist < r_u + r_v, strict) and are tagged clique_backed: maximal simplices
come straight from Bron-Kerbosch on the 1-skeleton and dimensions >= 3 are
materialized lazily, so the vertex-removal loops that only consult the
2-skeleton never pay for the full closure.  Cech complexes (k-simplex iff
the minimum enclosing ball of the k+1 centers has radius <= r, non-strict)
are stored explicitly.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .geometry import as_rng, min_enclosing_ball_radius

__all__ = [
    "SimplicialComplex",
    "rips_from_neighbors",
    "rips_from_disks",
    "cech",
    "delete_vertex",
    "restrict",
    "maximal_simplices",
    "complex_to_text",
    "complex_from_text",
]


def _bron_kerbosch(masks, ids):
    """Maximal cliques of the graph given as bitmask adjacency.

    masks: dict id -> int bitmask over positions; ids: position -> id.
    Yields cliques as sorted tuples of ids.  Pivoting keeps the recursion
    tree small on the dense patches Rips graphs produce.
    """
    n = len(ids)
    pos_mask = [masks[ids[p]] for p in range(n)]
    out = []

    def expand(r, p, x):
        if p == 0 and x == 0:
            out.append(r)
            return
        px = p | x
        # pivot: vertex of P|X with the most candidates in P
        best, best_cnt = -1, -1
        m = px
        while m:
            b = m & -m
            v = b.bit_length() - 1
            cnt = (p & pos_mask[v]).bit_count()
            if cnt > best_cnt:
                best, best_cnt = v, cnt
            m ^= b
        cand = p & ~pos_mask[best]
        while cand:
            b = cand & -cand
            v = b.bit_length() - 1
            expand(r | b, p & pos_mask[v], x & pos_mask[v])
            p ^= b
            x |= b
            cand ^= b

    if n:
        expand(0, (1 << n) - 1, 0)
    cliques = []
    for r in out:
        clique = []
        while r:
            b = r & -r
            clique.append(ids[b.bit_length() - 1])
            r ^= b
        cliques.append(tuple(clique))
    return cliques


class SimplicialComplex:
    """Finite abstract simplicial complex.

    Internally a dict k -> set of strictly increasing vertex tuples.  For
    clique-backed complexes the levels >= 3 are derived from the 1-skeleton
    on demand (and may also be capped by max_dim at construction).
    """

    __slots__ = ("_simp", "clique_backed", "max_dim", "_expanded",
                 "_cliques", "_betti_cache")

    def __init__(self, simplices_by_dim, clique_backed=False, max_dim=None,
                 _validate=True):
        self._simp = {k: set(v) for k, v in simplices_by_dim.items() if v}
        self.clique_backed = clique_backed
        self.max_dim = max_dim
        self._expanded = not clique_backed
        self._cliques = None
        self._betti_cache = None
        if _validate:
            self._check_closure()

    # -- construction helpers --------------------------------------------

    @classmethod
    def from_simplices(cls, simplices):
        """Build from an iterable of simplices, closing under faces."""
        by_dim = {}
        for s in simplices:
            t = tuple(sorted(set(int(v) for v in s)))
            if not t:
                raise ValueError("empty simplex")
            for k in range(1, len(t) + 1):
                by_dim.setdefault(k - 1, set()).update(combinations(t, k))
        return cls(by_dim, _validate=False)

    @classmethod
    def _from_graph(cls, vertices, adj_masks, max_dim=None):
        """Clique complex of a graph; levels >= 3 stay lazy.

        adj_masks: dict vertex -> bitmask over the positions of the sorted
        vertex list.
        """
        ids = sorted(vertices)
        simp = {0: {(v,) for v in ids}} if ids else {}
        edges = set()
        for p, v in enumerate(ids):
            m = adj_masks[v]
            while m:
                b = m & -m
                q = b.bit_length() - 1
                if q > p:
                    edges.add((v, ids[q]))
                m ^= b
        if edges:
            simp[1] = edges
        x = cls(simp, clique_backed=True, max_dim=max_dim, _validate=False)
        x._ensure_triangles(adj_masks, ids)
        return x

    def _adjacency(self):
        """(ids, masks): bitmask adjacency of the 1-skeleton."""
        ids = self.vertices()
        pos = {v: p for p, v in enumerate(ids)}
        masks = {v: 0 for v in ids}
        for (u, v) in self._simp.get(1, ()):
            masks[u] |= 1 << pos[v]
            masks[v] |= 1 << pos[u]
        return ids, masks

    def _ensure_triangles(self, adj_masks, ids):
        """Fill level 2 from the graph (cheap, always kept eager)."""
        if self.max_dim is not None and self.max_dim < 2:
            return
        tris = set()
        pos = {v: p for p, v in enumerate(ids)}
        for (u, v) in self._simp.get(1, ()):
            common = adj_masks[u] & adj_masks[v]
            m = common
            while m:
                b = m & -m
                q = b.bit_length() - 1
                if q > pos[v]:
                    tris.add((u, v, ids[q]))
                m ^= b
        if tris:
            self._simp[2] = tris

    def _maximal_cliques(self):
        if self._cliques is None:
            ids, masks = self._adjacency()
            self._cliques = _bron_kerbosch(masks, ids)
        return self._cliques

    def _ensure_expanded(self):
        """Materialize levels >= 3 of a clique-backed complex."""
        if self._expanded:
            return
        cap = self.max_dim
        for cl in self._maximal_cliques():
            top = len(cl) if cap is None else min(len(cl), cap + 1)
            for k in range(4, top + 1):
                self._simp.setdefault(k - 1, set()).update(combinations(cl, k))
        self._expanded = True

    def _check_closure(self):
        for k in sorted(self._simp, reverse=True):
            for t in self._simp[k]:
                if tuple(sorted(set(t))) != t:
                    raise ValueError(f"simplex not strictly increasing: {t}")
                if k != len(t) - 1:
                    raise ValueError(f"simplex {t} filed under dimension {k}")
                if k > 0:
                    lower = self._simp.get(k - 1, ())
                    for f in combinations(t, k):
                        if f not in lower:
                            raise ValueError(f"missing face {f} of {t}")

    # -- queries -----------------------------------------------------------

    @property
    def n_vertices(self):
        return len(self._simp.get(0, ()))

    def vertices(self):
        return sorted(v for (v,) in self._simp.get(0, ()))

    def vertex_set(self):
        return {v for (v,) in self._simp.get(0, ())}

    def simplices(self, k):
        """Sorted list of the k-simplices."""
        if k >= 3 and not self._expanded:
            self._ensure_expanded()
        return sorted(self._simp.get(k, ()))

    def counts(self):
        """(s0, s1, s2): simplex counts of the 2-skeleton."""
        return (
            len(self._simp.get(0, ())),
            len(self._simp.get(1, ())),
            len(self._simp.get(2, ())),
        )

    @property
    def dim(self):
        """Largest dimension present (-1 for the empty complex)."""
        if self.n_vertices == 0:
            return -1
        if self.clique_backed:
            top = max(len(c) for c in self._maximal_cliques()) - 1
            return top if self.max_dim is None else min(top, self.max_dim)
        return max(self._simp)

    @property
    def clique_number(self):
        """1 + dim: the order of the largest simplex."""
        return self.dim + 1

    def all_simplices(self):
        """All simplices, dimension ascending, sorted within a dimension."""
        if not self._expanded:
            self._ensure_expanded()
        for k in sorted(self._simp):
            yield from sorted(self._simp[k])

    def has_simplex(self, t):
        t = tuple(sorted(t))
        if len(t) - 1 >= 3 and not self._expanded:
            self._ensure_expanded()
        return t in self._simp.get(len(t) - 1, ())

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        self._ensure_expanded()
        other._ensure_expanded()
        return self._simp == other._simp

    def __repr__(self):
        counts = {k: len(v) for k, v in sorted(self._simp.items())}
        return f"SimplicialComplex({counts}{'+' if not self._expanded else ''})"

    # -- functional updates -------------------------------------------------

    def _filtered(self, keep_pred):
        """New complex keeping the simplices that satisfy the predicate.

        Clique-backed inputs only carry dims <= 2 forward; higher levels
        re-derive from the surviving graph if ever asked for.
        """
        new = {}
        for k in self._simp:
            if self.clique_backed and k > 2:
                continue
            kept = {t for t in self._simp[k] if keep_pred(t)}
            if kept:
                new[k] = kept
        return SimplicialComplex(
            new, clique_backed=self.clique_backed, max_dim=self.max_dim,
            _validate=False,
        )

    def delete_vertex(self, v):
        if (v,) not in self._simp.get(0, ()):
            raise ValueError(f"vertex {v} not in complex")
        return self._filtered(lambda t: v not in t)

    def restrict(self, keep):
        keep = set(keep)
        missing = keep - self.vertex_set()
        if missing:
            raise ValueError(f"unknown vertices {sorted(missing)}")
        return self._filtered(lambda t: all(v in keep for v in t))


def rips_from_neighbors(nl, max_dim=None):
    """Clique (flag) complex of a neighbor-list graph.

    nl: dict vertex -> iterable of neighbors.  Asymmetric listings are
    symmetrized by union; self-loops are ignored.
    """
    ids = sorted(nl)
    pos = {v: p for p, v in enumerate(ids)}
    masks = {v: 0 for v in ids}
    for v, nbrs in nl.items():
        for u in nbrs:
            if u == v:
                continue
            if u not in pos:
                raise ValueError(f"neighbor {u} of {v} is not a vertex")
            masks[v] |= 1 << pos[u]
            masks[u] |= 1 << pos[v]
    return SimplicialComplex._from_graph(ids, masks, max_dim=max_dim)


def rips_from_disks(ns, radius_role="comm", max_dim=None, scale=1.0):
    """Vietoris-Rips complex of a node set: edge iff dist < scale*(r_u + r_v).

    radius_role selects the communication or the coverage radii.  The
    inequality is strict (tangent disks do not connect).  scale tightens
    (<1) or loosens (>1) the link threshold relative to disk tangency.
    """
    if radius_role not in ("comm", "cov"):
        raise ValueError("radius_role must be 'comm' or 'cov'")
    if not scale > 0:
        raise ValueError("scale must be positive")
    r = ns.r_comm if radius_role == "comm" else ns.r_cov
    n = ns.n
    ids = list(range(n))
    masks = {v: 0 for v in ids}
    if n:
        dx = ns.xs[:, None] - ns.xs[None, :]
        dy = ns.ys[:, None] - ns.ys[None, :]
        close = dx * dx + dy * dy < (scale * (r[:, None] + r[None, :])) ** 2
        np.fill_diagonal(close, False)
        for i in range(n):
            row = np.flatnonzero(close[i])
            m = 0
            for j in row:
                m |= 1 << int(j)
            masks[i] = m
    return SimplicialComplex._from_graph(ids, masks, max_dim=max_dim)


def cech(ns, r, max_dim=None):
    """Cech complex at common radius r: simplex iff its centers fit in a
    ball of radius r (non-strict).

    Built level by level; a candidate is only tested when all its facets
    are present, and the pairwise level reduces to dist <= 2r.
    """
    if r < 0:
        raise ValueError("radius must be >= 0")
    n = ns.n
    eps = 1e-12 * max(r, 1.0)
    simp = {}
    if n:
        simp[0] = {(v,) for v in range(n)}
    dx = ns.xs[:, None] - ns.xs[None, :]
    dy = ns.ys[:, None] - ns.ys[None, :]
    d2 = dx * dx + dy * dy
    adj = d2 <= (2.0 * r + eps) ** 2
    np.fill_diagonal(adj, False)
    edges = {
        (i, int(j))
        for i in range(n)
        for j in np.flatnonzero(adj[i])
        if j > i
    }
    if edges:
        simp[1] = edges
    masks = [0] * n
    for (i, j) in edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    pts = ns.positions()
    prev = edges
    k = 2
    while prev and (max_dim is None or k <= max_dim):
        level = set()
        for s in prev:
            common = masks[s[0]]
            for v in s[1:]:
                common &= masks[v]
            m = common >> (s[-1] + 1) << (s[-1] + 1)
            while m:
                b = m & -m
                w = b.bit_length() - 1
                m ^= b
                cand = s + (w,)
                if any(
                    cand[:i] + cand[i + 1:] not in prev
                    for i in range(len(cand) - 1)
                ):
                    continue
                if min_enclosing_ball_radius(pts[list(cand)]) <= r + eps:
                    level.add(cand)
        if level:
            simp[k] = level
        prev = level
        k += 1
    return SimplicialComplex(simp, clique_backed=False, max_dim=max_dim,
                             _validate=False)


def delete_vertex(x, v):
    """Induced subcomplex with vertex v removed."""
    return x.delete_vertex(v)


def restrict(x, keep):
    """Induced subcomplex on the given vertex subset."""
    return x.restrict(keep)


def maximal_simplices(x, rng_seed=None):
    """Simplices with no proper coface, largest first.

    Ties in size are lexicographic, or shuffled when a seed is given.
    """
    if x.clique_backed:
        if x.max_dim is None:
            maxs = list(x._maximal_cliques())
        else:
            maxs = _maximal_capped(x)
    else:
        maxs = _maximal_generic(x)
    return _order_by_size(maxs, rng_seed)


def _maximal_capped(x):
    """Maximal simplices of a dimension-capped clique complex."""
    cap = x.max_dim + 1
    out = set()
    for cl in x._maximal_cliques():
        if len(cl) <= cap:
            out.add(cl)
        else:
            out.update(combinations(cl, cap))
    # a capped clique's subsets may sit inside another maximal clique
    return [t for t in out
            if not any(set(t) < set(o) for o in out if len(o) > len(t))]


def _maximal_generic(x):
    x._ensure_expanded()
    maxs = []
    dims = sorted(x._simp)
    for k in dims:
        above = x._simp.get(k + 1, ())
        facets = set()
        for t in above:
            facets.update(combinations(t, k + 1))
        maxs.extend(t for t in x._simp[k] if t not in facets)
    return maxs


def _order_by_size(simplices, rng_seed):
    by_size = {}
    for t in simplices:
        by_size.setdefault(len(t), []).append(t)
    out = []
    rng = None if rng_seed is None else as_rng(rng_seed)
    for size in sorted(by_size, reverse=True):
        block = sorted(by_size[size])
        if rng is not None:
            rng.shuffle(block)
        out.extend(block)
    return out


def complex_to_text(x):
    """One simplex per line, vertex ids space-separated, dim ascending."""
    lines = []
    for t in x.all_simplices():
        lines.append(" ".join(str(v) for v in t))
    return "\n".join(lines) + ("\n" if lines else "")


def complex_from_text(text):
    """Parse the export format; validates closure."""
    simp = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        t = tuple(sorted(int(p) for p in ln.split()))
        if len(set(t)) != len(t):
            raise ValueError(f"repeated vertex in simplex line {ln!r}")
        simp.setdefault(len(t) - 1, set()).add(t)
    return SimplicialComplex(simp, _validate=True)

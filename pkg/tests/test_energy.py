import io
import math

import numpy as np
import pytest

from toposon.complexes import SimplicialComplex, rips_from_disks
from toposon.energy import QoSGroups, conserve, make_qos_groups
from toposon.geometry import (
    as_rng,
    assign_radii_uniform,
    make_boundary,
    sample_poisson,
)
from toposon.homology import betti, betti_from_skeleton

SIDE = 2.0
INTENSITY = 6.0
EDGE_SCALE = 0.75


def scenario(seed):
    """One energy-conservation study field, boundary ring included."""
    rng = as_rng(seed)
    ns = sample_poisson(INTENSITY, SIDE, rng)
    if ns.n == 0:
        return None, None, None, None
    ns = assign_radii_uniform(
        ns, 2.0 * SIDE / 10.0, 2.0 * 2.0 / math.sqrt(math.pi * INTENSITY), rng
    )
    ns = make_boundary(ns, "square_perimeter")
    x = rips_from_disks(ns, "cov", scale=EDGE_SCALE)
    qg = make_qos_groups(x, rng)
    return rng, ns, x, qg


def skeleton_from_radii(ns, kept, r_cov, scale):
    """Independent rebuild of the coverage skeleton after shrinking."""
    kept = sorted(kept)
    edges = []
    for i, u in enumerate(kept):
        for v in kept[i + 1:]:
            d = math.hypot(ns.xs[u] - ns.xs[v], ns.ys[u] - ns.ys[v])
            if d < scale * (r_cov[u] + r_cov[v]):
                edges.append((u, v))
    adj = {v: set() for v in kept}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    tris = [
        (a, b, c)
        for i, a in enumerate(kept)
        for j, b in enumerate(kept[i + 1:], i + 1)
        if b in adj[a]
        for c in kept[j + 1:]
        if c in adj[a] and c in adj[b]
    ]
    return betti_from_skeleton(kept, edges, tris)


class TestMakeQosGroups:
    def test_partition_covers_every_vertex(self):
        for seed in range(20):
            out = scenario(seed)
            if out[0] is None:
                continue
            _, ns, x, qg = out
            assert set(qg.group_of) == x.vertex_set()
            for g, size in qg.size.items():
                assert len(qg.members(g)) == size
                assert 1 <= qg.quota[g] <= size

    def test_lone_triangle_single_group(self):
        x = SimplicialComplex.from_simplices([(0, 1, 2)])
        qg = make_qos_groups(x, as_rng(0))
        assert qg.n_groups == 1
        assert qg.size == {1: 3}
        assert qg.members(1) == [0, 1, 2]

    def test_isolated_vertices_become_singletons(self):
        x = SimplicialComplex.from_simplices([(0,), (1,)])
        qg = make_qos_groups(x, as_rng(0))
        assert qg.n_groups == 2
        assert all(s == 1 for s in qg.size.values())
        assert all(q == 1 for q in qg.quota.values())
        assert qg.n_optimal() == 2

    def test_largest_simplex_founds_first(self):
        # a 4-clique and a far triangle: the 4-set is founded as one group
        x = SimplicialComplex.from_simplices([(0, 1, 2, 3), (4, 5, 6)])
        qg = make_qos_groups(x, as_rng(1))
        sizes = sorted(qg.size.values(), reverse=True)
        assert sizes[0] == 4 and 3 in sizes

    def test_deterministic(self):
        x = SimplicialComplex.from_simplices([(0, 1, 2, 3), (3, 4), (5,)])
        a = make_qos_groups(x, 9)
        b = make_qos_groups(x, 9)
        assert (a.group_of, a.size, a.quota) == (b.group_of, b.size, b.quota)

    def test_quota_validation(self):
        with pytest.raises(ValueError):
            QoSGroups({0: 1}, {1: 1}, {1: 2})

    def test_empty_complex_rejected(self):
        with pytest.raises(ValueError):
            make_qos_groups(SimplicialComplex.from_simplices([]), as_rng(0))


class TestConserve:
    def test_invariants_across_seeds(self):
        checked = 0
        for seed in range(25):
            out = scenario(seed)
            if out[0] is None:
                continue
            rng, ns, x, qg = out
            before = betti(x)
            res = conserve(
                x, ns, qg, rng, shrink_step=0.05, edge_scale=EDGE_SCALE
            )
            kept = set(res.kept)
            # partition of the vertex set
            assert kept | set(res.removed) == x.vertex_set()
            assert kept.isdisjoint(res.removed)
            # boundary ring is untouchable
            assert set(np.flatnonzero(ns.boundary)) <= kept
            # per-group quotas hold
            for g in qg.size:
                alive = sum(1 for v in qg.members(g) if v in kept)
                assert alive >= qg.quota[g]
            # radii only shrink, never below the floor
            for v in kept:
                assert res.r_cov[v] <= ns.r_cov[v] + 1e-12
                assert res.r_cov[v] >= min(SIDE / 20.0, ns.r_cov[v]) - 1e-12
            # reported Betti pair is preserved and matches an independent
            # rebuild of the shrunk skeleton
            assert res.betti == before
            assert skeleton_from_radii(ns, kept, res.r_cov, EDGE_SCALE) \
                == before
            checked += 1
        assert checked >= 20

    def test_all_quotas_maximal_blocks_removal(self):
        out = scenario(4)
        rng, ns, x, qg = out
        full = QoSGroups(qg.group_of, qg.size, dict(qg.size))
        res = conserve(x, ns, full, rng, edge_scale=EDGE_SCALE)
        assert res.removed == []
        assert set(res.kept) == x.vertex_set()

    def test_literal_quota_guard_stops_a_step_late(self):
        # the whole-loop guard reads the counts before the next removal,
        # so at most one group may finish exactly one below its quota
        rng, ns, x, qg = scenario(6)
        res = conserve(
            x, ns, qg, rng, quota_guard="literal", edge_scale=EDGE_SCALE
        )
        assert res.betti == betti(x)
        short = []
        for g in qg.size:
            alive = sum(1 for v in qg.members(g) if v in res.kept)
            assert alive >= qg.quota[g] - 1
            if alive < qg.quota[g]:
                short.append(g)
        assert len(short) <= 1

    def test_energy_strictly_saved_when_anything_happens(self):
        rng, ns, x, qg = scenario(8)
        res = conserve(x, ns, qg, rng, edge_scale=EDGE_SCALE)
        before = float(np.sum(ns.r_cov**2))
        after = sum(r * r for r in res.r_cov.values())
        assert after <= before + 1e-12
        if res.removed:
            assert after < before

    def test_trace_written(self):
        rng, ns, x, qg = scenario(10)
        buf = io.StringIO()
        conserve(x, ns, qg, rng, edge_scale=EDGE_SCALE, trace=buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines
        for line in lines:
            parts = line.split()
            assert len(parts) == 6
            assert parts[3] in ("removed", "flagged")

    def test_validation(self):
        rng, ns, x, qg = scenario(12)
        with pytest.raises(ValueError):
            conserve(x, ns, qg, rng, shrink_step=0.0)
        with pytest.raises(ValueError):
            conserve(x, ns, qg, rng, edge_scale=-1.0)
        with pytest.raises(ValueError):
            conserve(x, ns, qg, rng, quota_guard="none")
        y = x.delete_vertex(sorted(x.vertex_set())[0])
        with pytest.raises(ValueError):
            conserve(y, ns, qg, rng)

    def test_deterministic(self):
        _, ns, x, qg = scenario(14)
        a = conserve(x, ns, qg, 3, edge_scale=EDGE_SCALE)
        b = conserve(x, ns, qg, 3, edge_scale=EDGE_SCALE)
        assert a.kept == b.kept and a.removed == b.removed
        assert a.r_cov == b.r_cov

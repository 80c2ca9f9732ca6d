import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from test_geometry import small_nodeset
from toposon.complexes import rips_from_disks
from toposon.frequency import (
    FrequencyPlan,
    InterferenceGraph,
    auto_plan,
    coverage_per_frequency,
    greedy_coloring,
    interference_graph,
    plan_is_valid,
)
from toposon.geometry import as_rng, assign_radii_uniform, sample_poisson


def scenario(seed, intensity=12.0, side=2.0):
    rng = as_rng(seed)
    ns = sample_poisson(intensity, side, rng)
    if ns.n == 0:
        return None, None, None
    ns = assign_radii_uniform(
        ns, side / 10.0, 2.0 / math.sqrt(math.pi * intensity), rng
    )
    x = rips_from_disks(ns, "comm")
    ig = interference_graph(ns)
    return ns, x, ig


class TestInterferenceGraph:
    def test_strict_max_rule(self):
        # edge iff distance < max(r_rej_u, r_rej_v), strictly
        ns = small_nodeset([0.0, 0.25], [0.0, 0.0])
        ns = ns.replace(r_rej=np.array([0.25, 0.1]))
        assert interference_graph(ns).edges() == []
        nearer = ns.replace(xs=np.array([0.0, 0.25 - 1e-9]))
        assert interference_graph(nearer).edges() == [(0, 1)]

    def test_matches_bruteforce(self):
        for seed in range(20):
            ns, _, ig = scenario(seed)
            if ns is None:
                continue
            want = []
            for u, v in itertools.combinations(range(ns.n), 2):
                d = math.hypot(ns.xs[u] - ns.xs[v], ns.ys[u] - ns.ys[v])
                if d < max(ns.r_rej[u], ns.r_rej[v]):
                    want.append((u, v))
            assert ig.edges() == want

    def test_container_invariants(self):
        ig = InterferenceGraph(4, [(0, 1), (1, 2)])
        assert ig.n_edges() == 2
        assert ig.max_degree() == 2
        with pytest.raises(ValueError):
            InterferenceGraph(3, [(0, 0)])
        with pytest.raises(ValueError):
            InterferenceGraph(3, [(0, 5)])


class TestGreedyColoring:
    def test_edgeless_uses_one(self):
        plan = greedy_coloring(InterferenceGraph(5, []))
        assert plan.n_freqs == 1
        assert set(plan.assignment.values()) == {0}

    def test_triangle_needs_three(self):
        plan = greedy_coloring(InterferenceGraph(3, [(0, 1), (1, 2), (0, 2)]))
        assert plan.n_freqs == 3

    def test_custom_order(self):
        ig = InterferenceGraph(4, [(0, 1), (2, 3)])
        a = greedy_coloring(ig)
        b = greedy_coloring(ig, order=[3, 2, 1, 0])
        assert plan_is_valid(a, ig) and plan_is_valid(b, ig)
        with pytest.raises(ValueError):
            greedy_coloring(ig, order=[0, 1, 2])  # not a permutation

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 12), st.floats(0, 1), st.integers(0, 2**31 - 1))
    def test_proper_and_bounded(self, n, p, seed):
        rng = as_rng(seed)
        edges = [
            (u, v)
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < p
        ]
        ig = InterferenceGraph(n, edges)
        plan = greedy_coloring(ig)
        assert plan_is_valid(plan, ig)
        assert plan.n_freqs <= ig.max_degree() + 1


class TestAutoPlan:
    def test_conflict_free_classes_on_random_scenarios(self):
        for seed in range(40):
            ns, x, ig = scenario(seed)
            if ns is None:
                continue
            plan = auto_plan(x, ig, as_rng(seed))
            assert plan_is_valid(plan, ig)
            # every frequency class is an independent set of the graph
            for f in range(plan.n_freqs):
                cls = {v for v, ff in plan.assignment.items() if ff == f}
                for u in cls:
                    assert not (ig.neighbors[u] & cls)

    def test_no_conflicts_means_single_frequency(self):
        ns, x, _ = scenario(2)
        ig = InterferenceGraph(ns.n, [])
        plan = auto_plan(x, ig, as_rng(0))
        assert plan.n_freqs == 1

    def test_deterministic(self):
        ns, x, ig = scenario(5)
        a = auto_plan(x, ig, 7)
        b = auto_plan(x, ig, 7)
        assert a.assignment == b.assignment and a.n_freqs == b.n_freqs

    def test_vertex_mismatch_rejected(self):
        ns, x, ig = scenario(3)
        with pytest.raises(ValueError):
            auto_plan(x, InterferenceGraph(ns.n + 2, []), as_rng(0))

    def test_empty_complex_rejected(self):
        from toposon.complexes import SimplicialComplex

        with pytest.raises(ValueError):
            auto_plan(
                SimplicialComplex.from_simplices([]),
                InterferenceGraph(0, []),
                as_rng(0),
            )


class TestPlanValidity:
    def test_partial_assignment_invalid(self):
        ig = InterferenceGraph(3, [(0, 1)])
        assert not plan_is_valid(FrequencyPlan({0: 0, 1: 1}, 2), ig)

    def test_conflicting_assignment_invalid(self):
        ig = InterferenceGraph(2, [(0, 1)])
        assert not plan_is_valid(FrequencyPlan({0: 0, 1: 0}, 1), ig)

    def test_frequency_range_checked(self):
        with pytest.raises(ValueError):
            FrequencyPlan({0: 2}, 2)


class TestCoveragePerFrequency:
    def test_single_node_covers_everything_it_reaches(self):
        ns = small_nodeset([1.0], [1.0], r=0.5)
        ns = ns.replace(r_comm=np.array([0.5]))
        fracs = coverage_per_frequency(ns, FrequencyPlan({0: 0}, 1))
        assert fracs.shape == (1,)
        assert fracs[0] == 1.0

    def test_colocated_nodes_fill_both_frequencies(self):
        ns = small_nodeset([1.0, 1.0], [1.0, 1.0], r=0.5)
        ns = ns.replace(r_comm=np.array([0.5, 0.5]))
        fracs = coverage_per_frequency(ns, FrequencyPlan({0: 0, 1: 1}, 2))
        assert np.all(fracs == 1.0)

    def test_disjoint_disks_split_the_area(self):
        ns = small_nodeset([0.5, 1.5], [1.0, 1.0], r=0.3)
        ns = ns.replace(r_comm=np.array([0.3, 0.3]))
        fracs = coverage_per_frequency(ns, FrequencyPlan({0: 0, 1: 1}, 2), 512)
        assert fracs[0] == pytest.approx(0.5, abs=0.01)
        assert fracs[1] == pytest.approx(0.5, abs=0.01)

    def test_zero_radius_node_contributes_nothing(self):
        ns = small_nodeset([0.5, 1.5], [1.0, 1.0], r=0.3)
        ns = ns.replace(r_comm=np.array([0.3, 0.0]))
        fracs = coverage_per_frequency(ns, FrequencyPlan({0: 0, 1: 1}, 2))
        assert fracs[0] == 1.0 and fracs[1] == 0.0

    def test_validation(self):
        ns = small_nodeset([0.5], [0.5], r=0.3)
        with pytest.raises(ValueError):
            coverage_per_frequency(ns, FrequencyPlan({0: 0}, 1), resolution=8)
        with pytest.raises(ValueError):
            coverage_per_frequency(ns, FrequencyPlan({0: 0, 1: 0}, 1))

"""Linial families, defective and arbdefective colorings, the recursive proper coloring."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from coloring import (
    ColoringKind,
    PartialOrientation,
    PolynomialFamily,
    a1eps_coloring,
    arb_coloring_cc,
    arb_linial,
    arbdefective_coloring_cc,
    class_rank,
    defective_coloring,
    fast_coloring_a2eps,
    linial_schedule,
    next_family,
    o_a_coloring,
    partial_orientation_cc,
    pick_least_used,
    proper_coloring_cc,
    recolor,
    recursive_split,
    simple_arbdefective,
    tolerant_family,
)
from conftest import complete_graph, cycle_graph, forest_union, grid, path_graph
from decomposition import forests_decomposition_cc
from errors import InvalidParameters, ProtocolError, Stall
from graph_model import Graph
from oracles import log_star, verify_coloring, verify_partial_orientation
from sim_engine import CliqueNetwork

FAMILY = PolynomialFamily(5, 1)
# observed fixpoint palettes stay below this multiple of A^2
LINIAL_PALETTE_FACTOR = 8


class TestPolynomialFamily:
    @pytest.mark.parametrize("q,d", [(3, 1), (5, 1), (3, 2), (2, 3)])
    def test_distinct_colors_agree_on_at_most_d_points(self, q, d):
        fam = PolynomialFamily(q, d)
        for c1, c2 in itertools.combinations(range(1, fam.capacity + 1), 2):
            agree = sum(1 for x in range(q) if fam.evaluate(c1, x) == fam.evaluate(c2, x))
            assert agree <= d

    def test_encode_stays_in_palette(self):
        assert {FAMILY.encode(x, y) for x in range(5) for y in range(5)} == set(range(1, 26))

    def test_next_family_examples(self):
        assert next_family(401, 4) == PolynomialFamily(11, 2)
        assert next_family(121, 4) is None

    def test_schedule_reaches_fixpoint(self):
        steps = linial_schedule(401, 4)
        assert [f.palette for f in steps] == [121]
        assert linial_schedule(10, 4) == []

    def test_tolerant_family_example(self):
        assert tolerant_family(529, 2) == PolynomialFamily(7, 3)
        assert tolerant_family(9, 2) is None


    def test_tolerant_palette_tracks_p_times_d(self):
        # from a 1369-coloring: q >= p*d and q^(d+1) >= 1369
        assert tolerant_family(1369, 2) == PolynomialFamily(7, 3)
        assert tolerant_family(1369, 4) == PolynomialFamily(13, 2)


class TestRecolor:
    def test_first_point_when_nothing_watched(self):
        assert recolor(FAMILY, 1, []) == 1

    def test_skips_colliding_point(self):
        # color 6 owns f(x) = x, which meets color 1's f(x) = 0 at x = 0 only
        assert recolor(FAMILY, 1, [6]) == 6

    def test_strict_fails_when_every_point_collides(self):
        with pytest.raises(ProtocolError):
            recolor(FAMILY, 1, [6, 7, 8, 9, 10])

    def test_tolerant_takes_fewest_collisions_then_smallest_point(self):
        assert recolor(FAMILY, 1, [6, 7, 8, 9, 10], tolerant=True) == 1
        assert recolor(FAMILY, 1, [6, 6, 7, 8, 9, 10], tolerant=True) == 6

    @settings(max_examples=150, deadline=None)
    @given(data=st.data())
    def test_strict_step_avoids_every_watched_polynomial(self, data):
        fam = next_family(401, 4)
        color = data.draw(st.integers(1, 401))
        others = data.draw(st.lists(st.integers(1, 401).filter(lambda c: c != color), max_size=4))
        new = recolor(fam, color, others)
        x = (new - 1) // fam.q
        assert all(fam.evaluate(c, x) != fam.evaluate(color, x) for c in others)
        assert 1 <= new <= fam.palette

    @settings(max_examples=150, deadline=None)
    @given(data=st.data())
    def test_tolerant_step_collision_bound(self, data):
        fam = tolerant_family(529, 2)
        color = data.draw(st.integers(1, 529))
        others = data.draw(st.lists(st.integers(1, 529).filter(lambda c: c != color), max_size=20))
        new = recolor(fam, color, others, tolerant=True)
        x = (new - 1) // fam.q
        hits = sum(1 for c in others if fam.evaluate(c, x) == fam.evaluate(color, x))
        assert hits <= len(others) * fam.d // fam.q
        assert hits <= len(others) // 2


class TestArbLinial:
    def test_edgeless_graph_gets_one_color(self):
        g = Graph(5, frozenset())
        coloring = arb_linial(g, forests_decomposition_cc(g, 1, 2))
        assert set(coloring.colors.values()) == {1}

    def test_long_path_shrinks_palette(self):
        g = path_graph(400)
        net = CliqueNetwork(400)
        coloring = arb_linial(g, forests_decomposition_cc(g, 1, 2, network=net), network=net)
        assert coloring.palette_size == 121
        assert coloring.stats["linial_rounds"] == 1
        assert net.stats.rounds == 4 + 1
        assert verify_coloring(g, coloring).ok

    def test_arb_coloring_grid(self):
        g = grid(5, 5)
        coloring = arb_coloring_cc(g, 2)
        assert verify_coloring(g, coloring).ok
        assert coloring.stats["forests"] == 8

    def test_fast_variant_uses_wider_threshold(self):
        g = forest_union(50, 3, seed=2)
        coloring = fast_coloring_a2eps(g, 3, 0.5)
        assert verify_coloring(g, coloring).ok
        assert coloring.stats["forests"] == 11

    @settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(n=st.integers(3, 40), k=st.integers(1, 2), seed=st.integers(0, 1000))
    def test_proper_on_forest_unions(self, n, k, seed):
        g = forest_union(n, k, seed=seed)
        assert verify_coloring(g, arb_coloring_cc(g, k)).ok


    @pytest.mark.slow
    def test_rounds_follow_log_star_of_n(self):
        rounds, linial = {}, {}
        for n in (16, 256, 4096):
            g = path_graph(n)
            coloring = arb_coloring_cc(g, 1)
            assert verify_coloring(g, coloring).ok
            assert coloring.palette_size <= LINIAL_PALETTE_FACTOR * coloring.stats["forests"] ** 2
            rounds[n] = coloring.stats["rounds"]
            linial[n] = coloring.stats["linial_rounds"]
        assert linial == {16: 0, 256: 1, 4096: 2}
        assert len({rounds[n] - linial[n] for n in rounds}) == 1
        for n in (256, 4096):
            assert abs((rounds[n] - rounds[16]) - (log_star(n) - log_star(16))) <= 2

    @pytest.mark.slow
    def test_fast_variant_peeling_does_not_depend_on_a(self):
        peeling = {}
        for a in (2, 4, 8, 16):
            g = forest_union(256, a, seed=1)
            coloring = fast_coloring_a2eps(g, a, 0.5)
            assert verify_coloring(g, coloring).ok
            peeling[a] = coloring.stats["peeling_rounds"]
        assert set(peeling.values()) == {3}


class TestDefective:
    def test_cycle_with_two_parts(self):
        g = cycle_graph(8)
        coloring = defective_coloring(g, 2)
        assert coloring.bound == 1
        assert verify_coloring(g, coloring).ok

    def test_p_one_is_monochromatic(self):
        coloring = defective_coloring(cycle_graph(5), 1)
        assert set(coloring.colors.values()) == {1}
        assert coloring.kind is ColoringKind.DEFECTIVE

    def test_palette_constant_is_reported(self):
        coloring = defective_coloring(cycle_graph(1368), 2, max_degree=34)
        assert coloring.bound == 17
        assert coloring.palette_size == 49
        assert coloring.stats["tolerant"] is True
        assert (coloring.stats["tolerant_q"], coloring.stats["tolerant_d"]) == (7, 3)
        assert coloring.stats["palette_per_p2"] == 49 / 4
        assert verify_coloring(cycle_graph(1368), coloring).ok

    def test_invalid_p(self):
        with pytest.raises(InvalidParameters):
            defective_coloring(cycle_graph(5), 0)

    def test_groups_ignore_cross_edges(self):
        g = complete_graph(6)
        groups = {v: v % 2 for v in range(6)}
        coloring = defective_coloring(g, 2, groups=groups)
        for v in range(6):
            same = [u for u in g.neighbors(v) if groups[u] == groups[v] and coloring.colors[u] == coloring.colors[v]]
            assert len(same) <= coloring.bound


class TestPartialOrientation:
    def test_forest_union(self):
        g = forest_union(60, 4, seed=4)
        res = partial_orientation_cc(g, 4, 2, 1)
        assert res.orientation.deficit_bound == 2
        assert res.orientation.outdeg_bound == 12
        assert verify_partial_orientation(g, res.orientation).ok

    def test_t_below_one_rejected(self):
        with pytest.raises(InvalidParameters):
            partial_orientation_cc(path_graph(4), 1, 0.5, 1)

    @pytest.mark.parametrize("seed", [0, 4, 9])
    def test_longest_path_bounded_by_levels_times_palette(self, seed):
        g = forest_union(60, 4, seed=seed)
        res = partial_orientation_cc(g, 4, 2, 1)
        longest = res.orientation.longest_path()
        # along a path (level, color) strictly increases
        assert longest <= res.h.partition.ell * (1 + res.coloring.palette_size)
        assert verify_partial_orientation(g, res.orientation).measured["longest_path"] == longest


class TestArbdefective:
    @pytest.mark.parametrize(
        "parents,k,expected",
        [([1, 1, 2], 2, 2), ([1, 2], 2, 1), ([], 3, 1), ([2, 2, 1, 1, 3], 3, 3)],
    )
    def test_pick_least_used(self, parents, k, expected):
        assert pick_least_used(parents, k) == expected

    def test_path_orientation(self):
        g = path_graph(5)
        status = {(0, 1): 1, (1, 2): 2, (2, 3): 3, (3, 4): 4}
        coloring = simple_arbdefective(g, PartialOrientation(status, 0, 1), 2)
        assert coloring.colors == {4: 1, 3: 2, 2: 1, 1: 2, 0: 1}
        assert verify_coloring(g, coloring).ok

    def test_cyclic_orientation_stalls(self, triangle):
        status = {(0, 1): 1, (1, 2): 2, (0, 2): 0}
        with pytest.raises(Stall):
            simple_arbdefective(triangle, PartialOrientation(status, 0, 1), 2)

    def test_forest_union_witness(self):
        g = forest_union(60, 4, seed=4)
        coloring = arbdefective_coloring_cc(g, 4, 4, 2, 1)
        assert coloring.bound == 5
        report = verify_coloring(g, coloring)
        assert report.ok
        assert report.measured["max_witness_load"] <= 5
        po = partial_orientation_cc(g, 4, 2, 1)
        assert coloring.stats["longest_path"] == po.orientation.longest_path()
        assert coloring.stats["longest_path"] <= po.h.partition.ell * (1 + po.coloring.palette_size)

    @pytest.mark.slow
    @pytest.mark.parametrize("a", [2, 3, 4])
    def test_thirty_runs_with_two_classes(self, a):
        for seed in range(10):
            g = forest_union(48, a, seed=seed)
            coloring = arbdefective_coloring_cc(g, a, 2, 2, 2)
            assert coloring.bound == int(2.5 * a)
            report = verify_coloring(g, coloring)
            assert report.ok, (a, seed, report.violations[:3])
            assert report.measured["max_witness_load"] <= coloring.bound


class TestRecursiveColoring:
    def test_class_rank(self):
        assert class_rank((), 4) == 0
        assert class_rank((1,), 4) == 0
        assert class_rank((2, 3), 4) == 6

    @pytest.mark.parametrize("p,stop", [(1, 4), (6, 5)])
    def test_parameter_guards(self, p, stop):
        with pytest.raises(InvalidParameters):
            proper_coloring_cc(path_graph(4), 1, p, stop, eps_h=0.5)

    def test_recursion_needs_shrinking_p(self):
        with pytest.raises(InvalidParameters):
            recursive_split(path_graph(4), 8, 5, 5, eps_h=2)

    def test_split_below_threshold_ignores_p(self):
        split = recursive_split(path_graph(4), 1, 3, 3, eps_h=2)
        assert split.depth == 0
        assert split.rounds == 0
        coloring = proper_coloring_cc(path_graph(4), 1, 3, 3, eps_h=2)
        assert coloring.palette_size == 3
        assert verify_coloring(path_graph(4), coloring).ok

    def test_a1eps_with_explicit_p(self):
        g = forest_union(40, 2, seed=6)
        coloring = a1eps_coloring(g, 16, p=11)
        assert coloring.stats["p"] == 11
        assert coloring.stats["depth"] == 1
        assert coloring.stats["leaf_palette"] == 15
        assert coloring.palette_size == 165
        assert verify_coloring(g, coloring).ok

    def test_o_a_with_explicit_p(self):
        g = forest_union(40, 4, seed=7)
        coloring = o_a_coloring(g, 4, 3, eps_h=0.5, p=5)
        assert coloring.stats["p"] == 5
        assert coloring.palette_size == 9

    def test_a1eps_without_split(self):
        g = forest_union(40, 2, seed=6)
        coloring = a1eps_coloring(g, 2)
        assert coloring.stats["depth"] == 0
        assert coloring.palette_size == 5
        assert verify_coloring(g, coloring).ok

    @pytest.mark.slow
    def test_a1eps_with_two_levels(self):
        g = forest_union(64, 8, seed=9)
        coloring = a1eps_coloring(g, 8, eps_h=0.5)
        assert coloring.stats["depth"] == 2
        assert coloring.stats["leaf_palette"] == 7
        assert coloring.palette_size == 25 * 7
        assert verify_coloring(g, coloring).ok

    def test_o_a_without_split(self):
        g = forest_union(40, 4, seed=7)
        coloring = o_a_coloring(g, 4, 3, eps_h=0.5)
        assert coloring.stats["p"] == 4
        assert coloring.palette_size == 9
        assert verify_coloring(g, coloring).ok

    def test_o_a_on_edgeless_graph(self):
        g = Graph(10, frozenset())
        coloring = o_a_coloring(g, 64, 1.5)
        assert coloring.stats["p"] == 8
        assert coloring.used_colors == 1

    def test_o_a_rejects_small_p(self):
        with pytest.raises(InvalidParameters):
            o_a_coloring(path_graph(5), 4, 1)

    @pytest.mark.slow
    @pytest.mark.parametrize("a,palette", [(16, 3773), (64, 3328)])
    def test_o_a_palette_on_large_forest_unions(self, a, palette):
        # p = ceil(a^(2/3)) is 7 and 16; three and two split levels
        g = forest_union(1024, a, seed=0)
        coloring = o_a_coloring(g, a, 2)
        assert coloring.palette_size == palette
        assert coloring.stats["palette_ratio"] == pytest.approx(palette / a)
        assert verify_coloring(g, coloring).ok

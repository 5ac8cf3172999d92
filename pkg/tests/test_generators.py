import pytest

from dirgame.errors import SpecError
from dirgame.generators import (
    ControlledTreeSpec,
    CounterexampleSpec,
    DaryTreeSpec,
    ExplicitDagSpec,
    HChainSpec,
    OrientedLatticeSpec,
    TilingSpec,
    from_config,
    grid2_spec,
    height_parity,
    line_spec,
    make_controlled_tree,
    make_counterexample_tree,
    make_dary_tree,
    make_explicit_dag,
    make_h_chain,
    make_oriented_lattice,
    make_tiling,
    mixed_squares_tiling_spec,
    unit_square_tiling_spec,
)
from dirgame.graph import out_neighbors, reach_set, validate_region

ALL_FAMILIES = [
    lambda: make_dary_tree(DaryTreeSpec(d=2)),
    lambda: make_dary_tree(DaryTreeSpec(d=3)),
    lambda: make_oriented_lattice(line_spec()),
    lambda: make_oriented_lattice(grid2_spec()),
    lambda: make_tiling(unit_square_tiling_spec()),
    lambda: make_tiling(mixed_squares_tiling_spec()),
    lambda: make_h_chain(
        HChainSpec(h_vertices=("a", "b", "c"), h_edges=(("a", "b"), ("b", "c"), ("a", "c")))
    ),
    lambda: make_controlled_tree(ControlledTreeSpec(levels=(0, 2, 5))),
    lambda: make_controlled_tree(ControlledTreeSpec(levels="squares", path_mode=False)),
    lambda: make_counterexample_tree(CounterexampleSpec()),
    lambda: make_counterexample_tree(CounterexampleSpec(branch_intervals=((3, 13),))),
]


def test_every_family_validates_to_depth_12():
    for build in ALL_FAMILIES:
        g = build()
        assert validate_region(g, g.initial, 12).ok, g.family


def test_oriented_edges_increase_dot_product():
    oriented = [
        make_oriented_lattice(line_spec()),
        make_oriented_lattice(grid2_spec()),
        make_tiling(unit_square_tiling_spec()),
        make_tiling(mixed_squares_tiling_spec()),
        make_h_chain(HChainSpec(("a", "b"), (("a", "b"),))),
    ]
    for g in oriented:
        u = g.metadata["direction"]
        embed = g.embedding or (lambda v: v)
        rs = reach_set(g, g.initial, 8)
        for level in rs.members[:8]:
            for v in level:
                pv = embed(v)
                for w in out_neighbors(g, v):
                    pw = embed(w)
                    assert sum((a - b) * c for a, b, c in zip(pw, pv, u)) > 0


class TestDaryTree:
    def test_every_vertex_has_d_children(self):
        g = make_dary_tree(DaryTreeSpec(d=2))
        for level in reach_set(g, (), 4).members:
            for v in level:
                assert len(out_neighbors(g, v)) == 2

    def test_reach_count_d3(self):
        g = make_dary_tree(DaryTreeSpec(d=3))
        assert reach_set(g, (), 2).total == 13  # 1 + 3 + 9
        assert g.max_reach_count(2) == 13

    def test_single_equivalence_class(self):
        g = make_dary_tree(DaryTreeSpec(d=2))
        labels = {g.equivalence_fn(v) for lv in reach_set(g, (), 4).members for v in lv}
        assert len(labels) == 1

    def test_d1_rejected(self):
        with pytest.raises(SpecError):
            DaryTreeSpec(d=1)

    def test_height_parity_predicate(self):
        assert height_parity(()) == 0
        assert height_parity((0,)) == 1
        assert height_parity((0, 1)) == 0


class TestOrientedLattice:
    def test_line_out_degree_one(self):
        g = make_oriented_lattice(line_spec())
        for lv in reach_set(g, (0,), 6).members:
            for v in lv:
                assert len(out_neighbors(g, v)) == 1

    def test_grid_triangle_counts(self):
        g = make_oriented_lattice(grid2_spec())
        for n in range(7):
            assert reach_set(g, (0, 0), n).total == (n + 1) * (n + 2) // 2

    def test_backward_offset_rejected(self):
        with pytest.raises(SpecError, match="orientation"):
            make_oriented_lattice(
                OrientedLatticeSpec(dim=1, offsets=((-1,),), direction=(1,))
            )

    def test_duplicate_offsets_rejected(self):
        with pytest.raises(SpecError, match="duplicate"):
            make_oriented_lattice(
                OrientedLatticeSpec(dim=1, offsets=((1,), (1,)), direction=(1,))
            )

    def test_residue_classes_label(self):
        spec = OrientedLatticeSpec(
            dim=1, offsets=((1,), (2,)), direction=(1,), periods=(2,)
        )
        g = make_oriented_lattice(spec)
        assert g.equivalence_fn((4,)) == g.equivalence_fn((0,))
        assert g.equivalence_fn((3,)) != g.equivalence_fn((0,))
        assert len(g.class_representatives) == 2


class TestTiling:
    def test_unit_square_matches_grid(self):
        tg = make_tiling(unit_square_tiling_spec())
        grid = make_oriented_lattice(grid2_spec())
        # same level counts and same embedded points, depth 6
        trs = reach_set(tg, tg.initial, 6)
        grs = reach_set(grid, (0, 0), 6)
        assert trs.counts == grs.counts
        for tl, gl in zip(trs.members, grs.members):
            assert sorted(tg.embedding(v) for v in tl) == sorted(gl)

    def test_mixed_squares_fixture(self):
        g = make_tiling(mixed_squares_tiling_spec())
        assert validate_region(g, g.initial, 12).ok
        assert g.metadata["direction"] == (1, 1)
        assert g.transitivity_radius == 6
        assert len(g.class_representatives) == 8

    def test_downward_edge_rejected(self):
        # adding a downward vertical edge next to the upward ones leaves no
        # direction that all edges strictly increase
        spec = TilingSpec(
            period_vectors=((1, 0), (0, 1)),
            corners=((0, 0),),
            edges=((0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (0, -1))),
        )
        with pytest.raises(SpecError):
            make_tiling(spec)

    def test_supplied_direction_validated(self):
        spec = TilingSpec(
            period_vectors=((1, 0), (0, 1)),
            corners=((0, 0),),
            edges=((0, 0, (1, 0)), (0, 0, (0, 1))),
            direction=(1, -5),
        )
        with pytest.raises(SpecError, match="direction"):
            make_tiling(spec)


class TestHChain:
    def test_single_edge_alternates(self):
        g = make_h_chain(HChainSpec(("a", "b"), (("a", "b"),)))
        assert out_neighbors(g, (0, "a")) == ((1, "b"),)
        assert out_neighbors(g, (1, "b")) == ((2, "a"),)

    def test_triangle_out_degree(self):
        g = make_h_chain(
            HChainSpec(("a", "b", "c"), (("a", "b"), ("b", "c"), ("a", "c")))
        )
        for lv in reach_set(g, (0, "a"), 5).members:
            for v in lv:
                assert len(out_neighbors(g, v)) == 2

    def test_isolated_vertex_rejected(self):
        with pytest.raises(SpecError, match="isolated"):
            make_h_chain(HChainSpec(("a", "b", "c"), (("a", "b"),)))


class TestControlledTree:
    def test_growth_formula_to_depth_20(self):
        # measured reach counts equal 1 + sum 2^{|L cap {0..i}|} (tree part)
        for levels in [(0,), (0, 2), (0, 1, 3), "squares", "all"]:
            g = make_controlled_tree(ControlledTreeSpec(levels=levels, path_mode=False))
            for n in range(21):
                assert reach_set(g, (), n).total == g.max_reach_count(n), (levels, n)

    def test_growth_formula_with_paths(self):
        g = make_controlled_tree(ControlledTreeSpec(levels=(0, 2), path_mode=True))
        for n in range(13):
            assert reach_set(g, (), n).total == g.max_reach_count(n)

    def test_example_l02(self):
        g = make_controlled_tree(ControlledTreeSpec(levels=(0, 2), path_mode=False))
        assert reach_set(g, (), 3).total == 9  # 1 + 2 + 2 + 4

    def test_all_levels_is_binary_tree(self):
        g = make_controlled_tree(ControlledTreeSpec(levels="all", path_mode=False))
        for n in range(8):
            assert reach_set(g, (), n).total == 2 ** (n + 1) - 1

    def test_empty_level_set_rejected(self):
        with pytest.raises(SpecError):
            make_controlled_tree(ControlledTreeSpec(levels=()))

    def test_missing_zero_rejected(self):
        with pytest.raises(SpecError, match="start at 0"):
            make_controlled_tree(ControlledTreeSpec(levels=(1, 2)))

    def test_decreasing_gaps_rejected(self):
        with pytest.raises(SpecError, match="gaps"):
            make_controlled_tree(ControlledTreeSpec(levels=(0, 5, 6)))


class TestCounterexampleTree:
    def test_default_schedule_child_counts(self):
        g = make_counterexample_tree(CounterexampleSpec())
        counts = {
            h: len(out_neighbors(g, tuple(0 for _ in range(h)))) for h in range(20)
        }
        assert counts[1] == 2  # odd height 1 always branches
        assert counts[2] == 1  # even heights never branch
        assert counts[3] == 2  # 3 in [2, 4)
        assert counts[5] == 1  # gap between [2,4) and [16,256)
        assert counts[16] == 1  # even, parity rule precedes the schedule
        assert counts[17] == 2  # odd inside [16, 256)

    def test_desk_schedule(self):
        g = make_counterexample_tree(CounterexampleSpec(branch_intervals=((3, 13),)))
        assert len(out_neighbors(g, tuple([0] * 5))) == 2
        assert len(out_neighbors(g, tuple([0] * 15))) == 1

    def test_overlapping_intervals_rejected(self):
        with pytest.raises(SpecError, match="overlap"):
            make_counterexample_tree(CounterexampleSpec(branch_intervals=((2, 10), (5, 20))))


class TestExplicitDag:
    def test_tail_extension_keeps_graph_sink_free(self):
        g = make_explicit_dag(
            ExplicitDagSpec(initial="z0", edges={"z0": ["a", "b"], "a": ["c"], "b": ["c"]})
        )
        assert validate_region(g, "z0", 6).ok

    def test_unknown_initial_rejected(self):
        with pytest.raises(SpecError):
            make_explicit_dag(ExplicitDagSpec(initial="q", edges={"z0": ["a"]}))


def test_from_config_roundtrip():
    for build in ALL_FAMILIES:
        g = build()
        g2 = from_config(g.spec_dict)
        assert g2.family == g.family
        assert reach_set(g2, g2.initial, 5).counts == reach_set(g, g.initial, 5).counts

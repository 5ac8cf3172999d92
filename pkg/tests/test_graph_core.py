import pytest

from dirgame.errors import ResourceBudgetError, StructuralError
from dirgame.generators import (
    DaryTreeSpec,
    HChainSpec,
    grid2_spec,
    line_spec,
    make_dary_tree,
    make_h_chain,
    make_oriented_lattice,
)
from dirgame.graph import GameGraph, out_neighbors, reach_set, validate_region


def fixture_graph(edges, initial, max_deg=2):
    """Hand-wired graph for violation fixtures; missing keys are errors."""
    return GameGraph(
        initial=initial,
        max_out_degree=max_deg,
        neighbor_fn=lambda v: tuple(edges[v]),
        equivalence_fn=lambda v: v,
        kind="generic",
        family="fixture",
    )


class TestOutNeighbors:
    def test_binary_root(self):
        g = make_dary_tree(DaryTreeSpec(d=2))
        assert out_neighbors(g, ()) == ((0,), (1,))

    def test_directed_line(self):
        g = make_oriented_lattice(line_spec())
        assert out_neighbors(g, (7,)) == ((8,),)

    def test_hchain_triangle(self):
        # hand enumeration of K3: a is adjacent to b and c
        g = make_h_chain(
            HChainSpec(h_vertices=("a", "b", "c"), h_edges=(("a", "b"), ("b", "c"), ("a", "c")))
        )
        assert out_neighbors(g, (4, "a")) == ((5, "b"), (5, "c"))

    def test_invalid_key_is_structural(self):
        g = make_dary_tree(DaryTreeSpec(d=2))
        with pytest.raises(StructuralError):
            out_neighbors(g, (0, 5))  # 5 is not a binary child index
        with pytest.raises(StructuralError):
            out_neighbors(g, "nonsense")


class TestReachSet:
    def test_binary_tree_depth2(self):
        g = make_dary_tree(DaryTreeSpec(d=2))
        rs = reach_set(g, (), 2)
        assert rs.counts == [1, 2, 4]
        assert rs.total == 7  # (d^{n+1}-1)/(d-1)

    def test_line_depth3(self):
        g = make_oriented_lattice(line_spec())
        assert reach_set(g, (0,), 3).total == 4

    def test_grid_depth2(self):
        g = make_oriented_lattice(grid2_spec())
        rs = reach_set(g, (0, 0), 2)
        assert rs.counts == [1, 2, 3]
        assert rs.total == 6  # lattice triangle (n+1)(n+2)/2

    def test_levels_are_neighbor_subsets(self):
        # level i+1 must equal out-neighborhood of level i minus earlier levels
        for g in (make_dary_tree(DaryTreeSpec(d=2)), make_oriented_lattice(grid2_spec())):
            rs = reach_set(g, g.initial, 8)
            seen = set()
            for i in range(8):
                seen |= set(rs.members[i])
                nbrs = set()
                for v in rs.members[i]:
                    nbrs |= set(out_neighbors(g, v))
                assert set(rs.members[i + 1]) == nbrs - seen

    def test_determinism(self):
        g = make_oriented_lattice(grid2_spec())
        a = reach_set(g, (0, 0), 6).members
        b = reach_set(g, (0, 0), 6).members
        assert a == b

    def test_budget(self):
        g = make_dary_tree(DaryTreeSpec(d=3))
        with pytest.raises(ResourceBudgetError) as exc:
            reach_set(g, (), 12, budget=100)
        assert exc.value.level is not None

    def test_dedup_across_levels(self):
        # b is reachable at distances 1 and 2; it must appear once, at 1
        edges = {"z": ("a", "b"), "a": ("b",), "b": ("c",), "c": ("c2",), "c2": ("c3",)}
        g = fixture_graph(edges, "z")
        rs = reach_set(g, "z", 2)
        assert rs.counts == [1, 2, 1]


class TestValidateRegion:
    def test_binary_tree_passes(self):
        g = make_dary_tree(DaryTreeSpec(d=2))
        assert validate_region(g, (), 5).ok

    def test_cycle_fixture(self):
        edges = {"a": ("b",), "b": ("a",)}
        g = fixture_graph(edges, "a")
        report = validate_region(g, "a", 2)
        assert not report.ok
        kinds = {v.kind for v in report.violations}
        assert "cycle" in kinds
        witness = next(v for v in report.violations if v.kind == "cycle").witness
        assert witness[0] == witness[-1]  # closed walk

    def test_leaf_fixture(self):
        edges = {"a": ("b",), "b": ()}
        g = fixture_graph(edges, "a")
        report = validate_region(g, "a", 2)
        assert not report.ok
        sink = next(v for v in report.violations if v.kind == "sink")
        assert '"b"' in sink.message

    def test_degree_overflow(self):
        edges = {"a": ("b", "c", "d"), "b": ("e",), "c": ("e",), "d": ("e",), "e": ("f",)}
        g = fixture_graph(edges, "a", max_deg=2)
        report = validate_region(g, "a", 1)
        assert any(v.kind == "degree" for v in report.violations)

    def test_sideways_dag_is_not_a_cycle(self):
        # a -> b with b also at distance 1 from the root: acyclic, must pass
        edges = {"z": ("a", "b"), "a": ("b",), "b": ("c",), "c": ("d",), "d": ("e",)}
        g = fixture_graph(edges, "z")
        assert validate_region(g, "z", 3).ok


def test_degree_bounds_everywhere():
    graphs = [
        make_dary_tree(DaryTreeSpec(d=2)),
        make_dary_tree(DaryTreeSpec(d=3)),
        make_oriented_lattice(line_spec()),
        make_oriented_lattice(grid2_spec()),
    ]
    for g in graphs:
        rs = reach_set(g, g.initial, 5)
        for level in rs.members:
            for v in level:
                assert 1 <= len(out_neighbors(g, v)) <= g.max_out_degree

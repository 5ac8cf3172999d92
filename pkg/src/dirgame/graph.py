"""Directed game graphs: lazy, infinite, acyclic, sink-free, degree-bounded.

A GameGraph never materializes vertices; it is a pair of pure functions
(out-neighbors, equivalence label) plus certificates supplied by the
generator that built it.  Only the finite region reachable from a start
vertex within some depth is ever explored, and every exploration is guarded
by a vertex-count budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .errors import ResourceBudgetError, StructuralError
from .keys import VertexId, key_str

# Hard cap on explored vertices unless the caller overrides it.
DEFAULT_REACH_BUDGET = 10**8


@dataclass(frozen=True)
class GameGraph:
    """A lazily explorable directed game graph.

    neighbor_fn must return the ordered out-neighbor tuple of a vertex; the
    order is part of the graph definition (it fixes move indexing and
    tie-breaking).  equivalence_fn labels vertices so that equal labels
    certify isomorphic descendant subgraphs; the certificate comes from the
    generator construction and is never re-checked by isomorphism testing.
    """

    initial: VertexId
    max_out_degree: int
    neighbor_fn: Callable[[VertexId], tuple[VertexId, ...]]
    equivalence_fn: Callable[[VertexId], Any]
    # Even move count within which both players can force an equivalent-to-
    # reference state; None when the generator certifies no such radius.
    transitivity_radius: int | None = 0
    kind: str = "generic"  # "tree" | "lattice" | "generic"
    family: str = "custom"
    # One vertex per equivalence class, used for worst-case sweeps.
    class_representatives: tuple[VertexId, ...] = ()
    # Closed-form max_z |Z^(n)(z)| when exploration would be exponential.
    max_reach_count: Callable[[int], int] | None = None
    # Integer-lattice embedding for orientation-based partitions.
    embedding: Callable[[VertexId], tuple[int, ...]] | None = None
    # Canonical adapted partition for this family, when one exists.
    adapted_hint: Any = None
    spec_dict: Mapping[str, Any] | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)


@dataclass
class ReachSet:
    """BFS closure of a start vertex: members[i] holds the vertices at
    shortest distance exactly i, so levels are disjoint and their union is
    the set of states reachable within the depth."""

    start: VertexId
    depth: int
    members: list[list[VertexId]]

    @property
    def counts(self) -> list[int]:
        return [len(level) for level in self.members]

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass
class Violation:
    kind: str  # "sink" | "degree" | "cycle"
    witness: list[VertexId]
    message: str


@dataclass
class ValidationReport:
    start: VertexId
    depth: int
    explored: int
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def out_neighbors(g: GameGraph, v: VertexId) -> tuple[VertexId, ...]:
    """Ordered out-neighbors of v; raises StructuralError on a malformed
    key, a sink, or a degree overflow."""
    try:
        nbrs = tuple(g.neighbor_fn(v))
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise StructuralError(f"invalid vertex key {key_str(v)}: {exc}") from exc
    if not nbrs:
        raise StructuralError(f"vertex {key_str(v)} has out-degree 0")
    if len(nbrs) > g.max_out_degree:
        raise StructuralError(
            f"vertex {key_str(v)} has out-degree {len(nbrs)} > {g.max_out_degree}"
        )
    return nbrs


def reach_set(
    g: GameGraph, z: VertexId, n: int, budget: int = DEFAULT_REACH_BUDGET
) -> ReachSet:
    """States reachable from z within n moves, grouped by BFS distance."""
    if n < 0:
        raise ValueError("depth must be >= 0")
    seen = {z}
    levels = [[z]]
    for depth in range(n):
        nxt: list[VertexId] = []
        for v in levels[depth]:
            for w in out_neighbors(g, v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if len(seen) > budget:
            raise ResourceBudgetError(
                f"reach set exceeded budget {budget} at level {depth + 1}",
                level=depth + 1,
            )
        levels.append(nxt)
    return ReachSet(start=z, depth=n, members=levels)


def validate_region(
    g: GameGraph, z: VertexId, n: int, budget: int = DEFAULT_REACH_BUDGET
) -> ValidationReport:
    """Check the depth-n region below z for sinks, degree overflow and
    directed cycles.  Violations are report entries, never exceptions."""
    if n < 0:
        raise ValueError("depth must be >= 0")
    violations: list[Violation] = []
    adj: dict[VertexId, tuple[VertexId, ...]] = {}
    depth_of = {z: 0}
    frontier = [z]
    for depth in range(n + 1):
        nxt: list[VertexId] = []
        for v in frontier:
            try:
                nbrs = tuple(g.neighbor_fn(v))
            except Exception as exc:  # malformed key inside the region
                violations.append(
                    Violation("sink", [v], f"neighbor query failed at {key_str(v)}: {exc}")
                )
                continue
            adj[v] = nbrs
            if not nbrs:
                violations.append(
                    Violation("sink", [v], f"out-degree 0 at {key_str(v)}")
                )
            if len(nbrs) > g.max_out_degree:
                violations.append(
                    Violation(
                        "degree",
                        [v],
                        f"out-degree {len(nbrs)} exceeds bound {g.max_out_degree} "
                        f"at {key_str(v)}",
                    )
                )
            if depth < n:
                for w in nbrs:
                    if w not in depth_of:
                        depth_of[w] = depth + 1
                        nxt.append(w)
        if len(depth_of) > budget:
            raise ResourceBudgetError(
                f"validation exceeded budget {budget} at level {depth + 1}",
                level=depth + 1,
            )
        frontier = nxt

    violations.extend(_find_cycle(adj))
    return ValidationReport(start=z, depth=n, explored=len(depth_of), violations=violations)


def _find_cycle(adj: Mapping[VertexId, tuple[VertexId, ...]]) -> list[Violation]:
    # Iterative three-color DFS restricted to the explored region; a back
    # edge to a gray vertex yields the cycle as a witness path.
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[VertexId, int] = {v: WHITE for v in adj}
    for root in adj:
        if color[root] != WHITE:
            continue
        stack: list[tuple[VertexId, int]] = [(root, 0)]
        path = [root]
        color[root] = GRAY
        while stack:
            v, i = stack[-1]
            nbrs = adj.get(v, ())
            if i < len(nbrs):
                stack[-1] = (v, i + 1)
                w = nbrs[i]
                if w not in adj:
                    continue  # outside explored region
                if color[w] == GRAY:
                    cycle = path[path.index(w):] + [w]
                    return [
                        Violation(
                            "cycle",
                            cycle,
                            "directed cycle: " + " -> ".join(key_str(x) for x in cycle),
                        )
                    ]
                if color[w] == WHITE:
                    color[w] = GRAY
                    stack.append((w, 0))
                    path.append(w)
            else:
                color[v] = BLACK
                stack.pop()
                path.pop()
    return []

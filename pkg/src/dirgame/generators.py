"""Graph family generators.

Every family is built as a lazy GameGraph: vertex keys are canonical
(path words over child indices for tree families, integer coordinates for
lattice families), neighbor order is part of the definition, and the
equivalence labels and transitivity radii are certificates of the
construction rather than computed isomorphisms.

Families:
  dary            infinite d-ary tree, edges parent -> child
  lattice         translation-invariant oriented graph on Z^d ("line" and
                  "grid" are sugar), optional periodic exclusion mask
  tiling          periodic planar tiling graph embedded in Z^2
  hchain          bi-infinite chain of copies of a finite graph H
  ctree           tree with branching on a controlled level set, optionally
                  with an infinite path hanging off every vertex
  counterexample  branch-interval tree whose value oscillates between
                  path-like and branchy horizons
  explicit        finite hand-written DAG for fixtures, auto-extended with
                  infinite tails so no explored vertex is a sink
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import SpecError
from .graph import GameGraph
from .keys import VertexId
from .partitions import oriented_partition, tree_partition


def height_parity(v: tuple) -> int:
    """0 for even-height tree vertices, 1 for odd (path-word keys)."""
    return len(v) % 2


# --- d-ary tree -------------------------------------------------------------


@dataclass(frozen=True)
class DaryTreeSpec:
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise SpecError(f"branching must satisfy d >= 2, got {self.d}")

    def to_dict(self) -> dict:
        return {"family": "dary", "d": self.d}


def make_dary_tree(spec: DaryTreeSpec) -> GameGraph:
    d = spec.d

    def neighbor_fn(v: VertexId):
        if not isinstance(v, tuple) or any(
            not isinstance(c, int) or not 0 <= c < d for c in v
        ):
            raise KeyError(f"not a base-{d} path word: {v!r}")
        return tuple(v + (i,) for i in range(d))

    def max_reach_count(n: int) -> int:
        return (d ** (n + 1) - 1) // (d - 1)

    return GameGraph(
        initial=(),
        max_out_degree=d,
        neighbor_fn=neighbor_fn,
        equivalence_fn=lambda v: 0,  # the tree is vertex-transitive
        transitivity_radius=0,
        kind="tree",
        family="dary",
        class_representatives=((),),
        max_reach_count=max_reach_count,
        adapted_hint=tree_partition(),
        spec_dict=spec.to_dict(),
        metadata={"d": d},
    )


# --- oriented lattices ------------------------------------------------------


@dataclass(frozen=True)
class OrientedLatticeSpec:
    dim: int
    offsets: tuple[tuple[int, ...], ...]
    direction: tuple[int, ...]
    periods: tuple[int, ...] = ()
    exclude_residues: tuple[tuple[int, ...], ...] = ()

    def to_dict(self) -> dict:
        return {
            "family": "lattice",
            "dim": self.dim,
            "offsets": [list(o) for o in self.offsets],
            "direction": list(self.direction),
            "periods": list(self.periods),
            "exclude_residues": [list(r) for r in self.exclude_residues],
        }


def line_spec() -> OrientedLatticeSpec:
    return OrientedLatticeSpec(dim=1, offsets=((1,),), direction=(1,))


def grid2_spec() -> OrientedLatticeSpec:
    return OrientedLatticeSpec(dim=2, offsets=((0, 1), (1, 0)), direction=(1, 1))


def make_oriented_lattice(spec: OrientedLatticeSpec) -> GameGraph:
    dim = spec.dim
    if dim < 1:
        raise SpecError("lattice dimension must be >= 1")
    offsets = tuple(tuple(int(x) for x in o) for o in spec.offsets)
    if not offsets:
        raise SpecError("offset list must be non-empty")
    if len(set(offsets)) != len(offsets):
        raise SpecError("offset list contains duplicates")
    if any(len(o) != dim for o in offsets):
        raise SpecError("every offset must have the lattice dimension")
    u = tuple(int(x) for x in spec.direction)
    if len(u) != dim:
        raise SpecError("direction must have the lattice dimension")
    g = 0
    for x in u:
        g = math.gcd(g, abs(x))
    if g == 0:
        raise SpecError("direction vector must be nonzero")
    u = tuple(x // g for x in u)
    for o in offsets:
        if sum(a * b for a, b in zip(o, u)) <= 0:
            raise SpecError(f"offset {o} violates the orientation: o.u <= 0")
    offsets = tuple(sorted(offsets))
    periods = tuple(int(p) for p in (spec.periods or (1,) * dim))
    if len(periods) != dim or any(p < 1 for p in periods):
        raise SpecError("periods must be positive integers, one per coordinate")
    excluded = frozenset(tuple(int(x) % p for x, p in zip(r, periods))
                         for r in spec.exclude_residues)

    def residue(v) -> tuple[int, ...]:
        return tuple(x % p for x, p in zip(v, periods))

    def included(v) -> bool:
        return residue(v) not in excluded

    origin = (0,) * dim
    if not included(origin):
        raise SpecError("the origin is excluded by the residue mask")

    def neighbor_fn(v: VertexId):
        if (
            not isinstance(v, tuple)
            or len(v) != dim
            or any(not isinstance(x, int) for x in v)
        ):
            raise KeyError(f"not a Z^{dim} coordinate: {v!r}")
        if not included(v):
            raise KeyError(f"vertex {v!r} is excluded by the residue mask")
        return tuple(
            w for o in offsets if included(w := tuple(a + b for a, b in zip(v, o)))
        )

    reps = []
    if math.prod(periods) > 10**4:
        raise SpecError("period box too large to enumerate class representatives")
    def _boxes(ps):
        if not ps:
            yield ()
            return
        for rest in _boxes(ps[1:]):
            for i in range(ps[0]):
                yield (i,) + rest
    for r in _boxes(periods):
        if r not in excluded:
            reps.append(r)

    r_max = max(math.sqrt(sum(x * x for x in o)) for o in offsets)
    u_norm = math.sqrt(sum(x * x for x in u))
    return GameGraph(
        initial=origin,
        max_out_degree=len(offsets),
        neighbor_fn=neighbor_fn,
        equivalence_fn=residue,
        transitivity_radius=0,
        kind="lattice",
        family="lattice",
        class_representatives=tuple(sorted(reps)),
        adapted_hint=oriented_partition(u),
        spec_dict=spec.to_dict(),
        metadata={"direction": u, "edge_norm_max": r_max, "u_norm": u_norm},
    )


# --- tilings ---------------------------------------------------------------


@dataclass(frozen=True)
class TilingSpec:
    """Periodic planar tiling graph.

    corners are the tile-corner positions inside one fundamental domain
    spanned by the two period vectors; each edge is
    (src_corner, dst_corner, (dx, dy)) meaning src in the home domain
    points at dst in the domain shifted by dx*p1 + dy*p2 with
    |dx|, |dy| <= 1.  A direction may be supplied; otherwise one is
    discovered by linear programming and verified exactly.
    """

    period_vectors: tuple[tuple[int, int], tuple[int, int]]
    corners: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int, tuple[int, int]], ...]
    direction: tuple[int, int] | None = None
    transitivity_radius: int | None = None
    initial_corner: int = 0

    def to_dict(self) -> dict:
        return {
            "family": "tiling",
            "period_vectors": [list(p) for p in self.period_vectors],
            "corners": [list(c) for c in self.corners],
            "edges": [[s, t, list(off)] for s, t, off in self.edges],
            "direction": list(self.direction) if self.direction else None,
            "transitivity_radius": self.transitivity_radius,
            "initial_corner": self.initial_corner,
        }


def _discover_direction(displacements: Sequence[tuple[int, int]]) -> tuple[int, int]:
    # find integer u with disp . u >= 1 for every edge displacement
    from scipy.optimize import linprog

    a_ub = [[-dx, -dy] for dx, dy in displacements]
    b_ub = [-1.0] * len(displacements)
    res = linprog(
        c=[0.0, 0.0], A_ub=a_ub, b_ub=b_ub, bounds=[(None, None), (None, None)],
        method="highs",
    )
    if not res.success:
        raise SpecError("no orientation direction exists for the supplied edges")
    fracs = [Fraction(float(x)).limit_denominator(10**6) for x in res.x]
    denom = math.lcm(*(f.denominator for f in fracs))
    u = tuple(int(f * denom) for f in fracs)
    g = math.gcd(abs(u[0]), abs(u[1]))
    u = (u[0] // g, u[1] // g)
    if any(dx * u[0] + dy * u[1] <= 0 for dx, dy in displacements):
        raise SpecError("discovered direction failed exact verification")
    return u


def make_tiling(spec: TilingSpec) -> GameGraph:
    p1, p2 = (tuple(int(x) for x in p) for p in spec.period_vectors)
    if p1[0] * p2[1] - p1[1] * p2[0] == 0:
        raise SpecError("period vectors must be linearly independent")
    corners = tuple(tuple(int(x) for x in c) for c in spec.corners)
    if not corners:
        raise SpecError("the fundamental domain holds no corners")
    if len(set(corners)) != len(corners):
        raise SpecError("duplicate corners in the fundamental domain")
    n_c = len(corners)
    edges = []
    for s, t, off in spec.edges:
        off = (int(off[0]), int(off[1]))
        if not (0 <= s < n_c and 0 <= t < n_c):
            raise SpecError(f"edge ({s},{t}) references a missing corner")
        if abs(off[0]) > 1 or abs(off[1]) > 1:
            raise SpecError(
                f"edge offset {off} crosses beyond the adjacent domains"
            )
        edges.append((s, t, off))
    if not edges:
        raise SpecError("the tiling has no edges")

    def embed(v: VertexId) -> tuple[int, int]:
        cx, cy, ci = v
        return (
            cx * p1[0] + cy * p2[0] + corners[ci][0],
            cx * p1[1] + cy * p2[1] + corners[ci][1],
        )

    displacements = []
    out_by_corner: dict[int, list[tuple[tuple[int, int], int]]] = {i: [] for i in range(n_c)}
    for s, t, (dx, dy) in edges:
        disp = (
            dx * p1[0] + dy * p2[0] + corners[t][0] - corners[s][0],
            dx * p1[1] + dy * p2[1] + corners[t][1] - corners[s][1],
        )
        displacements.append(disp)
        out_by_corner[s].append((disp, (dx, dy, t)))
    if spec.direction is not None:
        u = tuple(int(x) for x in spec.direction)
        if any(d[0] * u[0] + d[1] * u[1] <= 0 for d in displacements):
            bad = next(d for d in displacements if d[0] * u[0] + d[1] * u[1] <= 0)
            raise SpecError(f"edge displacement {bad} violates the supplied direction {u}")
        g = math.gcd(abs(u[0]), abs(u[1]))
        u = (u[0] // g, u[1] // g)
    else:
        u = _discover_direction(displacements)
    # canonical neighbor order: lexicographic by embedded displacement
    for s in out_by_corner:
        out_by_corner[s].sort(key=lambda e: e[0])

    def neighbor_fn(v: VertexId):
        if (
            not isinstance(v, tuple)
            or len(v) != 3
            or not all(isinstance(x, int) for x in v)
            or not 0 <= v[2] < n_c
        ):
            raise KeyError(f"not a tiling vertex (cell_x, cell_y, corner): {v!r}")
        cx, cy, _ = v
        return tuple(
            (cx + dx, cy + dy, t) for _, (dx, dy, t) in out_by_corner[v[2]]
        )

    max_deg = max(len(v) for v in out_by_corner.values())
    if any(len(v) == 0 for v in out_by_corner.values()):
        # legal lazily, validate_region reports it; still worth failing fast
        raise SpecError("some corner has no outgoing edge (would be a sink)")
    r_max = max(math.sqrt(d[0] ** 2 + d[1] ** 2) for d in displacements)
    if not 0 <= spec.initial_corner < n_c:
        raise SpecError(f"initial corner {spec.initial_corner} out of range")
    return GameGraph(
        initial=(0, 0, spec.initial_corner),
        max_out_degree=max_deg,
        neighbor_fn=neighbor_fn,
        equivalence_fn=lambda v: v[2],  # position within the fundamental domain
        transitivity_radius=spec.transitivity_radius,
        kind="lattice",
        family="tiling",
        class_representatives=tuple((0, 0, i) for i in range(n_c)),
        embedding=embed,
        adapted_hint=oriented_partition(u, embed=embed),
        spec_dict=spec.to_dict(),
        metadata={
            "direction": u,
            "edge_norm_max": r_max,
            "u_norm": math.sqrt(u[0] ** 2 + u[1] ** 2),
        },
    )


def unit_square_tiling_spec() -> TilingSpec:
    """Degenerate tiling: one corner per unit cell, edges right and up."""
    return TilingSpec(
        period_vectors=((1, 0), (0, 1)),
        corners=((0, 0),),
        edges=((0, 0, (1, 0)), (0, 0, (0, 1))),
        transitivity_radius=0,
    )


def mixed_squares_tiling_spec() -> TilingSpec:
    """A 3-periodic tiling mixing one 2x2 square with five unit squares.

    The fundamental domain is the 3x3 block; its corners are the integer
    points except the center of the 2x2 tile.  Horizontal edges point
    right, vertical edges point up, and segments interior to the 2x2 tile
    are absent.  The bottom-left corner of a small square works as the
    reference state with radius 6.
    """
    corners = tuple(
        (x, y) for y in range(3) for x in range(3) if (x, y) != (1, 1)
    )
    index = {c: i for i, c in enumerate(corners)}
    edges = []
    for (x, y) in corners:
        # horizontal edge unless it runs inside a 2x2 tile
        if not (y % 3 == 1 and x % 3 in (0, 1)):
            tx, ty = (x + 1) % 3, y
            edges.append((index[(x, y)], index[(tx, ty)], (1 if x == 2 else 0, 0)))
        # vertical edge unless it runs inside a 2x2 tile
        if not (x % 3 == 1 and y % 3 in (0, 1)):
            tx, ty = x, (y + 1) % 3
            edges.append((index[(x, y)], index[(tx, ty)], (0, 1 if y == 2 else 0)))
    return TilingSpec(
        period_vectors=((3, 0), (0, 3)),
        corners=corners,
        edges=tuple(edges),
        transitivity_radius=6,
        initial_corner=corners.index((2, 0)),  # bottom-left of a small square
    )


# --- H-chains ---------------------------------------------------------------


@dataclass(frozen=True)
class HChainSpec:
    """Chain of copies of a finite graph H; H should be connected and
    vertex-transitive (documented contract, not verified here)."""

    h_vertices: tuple[str, ...]
    h_edges: tuple[tuple[str, str], ...]

    def to_dict(self) -> dict:
        return {
            "family": "hchain",
            "h_vertices": list(self.h_vertices),
            "h_edges": [list(e) for e in self.h_edges],
        }


def make_h_chain(spec: HChainSpec) -> GameGraph:
    verts = tuple(spec.h_vertices)
    if not verts:
        raise SpecError("H must be non-empty")
    if len(set(verts)) != len(verts):
        raise SpecError("duplicate H-vertex labels")
    order = {lab: i for i, lab in enumerate(verts)}
    adj: dict[str, set[str]] = {lab: set() for lab in verts}
    for a, b in spec.h_edges:
        if a not in order or b not in order:
            raise SpecError(f"edge ({a},{b}) references a missing H-vertex")
        if a == b:
            raise SpecError("H must not contain loops")
        adj[a].add(b)
        adj[b].add(a)
    for lab, nb in adj.items():
        if not nb:
            raise SpecError(f"H-vertex {lab!r} is isolated (would create sinks)")
    sorted_adj = {lab: tuple(sorted(nb, key=order.__getitem__)) for lab, nb in adj.items()}

    def neighbor_fn(v: VertexId):
        if not (
            isinstance(v, tuple)
            and len(v) == 2
            and isinstance(v[0], int)
            and v[1] in sorted_adj
        ):
            raise KeyError(f"not an H-chain vertex (copy, label): {v!r}")
        i, lab = v
        return tuple((i + 1, w) for w in sorted_adj[lab])

    return GameGraph(
        initial=(0, verts[0]),
        max_out_degree=max(len(nb) for nb in sorted_adj.values()),
        neighbor_fn=neighbor_fn,
        equivalence_fn=lambda v: v[1],
        transitivity_radius=0,
        kind="lattice",
        family="hchain",
        class_representatives=tuple((0, lab) for lab in verts),
        embedding=lambda v: (v[0],),
        adapted_hint=oriented_partition((1,), embed=lambda v: (v[0],)),
        spec_dict=spec.to_dict(),
        metadata={"direction": (1,), "edge_norm_max": 1.0, "u_norm": 1.0},
    )


# --- controlled-expansion trees ----------------------------------------------


@dataclass(frozen=True)
class ControlledTreeSpec:
    """Tree whose vertices branch exactly on a level set L with l_1 = 0 and
    non-decreasing gaps; path_mode hangs an infinite path off every tree
    vertex (one extra child, index after the tree children)."""

    levels: tuple[int, ...] | str = "squares"  # finite list, "all" or "squares"
    path_mode: bool = True

    def to_dict(self) -> dict:
        lv = self.levels if isinstance(self.levels, str) else list(self.levels)
        return {"family": "ctree", "levels": lv, "path_mode": self.path_mode}


def _level_membership(levels) -> tuple:
    if isinstance(levels, str):
        if levels == "all":
            return (lambda k: True), "all"
        if levels == "squares":
            return (lambda k: math.isqrt(k) ** 2 == k), "squares"
        raise SpecError(f"unknown level rule {levels!r}")
    ls = tuple(int(x) for x in levels)
    if not ls or ls[0] != 0:
        raise SpecError("the level set must start at 0")
    if any(b <= a for a, b in zip(ls, ls[1:])):
        raise SpecError("the level set must be strictly increasing")
    gaps = [b - a for a, b in zip(ls, ls[1:])]
    if any(g2 < g1 for g1, g2 in zip(gaps, gaps[1:])):
        raise SpecError("level gaps must be non-decreasing")
    s = frozenset(ls)
    return (lambda k: k in s), "list"


PATH_STEP = -1  # child index reserved for the hanging-path edge


def make_controlled_tree(spec: ControlledTreeSpec) -> GameGraph:
    in_levels, _ = _level_membership(spec.levels)
    path_mode = spec.path_mode

    def classify(v: tuple) -> str:
        # tree keys: components in {0,1}; path keys: tree prefix + (-1)*j
        seen_path = False
        for c in v:
            if c == PATH_STEP:
                seen_path = True
            elif seen_path or c not in (0, 1):
                raise KeyError(f"not a controlled-tree key: {v!r}")
        return "path" if seen_path else "tree"

    def tree_depth(v: tuple) -> int:
        return len(v)

    def neighbor_fn(v: VertexId):
        if not isinstance(v, tuple):
            raise KeyError(f"not a controlled-tree key: {v!r}")
        if classify(v) == "path":
            return (v + (PATH_STEP,),)
        width = 2 if in_levels(tree_depth(v)) else 1
        kids = tuple(v + (i,) for i in range(width))
        if path_mode:
            kids = kids + (v + (PATH_STEP,),)
        return kids

    def level_width(j: int) -> int:
        # tree vertices at depth j
        return 2 ** sum(1 for i in range(j) if in_levels(i))

    def max_reach_count(n: int) -> int:
        if not path_mode:
            return 1 + sum(level_width(i + 1) for i in range(n))
        return sum(level_width(j) * (1 + (n - j)) for j in range(n + 1))

    def label(v: VertexId):
        return ("p",) if classify(v) == "path" else ("t", tree_depth(v))

    return GameGraph(
        initial=(),
        max_out_degree=3 if path_mode else 2,
        neighbor_fn=neighbor_fn,
        equivalence_fn=label,
        transitivity_radius=2 if path_mode else None,
        kind="tree",
        family="ctree",
        class_representatives=((),),  # the root maximizes every reach count
        max_reach_count=max_reach_count,
        adapted_hint=tree_partition(),
        spec_dict=spec.to_dict(),
        metadata={"path_mode": path_mode},
    )


# --- counterexample tree -----------------------------------------------------


@dataclass(frozen=True)
class CounterexampleSpec:
    """Branch-interval tree: even heights never branch; an odd height k
    branches iff k == 1 or k lies in one of the half-open intervals.
    branch_intervals None selects the doubly-exponential default schedule
    [2^(2^(2m)), 2^(2^(2m+1)))."""

    branch_intervals: tuple[tuple[int, int], ...] | None = None

    def to_dict(self) -> dict:
        return {
            "family": "counterexample",
            "branch_intervals": None
            if self.branch_intervals is None
            else [list(i) for i in self.branch_intervals],
        }


def _default_schedule_contains(k: int) -> bool:
    m = 0
    while True:
        lo = 2 ** (2 ** (2 * m))
        if lo > k:
            return False
        hi = 2 ** (2 ** (2 * m + 1))
        if k < hi:
            return True
        m += 1


def make_counterexample_tree(spec: CounterexampleSpec) -> GameGraph:
    intervals = spec.branch_intervals
    if intervals is not None:
        ivs = tuple((int(a), int(b)) for a, b in intervals)
        if any(b <= a for a, b in ivs):
            raise SpecError("branch intervals must be non-empty half-open [a, b)")
        for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
            if a2 < b1:
                raise SpecError(
                    f"branch intervals overlap or are out of order: [{a1},{b1}) and [{a2},{b2})"
                )
        in_schedule = lambda k: any(a <= k < b for a, b in ivs)
        height_cap = ivs[-1][1]
    else:
        in_schedule = _default_schedule_contains
        height_cap = None

    def children_count(height: int) -> int:
        if height % 2 == 0:
            return 1
        return 2 if (height == 1 or in_schedule(height)) else 1

    def neighbor_fn(v: VertexId):
        if not isinstance(v, tuple) or any(c not in (0, 1) for c in v):
            raise KeyError(f"not a counterexample-tree key: {v!r}")
        return tuple(v + (i,) for i in range(children_count(len(v))))

    def label(v: VertexId):
        h = len(v)
        return ("h", h if height_cap is None else min(h, height_cap))

    return GameGraph(
        initial=(),
        max_out_degree=2,
        neighbor_fn=neighbor_fn,
        equivalence_fn=label,
        transitivity_radius=None,
        kind="tree",
        family="counterexample",
        class_representatives=((),),
        adapted_hint=tree_partition(),
        spec_dict=spec.to_dict(),
        metadata={"children_count_rule": "even->1, odd->2 iff k=1 or scheduled"},
    )


# --- explicit fixture DAGs ----------------------------------------------------


@dataclass(frozen=True)
class ExplicitDagSpec:
    """Hand-written finite DAG.  Labels without declared out-edges sprout an
    infinite tail path lazily so the graph stays sink-free; tail vertices
    are keyed ("_ext", label, step)."""

    initial: str
    edges: Mapping[str, Sequence[str]]

    def to_dict(self) -> dict:
        return {
            "family": "explicit",
            "initial": self.initial,
            "edges": {k: list(v) for k, v in self.edges.items()},
        }


def make_explicit_dag(spec: ExplicitDagSpec) -> GameGraph:
    edges = {str(k): tuple(str(x) for x in v) for k, v in spec.edges.items()}
    if spec.initial not in edges:
        raise SpecError(f"initial vertex {spec.initial!r} has no declared edges")
    if any(not v for v in edges.values()):
        raise SpecError("declared adjacency lists must be non-empty")

    def neighbor_fn(v: VertexId):
        if isinstance(v, str):
            if v in edges:
                return edges[v]
            return (("_ext", v, 1),)
        if (
            isinstance(v, tuple)
            and len(v) == 3
            and v[0] == "_ext"
            and isinstance(v[2], int)
        ):
            return (("_ext", v[1], v[2] + 1),)
        raise KeyError(f"unknown explicit-DAG vertex: {v!r}")

    max_deg = max(len(v) for v in edges.values())
    return GameGraph(
        initial=spec.initial,
        max_out_degree=max_deg,
        neighbor_fn=neighbor_fn,
        equivalence_fn=lambda v: v,
        transitivity_radius=None,
        kind="generic",
        family="explicit",
        class_representatives=(spec.initial,),
        spec_dict=spec.to_dict(),
    )


# --- config dispatch ----------------------------------------------------------


def from_config(cfg: Mapping) -> GameGraph:
    """Build a GameGraph from a config-file graph block."""
    fam = cfg.get("family")
    if fam == "dary":
        return make_dary_tree(DaryTreeSpec(d=int(cfg["d"])))
    if fam == "line":
        return make_oriented_lattice(line_spec())
    if fam == "grid":
        return make_oriented_lattice(grid2_spec())
    if fam == "lattice":
        return make_oriented_lattice(
            OrientedLatticeSpec(
                dim=int(cfg["dim"]),
                offsets=tuple(tuple(int(x) for x in o) for o in cfg["offsets"]),
                direction=tuple(int(x) for x in cfg["direction"]),
                periods=tuple(int(x) for x in cfg.get("periods", ())),
                exclude_residues=tuple(
                    tuple(int(x) for x in r) for r in cfg.get("exclude_residues", ())
                ),
            )
        )
    if fam == "tiling":
        fixture = cfg.get("fixture")
        if fixture == "unit-square":
            return make_tiling(unit_square_tiling_spec())
        if fixture == "mixed-squares":
            return make_tiling(mixed_squares_tiling_spec())
        if fixture is not None:
            raise SpecError(f"unknown tiling fixture {fixture!r}")
        return make_tiling(
            TilingSpec(
                period_vectors=tuple(tuple(int(x) for x in p) for p in cfg["period_vectors"]),
                corners=tuple(tuple(int(x) for x in c) for c in cfg["corners"]),
                edges=tuple(
                    (int(s), int(t), (int(off[0]), int(off[1])))
                    for s, t, off in cfg["edges"]
                ),
                direction=tuple(int(x) for x in cfg["direction"]) if cfg.get("direction") else None,
                transitivity_radius=cfg.get("transitivity_radius"),
                initial_corner=int(cfg.get("initial_corner", 0)),
            )
        )
    if fam == "hchain":
        return make_h_chain(
            HChainSpec(
                h_vertices=tuple(cfg["h_vertices"]),
                h_edges=tuple(tuple(e) for e in cfg["h_edges"]),
            )
        )
    if fam == "ctree":
        levels = cfg.get("levels", "squares")
        if not isinstance(levels, str):
            levels = tuple(int(x) for x in levels)
        return make_controlled_tree(
            ControlledTreeSpec(levels=levels, path_mode=bool(cfg.get("path_mode", True)))
        )
    if fam == "counterexample":
        iv = cfg.get("branch_intervals")
        return make_counterexample_tree(
            CounterexampleSpec(
                branch_intervals=None if iv is None else tuple((int(a), int(b)) for a, b in iv)
            )
        )
    if fam == "explicit":
        return make_explicit_dag(
            ExplicitDagSpec(initial=cfg["initial"], edges=cfg["edges"])
        )
    raise SpecError(f"unknown graph family {fam!r}")

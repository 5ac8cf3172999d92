"""Adapted partitions and transience analysis.

An adapted family assigns, per start vertex z, a part index to every vertex
such that part 0 is {z} and along any legal play no part with index >= 1 is
entered twice.  Three kinds are supported:

* ``oriented-levels``: parts are level sets of the dot product with an
  integer direction u (lattice-embedded families).  Index 2i for a gain of
  i, 2i+1 for a drop of i, 1 for same-level vertices other than z.
* ``tree-descendants``: for tree families, part k >= 2 holds the
  descendants of z at distance k; part 1 absorbs distance-1 descendants and
  everything unreachable from z.
* ``trivial-singletons``: every vertex is its own part, indexed by BFS rank
  from z.  Always adapted on an acyclic graph, useless for bounds.

The transient speed h(n) is the smallest k with Z^(n)(z) inside the first k
parts, worst case over class representatives; it always satisfies
h(n) >= n.  psi(n, t) couples the per-part bounded-difference tail with the
size of the 2n-step reach set and drives the delta-transience diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

from .errors import DomainError, ResourceBudgetError, SpecError
from .graph import DEFAULT_REACH_BUDGET, GameGraph, out_neighbors, reach_set
from .keys import VertexId, key_str

DEFAULT_EPSILON_SCALE = 4.0
DEFAULT_PLAY_BUDGET = 2 * 10**6


@dataclass(frozen=True)
class AdaptedFamily:
    kind: str  # "oriented-levels" | "tree-descendants" | "trivial-singletons"
    index_fn: Callable[[VertexId, VertexId], int]
    requires: str = "any"  # graph kind this family applies to
    direction: tuple[int, ...] | None = None


@dataclass
class TransientProfile:
    h_values: dict[int, int] = field(default_factory=dict)
    reach2n_max: dict[int, int] = field(default_factory=dict)


@dataclass
class TransienceSample:
    n: int
    epsilon: float
    psi: float
    eps_plus_psi: float
    c_n: float


@dataclass
class TransienceReport:
    """Finite-range diagnostic for the delta-transience property.

    The verdict is empirical: it inspects the trend of
    C_n = n^delta * (eps_n + psi(n, eps_n)) over the sampled range and is
    labeled as a diagnostic, not a proof.
    """

    delta: float
    epsilon_rule: str
    samples: list[TransienceSample]
    verdict: str  # "accepted" | "rejected" | "inconclusive"
    note: str = "finite-range empirical diagnostic"

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "epsilon_rule": self.epsilon_rule,
            "verdict": self.verdict,
            "note": self.note,
            "samples": [
                {
                    "n": s.n,
                    "epsilon": s.epsilon,
                    "psi": s.psi,
                    "eps_plus_psi": s.eps_plus_psi,
                    "c_n": s.c_n,
                }
                for s in self.samples
            ],
        }


@dataclass
class AdaptedCheckReport:
    ok: bool
    paths_checked: int
    witness: list[VertexId] | None = None
    message: str = ""


def _check_direction(u) -> tuple[int, ...]:
    u = tuple(int(x) for x in u)
    if not u or all(x == 0 for x in u):
        raise SpecError("direction vector must be a nonzero integer vector")
    g = 0
    for x in u:
        g = gcd(g, abs(x))
    if g != 1:
        raise SpecError(f"direction coordinates must have gcd 1, got gcd {g}")
    return u


def oriented_partition(
    u, embed: Callable[[VertexId], tuple[int, ...]] | None = None
) -> AdaptedFamily:
    """Level-set partition along an integer direction u with coprime
    coordinates.  ``embed`` maps vertex keys to lattice points when keys are
    not already coordinate tuples."""
    u = _check_direction(u)

    def dot(v: VertexId) -> int:
        p = embed(v) if embed is not None else v
        return sum(int(a) * b for a, b in zip(p, u, strict=True))

    def index_fn(z: VertexId, w: VertexId) -> int:
        if w == z:
            return 0
        i = dot(w) - dot(z)
        if i == 0:
            return 1
        return 2 * i if i > 0 else 2 * (-i) + 1

    return AdaptedFamily(
        kind="oriented-levels", index_fn=index_fn, requires="lattice", direction=u
    )


def _is_prefix(z: tuple, w: tuple) -> bool:
    return len(w) > len(z) and w[: len(z)] == z


def tree_partition() -> AdaptedFamily:
    """Descendant-distance partition for tree families (path-tuple keys)."""

    def index_fn(z: VertexId, w: VertexId) -> int:
        if w == z:
            return 0
        if isinstance(z, tuple) and isinstance(w, tuple) and _is_prefix(z, w):
            k = len(w) - len(z)
            return k if k >= 2 else 1
        return 1  # non-descendants all live in part 1

    return AdaptedFamily(kind="tree-descendants", index_fn=index_fn, requires="tree")


def trivial_partition(g: GameGraph) -> AdaptedFamily:
    """Singleton parts indexed by BFS rank from the start vertex."""
    cache: dict[VertexId, dict[VertexId, int]] = {}

    def ranks_from(z: VertexId) -> dict[VertexId, int]:
        tbl = cache.get(z)
        if tbl is None:
            tbl = cache[z] = {z: 0}
        return tbl

    def index_fn(z: VertexId, w: VertexId) -> int:
        tbl = ranks_from(z)
        if w in tbl:
            return tbl[w]
        # extend the BFS enumeration until w appears
        frontier = [v for v, i in tbl.items()]
        while w not in tbl:
            nxt = []
            for v in frontier:
                for x in out_neighbors(g, v):
                    if x not in tbl:
                        tbl[x] = len(tbl)
                        nxt.append(x)
            if not nxt:
                raise DomainError(f"{key_str(w)} is not reachable from {key_str(z)}")
            if len(tbl) > DEFAULT_PLAY_BUDGET:
                raise ResourceBudgetError("trivial partition rank search exceeded budget")
            frontier = nxt
        return tbl[w]

    return AdaptedFamily(kind="trivial-singletons", index_fn=index_fn, requires="any")


def _require_compatible(g: GameGraph, fam: AdaptedFamily) -> None:
    if fam.requires != "any" and g.kind != fam.requires:
        raise SpecError(
            f"{fam.kind} partition applies to {fam.requires} families, "
            f"not to the {g.kind} family {g.family!r}"
        )


def validate_adapted(
    g: GameGraph,
    fam: AdaptedFamily,
    z: VertexId,
    n: int,
    max_paths: int = DEFAULT_PLAY_BUDGET,
) -> AdaptedCheckReport:
    """Exhaustively enumerate play prefixes of length <= n from z and fail
    with a witness prefix if any part index >= 1 repeats (or if a vertex
    other than z maps to part 0)."""
    _require_compatible(g, fam)
    if n < 0:
        raise DomainError("n must be >= 0")
    checked = 0
    # DFS over play prefixes, carrying the set of visited part indices.
    stack: list[tuple[list[VertexId], set[int]]] = [([z], set())]
    while stack:
        path, used = stack.pop()
        checked += 1
        if checked > max_paths:
            raise ResourceBudgetError(
                f"adaptedness check exceeded {max_paths} play prefixes"
            )
        if len(path) - 1 >= n:
            continue
        for w in out_neighbors(g, path[-1]):
            idx = fam.index_fn(z, w)
            if idx == 0:
                return AdaptedCheckReport(
                    ok=False,
                    paths_checked=checked,
                    witness=path + [w],
                    message=f"non-start vertex {key_str(w)} maps to part 0",
                )
            if idx in used:
                return AdaptedCheckReport(
                    ok=False,
                    paths_checked=checked,
                    witness=path + [w],
                    message=f"part {idx} visited twice along "
                    + " -> ".join(key_str(x) for x in path + [w]),
                )
            stack.append((path + [w], used | {idx}))
    return AdaptedCheckReport(ok=True, paths_checked=checked)


def transient_speed(
    g: GameGraph, fam: AdaptedFamily, n: int, budget: int = DEFAULT_REACH_BUDGET
) -> int:
    """h(n): max over class representatives of the largest part index met
    within n steps.  For descendant partitions on sink-free trees this is
    exactly n (some descendant at distance n always exists and no reachable
    vertex has index above its distance), so no exploration is needed."""
    if n < 1:
        raise DomainError("n must be >= 1")
    _require_compatible(g, fam)
    if fam.kind == "tree-descendants" and g.kind == "tree":
        return n
    reps = g.class_representatives or (g.initial,)
    best = 0
    for z in reps:
        rs = reach_set(g, z, n, budget=budget)
        for level in rs.members:
            for w in level:
                idx = fam.index_fn(z, w)
                if idx > best:
                    best = idx
    return best


def max_reach_2n(g: GameGraph, n: int, budget: int = DEFAULT_REACH_BUDGET) -> int:
    """max over class representatives of |Z^(2n)(z)|, via the generator's
    closed-form certificate when it has one."""
    if g.max_reach_count is not None:
        return g.max_reach_count(2 * n)
    reps = g.class_representatives or (g.initial,)
    return max(reach_set(g, z, 2 * n, budget=budget).total for z in reps)


def psi(n: int, t: float, h_n: int, reach2n_max: int) -> float:
    """exp(-t^2 n^2 / (2 h(n))) * reach2n_max, evaluated in log space so
    that exponentially large reach counts cannot overflow."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if t <= 0:
        raise DomainError("t must be > 0")
    if h_n < n:
        raise DomainError(f"h(n) must be >= n, got h={h_n} < n={n}")
    if reach2n_max < 1:
        raise DomainError("reach2n_max must be >= 1")
    log_val = -(t * t * n * n) / (2.0 * h_n) + math.log(reach2n_max)
    if log_val > 700.0:
        return math.inf
    return math.exp(log_val)


def default_epsilon_rule(delta: float, scale: float = DEFAULT_EPSILON_SCALE):
    """eps_n = scale * n^(-(delta + 1/2)/2).

    The exponent is the midpoint of the admissible band: eps_n has to decay
    slower than n^(-1/2) for the exponential term to win, yet stay
    O(n^(-delta)).  The scale is a desk-range calibration so that families
    with a certified partition clear the finite-range thresholds; it is
    configuration-exposed.
    """
    exponent = (delta + 0.5) / 2.0

    def rule(n: int) -> float:
        return scale * n ** (-exponent)

    rule.description = f"eps_n = {scale:g} * n^(-{exponent:g})"
    return rule


def check_delta_transient(
    g: GameGraph,
    fam: AdaptedFamily,
    delta: float,
    n_range: list[int],
    epsilon_rule: Callable[[int], float] | None = None,
    epsilon_scale: float = DEFAULT_EPSILON_SCALE,
    budget: int = DEFAULT_REACH_BUDGET,
) -> TransienceReport:
    """Evaluate C_n = n^delta (eps_n + psi(n, eps_n)) over n_range.

    Verdict: "rejected" when C_n grows by more than 10x across the range,
    "accepted" when it is non-increasing over the top half, "inconclusive"
    otherwise.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
    if not n_range or any(n < 1 for n in n_range):
        raise DomainError("n_range must be a non-empty list of integers >= 1")
    _require_compatible(g, fam)
    ns = sorted(n_range)
    rule = epsilon_rule or default_epsilon_rule(delta, scale=epsilon_scale)
    samples = []
    for n in ns:
        eps = rule(n)
        h_n = transient_speed(g, fam, n, budget=budget)
        reach = max_reach_2n(g, n, budget=budget)
        p = psi(n, eps, h_n, reach)
        total = eps + p
        samples.append(
            TransienceSample(
                n=n, epsilon=eps, psi=p, eps_plus_psi=total, c_n=(n**delta) * total
            )
        )
    c = [s.c_n for s in samples]
    if c[-1] > 10.0 * c[0]:
        verdict = "rejected"
    else:
        top = c[len(c) // 2 :]
        nonincreasing = all(
            top[i + 1] <= top[i] * (1.0 + 1e-12) for i in range(len(top) - 1)
        )
        verdict = "accepted" if nonincreasing else "inconclusive"
    desc = getattr(rule, "description", "custom epsilon rule")
    return TransienceReport(
        delta=delta, epsilon_rule=desc, samples=samples, verdict=verdict
    )


def oriented_reach_bound(n: int, r: float, u_norm: float) -> int:
    """ceil(n * r * |u|); within n steps the token stays in that dot-product
    ball, so the partition index never exceeds 2*M(n)+1.  Used as a cheap
    certified stand-in for the exact transient speed."""
    if r <= 0 or u_norm <= 0:
        raise DomainError("edge length bound and direction norm must be positive")
    if n < 0:
        raise DomainError("n must be >= 0")
    return math.ceil(n * r * u_norm - 1e-12) if n else 0

"""Payoff fields and exact n-stage value computation.

Payoffs are materialized lazily through a keyed PRF (blake2b keyed with the
seed, applied to the canonical key bytes), so a conceptually infinite field
costs nothing beyond the vertices actually queried and is identical across
runs, platforms and thread schedules.

The solver is alternating minimax backward induction memoized on
(vertex, stage): a DAG vertex can be reached after different move counts,
so the stage index is part of the state.  Player 1 moves at even stages and
maximizes; ties break toward the lowest neighbor index.  brute_force_value
re-derives the same number by plain history-tree recursion with no
memoization and (for atomic distributions) exact rational accumulation; it
exists solely as an independent oracle and must stay that way.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, ResourceBudgetError, SpecError, StructuralError
from .graph import GameGraph, out_neighbors
from .keys import VertexId, key_bytes, key_str, parse_key

DEFAULT_SOLVE_BUDGET = 2 * 10**7
_TWO64 = 2**64

Strategy = Callable[[VertexId, int], int]


def _seed_key(seed: int) -> bytes:
    return (seed & (_TWO64 - 1)).to_bytes(8, "little")


@dataclass(frozen=True)
class PayoffField:
    """Deterministic i.i.d. payoff assignment G_v in [0,1] per vertex.

    kind is one of "bernoulli", "uniform", "discrete", "table".  The table
    kind serves fixtures with pinned per-vertex payoffs; overrides patch
    single vertices on top of any kind (used by monotonicity tests).
    """

    seed: int
    kind: str = "bernoulli"
    p: float = 0.5
    values: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()
    table: Mapping[str, float] | None = None
    default: float = 0.0
    overrides: Mapping | None = None

    def __post_init__(self):
        if self.kind == "bernoulli":
            if not 0.0 <= self.p <= 1.0:
                raise SpecError(f"bernoulli parameter must be in [0,1], got {self.p}")
        elif self.kind == "discrete":
            if not self.values:
                raise SpecError("discrete distribution needs at least one value")
            if any(not 0.0 <= v <= 1.0 for v in self.values):
                raise SpecError("discrete values must lie in [0,1]")
            w = self.weights or tuple(1.0 for _ in self.values)
            if len(w) != len(self.values):
                raise SpecError("discrete weights must match values in length")
            if any(x < 0 for x in w) or sum(w) <= 0:
                raise SpecError("discrete weights must be nonnegative with positive sum")
            object.__setattr__(self, "weights", tuple(w))
        elif self.kind == "table":
            if self.table is None:
                raise SpecError("table distribution needs a payoff table")
            if any(not 0.0 <= v <= 1.0 for v in self.table.values()):
                raise SpecError("table payoffs must lie in [0,1]")
            if not 0.0 <= self.default <= 1.0:
                raise SpecError("table default must lie in [0,1]")
            # accept plain labels or canonical key strings, store canonically
            norm = {}
            for k, val in self.table.items():
                try:
                    kk = key_str(parse_key(k)) if isinstance(k, str) else key_str(k)
                except (ValueError, TypeError):
                    kk = key_str(k)
                norm[kk] = float(val)
            object.__setattr__(self, "table", norm)
        elif self.kind != "uniform":
            raise SpecError(f"unknown distribution kind {self.kind!r}")

    # --- raw PRF ---------------------------------------------------------

    def _u64(self, v: VertexId) -> int:
        digest = hashlib.blake2b(
            key_bytes(v), digest_size=8, key=_seed_key(self.seed)
        ).digest()
        return int.from_bytes(digest, "big")

    def _from_u64(self, u: int) -> float:
        if self.kind == "uniform":
            return float(u) / _TWO64
        if self.kind == "bernoulli":
            return 1.0 if u < round(self.p * _TWO64) else 0.0
        # discrete: inverse CDF over u64-scaled cumulative weights
        total = sum(self.weights)
        acc = 0.0
        for val, w in zip(self.values, self.weights):
            acc += w
            if u < min(round(acc / total * _TWO64), _TWO64 - 1):
                return val
        return self.values[-1]

    def payoff(self, v: VertexId) -> float:
        if self.overrides is not None and v in self.overrides:
            return self.overrides[v]
        if self.kind == "table":
            return self.table.get(key_str(v), self.default)
        return self._from_u64(self._u64(v))

    def payoffs_for_key_bytes(self, kbs: Sequence[bytes]) -> np.ndarray:
        """Vectorized payoffs for precomputed canonical key bytes.  Used by
        the d-ary fast solver; bit-identical to per-vertex payoff()."""
        if self.kind == "table" or self.overrides is not None:
            raise SpecError("vectorized payoffs support random kinds only")
        key = _seed_key(self.seed)
        h = hashlib.blake2b
        raw = b"".join(h(kb, digest_size=8, key=key).digest() for kb in kbs)
        u = np.frombuffer(raw, dtype=">u8")
        if self.kind == "uniform":
            return u.astype(np.float64) / _TWO64
        if self.kind == "bernoulli":
            return (u < round(self.p * _TWO64)).astype(np.float64)
        total = sum(self.weights)
        edges = np.array(
            [
                min(round(sum(self.weights[: i + 1]) / total * _TWO64), _TWO64 - 1)
                for i in range(len(self.weights))
            ],
            dtype=np.uint64,
        )
        idx = np.searchsorted(edges, u, side="right")
        idx = np.minimum(idx, len(self.values) - 1)
        return np.array(self.values, dtype=np.float64)[idx]

    def is_atomic(self) -> bool:
        return self.kind in ("bernoulli", "discrete", "table")

    def with_override(self, v: VertexId, value: float) -> "PayoffField":
        if not 0.0 <= value <= 1.0:
            raise SpecError("override payoff must lie in [0,1]")
        merged = dict(self.overrides or {})
        merged[v] = value
        return PayoffField(
            seed=self.seed,
            kind=self.kind,
            p=self.p,
            values=self.values,
            weights=self.weights,
            table=self.table,
            default=self.default,
            overrides=merged,
        )


def field_from_config(cfg: Mapping, seed: int) -> PayoffField:
    kind = cfg.get("kind", "bernoulli")
    return PayoffField(
        seed=seed,
        kind=kind,
        p=float(cfg.get("p", 0.5)),
        values=tuple(cfg.get("values", ())),
        weights=tuple(cfg.get("weights", ())),
        table=cfg.get("table"),
        default=float(cfg.get("default", 0.0)),
    )


def sample_payoff(fld: PayoffField, v: VertexId) -> float:
    return fld.payoff(v)


# --- exact solve ----------------------------------------------------------


@dataclass
class ValueSolution:
    start: VertexId
    n: int
    value: float
    strategy1: dict[tuple[VertexId, int], int]
    strategy2: dict[tuple[VertexId, int], int]
    table_size: int

    def to_json_dict(self) -> dict:
        return {
            "start": key_str(self.start),
            "n": self.n,
            "value": self.value,
            "table_size": self.table_size,
        }

    def strategy_rows(self):
        """(vertex key, stage, chosen index) triples, player 1 then 2."""
        for (v, j), idx in sorted(
            self.strategy1.items(), key=lambda kv: (kv[0][1], key_str(kv[0][0]))
        ):
            yield (key_str(v), j, idx, 1)
        for (v, j), idx in sorted(
            self.strategy2.items(), key=lambda kv: (kv[0][1], key_str(kv[0][0]))
        ):
            yield (key_str(v), j, idx, 2)

    def as_strategy(self, player: int) -> Strategy:
        tbl = self.strategy1 if player == 1 else self.strategy2
        return lambda v, j: tbl[(v, j)]


@dataclass
class Trajectory:
    states: list[VertexId]
    mean_payoff: float


def _stage_levels(g: GameGraph, z0: VertexId, n: int, budget: int):
    """levels[j] = distinct vertices reachable in exactly j moves (a vertex
    may appear at several j on a general DAG)."""
    levels: list[list[VertexId]] = [[z0]]
    total = 1
    for j in range(n):
        seen = set()
        nxt: list[VertexId] = []
        for v in levels[j]:
            for w in out_neighbors(g, v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        total += len(nxt)
        if total > budget:
            raise ResourceBudgetError(
                f"solver state table exceeded budget {budget} at stage {j + 1}",
                level=j + 1,
            )
        levels.append(nxt)
    return levels


def solve_value(
    g: GameGraph,
    fld: PayoffField,
    z0: VertexId,
    n: int,
    with_strategies: bool = True,
    budget: int = DEFAULT_SOLVE_BUDGET,
) -> ValueSolution:
    """Backward induction over (vertex, stage); value = U(z0, 0) / n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    levels = _stage_levels(g, z0, n, budget)
    table_size = sum(len(lv) for lv in levels)
    pay: dict[VertexId, float] = {}
    payoff = fld.payoff
    strat1: dict[tuple[VertexId, int], int] = {}
    strat2: dict[tuple[VertexId, int], int] = {}
    nxt_vals: dict[VertexId, float] = {w: 0.0 for w in levels[n]}
    for j in range(n - 1, -1, -1):
        maximize = j % 2 == 0
        cur: dict[VertexId, float] = {}
        for v in levels[j]:
            best = float("-inf") if maximize else float("inf")
            best_i = 0
            for i, w in enumerate(out_neighbors(g, v)):
                gw = pay.get(w)
                if gw is None:
                    gw = pay[w] = payoff(w)
                val = gw + nxt_vals[w]
                if (val > best) if maximize else (val < best):
                    best, best_i = val, i
            cur[v] = best
            if with_strategies:
                if maximize:
                    strat1[(v, j)] = best_i
                else:
                    strat2[(v, j)] = best_i
        nxt_vals = cur
    return ValueSolution(
        start=z0,
        n=n,
        value=nxt_vals[z0] / n,
        strategy1=strat1,
        strategy2=strat2,
        table_size=table_size,
    )


def brute_force_value(g: GameGraph, fld: PayoffField, z0: VertexId, n: int) -> float:
    """History-tree minimax with no memoization; the independent oracle.

    Atomic distributions accumulate payoff sums as exact rationals; uniform
    payoffs fall back to floats.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if g.max_out_degree**n > 10**6:
        raise ResourceBudgetError(f"brute force infeasible: {g.max_out_degree}^{n} histories")
    exact = fld.is_atomic()

    def rec(v: VertexId, j: int):
        if j == n:
            return Fraction(0) if exact else 0.0
        maximize = j % 2 == 0
        outcomes = []
        for w in out_neighbors(g, v):
            gw = fld.payoff(w)
            gw = Fraction(gw) if exact else gw
            outcomes.append(gw + rec(w, j + 1))
        return max(outcomes) if maximize else min(outcomes)

    total = rec(z0, 0)
    return float(total / n) if exact else total / n


def as_strategy(s) -> Strategy:
    if callable(s):
        return s
    return lambda v, j: s[(v, j)]


def play(
    g: GameGraph,
    fld: PayoffField,
    s1,
    s2,
    z0: VertexId,
    n: int,
) -> Trajectory:
    """Deterministic trajectory under two strategies.

    The mean is accumulated from the last stage backwards so that replaying
    the solver's own optimal strategies reproduces its value bit for bit
    (backward induction sums in that order).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    f1, f2 = as_strategy(s1), as_strategy(s2)
    states = [z0]
    for j in range(n):
        v = states[-1]
        nbrs = out_neighbors(g, v)
        idx = f1(v, j) if j % 2 == 0 else f2(v, j)
        if not isinstance(idx, int) or not 0 <= idx < len(nbrs):
            raise StructuralError(
                f"strategy returned invalid neighbor index {idx!r} at "
                f"state {key_str(v)}, stage {j} (degree {len(nbrs)})"
            )
        states.append(nbrs[idx])
    total = 0.0
    for v in reversed(states[1:]):
        total = fld.payoff(v) + total
    return Trajectory(states=states, mean_payoff=total / n)


@dataclass
class ValueDiffReport:
    n: int
    k: int
    v_n: float
    v_nk: float
    bound: float
    ok: bool


def value_difference_check(
    g: GameGraph, fld: PayoffField, z0: VertexId, n: int, k: int,
    budget: int = DEFAULT_SOLVE_BUDGET,
) -> ValueDiffReport:
    """|V_n - V_{n-k}| <= k/n (+1e-12 float slack) on the same field; a
    violation indicates a solver bug, not a modelling failure.  V_0 is 0 by
    the empty-mean convention."""
    if not 1 <= k <= n:
        raise DomainError("k must satisfy 1 <= k <= n")
    v_n = solve_value(g, fld, z0, n, with_strategies=False, budget=budget).value
    v_nk = (
        solve_value(g, fld, z0, n - k, with_strategies=False, budget=budget).value
        if n - k >= 1
        else 0.0
    )
    bound = k / n + 1e-12
    return ValueDiffReport(
        n=n, k=k, v_n=v_n, v_nk=v_nk, bound=bound, ok=abs(v_n - v_nk) <= bound
    )


# --- Player 2 avoidance strategy ------------------------------------------


def avoidance_strategy(
    g: GameGraph, z0: VertexId, k: int, targets: set[VertexId]
) -> Strategy:
    """Pigeonhole avoidance for d-ary trees: at each of her k/2 turns,
    Player 2 moves to the child with the fewest remaining targets among its
    level-k descendants, so the surviving target count shrinks by a factor
    of at least d per turn and dies out before stage k whenever
    |targets| < d^(k/2)."""
    if g.family != "dary":
        raise SpecError("avoidance strategy is defined for d-ary tree games")
    if k < 2 or k % 2 != 0:
        raise DomainError("k must be a positive even integer")
    d = g.max_out_degree
    if len(targets) >= d ** (k // 2):
        raise PreconditionError(
            f"|S| = {len(targets)} >= d^(k/2) = {d ** (k // 2)}: guarantee unavailable"
        )
    depth0 = len(z0)
    for s in targets:
        if len(s) != depth0 + k or s[:depth0] != tuple(z0):
            raise PreconditionError(
                f"target {key_str(s)} is not a depth-{k} descendant of {key_str(z0)}"
            )

    def below(v: VertexId) -> int:
        return sum(1 for s in targets if s[: len(v)] == tuple(v))

    def strategy(v: VertexId, j: int) -> int:
        if j % 2 == 0 or j >= k:
            return 0  # not Player 2's avoidance turn; any legal move
        nbrs = out_neighbors(g, v)
        counts = [below(w) for w in nbrs]
        return counts.index(min(counts))

    return strategy


# --- compiled regions -------------------------------------------------------


@dataclass
class CompiledRegion:
    """Sample-independent solve structure for repeated experiments on one
    (graph, start, horizon): canonical key bytes per stage level plus
    neighbor indices into the next level.  Solving a compiled region is
    value-identical to solve_value; only the bookkeeping is hoisted."""

    n: int
    key_bytes_per_level: list[list[bytes]]
    neighbor_indices: list[list[tuple[int, ...]]]


def compile_region(
    g: GameGraph, z0: VertexId, n: int, budget: int = DEFAULT_SOLVE_BUDGET
) -> CompiledRegion:
    levels = _stage_levels(g, z0, n, budget)
    kbs = [[key_bytes(v) for v in lv] for lv in levels]
    nbr_idx: list[list[tuple[int, ...]]] = []
    for j in range(n):
        index_of = {v: i for i, v in enumerate(levels[j + 1])}
        nbr_idx.append(
            [tuple(index_of[w] for w in out_neighbors(g, v)) for v in levels[j]]
        )
    return CompiledRegion(n=n, key_bytes_per_level=kbs, neighbor_indices=nbr_idx)


def solve_compiled(region: CompiledRegion, fld: PayoffField) -> float:
    """Value of the compiled region under a concrete field (values only)."""
    n = region.n
    nxt = [0.0] * len(region.key_bytes_per_level[n])
    for j in range(n - 1, -1, -1):
        pay = fld.payoffs_for_key_bytes(region.key_bytes_per_level[j + 1])
        tot = [float(p) + u for p, u in zip(pay, nxt)]
        maximize = j % 2 == 0
        cur = []
        for nbrs in region.neighbor_indices[j]:
            best = tot[nbrs[0]]
            for ni in nbrs[1:]:
                val = tot[ni]
                if (val > best) if maximize else (val < best):
                    best = val
            cur.append(best)
        nxt = cur
    return nxt[0] / n


# --- homogeneous d-ary tree fast paths -------------------------------------

_LEVEL_KEY_CACHE: dict[tuple[int, int], list[bytes]] = {}


def _dary_level_key_bytes(d: int, level: int) -> list[bytes]:
    """Canonical key bytes for all level-`level` vertices of the d-ary tree
    rooted at (), in child-index order (cached; seeds do not affect them)."""
    got = _LEVEL_KEY_CACHE.get((d, level))
    if got is not None:
        return got
    if level == 0:
        out = [key_bytes(())]
    else:
        prev = _dary_level_key_bytes(d, level - 1)
        out = []
        for kb in prev:
            stem = kb[:-1] + (b"," if kb != b"[]" else b"")
            for c in range(d):
                out.append(stem + str(c).encode() + b"]")
    _LEVEL_KEY_CACHE[(d, level)] = out
    return out


def solve_dary_root_value(d: int, fld: PayoffField, n: int) -> float:
    """Value of the n-stage game from the root of the d-ary tree, computed
    with numpy level arrays.  Matches solve_value exactly (same payoffs,
    same float operations, only the loop structure differs)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    vals = np.zeros(d**n, dtype=np.float64)
    for level in range(n, 0, -1):
        pay = fld.payoffs_for_key_bytes(_dary_level_key_bytes(d, level))
        tot = (pay + vals).reshape(-1, d)
        vals = tot.max(axis=1) if (level - 1) % 2 == 0 else tot.min(axis=1)
    return float(vals[0]) / n


def dary_value_distribution(d: int, n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact distribution of V_n on the d-ary tree with Bernoulli(p)
    payoffs.

    The values of the remaining game at the depth-j vertices are i.i.d.
    (their payoff sets are disjoint subtrees), so the pmf of the stage-j
    value-sum follows from the stage-(j+1) pmf by convolving with one
    Bernoulli payoff and taking the max (Player 1, even j) or min (odd j)
    of d independent copies via powers of the CDF.  Returns (atoms k/n,
    probabilities).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if d < 2:
        raise DomainError("d must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise DomainError("p must be in [0,1]")
    pmf = np.array([1.0])  # value-sum at depth n is identically 0
    for j in range(n - 1, -1, -1):
        conv = np.zeros(len(pmf) + 1)
        conv[: len(pmf)] += (1.0 - p) * pmf
        conv[1:] += p * pmf
        cdf = np.cumsum(conv)
        cdf[-1] = 1.0
        if j % 2 == 0:  # Player 1 maximizes over d i.i.d. copies
            new_cdf = cdf**d
        else:  # Player 2 minimizes: survival function powers
            new_cdf = 1.0 - (1.0 - cdf) ** d
        pmf = np.diff(new_cdf, prepend=0.0)
        pmf = np.clip(pmf, 0.0, 1.0)
    atoms = np.arange(len(pmf), dtype=np.float64) / n
    return atoms, pmf


def sample_from_distribution(atoms: np.ndarray, pmf: np.ndarray, u: float) -> float:
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return float(atoms[int(np.searchsorted(cdf, u, side="left"))])

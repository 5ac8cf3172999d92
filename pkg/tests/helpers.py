"""Deterministic instance mixes shared by the value-engine and acceptance
tests: small graphs from every generator family crossed with atomic and
uniform payoff fields."""

import random

from dirgame.generators import (
    ControlledTreeSpec,
    CounterexampleSpec,
    DaryTreeSpec,
    HChainSpec,
    OrientedLatticeSpec,
    grid2_spec,
    line_spec,
    make_controlled_tree,
    make_counterexample_tree,
    make_dary_tree,
    make_h_chain,
    make_oriented_lattice,
    make_tiling,
    mixed_squares_tiling_spec,
    unit_square_tiling_spec,
)
from dirgame.values import PayoffField

GRAPH_BUILDERS = {
    "dary": [
        lambda: make_dary_tree(DaryTreeSpec(d=2)),
        lambda: make_dary_tree(DaryTreeSpec(d=3)),
    ],
    "lattice": [
        lambda: make_oriented_lattice(line_spec()),
        lambda: make_oriented_lattice(grid2_spec()),
        lambda: make_oriented_lattice(
            OrientedLatticeSpec(dim=1, offsets=((1,), (2,)), direction=(1,))
        ),
    ],
    "tiling": [
        lambda: make_tiling(unit_square_tiling_spec()),
        lambda: make_tiling(mixed_squares_tiling_spec()),
    ],
    "hchain": [
        lambda: make_h_chain(HChainSpec(("a", "b"), (("a", "b"),))),
        lambda: make_h_chain(
            HChainSpec(("a", "b", "c"), (("a", "b"), ("b", "c"), ("a", "c")))
        ),
    ],
    "ctree": [
        lambda: make_controlled_tree(ControlledTreeSpec(levels=(0, 2))),
        lambda: make_controlled_tree(ControlledTreeSpec(levels="squares", path_mode=False)),
        lambda: make_controlled_tree(ControlledTreeSpec(levels=(0,), path_mode=True)),
    ],
    "counterexample": [
        lambda: make_counterexample_tree(CounterexampleSpec()),
        lambda: make_counterexample_tree(CounterexampleSpec(branch_intervals=((1, 5),))),
    ],
}

ATOMIC_FIELDS = [
    lambda seed: PayoffField(seed=seed, kind="bernoulli", p=0.5),
    lambda seed: PayoffField(seed=seed, kind="bernoulli", p=0.3),
    # dyadic atoms: stage sums stay exactly representable in floats
    lambda seed: PayoffField(
        seed=seed, kind="discrete", values=(0.0, 0.25, 0.5, 1.0), weights=(1, 2, 3, 2)
    ),
]


def instance_mix(count: int, seed: int = 987, max_n: int = 6):
    """Yield (family, graph, field, n, is_atomic) deterministically."""
    rng = random.Random(seed)
    families = sorted(GRAPH_BUILDERS)
    out = []
    for i in range(count):
        family = families[i % len(families)]
        graph = rng.choice(GRAPH_BUILDERS[family])()
        n = rng.randint(1, max_n)
        if rng.random() < 0.7:
            fld = rng.choice(ATOMIC_FIELDS)(rng.getrandbits(63))
            atomic = True
        else:
            fld = PayoffField(seed=rng.getrandbits(63), kind="uniform")
            atomic = False
        out.append((family, graph, fld, n, atomic))
    return out

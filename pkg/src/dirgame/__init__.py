"""Two-player zero-sum games on random-payoff directed acyclic graphs:
exact values, graph-family generators, transience analysis and a
reproducible Monte Carlo harness."""

__version__ = "0.1.0"

from . import errors, graph, keys  # noqa: E402,F401
from . import generators, partitions, values  # noqa: E402,F401
from . import montecarlo  # noqa: E402,F401

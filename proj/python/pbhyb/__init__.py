"""Pseudo-boolean solving with pluggable unit propagation.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its surface.
"""

from ._core import (
    Instance,
    Lit,
    PBConstraint,
    Trail,
    __version__,
    classify,
    dispatch_decision,
    gen_knapsack,
    gen_random_pb,
    normalize,
    parse_opb,
    slack,
    solve,
    unit_literals,
    write_opb,
)

__all__ = [
    "Instance",
    "Lit",
    "PBConstraint",
    "Trail",
    "__version__",
    "classify",
    "dispatch_decision",
    "gen_knapsack",
    "gen_random_pb",
    "normalize",
    "parse_opb",
    "slack",
    "solve",
    "unit_literals",
    "write_opb",
]

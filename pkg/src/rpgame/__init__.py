"""Exact solver for reachability-price games on single-clock priced timed automata."""

from .costfn import (
    INF,
    CostFunction,
    Interval,
    Piece,
    affine,
    all_infinity,
    constant,
    construct,
    crossings,
    evaluate,
    from_breakpoints,
    max_c,
    min_c,
    override,
    pointwise_max,
    pointwise_min,
    restrict,
)
from .game import (
    Game,
    Location,
    OptCostMap,
    Owner,
    add_edge,
    add_goal,
    cost_consistent,
    infinite_value_locations,
    make_urgent,
    non_urgent,
    restrict_interval,
)
from .oracle import compare, oracle_solve
from .solver import SolveTrace, decide, fixpoint_residual, solve, solve_game, solve_urgent

__version__ = "0.1.0"

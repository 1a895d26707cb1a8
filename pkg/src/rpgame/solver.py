"""Exact solver for reachability-price games on simple single-clock automata.

:func:`solve` recursively removes the cheapest non-urgent location.  A
maximizer location is first made urgent, a minimizer location is first made
a goal that waits as long as possible; both are then corrected by a
right-to-left sweep over the clock interval, one affine piece at a time.
Games with no non-urgent location are solved by :func:`solve_urgent`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .costfn import (
    INF,
    CostFunction,
    CostFunctionError,
    Interval,
    OutOfDomain,
    Piece,
    all_infinity,
    construct,
    envelope_max,
    envelope_min,
    evaluate,
    glue,
    max_abs_difference,
    max_c,
    min_c,
    restrict,
    validate,
)
from .game import (
    Game,
    MissingLocation,
    OptCostMap,
    Owner,
    add_goal,
    cost_consistent,
    infinite_value_locations,
    make_urgent,
    non_urgent,
    restrict_interval,
    without,
)

log = logging.getLogger(__name__)

MAX_SWEEP_ITERATIONS = 100_000


class SolverError(RuntimeError):
    pass


class PreconditionError(SolverError, ValueError):
    pass


class InternalInvariantBroken(SolverError):
    pass


@dataclass
class CallRecord:
    depth: int
    location: str | None
    owner: Owner | None
    interval: Interval
    non_urgent: int
    goal_pieces: int
    rs: list[Fraction] = field(default_factory=list)
    piece_counts: list[int] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.rs) - 1 if self.rs else 0

    @property
    def iteration_bound(self) -> int:
        p = self.goal_pieces
        return p + comb(p, 2) + 1


@dataclass
class SolveTrace:
    calls: list[CallRecord] = field(default_factory=list)
    root_non_urgent: int = 0
    root_goal_pieces: int = 0
    max_output_pieces: int = 0

    @property
    def max_depth(self) -> int:
        return max((c.depth for c in self.calls), default=0)

    @property
    def total_iterations(self) -> int:
        return sum(c.iterations for c in self.calls)

    def piece_bound(self) -> int:
        n, p = self.root_non_urgent, self.root_goal_pieces
        return 2 ** ((n + 1) * (n + 2) // 2) * p ** (n + 1)

    def violations(self) -> list[str]:
        out = []
        if self.max_depth > self.root_non_urgent:
            out.append(f"depth {self.max_depth} > {self.root_non_urgent} non-urgent locations")
        for c in self.calls:
            if c.iterations > c.iteration_bound:
                out.append(
                    f"call at depth {c.depth} on {c.interval}: {c.iterations} iterations"
                    f" > bound {c.iteration_bound}"
                )
            if any(a <= b for a, b in zip(c.rs, c.rs[1:])):
                out.append(f"call at depth {c.depth}: sweep points not strictly decreasing {c.rs}")
            if c.rs and c.rs[-1] != c.interval.lo:
                out.append(f"call at depth {c.depth}: sweep stopped at {c.rs[-1]}")
        if self.max_output_pieces > self.piece_bound():
            out.append(f"{self.max_output_pieces} output pieces > bound {self.piece_bound()}")
        return out

    def summary(self) -> dict:
        return {
            "calls": len(self.calls),
            "max_depth": self.max_depth,
            "iterations": self.total_iterations,
            "max_output_pieces": self.max_output_pieces,
            "piece_bound": self.piece_bound(),
        }


def _env(g: Game, values, name: str, interval: Interval) -> CostFunction:
    """Min (or max) over the successors of ``name``; +inf without successors."""
    succ = [values[s] for s in g.successors(name)]
    if g[name].owner is Owner.MIN:
        return envelope_min(succ, interval)
    env = envelope_max(succ, interval)
    return all_infinity(interval) if env is None else env


def _check_finite(g: Game) -> None:
    bad = infinite_value_locations(g)
    if bad:
        raise PreconditionError(f"locations with infinite value: {sorted(bad)}")


def _prepare(g: Game, interval) -> Game:
    if interval is None:
        return g
    iv = interval if isinstance(interval, Interval) else Interval(*interval)
    return restrict_interval(g, iv)


def solve_urgent(g: Game, interval=None) -> OptCostMap:
    """Value iteration on cost functions for a game without waiting.

    Goals are pinned to their cost functions, other locations start at +inf
    and take the min/max over successors.  At most |L| rounds are needed;
    iteration stops early once nothing changes.
    """
    g = _prepare(g, interval)
    iv = g.clock_interval
    if not iv.is_point and non_urgent(g):
        raise PreconditionError(
            f"non-urgent locations present: {[loc.name for loc in non_urgent(g)]}"
        )
    _check_finite(g)
    return _solve_urgent(g)


def _solve_urgent(g: Game) -> OptCostMap:
    iv = g.clock_interval
    values = {
        loc.name: loc.goal_cost if loc.is_goal else all_infinity(iv) for loc in g
    }
    movers = [loc.name for loc in g if not loc.is_goal]
    for _ in range(len(g) + 1):
        changed = False
        for name in movers:
            new = _env(g, values, name, iv)
            if new != values[name]:
                values[name] = new
                changed = True
        if not changed:
            break
    else:  # pragma: no cover - bounded by the attractor depth
        raise InternalInvariantBroken("urgent value iteration did not converge")
    return OptCostMap(iv, values)


def solve(g: Game, interval=None) -> tuple[OptCostMap, SolveTrace]:
    """Exact OptCost for every location of ``g`` over ``interval``.

    Requires every location to have finite value; see :func:`solve_game`
    for inputs that may contain infinite locations.
    """
    g = _prepare(g, interval)
    _check_finite(g)
    trace = SolveTrace(
        root_non_urgent=len(non_urgent(g)),
        root_goal_pieces=g.goal_piece_count(),
    )
    oc = _solve(g, 0, trace)
    trace.max_output_pieces = max((len(f) for _, f in oc.items()), default=0)
    return oc, trace


def solve_game(g: Game, interval=None) -> tuple[OptCostMap, SolveTrace]:
    """Like :func:`solve`, but reports +inf for locations that cannot reach a goal."""
    g = _prepare(g, interval)
    bad = infinite_value_locations(g)
    oc, trace = solve(without(g, bad))
    values = dict(oc.items())
    for name in bad:
        values[name] = all_infinity(g.clock_interval)
    return OptCostMap(g.clock_interval, values), trace


def _checked(f: CostFunction) -> CostFunction:
    try:
        validate(f)
    except CostFunctionError as exc:  # pragma: no cover - would be a bug
        raise InternalInvariantBroken(str(exc)) from exc
    if f.is_infinite:
        raise InternalInvariantBroken("infinite value inside the recursion")
    return f


def _glue_maps(names, *maps: OptCostMap) -> OptCostMap:
    parts = [m for m in maps if m is not None]
    iv = Interval(parts[0].interval.lo, parts[-1].interval.hi)
    out = {}
    for n in names:
        try:
            out[n] = _checked(glue(*(m[n] for m in parts)))
        except CostFunctionError as exc:
            raise InternalInvariantBroken(f"gluing {n}: {exc}") from exc
    return OptCostMap(iv, out)


def _pick(g: Game):
    # cheapest non-urgent location, ties broken by name
    return min(non_urgent(g), key=lambda loc: (loc.rate, loc.name))


def _solve(g: Game, depth: int, trace: SolveTrace) -> OptCostMap:
    iv = g.clock_interval
    nu = non_urgent(g)
    if iv.is_point or not nu:
        trace.calls.append(CallRecord(depth, None, None, iv, len(nu), g.goal_piece_count()))
        oc = _solve_urgent(g)
        for _, f in oc.items():
            _checked(f)
        return oc

    star = _pick(g)
    rec = CallRecord(depth, star.name, star.owner, iv, len(nu), g.goal_piece_count())
    trace.calls.append(rec)
    names = list(g.locations)
    b, e = iv.lo, iv.hi

    # OptCost on [r, e]; starts with the point game at e
    right = _solve_urgent(restrict_interval(g, e, e))
    r = e
    rec.rs.append(r)
    sweep = _sweep_max if star.owner is Owner.MAX else _sweep_min
    while r > b:
        if len(rec.rs) > MAX_SWEEP_ITERATIONS:
            raise InternalInvariantBroken("sweep does not terminate")
        right, r = sweep(g, star, right, r, depth, trace, names)
        rec.rs.append(r)
        rec.piece_counts.append(sum(len(f) for _, f in right.items()))
        log.debug("depth %d %s: r -> %s", depth, star.name, r)
    return right


def _sweep_max(g, star, right, r, depth, trace, names):
    b = g.clock_interval.lo
    pi = star.rate
    g1 = make_urgent(cost_consistent(restrict_interval(g, b, r), right), star.name)
    sol1 = _solve(g1, depth + 1, trace)
    f = sol1[star.name]
    i = max((k for k, p in enumerate(f.pieces) if p.slope > -pi), default=None)
    if i is None:
        return _glue_maps(names, sol1, right), b
    piece = f.pieces[i]
    bi, ei = piece.lo, piece.hi
    h = construct([Piece(bi, ei, Fraction(-pi), piece(ei) + pi * ei)], Interval(bi, ei))
    mid = sol1.restrict(ei, r)
    g2 = add_goal(cost_consistent(restrict_interval(g1, bi, ei), mid), star.name, h)
    sol2 = _solve(g2, depth + 1, trace)
    return _glue_maps(names, sol2, mid, right), bi


def _sweep_min(g, star, right, r, depth, trace, names):
    b = g.clock_interval.lo
    pi = star.rate
    iv = Interval(b, r)
    h = construct(
        [Piece(b, r, Fraction(-pi), evaluate(right[star.name], r) + pi * r)], iv
    )
    g1 = add_goal(cost_consistent(restrict_interval(g, iv), right), star.name, h)
    sol1 = _solve(g1, depth + 1, trace)
    f = envelope_min((sol1[s] for s in g1.successors(star.name)), iv)
    if f.is_infinite:
        raise InternalInvariantBroken(f"{star.name} has no successor")
    i = max(
        (k for k, p in enumerate(f.pieces) if p(p.lo) < h(p.lo) or p(p.hi) < h(p.hi)),
        default=None,
    )
    if i is None:
        return _glue_maps(names, sol1, right), b
    piece = f.pieces[i]
    bi, ei = piece.lo, piece.hi
    # f_i - h is affine, negative somewhere on the piece and >= 0 at its right end
    d_lo, d_hi = piece(bi) - h(bi), piece(ei) - h(ei)
    if d_hi < 0:
        x_star = ei
    else:
        x_star = bi + d_lo * (ei - bi) / (d_lo - d_hi)
    goal = construct([piece.with_domain(bi, x_star)], Interval(bi, x_star))
    mid = sol1.restrict(x_star, r)
    g2 = add_goal(cost_consistent(restrict_interval(g1, bi, x_star), mid), star.name, goal)
    sol2 = _solve(g2, depth + 1, trace)
    return _glue_maps(names, sol2, mid, right), bi


# ---------------------------------------------------------------------------
# queries and checks
# ---------------------------------------------------------------------------


def decide(g: Game, location: str, x, c, solution: OptCostMap | None = None) -> bool:
    """Is OptCost(location, x) <= c?  +inf exceeds every rational."""
    g[location]
    x, c = Fraction(x), Fraction(c)
    if x not in g.clock_interval:
        raise OutOfDomain(f"{x} not in {g.clock_interval}")
    if solution is None:
        solution, _ = solve_game(g)
    return solution.value(location, x) <= c


def expected_value(g: Game, oc: OptCostMap, name: str) -> CostFunction:
    """Right-hand side of the optimality equation for ``name`` given ``oc``."""
    loc = g[name]
    iv = oc.interval
    if loc.is_goal:
        return restrict(loc.goal_cost, iv) if loc.goal_cost.domain != iv else loc.goal_cost
    env = _env(g, oc.values, name, iv)
    if loc.urgent:
        return env
    return min_c(env, loc.rate) if loc.owner is Owner.MIN else max_c(env, loc.rate)


def fixpoint_residual(g: Game, oc: OptCostMap, samples: int = 0) -> Fraction | float:
    """Largest violation of the one-step optimality equations by ``oc``.

    Differences are measured exactly at all breakpoints of both sides plus
    ``samples`` evenly spaced points.  Zero for a correct solution.
    """
    for loc in g:
        if loc.name not in oc:
            raise MissingLocation(f"no value for location {loc.name!r}")
    iv = oc.interval
    pts = []
    if samples > 1:
        step = (iv.hi - iv.lo) / (samples - 1)
        pts = [iv.lo + k * step for k in range(samples)]
    worst: Fraction | float = Fraction(0)
    for loc in g:
        d = max_abs_difference(oc[loc.name], expected_value(g, oc, loc.name), pts)
        worst = max(worst, d)
    return worst

"""Discretized value iteration, used to cross-check the exact solver.

Time advances in steps of ``delta``.  At each grid point, a non-urgent
location may wait one step (paying ``rate * delta``) or take a zero-price
edge; the zero-time subgame at a grid point is solved by |L| rounds of
min/max iteration starting from +inf.  Columns are filled from ``e`` down
to ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .costfn import INF, ExtendedValue, Interval, evaluate
from .game import Game, IntervalMismatch, OptCostMap, Owner, restrict_interval


class GridMisaligned(ValueError):
    pass


@dataclass(frozen=True)
class GridValueMap:
    interval: Interval
    step: Fraction
    values: dict[str, tuple[ExtendedValue, ...]]

    @property
    def points(self) -> list[Fraction]:
        n = int((self.interval.hi - self.interval.lo) / self.step)
        return [self.interval.lo + k * self.step for k in range(n + 1)]

    def __getitem__(self, key):
        name, k = key
        return self.values[name][k]


def aligned_step(g: Game, refine: int = 0) -> Fraction:
    """Largest step that puts both interval ends and every goal breakpoint on
    the grid, halved ``refine`` times."""
    b, e = g.clock_interval
    offsets = {e - b}
    for loc in g.goals:
        offsets.update(x - b for x in loc.goal_cost.breakpoints())
    offsets.discard(0)
    if not offsets:
        return Fraction(1)
    den = lcm(*(d.denominator for d in offsets))
    return Fraction(gcd(*(int(d * den) for d in offsets)), den) / 2**refine


def oracle_solve(g: Game, interval=None, delta=None) -> GridValueMap:
    if interval is not None:
        iv = interval if isinstance(interval, Interval) else Interval(*interval)
        g = restrict_interval(g, iv)
    b, e = g.clock_interval
    delta = aligned_step(g) if delta is None else Fraction(delta)
    if delta <= 0:
        raise GridMisaligned(f"step must be positive, got {delta}")
    n = (e - b) / delta
    if n.denominator != 1:
        raise GridMisaligned(f"step {delta} does not divide {g.clock_interval}")
    n = int(n)
    for loc in g.goals:
        for x in loc.goal_cost.breakpoints():
            if ((x - b) / delta).denominator != 1:
                raise GridMisaligned(f"goal breakpoint {x} of {loc.name} is off the grid")

    names = list(g.locations)
    index = {name: i for i, name in enumerate(names)}
    locs = [g[name] for name in names]
    succ = [[index[s] for s in g.successors(name)] for name in names]
    is_min = [loc.owner is Owner.MIN for loc in locs]
    waits = [not loc.is_goal and not loc.urgent for loc in locs]
    movers = [i for i, loc in enumerate(locs) if not loc.is_goal]
    rounds = len(names)

    columns: list[list[ExtendedValue]] = [None] * (n + 1)
    for k in range(n, -1, -1):
        x = b + k * delta
        col: list[ExtendedValue] = [
            evaluate(loc.goal_cost, x) if loc.is_goal else INF for loc in locs
        ]
        wait = [None] * len(locs)
        if k < n:
            nxt = columns[k + 1]
            for i in movers:
                if waits[i]:
                    wait[i] = locs[i].rate * delta + nxt[i]
        for _ in range(rounds):
            changed = False
            for i in movers:
                vals = [col[j] for j in succ[i]]
                if wait[i] is not None:
                    vals.append(wait[i])
                if is_min[i]:
                    v = min(vals, default=INF)
                else:
                    v = max(vals, default=INF)
                if v != col[i]:
                    col[i] = v
                    changed = True
            if not changed:
                break
        columns[k] = col
    values = {name: tuple(columns[k][i] for k in range(n + 1)) for i, name in enumerate(names)}
    return GridValueMap(g.clock_interval, delta, values)


@dataclass(frozen=True)
class Witness:
    location: str
    x: Fraction
    exact: ExtendedValue
    grid: ExtendedValue
    difference: ExtendedValue


@dataclass(frozen=True)
class ComparisonReport:
    passed: bool
    tolerance: Fraction
    worst: dict[str, Witness]

    @property
    def max_difference(self) -> ExtendedValue:
        return max((w.difference for w in self.worst.values()), default=Fraction(0))

    def lines(self) -> list[str]:
        out = []
        for name, w in self.worst.items():
            out.append(
                f"{name}: max |diff| = {w.difference} at x = {w.x}"
                f" (exact {w.exact}, grid {w.grid})"
            )
        out.append(f"{'PASS' if self.passed else 'FAIL'} (tolerance {self.tolerance})")
        return out


def _gap(a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
    if a == INF or b == INF:
        return Fraction(0) if a == b else INF
    return abs(a - b)


def compare(oc: OptCostMap, gv: GridValueMap, tol) -> ComparisonReport:
    if oc.interval != gv.interval:
        raise IntervalMismatch(f"{oc.interval} != {gv.interval}")
    tol = Fraction(tol)
    worst = {}
    passed = True
    pts = gv.points
    for name in oc:
        best = None
        for k, x in enumerate(pts):
            exact = evaluate(oc[name], x)
            grid = gv[name, k]
            d = _gap(exact, grid)
            if best is None or d > best.difference:
                best = Witness(name, x, exact, grid, d)
        worst[name] = best
        if best.difference > tol:
            passed = False
    return ComparisonReport(passed, tol, worst)


def default_tolerance(g: Game, delta) -> Fraction:
    """(max rate + max |goal slope|) * delta."""
    rate = max((loc.rate for loc in g), default=0)
    slope = max(
        (abs(p.slope) for loc in g.goals if not loc.goal_cost.is_infinite for p in loc.goal_cost.pieces),
        default=Fraction(0),
    )
    return (rate + slope) * Fraction(delta)

"""Simple single-clock priced timed games and their transformations.

A game is guard-free, reset-free and has zero discrete prices, so the edge
relation is just a set of location pairs.  Every operator returns a fresh
:class:`Game`; inputs are never mutated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from .costfn import (
    INF,
    CostFunction,
    DomainMismatch,
    Interval,
    OutOfDomain,
    Piece,
    all_infinity,
    construct,
    evaluate,
    restrict,
)


class GameError(ValueError):
    pass


class UnknownLocation(GameError, KeyError):
    def __str__(self):
        return GameError.__str__(self)


class IntervalMismatch(GameError):
    pass


class MissingLocation(GameError):
    pass


class Owner(str, enum.Enum):
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class Location:
    name: str
    owner: Owner = Owner.MIN
    urgent: bool = False
    rate: int = 0
    goal_cost: CostFunction | None = None

    def __post_init__(self):
        object.__setattr__(self, "owner", Owner(self.owner))
        if isinstance(self.rate, bool) or int(self.rate) != self.rate or self.rate < 0:
            raise GameError(f"{self.name}: price rate must be a natural number, got {self.rate!r}")
        object.__setattr__(self, "rate", int(self.rate))
        if self.goal_cost is not None:
            # goals stop the run on entry; urgency and rate are irrelevant
            object.__setattr__(self, "urgent", True)
            object.__setattr__(self, "rate", 0)

    @property
    def is_goal(self) -> bool:
        return self.goal_cost is not None


@dataclass(frozen=True)
class Game:
    locations: Mapping[str, Location]
    edges: frozenset = frozenset()
    clock_interval: Interval = Interval(0, 1)

    def __post_init__(self):
        locs = self.locations
        if not isinstance(locs, Mapping):
            locs = {loc.name: loc for loc in locs}
        for name, loc in locs.items():
            if name != loc.name:
                raise GameError(f"location key {name!r} does not match name {loc.name!r}")
        object.__setattr__(self, "locations", MappingProxyType(dict(sorted(locs.items()))))
        edges = frozenset((str(a), str(b)) for a, b in self.edges)
        for a, b in edges:
            for end in (a, b):
                if end not in locs:
                    raise UnknownLocation(f"edge ({a}, {b}) mentions unknown location {end!r}")
        object.__setattr__(self, "edges", edges)
        iv = self.clock_interval
        if not isinstance(iv, Interval):
            iv = Interval(*iv)
        object.__setattr__(self, "clock_interval", iv)
        for loc in locs.values():
            if loc.is_goal and loc.goal_cost.domain != iv:
                raise DomainMismatch(
                    f"goal cost of {loc.name} lives on {loc.goal_cost.domain}, game on {iv}"
                )
        succ: dict[str, list[str]] = {name: [] for name in locs}
        for a, b in sorted(edges):
            succ[a].append(b)
        object.__setattr__(self, "_succ", MappingProxyType({k: tuple(v) for k, v in succ.items()}))

    def __getitem__(self, name: str) -> Location:
        try:
            return self.locations[name]
        except KeyError:
            raise UnknownLocation(f"unknown location {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self.locations

    def __iter__(self):
        return iter(self.locations.values())

    def __len__(self) -> int:
        return len(self.locations)

    def successors(self, name: str) -> tuple[str, ...]:
        return self._succ[name]

    @property
    def goals(self) -> list[Location]:
        return [loc for loc in self if loc.is_goal]

    def goal_piece_count(self) -> int:
        return sum(len(loc.goal_cost) for loc in self.goals)

    def _with(self, locations=None, edges=None, clock_interval=None) -> "Game":
        return Game(
            self.locations if locations is None else locations,
            self.edges if edges is None else edges,
            self.clock_interval if clock_interval is None else clock_interval,
        )


@dataclass(frozen=True)
class OptCostMap:
    """Location -> cost function, all on one interval."""

    interval: Interval
    values: Mapping[str, CostFunction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(sorted(self.values.items()))))
        for name, f in self.values.items():
            if f.domain != self.interval:
                raise DomainMismatch(f"{name}: {f.domain} != {self.interval}")

    def __getitem__(self, name: str) -> CostFunction:
        try:
            return self.values[name]
        except KeyError:
            raise MissingLocation(f"no value for location {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self.values

    def __iter__(self):
        return iter(self.values)

    def items(self):
        return self.values.items()

    def value(self, name: str, x) -> Fraction | float:
        return evaluate(self[name], x)

    def only(self, names: Iterable[str]) -> "OptCostMap":
        return OptCostMap(self.interval, {n: self[n] for n in names})

    def restrict(self, lo, hi=None) -> "OptCostMap":
        j = lo if isinstance(lo, Interval) else Interval(lo, hi)
        return OptCostMap(j, {n: restrict(f, j) for n, f in self.values.items()})


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def non_urgent(g: Game) -> list[Location]:
    return [loc for loc in g if not loc.is_goal and not loc.urgent]


def make_urgent(g: Game, name: str) -> Game:
    loc = g[name]
    if loc.urgent:
        return g
    return g._with(locations={**g.locations, name: replace(loc, urgent=True)})


def add_goal(g: Game, name: str, h: CostFunction) -> Game:
    if h.domain != g.clock_interval:
        raise DomainMismatch(f"goal cost on {h.domain}, game on {g.clock_interval}")
    if name in g:
        loc = replace(g[name], goal_cost=h)
    else:
        loc = Location(name, Owner.MIN, urgent=True, rate=0, goal_cost=h)
    return g._with(locations={**g.locations, name: loc})


def add_edge(g: Game, src: str, dst: str) -> Game:
    g[src], g[dst]
    if (src, dst) in g.edges:
        return g
    return g._with(edges=g.edges | {(src, dst)})


def restrict_interval(g: Game, lo, hi=None) -> Game:
    j = lo if isinstance(lo, Interval) else Interval(lo, hi)
    if not g.clock_interval.contains_interval(j):
        raise OutOfDomain(f"{j} not inside {g.clock_interval}")
    if j == g.clock_interval:
        return g
    locs = {
        n: replace(loc, goal_cost=restrict(loc.goal_cost, j)) if loc.is_goal else loc
        for n, loc in g.locations.items()
    }
    return Game(locs, g.edges, j)


def fresh_name(g: Game, base: str) -> str:
    k = 0
    while f"{base}#g{k}" in g:
        k += 1
    return f"{base}#g{k}"


def cost_consistent(g: Game, oc: OptCostMap) -> Game:
    """Encode an already-solved right interval as fresh goals.

    ``g`` lives on ``[b, r]`` and ``oc`` on ``[r, e]``.  Each non-urgent
    location ``l`` gets an edge to a fresh goal whose cost is the price of
    waiting in ``l`` until ``r`` and then continuing optimally.
    """
    left, right = g.clock_interval, oc.interval
    if left.hi != right.lo:
        raise IntervalMismatch(f"{left} does not end where {right} starts")
    r = left.hi
    out = g
    for loc in non_urgent(g):
        v = oc.value(loc.name, r)
        if v == INF:
            h = all_infinity(left)
        else:
            h = construct([Piece(left.lo, left.hi, Fraction(-loc.rate), v + loc.rate * r)], left)
        name = fresh_name(out, loc.name)
        out = add_goal(out, name, h)
        out = add_edge(out, loc.name, name)
    return out


def without(g: Game, names: Iterable[str]) -> Game:
    """Induced subgame on the locations not in ``names``."""
    drop = set(names)
    locs = {n: loc for n, loc in g.locations.items() if n not in drop}
    edges = {(a, b) for a, b in g.edges if a not in drop and b not in drop}
    return Game(locs, edges, g.clock_interval)


def infinite_value_locations(g: Game) -> set[str]:
    """Locations from which the maximizer can avoid every goal forever.

    Computes the minimizer's attractor to the goals with finite cost over the
    discrete edge graph and returns its complement.
    """
    attr = {loc.name for loc in g.goals if not loc.goal_cost.is_infinite}
    changed = True
    while changed:
        changed = False
        for loc in g:
            if loc.name in attr or loc.is_goal:
                continue
            succ = g.successors(loc.name)
            if loc.owner is Owner.MIN:
                ok = any(s in attr for s in succ)
            else:
                ok = bool(succ) and all(s in attr for s in succ)
            if ok:
                attr.add(loc.name)
                changed = True
    return {n for n in g.locations if n not in attr}

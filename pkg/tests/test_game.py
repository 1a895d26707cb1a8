import random
from fractions import Fraction as F

import pytest

from gen import brute_force_infinite, random_graph_game
from rpgame.costfn import DomainMismatch, OutOfDomain, affine, all_infinity, constant, restrict
from rpgame.game import (
    Game,
    IntervalMismatch,
    Location,
    MissingLocation,
    OptCostMap,
    Owner,
    UnknownLocation,
    add_edge,
    add_goal,
    cost_consistent,
    infinite_value_locations,
    make_urgent,
    non_urgent,
    restrict_interval,
    without,
)

HALF = F(1, 2)


def game(*locs, edges=(), interval=(0, 1)):
    return Game({loc.name: loc for loc in locs}, edges, interval)


@pytest.fixture
def three():
    return game(
        Location("u", Owner.MIN, urgent=True),
        Location("m", Owner.MIN, urgent=False, rate=2),
        Location("g", goal_cost=constant(1)),
        edges=[("u", "m"), ("m", "g")],
    )


def test_non_urgent(three):
    assert [loc.name for loc in non_urgent(three)] == ["m"]
    all_urgent = game(Location("a", urgent=True), Location("g", goal_cost=constant(0)))
    assert non_urgent(all_urgent) == []
    goals = game(Location("a", goal_cost=constant(0)), Location("b", goal_cost=constant(1)))
    assert non_urgent(goals) == []


def test_goals_are_normalized():
    loc = Location("g", Owner.MAX, urgent=False, rate=7, goal_cost=constant(1))
    assert loc.urgent and loc.rate == 0


def test_make_urgent(three):
    g2 = make_urgent(three, "m")
    assert non_urgent(g2) == []
    assert not three["m"].urgent  # input untouched
    assert make_urgent(three, "u") is three
    with pytest.raises(UnknownLocation):
        make_urgent(three, "nope")


def test_add_goal(three):
    h = affine(-2, 2)
    g2 = add_goal(three, "fresh", h)
    assert g2["fresh"].goal_cost == h and g2["fresh"].urgent and g2.successors("fresh") == ()
    assert "fresh" not in three
    g3 = add_goal(three, "g", h)
    assert g3["g"].goal_cost == h
    with pytest.raises(DomainMismatch):
        add_goal(three, "x", affine(-1, 1, 0, HALF))


def test_add_edge(three):
    g2 = add_edge(three, "u", "g")
    assert ("u", "g") in g2.edges and ("u", "g") not in three.edges
    assert add_edge(three, "u", "m") is three
    with pytest.raises(UnknownLocation):
        add_edge(three, "u", "nope")


def test_restrict_interval(three):
    g2 = restrict_interval(three, F(1, 4), HALF)
    assert g2.clock_interval.lo == F(1, 4)
    assert g2["g"].goal_cost == restrict(constant(1), F(1, 4), HALF)
    g3 = restrict_interval(three, 1, 1)
    assert g3.clock_interval.is_point
    with pytest.raises(OutOfDomain):
        restrict_interval(g2, 0, HALF)


def test_cost_consistent_formula():
    g = game(Location("l", Owner.MIN, rate=2), Location("t", goal_cost=constant(0)),
             edges=[("l", "t")])
    left = restrict_interval(g, 0, HALF)
    oc = OptCostMap(restrict(constant(0), HALF, 1).domain,
                    {"l": constant(3, HALF, 1), "t": constant(0, HALF, 1)})
    g2 = cost_consistent(left, oc)
    assert g2["l#g0"].goal_cost == affine(-2, 4, 0, HALF)
    assert ("l", "l#g0") in g2.edges
    assert g2.clock_interval == left.clock_interval


def test_cost_consistent_counts(three):
    left = restrict_interval(three, 0, HALF)
    oc = OptCostMap(restrict(constant(0), HALF, 1).domain,
                    {n: constant(1, HALF, 1) for n in three.locations})
    g2 = cost_consistent(left, oc)
    assert len(g2) == len(three) + 1 and len(g2.edges) == len(three.edges) + 1
    urgent = make_urgent(left, "m")
    assert cost_consistent(urgent, oc) == urgent
    two = add_edge(add_goal(left, "n", constant(0, 0, HALF)), "u", "n")
    two = Game({**two.locations, "n": Location("n", Owner.MAX, rate=1)}, two.edges | {("n", "g")},
               two.clock_interval)
    oc2 = OptCostMap(oc.interval, {**oc.values, "n": constant(2, HALF, 1)})
    g3 = cost_consistent(two, oc2)
    fresh = [loc for loc in g3 if "#g" in loc.name]
    assert len(fresh) == 2 and all(loc.is_goal and loc.urgent for loc in fresh)


def test_cost_consistent_errors(three):
    left = restrict_interval(three, 0, HALF)
    with pytest.raises(IntervalMismatch):
        cost_consistent(left, OptCostMap(restrict(constant(0), F(3, 4), 1).domain, {}))
    with pytest.raises(MissingLocation):
        cost_consistent(left, OptCostMap(restrict(constant(0), HALF, 1).domain, {}))


def test_cost_consistent_infinite_value(three):
    left = restrict_interval(three, 0, HALF)
    oc = OptCostMap(restrict(constant(0), HALF, 1).domain, {"m": all_infinity(HALF, 1)})
    assert cost_consistent(left, oc)["m#g0"].goal_cost.is_infinite


def test_infinite_value_examples():
    g = game(Location("m", Owner.MIN), Location("g", goal_cost=constant(0)), edges=[("m", "g")])
    assert infinite_value_locations(g) == set()
    g = game(Location("M", Owner.MAX), Location("g", goal_cost=constant(0)),
             Location("s", Owner.MIN), edges=[("M", "g"), ("M", "s"), ("s", "s")])
    assert infinite_value_locations(g) == {"M", "s"}
    g = game(Location("d", Owner.MIN), Location("g", goal_cost=constant(0)))
    assert infinite_value_locations(g) == {"d"}


def test_infinite_value_fixpoint_and_monotonicity():
    rng = random.Random(7)
    for _ in range(200):
        g = random_graph_game(rng)
        bad = infinite_value_locations(g)
        assert infinite_value_locations(without(g, bad)) == set()
        names = list(g.locations)
        a, b = rng.choice(names), rng.choice(names)
        if g[a].is_goal:
            continue
        bigger = add_edge(g, a, b)
        if g[a].owner is Owner.MIN:
            assert infinite_value_locations(bigger) <= bad
        elif g.successors(a):
            # a dead-end maximizer location gains its first move, so only
            # locations that already could move are covered
            assert infinite_value_locations(bigger) >= bad


def test_infinite_value_matches_enumeration():
    rng = random.Random(11)
    for _ in range(300):
        g = random_graph_game(rng, 5)
        assert infinite_value_locations(g) == brute_force_infinite(g)


def test_operators_do_not_mutate(three):
    before = (dict(three.locations), three.edges, three.clock_interval)
    make_urgent(three, "m")
    add_goal(three, "z", constant(0))
    add_edge(three, "g", "u")
    restrict_interval(three, 0, HALF)
    assert (dict(three.locations), three.edges, three.clock_interval) == before

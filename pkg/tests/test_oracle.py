import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from gen import random_game
from rpgame.costfn import INF, affine, all_infinity, from_breakpoints
from rpgame.game import Game, IntervalMismatch, Location, OptCostMap, Owner
from rpgame.gamefile import load_game
from rpgame.oracle import (
    GridMisaligned,
    aligned_step,
    compare,
    default_tolerance,
    oracle_solve,
)
from rpgame.solver import solve, solve_game, solve_urgent
from test_solver import min_wait_game, two_goal_game, urgent_pair

HALF = F(1, 2)


def backward_induction(rate, goal, delta):
    """Single minimizer location with one goal edge, written out directly."""
    n = int(1 / delta)
    v = [None] * (n + 1)
    v[n] = goal(F(1))
    for k in range(n - 1, -1, -1):
        v[k] = min(goal(k * delta), rate * delta + v[k + 1])
    return v


def test_min_wait_grid_values():
    g = min_wait_game()
    gv = oracle_solve(g, None, F(1, 8))
    assert gv["m", 4] == HALF
    assert list(gv.values["m"]) == backward_induction(1, g["g"].goal_cost, F(1, 8))
    assert gv.points[0] == 0 and gv.points[-1] == 1 and len(gv.points) == 9


@pytest.mark.parametrize("owner", [Owner.MIN, Owner.MAX])
def test_urgent_games_are_exact_on_the_grid(owner):
    g = urgent_pair(owner)
    exact = solve_urgent(g)
    gv = oracle_solve(g, None, F(1, 16))
    assert compare(exact, gv, 0).passed


def test_all_infinity_everywhere():
    g = Game({"d": Location("d"), "g": Location("g", goal_cost=all_infinity(0, 1))},
             [("d", "g")])
    gv = oracle_solve(g, None, F(1, 4))
    assert all(v == INF for v in gv.values["d"])
    assert all(v == INF for v in gv.values["g"])


def test_exact_solver_passes_at_default_tolerance():
    for g in (min_wait_game(), two_goal_game()):
        step = F(1, 256)
        oc, _ = solve(g)
        report = compare(oc, oracle_solve(g, None, step), default_tolerance(g, step))
        assert report.passed


def test_perturbation_is_caught_with_witness():
    g = min_wait_game()
    step = F(1, 64)
    tol = default_tolerance(g, step)
    oc, _ = solve(g)
    shifted = OptCostMap(oc.interval, {**oc.values, "m": affine(-1, 1 + 10 * tol)})
    report = compare(shifted, oracle_solve(g, None, step), tol)
    assert not report.passed
    w = report.worst["m"]
    assert w.difference >= 9 * tol and w.location == "m"
    assert any("FAIL" in line for line in report.lines())


def test_infinite_against_finite_fails():
    g = min_wait_game()
    oc, _ = solve(g)
    broken = OptCostMap(oc.interval, {**oc.values, "m": all_infinity(0, 1)})
    report = compare(broken, oracle_solve(g, None, F(1, 4)), 10**9)
    assert not report.passed and report.worst["m"].difference == INF


def test_interval_mismatch():
    g = min_wait_game()
    oc, _ = solve(g, (0, HALF))
    with pytest.raises(IntervalMismatch):
        compare(oc, oracle_solve(g, None, F(1, 4)), 1)


def test_misaligned_grid():
    g = Game({"m": Location("m", rate=1),
              "g": Location("g", goal_cost=affine(-1, 1))}, [("m", "g")])
    with pytest.raises(GridMisaligned):
        oracle_solve(g, None, F(1, 3) * 2)
    with pytest.raises(GridMisaligned):
        oracle_solve(g, None, 0)
    bent = Game({"g": Location("g", goal_cost=from_breakpoints([0, F(1, 3), 1], [1, 0, 0]))}, [])
    with pytest.raises(GridMisaligned):
        oracle_solve(bent, None, F(1, 2))
    assert aligned_step(bent) == F(1, 3)
    assert aligned_step(bent, refine=2) == F(1, 12)


def test_refinement_does_not_increase_disagreement():
    rng = random.Random(11)
    for _ in range(10):
        g = random_game(rng, n_locations=5)
        oc, _ = solve(g)
        diffs = [compare(oc, oracle_solve(g, None, F(1, 2**k)), 0).max_difference
                 for k in range(3, 8)]
        assert all(a >= b for a, b in zip(diffs, diffs[1:])), diffs


def test_determinism():
    rng = random.Random(2)
    g = random_game(rng)
    assert oracle_solve(g, None, F(1, 64)) == oracle_solve(g, None, F(1, 64))


def test_randomized_agreement():
    rng = random.Random(17)
    step = F(1, 256)
    for _ in range(20):
        g = random_game(rng, finite=False)
        oc, _ = solve_game(g)
        report = compare(oc, oracle_solve(g, None, step), default_tolerance(g, step))
        assert report.passed, report.lines()


def test_off_grid_game_converges():
    g = load_game(Path(__file__).resolve().parent.parent / "games" / "off_grid.json")
    oc, _ = solve(g)
    diffs = []
    for k in (6, 8, 11):
        step = F(1, 2**k)
        report = compare(oc, oracle_solve(g, None, step), default_tolerance(g, step))
        assert report.passed
        diffs.append(report.worst["l1"].difference)
    assert diffs[0] > diffs[1] > diffs[2] > 0

"""JSON game and solution files.

Rationals are strings ``"p/q"`` (or ``"p"``) so nothing is lost in transit;
``"inf"`` stands for the all-infinity cost function.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .costfn import (
    CostFunction,
    CostFunctionError,
    Interval,
    Piece,
    all_infinity,
    construct,
)
from .game import Game, GameError, Location, OptCostMap, Owner

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class GameFileError(ValueError):
    """Malformed input; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def parse_rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise GameFileError(path, f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str) or not _RATIONAL.match(value.strip()):
        raise GameFileError(path, f"malformed rational {value!r}")
    num, _, den = value.strip().partition("/")
    if den and int(den) == 0:
        raise GameFileError(path, f"malformed rational {value!r} (zero denominator)")
    return Fraction(int(num), int(den or 1))


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def format_decimal(x) -> str:
    """Exact decimal if the expansion terminates, else ``p/q``; ``inf`` for +inf."""
    if not isinstance(x, Fraction) and not isinstance(x, int):
        return "inf"
    x = Fraction(x)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = abs(x) * 10**digits
    sign = "-" if x < 0 else ""
    whole, frac = divmod(int(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        raise GameFileError(path, f"expected {kind.__name__}, got {type(obj).__name__}")
    return obj


def parse_cost_function(obj: Any, domain: Interval, path: str) -> CostFunction:
    if obj == "inf":
        return all_infinity(domain)
    _expect(obj, list, path)
    if not obj:
        raise GameFileError(path, "empty piece list")
    pieces = []
    for i, p in enumerate(obj):
        pp = f"{path}[{i}]"
        _expect(p, dict, pp)
        try:
            vals = [parse_rational(p[k], f"{pp}.{k}") for k in ("lo", "hi", "slope", "intercept")]
        except KeyError as exc:
            raise GameFileError(pp, f"missing field {exc.args[0]!r}") from None
        pieces.append(Piece(*vals))
    try:
        return construct(pieces, domain)
    except CostFunctionError as exc:
        raise GameFileError(path, str(exc)) from None


def dump_cost_function(f: CostFunction):
    if f.is_infinite:
        return "inf"
    return [
        {
            "lo": format_rational(p.lo),
            "hi": format_rational(p.hi),
            "slope": format_rational(p.slope),
            "intercept": format_rational(p.intercept),
        }
        for p in f.pieces
    ]


def parse_interval(obj, path) -> Interval:
    _expect(obj, list, path)
    if len(obj) != 2:
        raise GameFileError(path, "expected [lo, hi]")
    lo, hi = parse_rational(obj[0], f"{path}[0]"), parse_rational(obj[1], f"{path}[1]")
    if lo > hi:
        raise GameFileError(path, f"empty interval [{lo}, {hi}]")
    return Interval(lo, hi)


def game_from_dict(doc: Any) -> Game:
    _expect(doc, dict, "$")
    if "clock_interval" not in doc:
        raise GameFileError("clock_interval", "missing")
    iv = parse_interval(doc["clock_interval"], "clock_interval")
    if iv.lo < 0 or iv.hi > 1:
        raise GameFileError("clock_interval", f"{iv} is not inside [0, 1]")
    locs = []
    seen = set()
    for i, entry in enumerate(_expect(doc.get("locations"), list, "locations")):
        path = f"locations[{i}]"
        _expect(entry, dict, path)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise GameFileError(f"{path}.name", "expected a non-empty string")
        if name in seen:
            raise GameFileError(f"{path}.name", f"duplicate location {name!r}")
        seen.add(name)
        owner = entry.get("owner", "min")
        if owner not in ("min", "max"):
            raise GameFileError(f"{path}.owner", f"expected 'min' or 'max', got {owner!r}")
        urgent = entry.get("urgent", False)
        if not isinstance(urgent, bool):
            raise GameFileError(f"{path}.urgent", "expected a boolean")
        rate = entry.get("rate", 0)
        if isinstance(rate, bool) or not isinstance(rate, int) or rate < 0:
            raise GameFileError(f"{path}.rate", f"expected a natural number, got {rate!r}")
        goal = entry.get("goal")
        cost = None if goal is None else parse_cost_function(goal, iv, f"{path}.goal")
        locs.append(Location(name, Owner(owner), urgent, rate, cost))
    edges = []
    for i, e in enumerate(_expect(doc.get("edges", []), list, "edges")):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, str) for v in e)):
            raise GameFileError(f"edges[{i}]", "expected [from, to]")
        for j, end in enumerate(e):
            if end not in seen:
                raise GameFileError(f"edges[{i}][{j}]", f"unknown location {end!r}")
        edges.append(tuple(e))
    try:
        return Game({loc.name: loc for loc in locs}, edges, iv)
    except (GameError, CostFunctionError) as exc:  # pragma: no cover - caught above
        raise GameFileError("$", str(exc)) from None


def game_to_dict(g: Game) -> dict:
    return {
        "clock_interval": [format_rational(g.clock_interval.lo), format_rational(g.clock_interval.hi)],
        "locations": [
            {
                "name": loc.name,
                "owner": loc.owner.value,
                "urgent": loc.urgent,
                "rate": loc.rate,
                **({"goal": dump_cost_function(loc.goal_cost)} if loc.is_goal else {}),
            }
            for loc in g
        ],
        "edges": [list(e) for e in sorted(g.edges)],
    }


def load_game(path) -> Game:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return game_from_dict(doc)


def solution_to_dict(oc: OptCostMap, trace=None) -> dict:
    doc = {
        "interval": [format_rational(oc.interval.lo), format_rational(oc.interval.hi)],
        "locations": {name: dump_cost_function(f) for name, f in oc.items()},
    }
    if trace is not None:
        doc["trace"] = trace.summary()
    return doc


def solution_from_dict(doc: Any) -> OptCostMap:
    _expect(doc, dict, "$")
    iv = parse_interval(doc.get("interval"), "interval")
    values = {
        name: parse_cost_function(obj, iv, f"locations.{name}")
        for name, obj in _expect(doc.get("locations"), dict, "locations").items()
    }
    return OptCostMap(iv, values)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"

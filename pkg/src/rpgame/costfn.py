"""Exact algebra of cost functions.

A cost function is a continuous, non-increasing, piecewise-affine map from a
closed rational interval ``[b, e]`` to the rationals, or the constant
``+inf`` function.  Pieces are stored left to right; interior breakpoints
belong to both neighbouring pieces.

All arithmetic is done with :class:`fractions.Fraction`.  The value ``+inf``
is represented by ``math.inf``, which compares correctly against fractions.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
ExtendedValue = Union[Fraction, float]

INF = math.inf


class CostFunctionError(ValueError):
    """Base class for invalid cost-function input."""


class DomainGap(CostFunctionError):
    pass


class Discontinuous(CostFunctionError):
    pass


class Increasing(CostFunctionError):
    pass


class OutOfDomain(CostFunctionError):
    pass


class DomainMismatch(CostFunctionError):
    pass


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, str or Fraction")
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise CostFunctionError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class Piece:
    """Affine piece ``slope * x + intercept`` on ``[lo, hi]``.

    ``intercept`` may be ``INF`` (with slope 0) inside a :class:`Piecewise`
    produced by :func:`override`; cost functions never store such pieces.
    """

    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: ExtendedValue

    def __call__(self, x) -> ExtendedValue:
        if self.intercept == INF:
            return INF
        return self.slope * x + self.intercept

    def same_formula(self, other: "Piece") -> bool:
        return self.slope == other.slope and self.intercept == other.intercept

    def with_domain(self, lo, hi) -> "Piece":
        return Piece(lo, hi, self.slope, self.intercept)


def _canonical(p: Piece) -> Piece:
    # A point piece has no meaningful slope; store it as a constant.
    if p.lo == p.hi and p.slope != 0 and p.intercept != INF:
        return Piece(p.lo, p.hi, Fraction(0), p(p.lo))
    return p


@dataclass(frozen=True)
class CostFunction:
    """Validated, normalized cost function.  Build with :func:`construct`,
    :func:`affine`, :func:`constant` or :func:`all_infinity`."""

    domain: Interval
    pieces: tuple[Piece, ...] | None  # None encodes the all-infinity function

    @property
    def is_infinite(self) -> bool:
        return self.pieces is None

    @property
    def lo(self) -> Fraction:
        return self.domain.lo

    @property
    def hi(self) -> Fraction:
        return self.domain.hi

    def __len__(self) -> int:
        return 0 if self.pieces is None else len(self.pieces)

    def __call__(self, x) -> ExtendedValue:
        return evaluate(self, x)

    def breakpoints(self) -> list[Fraction]:
        if self.pieces is None:
            return [self.lo, self.hi] if self.lo != self.hi else [self.lo]
        pts = [p.lo for p in self.pieces]
        pts.append(self.pieces[-1].hi)
        return pts

    def __repr__(self):
        if self.pieces is None:
            return f"CostFunction({self.domain}, inf)"
        body = "; ".join(
            f"{p.slope}*x{'+' if p.intercept >= 0 else '-'}{abs(p.intercept)} on [{p.lo},{p.hi}]"
            for p in self.pieces
        )
        return f"CostFunction({body})"


@dataclass(frozen=True)
class Piecewise:
    """Possibly discontinuous piecewise-affine function (result of override)."""

    domain: Interval
    pieces: tuple[Piece, ...]

    def __call__(self, x) -> ExtendedValue:
        if x not in self.domain:
            raise OutOfDomain(f"{x} not in {self.domain}")
        for p in self.pieces:
            if p.lo <= x <= p.hi:
                return p(x)
        raise OutOfDomain(f"{x} not covered")  # pragma: no cover

    def to_cost_function(self) -> CostFunction:
        if all(p.intercept == INF for p in self.pieces):
            return all_infinity(self.domain)
        for p in self.pieces:
            if p.intercept == INF:
                raise Discontinuous(f"infinite segment on [{p.lo}, {p.hi}] next to finite values")
        return construct(self.pieces, self.domain)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def construct(pieces: Iterable[Piece], domain=None) -> CostFunction:
    """Validate and normalize ``pieces`` into a cost function.

    Pieces must tile ``domain`` left to right, agree at shared breakpoints
    and have non-positive slopes.  Adjacent pieces with the same formula are
    merged.  Zero-width pieces inside a non-degenerate domain are dropped
    after the continuity check.
    """
    raw = [
        Piece(as_rational(p.lo), as_rational(p.hi), as_rational(p.slope), as_rational(p.intercept))
        if isinstance(p, Piece)
        else Piece(*(as_rational(v) for v in p))
        for p in pieces
    ]
    if not raw:
        raise DomainGap("no pieces given")
    if domain is None:
        dom = Interval(raw[0].lo, raw[-1].hi)
    else:
        dom = domain if isinstance(domain, Interval) else Interval(*domain)
    if raw[0].lo != dom.lo:
        raise DomainGap(f"first piece starts at {raw[0].lo}, domain starts at {dom.lo}")
    if raw[-1].hi != dom.hi:
        raise DomainGap(f"last piece ends at {raw[-1].hi}, domain ends at {dom.hi}")
    for p in raw:
        if p.lo > p.hi:
            raise DomainGap(f"piece [{p.lo}, {p.hi}] is reversed")
        if p.slope > 0 and p.lo < p.hi:
            raise Increasing(f"slope {p.slope} > 0 on [{p.lo}, {p.hi}]")
    for left, right in zip(raw, raw[1:]):
        if left.hi != right.lo:
            raise DomainGap(f"gap or overlap between {left.hi} and {right.lo}")
        if left(left.hi) != right(right.lo):
            raise Discontinuous(f"jump from {left(left.hi)} to {right(right.lo)} at {left.hi}")

    if dom.is_point:
        return CostFunction(dom, (_canonical(raw[0]),))

    kept = [p for p in raw if p.lo < p.hi]
    merged: list[Piece] = []
    for p in kept:
        if merged and merged[-1].same_formula(p):
            merged[-1] = merged[-1].with_domain(merged[-1].lo, p.hi)
        else:
            merged.append(p)
    return CostFunction(dom, tuple(merged))


def affine(slope, intercept, lo=0, hi=1) -> CostFunction:
    return construct([Piece(lo, hi, slope, intercept)], Interval(lo, hi))


def constant(value, lo=0, hi=1) -> CostFunction:
    return affine(0, value, lo, hi)


def all_infinity(lo=0, hi=1) -> CostFunction:
    dom = lo if isinstance(lo, Interval) else Interval(lo, hi)
    return CostFunction(dom, None)


def from_breakpoints(xs: Sequence, ys: Sequence) -> CostFunction:
    """Cost function through the points ``(xs[i], ys[i])`` (linear in between)."""
    xs = [as_rational(x) for x in xs]
    ys = [as_rational(y) for y in ys]
    if len(xs) == 1:
        return construct([Piece(xs[0], xs[0], Fraction(0), ys[0])])
    pieces = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append(Piece(x0, x1, slope, y0 - slope * x0))
    return construct(pieces)


def validate(f: CostFunction) -> None:
    """Raise if ``f`` violates any cost-function invariant."""
    if f.pieces is None:
        return
    g = construct(f.pieces, f.domain)
    if g != f:
        raise CostFunctionError("cost function is not in normal form")


# ---------------------------------------------------------------------------
# evaluation and restriction
# ---------------------------------------------------------------------------


def _piece_index(f: CostFunction, x) -> int:
    his = [p.hi for p in f.pieces]
    return min(bisect.bisect_left(his, x), len(his) - 1)


def evaluate(f: CostFunction, x) -> ExtendedValue:
    x = as_rational(x)
    if x not in f.domain:
        raise OutOfDomain(f"{x} not in {f.domain}")
    if f.pieces is None:
        return INF
    return f.pieces[_piece_index(f, x)](x)


def restrict(f: CostFunction, lo, hi=None) -> CostFunction:
    j = lo if isinstance(lo, Interval) else Interval(lo, hi)
    if not f.domain.contains_interval(j):
        raise OutOfDomain(f"{j} not inside {f.domain}")
    if f.pieces is None:
        return all_infinity(j)
    if j.is_point:
        return CostFunction(j, (Piece(j.lo, j.lo, Fraction(0), evaluate(f, j.lo)),))
    out = []
    for p in f.pieces:
        lo_, hi_ = max(p.lo, j.lo), min(p.hi, j.hi)
        if lo_ < hi_:
            out.append(p.with_domain(lo_, hi_))
    return CostFunction(j, tuple(out))


# ---------------------------------------------------------------------------
# envelopes and crossings
# ---------------------------------------------------------------------------


def _check_same_domain(f: CostFunction, g: CostFunction) -> None:
    if f.domain != g.domain:
        raise DomainMismatch(f"{f.domain} != {g.domain}")


def _cells(f: CostFunction, g: CostFunction):
    """Yield ``(lo, hi, pf, pg)`` over the common refinement of f and g."""
    pts = sorted(set(f.breakpoints()) | set(g.breakpoints()))
    if len(pts) == 1:
        yield pts[0], pts[0], f.pieces[0], g.pieces[0]
        return
    i = j = 0
    for lo, hi in zip(pts, pts[1:]):
        while f.pieces[i].hi <= lo:
            i += 1
        while g.pieces[j].hi <= lo:
            j += 1
        yield lo, hi, f.pieces[i], g.pieces[j]


def _envelope(f: CostFunction, g: CostFunction, take_min: bool) -> CostFunction:
    _check_same_domain(f, g)
    if f.pieces is None:
        return g if take_min else f
    if g.pieces is None:
        return f if take_min else g
    better = (lambda u, v: u < v) if take_min else (lambda u, v: u > v)
    out: list[Piece] = []
    for lo, hi, pf, pg in _cells(f, g):
        d_lo = pf(lo) - pg(lo)
        d_hi = pf(hi) - pg(hi)
        if lo == hi:
            out.append(pf if not better(pg(lo), pf(lo)) else pg)
            continue
        if d_lo * d_hi < 0:
            # one strict crossing inside the cell
            x = (pg.intercept - pf.intercept) / (pf.slope - pg.slope)
            first_f = better(pf(lo), pg(lo))
            a, b = (pf, pg) if first_f else (pg, pf)
            out.append(a.with_domain(lo, x))
            out.append(b.with_domain(x, hi))
        else:
            mid = (lo + hi) / 2
            pick = pg if better(pg(mid), pf(mid)) else pf
            out.append(pick.with_domain(lo, hi))
    return construct(out, f.domain)


def pointwise_min(f: CostFunction, g: CostFunction) -> CostFunction:
    return _envelope(f, g, take_min=True)


def pointwise_max(f: CostFunction, g: CostFunction) -> CostFunction:
    return _envelope(f, g, take_min=False)


def envelope_min(fs: Iterable[CostFunction], domain: Interval) -> CostFunction:
    acc = all_infinity(domain)
    for f in fs:
        acc = pointwise_min(acc, f)
    return acc


def envelope_max(fs: Iterable[CostFunction], domain: Interval) -> CostFunction | None:
    """Upper envelope; ``None`` for an empty family (caller decides its meaning)."""
    acc = None
    for f in fs:
        acc = f if acc is None else pointwise_max(acc, f)
    return acc


def crossings(f: CostFunction, g: CostFunction) -> list[Fraction]:
    """Points where ``f - g`` vanishes.

    Isolated zeros are reported once; a maximal interval on which the two
    functions coincide is reported by its two endpoints.
    """
    _check_same_domain(f, g)
    if f.pieces is None or g.pieces is None:
        raise CostFunctionError("crossings needs finite functions")
    out: list[Fraction] = []
    run_start = None  # left end of the current coincidence run
    for lo, hi, pf, pg in _cells(f, g):
        d_lo, d_hi = pf(lo) - pg(lo), pf(hi) - pg(hi)
        if d_lo == 0 and d_hi == 0 and lo < hi:
            if run_start is None:
                run_start = lo
            continue
        if run_start is not None:
            out.extend([run_start, lo])
            run_start = None
        if d_lo == 0:
            out.append(lo)
        if d_lo * d_hi < 0:
            out.append(lo + d_lo * (hi - lo) / (d_lo - d_hi))
        if d_hi == 0:
            out.append(hi)
    if run_start is not None:
        out.extend([run_start, f.hi])
    return sorted(set(out))


# ---------------------------------------------------------------------------
# waiting operators
# ---------------------------------------------------------------------------


def _waiting(f: CostFunction, c, take_min: bool) -> CostFunction:
    """x -> opt_{0 <= t <= e - x} c*t + f(x+t), with opt = min or max.

    Writing F(y) = f(y) + c*y, the result is S(x) - c*x where S is the
    suffix min (max) of F.  A single right-to-left sweep computes S; on each
    piece S either follows F (original formula kept) or is the constant
    running optimum (slope -c in the output).
    """
    c = as_rational(c)
    if c < 0:
        raise CostFunctionError(f"waiting rate must be >= 0, got {c}")
    if f.pieces is None or f.domain.is_point:
        return f
    out: list[Piece] = []
    best = f.pieces[-1](f.hi) + c * f.hi  # running optimum of F on [x, e]
    for p in reversed(f.pieces):
        s = p.slope + c
        q = p.intercept
        # F improves on `best` moving left only if s > 0 (min) / s < 0 (max)
        improves = s > 0 if take_min else s < 0
        if not improves:
            out.append(Piece(p.lo, p.hi, -c, best))
            continue
        x0 = (best - q) / s  # F(x0) == best
        x0 = min(max(x0, p.lo), p.hi)
        if x0 < p.hi:
            out.append(Piece(x0, p.hi, -c, best))
        if p.lo < x0:
            out.append(p.with_domain(p.lo, x0))
        best = s * p.lo + q if p.lo < x0 else best
    out.reverse()
    return construct(out, f.domain)


def min_c(f: CostFunction, c) -> CostFunction:
    return _waiting(f, c, take_min=True)


def max_c(f: CostFunction, c) -> CostFunction:
    return _waiting(f, c, take_min=False)


# ---------------------------------------------------------------------------
# override and gluing
# ---------------------------------------------------------------------------


def _as_piecewise(f) -> Piecewise:
    if isinstance(f, Piecewise):
        return f
    if f.pieces is None:
        return Piecewise(f.domain, (Piece(f.lo, f.hi, Fraction(0), INF),))
    return Piecewise(f.domain, f.pieces)


def override(h, g) -> Piecewise:
    """Left-biased union: ``h(x)`` on h's domain, ``g(x)`` elsewhere.

    The domains must overlap or touch so that their union is an interval.
    The result may be discontinuous; use :meth:`Piecewise.to_cost_function`
    to validate it.
    """
    hp, gp = _as_piecewise(h), _as_piecewise(g)
    i1, i2 = hp.domain, gp.domain
    if i2.lo > i1.hi or i1.lo > i2.hi:
        raise DomainGap(f"{i1} and {i2} do not touch")
    left = [p.with_domain(p.lo, min(p.hi, i1.lo)) for p in gp.pieces if p.lo < i1.lo]
    right = [p.with_domain(max(p.lo, i1.hi), p.hi) for p in gp.pieces if p.hi > i1.hi]
    dom = Interval(min(i1.lo, i2.lo), max(i1.hi, i2.hi))
    return Piecewise(dom, tuple(left) + hp.pieces + tuple(right))


def glue(*parts: CostFunction) -> CostFunction:
    """Override a left-to-right chain of cost functions and validate the result."""
    acc = _as_piecewise(parts[-1])
    for f in reversed(parts[:-1]):
        acc = override(f, acc)
    return acc.to_cost_function()


def max_abs_difference(f: CostFunction, g: CostFunction, extra: Iterable = ()) -> ExtendedValue:
    """Exact sup-norm distance (breakpoints suffice for piecewise-affine data)."""
    _check_same_domain(f, g)
    if f.pieces is None or g.pieces is None:
        return Fraction(0) if f.pieces is None and g.pieces is None else INF
    pts = set(f.breakpoints()) | set(g.breakpoints()) | set(extra)
    return max(abs(evaluate(f, x) - evaluate(g, x)) for x in pts)

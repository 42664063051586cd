"""Trapezoidal fuzzy numbers on the unit interval.

A value is described by four corners a <= b <= c <= d in [0, 1]: membership
rises linearly from a to b, is 1 on the core [b, c], and falls linearly from
c to d. Crisp numbers are the degenerate case a == b == c == d. Arithmetic
is alpha-cut interval arithmetic, clamped to [0, 1] because every quantity
handled here is a proportion or a credibility; results keep the trapezoidal
shape by reconstructing through the support and core cuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping


@dataclass(frozen=True)
class UnitFuzzyNumber:
    """Trapezoidal possibility function on [0, 1]."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.a <= self.b <= self.c <= self.d <= 1.0):
            raise ValueError(
                f"corners must satisfy 0 <= a <= b <= c <= d <= 1, "
                f"got ({self.a}, {self.b}, {self.c}, {self.d})"
            )

    @property
    def corners(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def is_crisp(self) -> bool:
        return self.a == self.d

    def __iter__(self) -> Iterator[float]:
        return iter(self.corners)

    def to_dict(self) -> dict[str, float]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> "UnitFuzzyNumber":
        try:
            return cls(float(data["a"]), float(data["b"]), float(data["c"]), float(data["d"]))
        except KeyError as missing:
            raise ValueError(f"fuzzy number object missing corner {missing}") from None


@dataclass(frozen=True)
class Interval:
    """Closed subinterval of [0, 1], the carrier of an alpha-cut."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise ValueError(f"interval must satisfy 0 <= lo <= hi <= 1, got [{self.lo}, {self.hi}]")


def crisp(x: float) -> UnitFuzzyNumber:
    """The fuzzy number representing an exact value in [0, 1]."""
    return UnitFuzzyNumber(x, x, x, x)


def membership(f: UnitFuzzyNumber, x: float) -> float:
    """Degree to which x belongs to f; x must lie in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"membership argument must lie in [0, 1], got {x}")
    if f.b <= x <= f.c:
        return 1.0
    if x < f.a or x > f.d:
        return 0.0
    if x < f.b:
        return (x - f.a) / (f.b - f.a)
    return (f.d - x) / (f.d - f.c)


def _membership_right_limit(f: UnitFuzzyNumber, x: float) -> float:
    # Limit of membership(f, t) as t decreases to x; differs from membership
    # only at jump points of zero-width ramps.
    if x < f.a:
        return 0.0
    if x < f.b:
        return (x - f.a) / (f.b - f.a)
    if x < f.c:
        return 1.0
    if x < f.d:
        return (f.d - x) / (f.d - f.c)
    return 0.0


def _membership_left_limit(f: UnitFuzzyNumber, x: float) -> float:
    if x <= f.a:
        return 0.0
    if x <= f.b:
        return (x - f.a) / (f.b - f.a)
    if x <= f.c:
        return 1.0
    if x <= f.d:
        return (f.d - x) / (f.d - f.c)
    return 0.0


def alpha_cut(f: UnitFuzzyNumber, alpha: float) -> Interval:
    """The interval {x : membership(f, x) >= alpha} for alpha in (0, 1]."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}; use support() for the alpha=0 closure")
    return Interval(f.a + alpha * (f.b - f.a), f.d - alpha * (f.d - f.c))


def support(f: UnitFuzzyNumber) -> Interval:
    """Closure of the region of nonzero membership."""
    return Interval(f.a, f.d)


def core(f: UnitFuzzyNumber) -> Interval:
    """The region of full membership."""
    return Interval(f.b, f.c)


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def mul(f: UnitFuzzyNumber, g: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Fuzzy product, the trapezoid through the support and core cut products."""
    return UnitFuzzyNumber(f.a * g.a, f.b * g.b, f.c * g.c, f.d * g.d)


def add(f: UnitFuzzyNumber, g: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Fuzzy sum, clamped at 1."""
    return UnitFuzzyNumber(
        min(1.0, f.a + g.a), min(1.0, f.b + g.b), min(1.0, f.c + g.c), min(1.0, f.d + g.d)
    )


def sub_bounded(f: UnitFuzzyNumber, g: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Fuzzy difference f - g, clamped at 0."""
    return UnitFuzzyNumber(
        max(0.0, f.a - g.d), max(0.0, f.b - g.c), max(0.0, f.c - g.b), max(0.0, f.d - g.a)
    )


def complement(f: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """The fuzzy number 1 - f; alpha-cuts [lo, hi] map to [1-hi, 1-lo]."""
    return UnitFuzzyNumber(1.0 - f.d, 1.0 - f.c, 1.0 - f.b, 1.0 - f.a)


def fuzzy_min(f: UnitFuzzyNumber, g: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Corner-wise minimum, the conjunctive combination of two values."""
    return UnitFuzzyNumber(min(f.a, g.a), min(f.b, g.b), min(f.c, g.c), min(f.d, g.d))


def fuzzy_max(f: UnitFuzzyNumber, g: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Corner-wise maximum, the disjunctive combination of two values."""
    return UnitFuzzyNumber(max(f.a, g.a), max(f.b, g.b), max(f.c, g.c), max(f.d, g.d))


def median(f: UnitFuzzyNumber) -> float:
    """Core midpoint (b + c) / 2, the representative value of the expression."""
    return (f.b + f.c) / 2.0


def distance(f: UnitFuzzyNumber, g: UnitFuzzyNumber) -> float:
    """L1 distance between membership functions plus the median separation.

    The area term alone is blind to location for zero-width numbers (two
    distinct crisp values have membership differing only on a null set), so
    the absolute median difference is added to keep such pairs separated.
    """
    points = sorted({0.0, 1.0, *f.corners, *g.corners})
    area = 0.0
    for x0, x1 in zip(points, points[1:]):
        if x1 <= x0:
            continue
        d0 = _membership_right_limit(f, x0) - _membership_right_limit(g, x0)
        d1 = _membership_left_limit(f, x1) - _membership_left_limit(g, x1)
        if d0 * d1 >= 0.0:
            area += (abs(d0) + abs(d1)) / 2.0 * (x1 - x0)
        else:
            # linear difference crosses zero inside the segment
            t = d0 / (d0 - d1)
            xc = x0 + t * (x1 - x0)
            area += abs(d0) / 2.0 * (xc - x0) + abs(d1) / 2.0 * (x1 - xc)
    return area + abs(median(f) - median(g))


def intensify(f: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Hedge that halves both ramp widths toward the unchanged core."""
    return UnitFuzzyNumber((f.a + f.b) / 2.0, f.b, f.c, (f.c + f.d) / 2.0)


def dilate(f: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Hedge that doubles both ramp widths, clamped to [0, 1]."""
    return UnitFuzzyNumber(max(0.0, 2.0 * f.a - f.b), f.b, f.c, min(1.0, 2.0 * f.d - f.c))


def hedge(f: UnitFuzzyNumber, kind: str) -> UnitFuzzyNumber:
    """Apply a named hedge, one of ``intensify`` or ``dilate``."""
    if kind == "intensify":
        return intensify(f)
    if kind == "dilate":
        return dilate(f)
    raise ValueError(f"unknown hedge kind {kind!r}, expected 'intensify' or 'dilate'")

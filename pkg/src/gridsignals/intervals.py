"""Closed numeric intervals with the order relations used for cost comparison.

Two orderings coexist here. ``certainly_below`` is the strict order that only
relates disjoint intervals: [a, b] is certainly below [c, d] when b < c, so
every value enclosed by the first lies under every value enclosed by the
second. ``precedes`` is the weaker componentwise order that also relates
overlapping intervals: both endpoints of the first are at most the matching
endpoints of the second and the intervals differ. The two relations satisfy a
bridge law that the controllers rely on: if A is certainly below B, then
anything that precedes (or equals) A is also certainly below B.

Arithmetic is limited to what delay-cost evaluation needs: addition, scaling
by a nonnegative factor, and products of nonnegative intervals. Endpoints are
stored as floats even though the enclosed quantities are integer counts,
because midpoints are half-integers and stay exact at these magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi]. Construction rejects lo > hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"invalid interval: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, x: float) -> "Interval":
        """Degenerate interval [x, x]."""
        return cls(x, x)

    @property
    def center(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def scale(self, k: float) -> "Interval":
        """Scale by a nonnegative factor k."""
        if k < 0:
            raise ValueError(f"negative scale factor: {k}")
        return Interval(k * self.lo, k * self.hi)

    def __mul__(self, other: "Interval") -> "Interval":
        """Endpoint product, defined for nonnegative operands only."""
        if self.lo < 0 or other.lo < 0:
            raise ValueError("interval product requires nonnegative operands")
        return Interval(self.lo * other.lo, self.hi * other.hi)

    def certainly_below(self, other: "Interval") -> bool:
        """Strict order for disjoint intervals: self.hi < other.lo."""
        return self.hi < other.lo

    def precedes(self, other: "Interval") -> bool:
        """Componentwise order for overlapping intervals, strict overall."""
        return self.lo <= other.lo and self.hi <= other.hi and self != other

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Interval({self.lo!r}, {self.hi!r})"

"""Piecewise-linear circle maps and rotation numbers."""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Optional

from src.models.certificate import fraction_text, parse_fraction


@dataclass(frozen=True)
class PLCircleMap:
    """
    A lift of a piecewise-linear circle homeomorphism.

    f(breakpoints[i]) = values[i], affine in between, and f(x + 1) = f(x) + 1.
    Breakpoints lie in [0, 1) in increasing order; values increase strictly
    and values[-1] < values[0] + 1.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __call__(self, x: Fraction) -> Fraction:
        return self.evaluate(x)

    def evaluate(self, x) -> Fraction:
        x = Fraction(x)
        whole = floor(x)
        u = x - whole
        xs, ys = self.breakpoints, self.values
        i = bisect_right(xs, u) - 1
        if i < 0:
            x0, y0, x1, y1 = xs[-1] - 1, ys[-1] - 1, xs[0], ys[0]
        elif i == len(xs) - 1:
            x0, y0, x1, y1 = xs[-1], ys[-1], xs[0] + 1, ys[0] + 1
        else:
            x0, y0, x1, y1 = xs[i], ys[i], xs[i + 1], ys[i + 1]
        return y0 + (y1 - y0) * (u - x0) / (x1 - x0) + whole

    @property
    def size(self) -> int:
        return len(self.breakpoints)

    def points(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.breakpoints, self.values))

    @classmethod
    def from_points(cls, points) -> "PLCircleMap":
        """Build from (x, f(x)) pairs; x values are reduced into [0, 1)."""
        normalized: dict[Fraction, Fraction] = {}
        for x, y in points:
            x, y = Fraction(x), Fraction(y)
            shift = floor(x)
            normalized[x - shift] = y - shift
        ordered = sorted(normalized.items())
        return cls(
            breakpoints=tuple(x for x, _ in ordered),
            values=tuple(y for _, y in ordered),
        )

    @classmethod
    def from_dict(cls, data: dict) -> "PLCircleMap":
        """Parse `{"points": [["0", "1/3"], ...]}` or parallel breakpoint/value lists."""
        if "points" in data:
            pairs = [(parse_fraction(x), parse_fraction(y)) for x, y in data["points"]]
        else:
            pairs = list(
                zip(
                    (parse_fraction(x) for x in data["breakpoints"]),
                    (parse_fraction(y) for y in data["values"]),
                )
            )
        return cls.from_points(pairs)

    def to_dict(self) -> dict:
        return {"points": [[fraction_text(x), fraction_text(y)] for x, y in self.points()]}


@dataclass
class RotationNumber:
    """An exact rational, or a certified enclosure [lower, upper]."""

    lower: Fraction
    upper: Fraction
    method: str = "orbit"
    iterations: int = 0
    certified_width: bool = True

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def exact(self) -> Optional[Fraction]:
        return self.lower if self.is_exact else None

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, value) -> bool:
        return self.lower <= Fraction(value) <= self.upper

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        result = {"method": self.method, "iterations": self.iterations}
        if self.is_exact:
            result["value"] = fraction_text(self.lower)
        else:
            result["interval"] = [fraction_text(self.lower), fraction_text(self.upper)]
            result["certified_width"] = self.certified_width
        return result

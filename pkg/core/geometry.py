"""
Exact planar geometry for PyShatter
Rational points, canonical integer lines and collinearity without floating point
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple, Union

from core.errors import IdenticalPointsError, RationalParseError

Rational = Fraction
RationalLike = Union[int, Fraction, str]

_RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(value: RationalLike) -> Fraction:
    """Parse "p/q", "p" or an exact number into a reduced Fraction"""
    if isinstance(value, bool):
        raise RationalParseError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise RationalParseError(f"Expected a rational string, got {type(value).__name__}: {value!r}")
    match = _RATIONAL_PATTERN.match(value)
    if match is None:
        raise RationalParseError(f"Not a rational: {value!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise RationalParseError(f"Zero denominator in {value!r}")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Point:
    """A point of the rational plane"""
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'x', parse_rational(self.x))
        object.__setattr__(self, 'y', parse_rational(self.y))

    def to_list(self) -> List[str]:
        return [format_rational(self.x), format_rational(self.y)]

    @classmethod
    def from_list(cls, data: Sequence[RationalLike]) -> 'Point':
        if len(data) != 2:
            raise RationalParseError(f"A point needs exactly 2 coordinates, got {len(data)}")
        return cls(parse_rational(data[0]), parse_rational(data[1]))

    def __repr__(self) -> str:
        return f"Point({format_rational(self.x)}, {format_rational(self.y)})"


@dataclass(frozen=True, order=True)
class Line:
    """The locus a*x + b*y = c with coprime integers and a canonical sign"""
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("A line needs (a, b) != (0, 0)")
        divisor = gcd(gcd(self.a, self.b), self.c)
        lead = self.a if self.a != 0 else self.b
        sign = 1 if lead > 0 else -1
        object.__setattr__(self, 'a', sign * self.a // divisor)
        object.__setattr__(self, 'b', sign * self.b // divisor)
        object.__setattr__(self, 'c', sign * self.c // divisor)

    def contains(self, p: Point) -> bool:
        return self.a * p.x + self.b * p.y == self.c

    def is_parallel(self, other: 'Line') -> bool:
        return self.a * other.b - self.b * other.a == 0

    def coeffs(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def to_dict(self) -> dict:
        return {'coeffs': [str(self.a), str(self.b), str(self.c)]}

    @classmethod
    def from_rational(cls, a: Fraction, b: Fraction, c: Fraction) -> 'Line':
        """Clear denominators of a rational equation and canonicalize"""
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        scale = 1
        for value in (a, b, c):
            scale = scale * value.denominator // gcd(scale, value.denominator)
        return cls(int(a * scale), int(b * scale), int(c * scale))


def line_through(p: Point, q: Point) -> Line:
    """The unique line through two distinct points"""
    if p == q:
        raise IdenticalPointsError(f"Cannot span a line with identical points {p!r}")
    a = q.y - p.y
    b = p.x - q.x
    return Line.from_rational(a, b, a * p.x + b * p.y)


def contains(line: Line, p: Point) -> bool:
    return line.contains(p)


def orientation(p: Point, q: Point, r: Point) -> Fraction:
    """Twice the signed area of the triangle pqr"""
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def are_collinear(p: Point, q: Point, r: Point) -> bool:
    # Duplicates give a zero determinant, so they count as collinear.
    return orientation(p, q, r) == 0


@dataclass(frozen=True)
class AffineMap2D:
    """x -> M x + t with rational entries"""
    m11: Fraction
    m12: Fraction
    m21: Fraction
    m22: Fraction
    t1: Fraction = Fraction(0)
    t2: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ('m11', 'm12', 'm21', 'm22', 't1', 't2'):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))

    @property
    def determinant(self) -> Fraction:
        return self.m11 * self.m22 - self.m12 * self.m21

    def is_invertible(self) -> bool:
        return self.determinant != 0

    def apply(self, p: Point) -> Point:
        return Point(self.m11 * p.x + self.m12 * p.y + self.t1,
                     self.m21 * p.x + self.m22 * p.y + self.t2)

    def inverse(self) -> 'AffineMap2D':
        det = self.determinant
        if det == 0:
            raise ValueError("Singular affine map has no inverse")
        i11, i12 = self.m22 / det, -self.m12 / det
        i21, i22 = -self.m21 / det, self.m11 / det
        return AffineMap2D(i11, i12, i21, i22,
                           -(i11 * self.t1 + i12 * self.t2),
                           -(i21 * self.t1 + i22 * self.t2))

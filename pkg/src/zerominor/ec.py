"""Elliptic-curve group arithmetic on general Weierstrass curves

    y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6

over a prime or binary field.  Points carry integer representatives of the
curve's field; the point at infinity is :data:`INFINITY`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ff import BinaryField, FieldSpec, FieldMismatchError, PrimeField

__all__ = ["Point", "INFINITY", "Curve", "InvalidPointError", "count_points"]


class InvalidPointError(ValueError):
    """A point does not lie on the curve it is used with."""


@dataclass(frozen=True, slots=True)
class Point:
    """Affine point (x, y), or the point at infinity when both are None."""

    x: int | None
    y: int | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def projective(self) -> tuple[int, int, int]:
        """Projective coordinates with z in {0, 1}: (x : y : 1), or (0 : 1 : 0) for O."""
        if self.x is None:
            return (0, 1, 0)
        return (self.x, self.y, 1)

    def __repr__(self) -> str:
        return "O" if self.x is None else f"({self.x}, {self.y})"


INFINITY = Point(None, None)


class Curve:
    """A non-singular Weierstrass curve.

    For prime fields the usual short form has a1 = a2 = a3 = 0, but every
    method handles the general equation.
    """

    def __init__(self, field: FieldSpec, a1: int = 0, a2: int = 0, a3: int = 0,
                 a4: int = 0, a6: int = 0):
        for c in (a1, a2, a3, a4, a6):
            if not field.is_canonical(c):
                raise ValueError(f"coefficient {c} is not an element of {field!r}")
        self.field = field
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        if self.discriminant() == 0:
            raise ValueError("singular curve (discriminant is zero)")

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Curve) and self.field == other.field
                and self.coefficients == other.coefficients)

    def __hash__(self) -> int:
        return hash((self.field, self.coefficients))

    def __repr__(self) -> str:
        enc = self.field.encode
        return (f"Curve({self.field!r}, a1={enc(self.a1)}, a2={enc(self.a2)}, "
                f"a3={enc(self.a3)}, a4={enc(self.a4)}, a6={enc(self.a6)})")

    def discriminant(self) -> int:
        f = self.field
        add, mul, n = f.add, f.mul, f.scalar
        a1, a2, a3, a4, a6 = self.coefficients
        b2 = add(mul(a1, a1), mul(n(4), a2))
        b4 = add(mul(a1, a3), mul(n(2), a4))
        b6 = add(mul(a3, a3), mul(n(4), a6))
        b8 = f.sub(
            add(add(mul(mul(a1, a1), a6), mul(n(4), mul(a2, a6))), mul(a2, mul(a3, a3))),
            add(mul(a1, mul(a3, a4)), mul(a4, a4)))
        # -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6
        t1 = f.neg(mul(mul(b2, b2), b8))
        t2 = mul(n(8), mul(b4, mul(b4, b4)))
        t3 = mul(n(27), mul(b6, b6))
        t4 = mul(n(9), mul(b2, mul(b4, b6)))
        return add(f.sub(f.sub(t1, t2), t3), t4)

    # -- membership --------------------------------------------------------
    def lhs_rhs(self, x: int, y: int) -> tuple[int, int]:
        f = self.field
        add, mul = f.add, f.mul
        lhs = add(mul(y, y), mul(y, add(mul(self.a1, x), self.a3)))
        x2 = mul(x, x)
        rhs = add(add(mul(x2, x), mul(self.a2, x2)), add(mul(self.a4, x), self.a6))
        return lhs, rhs

    def validate_point(self, pt: Point) -> bool:
        """True iff pt is O or satisfies the curve equation."""
        if not isinstance(pt, Point):
            raise TypeError(f"expected a Point, got {type(pt).__name__}")
        if pt.is_infinity:
            return True
        if not (self.field.is_canonical(pt.x) and self.field.is_canonical(pt.y)):
            raise FieldMismatchError(f"{pt} has coordinates outside {self.field!r}")
        lhs, rhs = self.lhs_rhs(pt.x, pt.y)
        return lhs == rhs

    def _check(self, *pts: Point) -> None:
        for pt in pts:
            if not self.validate_point(pt):
                raise InvalidPointError(f"{pt} is not on {self!r}")

    # -- group law ---------------------------------------------------------
    def neg(self, pt: Point) -> Point:
        if pt.is_infinity:
            return pt
        f = self.field
        y = f.sub(f.neg(pt.y), f.add(f.mul(self.a1, pt.x), self.a3))
        return Point(pt.x, y)

    def _chord(self, x1: int, y1: int, x2: int, lam: int) -> Point:
        f = self.field
        nu = f.sub(y1, f.mul(lam, x1))
        x3 = f.sub(f.sub(f.add(f.mul(lam, lam), f.mul(self.a1, lam)), self.a2), f.add(x1, x2))
        y3 = f.sub(f.sub(f.neg(f.mul(f.add(lam, self.a1), x3)), nu), self.a3)
        return Point(x3, y3)

    def double(self, pt: Point, check: bool = True) -> Point:
        if check:
            self._check(pt)
        if pt.is_infinity:
            return pt
        f = self.field
        x, y = pt.x, pt.y
        denom = f.add(f.add(f.mul(f.scalar(2), y), f.mul(self.a1, x)), self.a3)
        if denom == 0:
            return INFINITY
        num = f.add(f.add(f.mul(f.scalar(3), f.mul(x, x)), f.mul(f.scalar(2), f.mul(self.a2, x))),
                    f.sub(self.a4, f.mul(self.a1, y)))
        return self._chord(x, y, x, f.div(num, denom))

    def add(self, p1: Point, p2: Point, check: bool = True) -> Point:
        if check:
            self._check(p1, p2)
        if p1.is_infinity:
            return p2
        if p2.is_infinity:
            return p1
        f = self.field
        if p1.x == p2.x:
            if f.add(f.add(p1.y, p2.y), f.add(f.mul(self.a1, p2.x), self.a3)) == 0:
                return INFINITY
            return self.double(p1, check=False)
        lam = f.div(f.sub(p2.y, p1.y), f.sub(p2.x, p1.x))
        return self._chord(p1.x, p1.y, p2.x, lam)

    def scalar_mul(self, pt: Point, n: int) -> Point:
        """n*pt by double-and-add; negative n multiplies the negated point."""
        self._check(pt)
        if n < 0:
            pt, n = self.neg(pt), -n
        result = INFINITY
        addend = pt
        while n:
            if n & 1:
                result = self.add(result, addend, check=False)
            addend = self.double(addend, check=False)
            n >>= 1
        return result

    # -- sampling ----------------------------------------------------------
    def y_solutions(self, x: int) -> list[int]:
        """All y with (x, y) on the curve, in increasing order."""
        f = self.field
        b = f.add(f.mul(self.a1, x), self.a3)
        _, c = self.lhs_rhs(x, 0)  # rhs f(x); equation is y^2 + b*y = c
        if isinstance(f, BinaryField):
            if b == 0:
                return [f.sqrt(c)]
            z = f.solve_quadratic(f.div(c, f.mul(b, b)))
            if z is None:
                return []
            return sorted({f.mul(b, z), f.mul(b, z ^ 1)})
        # odd characteristic: complete the square
        half_b = f.div(b, f.scalar(2))
        d = f.add(c, f.mul(half_b, half_b))
        r = f.sqrt(d)
        if r is None:
            return []
        return sorted({f.sub(r, half_b), f.sub(f.neg(r), half_b)})

    def random_point(self, rng: np.random.Generator) -> Point:
        """Uniform affine point: sample x, solve for y, reject to equalise single-root x."""
        while True:
            x = self.field.random(rng)
            ys = self.y_solutions(x)
            if not ys:
                continue
            if len(ys) == 1:
                if rng.integers(0, 2):
                    return Point(x, ys[0])
                continue
            return Point(x, ys[int(rng.integers(0, 2))])

    def points(self) -> list[Point]:
        """Every affine point (exhaustive; tiny fields only)."""
        return [Point(x, y) for x in range(self.field.order) for y in self.y_solutions(x)]


def count_points(curve: Curve) -> int:
    """#E(F_q) including the point at infinity, by vectorised enumeration of x."""
    f = curve.field
    q = f.order
    if isinstance(f, PrimeField):
        if q >= 1 << 31:
            raise ValueError("brute-force point counting is limited to q < 2^31")
        x = np.arange(q, dtype=np.int64)
        a1, a2, a3, a4, a6 = curve.coefficients
        rhs = (((x + a2) % q * x % q + a4) % q * x % q + a6) % q
        b = (a1 * x + a3) % q
        # (2y + b)^2 = b^2 + 4 rhs
        d = (b * b % q + 4 * rhs) % q
        squares = f.legendre_table()
        per_x = np.where(d == 0, 1, np.where(squares[d], 2, 0))
        return int(per_x.sum()) + 1
    if isinstance(f, BinaryField):
        x = np.arange(q, dtype=np.int64)
        a1, a2, a3, a4, a6 = curve.coefficients
        vmul = f.vmul
        x2 = vmul(x, x)
        rhs = vmul(x2, x) ^ vmul(np.full_like(x, a2), x2) ^ vmul(np.full_like(x, a4), x) ^ a6
        b = vmul(np.full_like(x, a1), x) ^ a3
        binv = f.vinv(b)
        c = vmul(rhs, vmul(binv, binv))
        solvable = f.vtrace(c) == 0
        per_x = np.where(b == 0, 1, np.where(solvable, 2, 0))
        return int(per_x.sum()) + 1
    raise TypeError(f"unsupported field {f!r}")

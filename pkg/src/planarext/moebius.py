"""Projective 2x2 matrices of determinant +-1 acting on the extended reals.

Entries are exact scalars (Fraction or FieldElt).  The action is projective:
M and -M are the same transformation, and `projective_eq` tests that.  The
point at infinity is a first-class value (`INF`), so poles are ordinary
outputs rather than errors.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .scalars import FieldElt, as_float, scalar_from_json, scalar_to_json, sign_of


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("planarext-inf")


INF = _Infinity()


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


class Moebius:
    """A matrix [[a, b], [c, d]] with ad - bc = +-1 after normalization."""

    __slots__ = ("a", "b", "c", "d", "det")

    def __init__(self, a, b, c, d):
        a, b, c, d = (Fraction(v) if isinstance(v, int) else v for v in (a, b, c, d))
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular matrix")
        if det != 1 and det != -1:
            s = _rational_sqrt(abs(Fraction(det))) if isinstance(det, (int, Fraction)) else None
            if s is None:
                raise ValueError(f"determinant {det} cannot be scaled to +-1")
            a, b, c, d = (x / s for x in (a, b, c, d))
            det = 1 if det > 0 else -1
        self.a, self.b, self.c, self.d = a, b, c, d
        self.det = 1 if det == 1 else -1

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls):
        """R = [[0, -1], [1, 0]]."""
        return cls(0, -1, 1, 0)

    @classmethod
    def matching_w(cls):
        """W = [[1, 0], [-1, -1]], the matching-relation matrix."""
        return cls(1, 0, -1, -1)

    @classmethod
    def flip(cls):
        """U = diag(1, -1)."""
        return cls(1, 0, 0, -1)

    @classmethod
    def shift(cls, lam):
        """S: x -> x + lam."""
        return cls(1, lam, 0, 1)

    # -- action -----------------------------------------------------------
    def apply(self, x):
        if x is INF:
            if self.c == 0:
                return INF
            return self.a / self.c
        den = self.c * x + self.d
        if den == 0:
            return INF
        return (self.a * x + self.b) / den

    __call__ = apply

    def pole(self):
        """The x sent to infinity, or INF itself when c = 0."""
        if self.c == 0:
            return INF
        return -self.d / self.c

    def derivative(self, x):
        """d(M.x)/dx = det / (cx + d)^2, exact."""
        den = self.c * x + self.d
        if den == 0:
            raise ZeroDivisionError("derivative at the pole")
        return self.det / (den * den)

    # -- group operations ---------------------------------------------------
    def compose(self, other: "Moebius") -> "Moebius":
        """self o other, i.e. the matrix product self * other."""
        return Moebius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    __mul__ = compose

    def invert(self) -> "Moebius":
        # adjugate over det; keeps entries exact and det in {1, -1}
        if self.det == 1:
            return Moebius(self.d, -self.b, -self.c, self.a)
        return Moebius(-self.d, self.b, self.c, -self.a)

    def transpose(self) -> "Moebius":
        return Moebius(self.a, self.c, self.b, self.d)

    def conjugate_by_r(self) -> "Moebius":
        """R M R^{-1} with R = [[0, -1], [1, 0]]; equals [[d, -c], [-b, a]]."""
        return Moebius(self.d, -self.c, -self.b, self.a)

    def power(self, k: int) -> "Moebius":
        m = self if k >= 0 else self.invert()
        k = abs(k)
        out = Moebius.identity()
        while k:
            if k & 1:
                out = m * out
            m = m * m
            k >>= 1
        return out

    def trace(self):
        return self.a + self.d

    # -- predicates ---------------------------------------------------------
    def projective_eq(self, other: "Moebius") -> bool:
        s, o = self, other
        if s.a == o.a and s.b == o.b and s.c == o.c and s.d == o.d:
            return True
        return s.a == -o.a and s.b == -o.b and s.c == -o.c and s.d == -o.d

    def is_identity(self) -> bool:
        return self.projective_eq(Moebius.identity())

    # -- return times ---------------------------------------------------------
    def tau(self, x) -> float:
        """2 ln|cx + d| at the enclosure midpoint; representative independent."""
        den = self.c * x + self.d
        if den == 0:
            raise ZeroDivisionError("tau at the pole of the transformation")
        return 2.0 * math.log(abs(as_float(den)))

    def return_time(self, x) -> float:
        """Geodesic return time 2 ln(1/|cx+d|) = -tau.

        This is the time t0 for which M * A(x,y) * g_{t0} recovers the lifted
        image frame, and it equals the Rohlin integrand ln|T'(x)| when M is
        the digit matrix acting at x.
        """
        return -self.tau(x)

    # -- misc ---------------------------------------------------------------
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def key(self):
        """Canonical projective key, usable for hashing/grouping."""
        e = self.entries()
        for v in e:
            s = sign_of(v) if isinstance(v, FieldElt) else (1 if v > 0 else (-1 if v < 0 else 0))
            if s > 0:
                return tuple(e)
            if s < 0:
                return tuple(-x for x in e)
        raise AssertionError("zero matrix")

    def __eq__(self, other):
        if not isinstance(other, Moebius):
            return NotImplemented
        return self.projective_eq(other)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"

    def to_json(self):
        return [scalar_to_json(v) for v in self.entries()]

    @classmethod
    def from_json(cls, obj):
        return cls(*(scalar_from_json(v) for v in obj))


def interval_image(m: Moebius, lo, hi):
    """Image endpoints of [lo, hi] under m, sorted; raises if the pole is inside.

    Endpoints may be INF.  A Moebius map is monotone on any interval avoiding
    its pole, so the image is the (possibly flipped) endpoint interval.
    """
    p = m.pole()
    if p is not INF and lo is not INF and hi is not INF and lo < p < hi:
        raise ValueError(f"pole {p} inside interval [{lo}, {hi}]")
    u, v = m.apply(lo), m.apply(hi)
    if u is INF or v is INF:
        return (u, v)
    if u > v:
        u, v = v, u
    return (u, v)

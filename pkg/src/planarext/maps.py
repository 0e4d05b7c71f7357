"""Piecewise Moebius interval maps: the alpha-continued-fraction family, the
triangle-group family T_{n,alpha}, and the accelerated first-return map of the
alpha = 1 triangle maps.

All arithmetic on orbits, digits and cylinder endpoints is exact.  Cylinder
partitions are infinite (digits accumulate at poles), so enumeration is done
by an exact left-to-right walker that records any unresolved slivers near
accumulation points instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .moebius import INF, Moebius, interval_image
from .scalars import floor_of, nu, sign_of


@dataclass(frozen=True)
class Digit:
    label: tuple
    matrix: Moebius

    def __repr__(self):
        return f"Digit{self.label}"


@dataclass(frozen=True)
class OrbitPoint:
    value: object
    digit: Digit | None  # digit applied at this point; None when the orbit stops
    index: int


def _ceil_of(x):
    return -floor_of(-x)


class PiecewiseMoebiusMap:
    """Shared walker/orbit machinery; subclasses provide digits and cylinders."""

    # subclasses set: l0, r0, family (str)

    def interval(self):
        return (self.l0, self.r0)

    def length(self):
        return self.r0 - self.l0

    def contains(self, x, closure=True):
        if closure:
            return self.l0 <= x <= self.r0
        return self.l0 <= x < self.r0

    # -- to be provided by subclasses --------------------------------------
    def digit(self, x) -> Digit | None:
        raise NotImplementedError

    def cylinder(self, label):
        """Closure endpoints (lo, hi) of the cylinder with this digit label."""
        raise NotImplementedError

    # -- generic operations -------------------------------------------------
    def step(self, x):
        d = self.digit(x)
        if d is None:
            return None, None
        return d.matrix.apply(x), d

    def orbit(self, x, n: int) -> list[OrbitPoint]:
        """Exact orbit of x, at most n steps, stopping at terminal points."""
        if not self.contains(x):
            raise ValueError(f"{x} outside the interval of definition")
        out = []
        for i in range(n):
            d = self.digit(x)
            out.append(OrbitPoint(x, d, i))
            if d is None:
                return out
            x = d.matrix.apply(x)
        out.append(OrbitPoint(x, None, n))
        return out

    def orbit_values(self, x, n: int):
        return [p.value for p in self.orbit(x, n)]

    def derivative(self, x):
        d = self.digit(x)
        if d is None:
            raise ValueError(f"no digit at {x}")
        return d.matrix.derivative(x)

    def is_full(self, label) -> bool:
        lo, hi = self.cylinder(label)
        m = self.matrix_of(label)
        u, v = interval_image(m, lo, hi)
        return u == self.l0 and v == self.r0

    def matrix_of(self, label) -> Moebius:
        raise NotImplementedError

    def rank_cylinder(self, labels):
        """Closure endpoints of the rank-m cylinder of a digit word."""
        lo, hi = self.cylinder(labels[0])
        word = self.matrix_of(labels[0])
        for lab in labels[1:]:
            clo, chi = self.cylinder(lab)
            inv = word.invert()
            plo, phi = interval_image(inv, clo, chi)
            lo, hi = max(lo, plo), min(hi, phi)
            if lo >= hi:
                raise ValueError(f"word {labels} is not admissible (empty cylinder)")
            word = self.matrix_of(lab) * word
        return lo, hi

    def word_matrix(self, labels) -> Moebius:
        m = Moebius.identity()
        for lab in labels:
            m = self.matrix_of(lab) * m
        return m

    # -- exact cylinder walker ----------------------------------------------
    def cylinder_pieces(self, lo, hi, width_floor=Fraction(1, 10**7), max_pieces=100000):
        """Partition [lo, hi] into cylinder pieces by exact walking.

        Returns (pieces, leftovers) where pieces is a list of
        (Digit, piece_lo, piece_hi) and leftovers is a list of unresolved
        x-intervals: slivers of width <= width_floor next to digit
        accumulation points (and terminal points), plus anything past the
        max_pieces budget.
        """
        pieces, leftovers = [], []

        def add_leftover(a, b):
            if leftovers and leftovers[-1][1] == a:
                leftovers[-1] = (leftovers[-1][0], b)
            else:
                leftovers.append((a, b))

        x = lo
        while x < hi and len(pieces) < max_pieces:
            nxt = self._next_piece(x, hi, width_floor)
            if nxt is None:
                step_to = min(x + width_floor, hi)
                add_leftover(x, step_to)
                x = step_to
                continue
            d, clo, chi = nxt
            pieces.append((d, max(clo, x), min(chi, hi)))
            x = min(chi, hi)
        if x < hi:
            add_leftover(x, hi)
        return pieces, leftovers

    def _next_piece(self, x, hi, width_floor):
        # find the cylinder covering points just right of x; bisect the probe
        # point toward x until the cylinder's left end reaches x
        span = hi - x
        for _ in range(64):
            probe = x + span / 2
            d = self.digit(probe)
            if d is not None:
                clo, chi = self.cylinder(d.label)
                if clo <= x and chi > x:
                    return d, clo, chi
                if chi - x <= width_floor and clo <= x:
                    return d, clo, chi
            span = span / 2
            if span < width_floor:
                return None
        return None


# ---------------------------------------------------------------------------


class NakadaMap(PiecewiseMoebiusMap):
    """T(x) = |1/x| - floor(|1/x| + 1 - alpha) on [alpha-1, alpha)."""

    family = "nakada"

    def __init__(self, alpha):
        alpha = Fraction(alpha) if isinstance(alpha, (int, Fraction)) else alpha
        if not (0 < alpha <= 1):
            raise ValueError(f"alpha must be in (0, 1], got {alpha}")
        self.alpha = alpha
        self.l0 = alpha - 1
        self.r0 = alpha

    def __repr__(self):
        return f"NakadaMap(alpha={self.alpha})"

    def digit_of_alpha(self) -> int:
        """First digit index of the right endpoint."""
        return floor_of(1 / self.alpha + 1 - self.alpha)

    def digit(self, x) -> Digit | None:
        if x == 0:
            return None  # exceptional cylinder: the orbit stops at 0
        eps = 1 if x > 0 else -1
        d = floor_of(abs(1 / x) + 1 - self.alpha)
        return Digit((eps, d), self.matrix_of((eps, d)))

    def matrix_of(self, label) -> Moebius:
        eps, d = label
        return Moebius(-d, eps, 1, 0)

    def n_matrix(self, label) -> Moebius:
        eps, d = label
        return Moebius(0, 1, eps, d)

    def cylinder(self, label):
        eps, d = label
        a = self.alpha
        if eps == 1:
            lo, hi = 1 / (d + a), 1 / (d - 1 + a)
            lo, hi = max(lo, Fraction(0)), min(hi, self.r0)
        else:
            lo, hi = -1 / (d - 1 + a), -1 / (d + a)
            lo, hi = max(lo, self.l0), min(hi, Fraction(0))
        if lo >= hi:
            raise ValueError(f"digit {label} not admissible for alpha={a}")
        return lo, hi


class CKSMap(PiecewiseMoebiusMap):
    """T(x) = A^k C^l . x on [(alpha-1) t, alpha t), t = 1 + 2 cos(pi/n).

    l in {1, 2} is minimal with C^l x outside the interval, and k the unique
    integer pulling it back in.  For alpha = 1 the operative interval is
    (0, t] (right closed): that convention makes the endpoint orbit
    t -> 1 -> t exact, matching the periodic right-endpoint dynamics.
    """

    family = "cks"

    def __init__(self, n: int, alpha):
        if n < 3:
            raise ValueError(f"n must be >= 3, got {n}")
        alpha = Fraction(alpha) if isinstance(alpha, (int, Fraction)) else alpha
        if not (0 <= alpha <= 1):
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        self.n = n
        self.alpha = alpha
        self.t = 1 + nu(n)
        self.l0 = (alpha - 1) * self.t
        self.r0 = alpha * self.t
        self.closed_right = alpha == 1
        self.gen_a = Moebius(1, self.t, 0, 1)
        self.gen_c = Moebius(-1, 1, -1, 0)
        self._c_pows = {1: self.gen_c, 2: self.gen_c * self.gen_c}

    def __repr__(self):
        return f"CKSMap(n={self.n}, alpha={self.alpha})"

    def contains(self, x, closure=True):
        if closure:
            return self.l0 <= x <= self.r0
        if self.closed_right:
            return self.l0 < x <= self.r0
        return self.l0 <= x < self.r0

    def _in_interval(self, y) -> bool:
        if y is INF:
            return False
        if self.closed_right:
            return self.l0 < y <= self.r0
        return self.l0 <= y < self.r0

    def digit(self, x) -> Digit | None:
        for l in (1, 2):
            y = self._c_pows[l].apply(x)
            if self._in_interval(y):
                continue
            if y is INF:
                return None  # pole of C^l: exceptional point, orbit stops
            if self.closed_right:
                k = floor_of((self.r0 - y) / self.t)
            else:
                k = _ceil_of((self.l0 - y) / self.t)
            return Digit((k, l), self.matrix_of((k, l)))
        raise AssertionError(f"no digit at {x}: C x and C^2 x both inside")

    def matrix_of(self, label) -> Moebius:
        k, l = label
        ak = Moebius(1, k * self.t, 0, 1)
        return ak * self._c_pows[l]

    def _preimage_in_interval(self, m: Moebius, w0, w1):
        """{x in I : m.x in [w0, w1]} as a list of intervals (exact).

        Splits I at the preimages of the window endpoints and at the pole of
        m, then keeps the segments whose midpoints land in the window; the
        preimage may wrap through infinity, which this handles uniformly.
        """
        cuts = {self.l0, self.r0}
        inv = m.invert()
        for w in (w0, w1):
            p = inv.apply(w)
            if p is not INF and self.l0 < p < self.r0:
                cuts.add(p)
        pole = m.pole()
        if pole is not INF and self.l0 < pole < self.r0:
            cuts.add(pole)
        pts = sorted(cuts)
        out = []
        for lo, hi in zip(pts, pts[1:]):
            val = m.apply((lo + hi) / 2)
            if val is not INF and w0 <= val <= w1:
                if out and out[-1][1] == lo:
                    out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
        return out

    def cylinder(self, label):
        k, l = label
        cl = self._c_pows[l]
        w0, w1 = self.l0 - k * self.t, self.r0 - k * self.t
        pieces = self._preimage_in_interval(cl, w0, w1)
        if l == 2:
            # minimality: C x must stay inside the interval
            keep = []
            for lo, hi in pieces:
                for lo2, hi2 in self._preimage_in_interval(self.gen_c, self.l0, self.r0):
                    a, b = max(lo, lo2), min(hi, hi2)
                    if a < b:
                        keep.append((a, b))
            pieces = keep
        else:
            # drop the parts where C x is still inside (l would not be 1 there)
            keep = []
            inside = self._preimage_in_interval(self.gen_c, self.l0, self.r0)
            for lo, hi in pieces:
                cuts = [(lo, hi)]
                for ilo, ihi in inside:
                    nxt = []
                    for a, b in cuts:
                        if ihi <= a or b <= ilo:
                            nxt.append((a, b))
                        else:
                            if a < ilo:
                                nxt.append((a, ilo))
                            if ihi < b:
                                nxt.append((ihi, b))
                    cuts = nxt
                keep.extend(cuts)
            pieces = keep
        pieces = [p for p in pieces if p[0] < p[1]]
        if not pieces:
            raise ValueError(f"digit {label} not admissible for alpha={self.alpha}")
        if len(pieces) > 1:
            raise ValueError(f"digit {label} has a disconnected cylinder: {pieces}")
        return pieces[0]


class AcceleratedCKSMap(PiecewiseMoebiusMap):
    """First return of T_{n,1} to (0, eps0), eps0 = U^{-1}.0, U = AC(AC^2)^{n-2}.

    g(x) = U^j T(x) with j >= 0 minimal such that the image leaves the
    parabolic tail; digit labels are ((k, l), j) with composed matrices.
    """

    family = "cks-accel"

    def __init__(self, n: int):
        self.n = n
        self.base = CKSMap(n, 1)
        t = self.base.t
        ac = self.base.matrix_of((1, 1))
        ac2 = self.base.matrix_of((1, 2))
        self.u_mat = ac * ac2.power(n - 2)
        self.eps0 = self.u_mat.invert().apply(Fraction(0))
        self.l0 = Fraction(0)
        self.r0 = self.eps0
        self.closed_right = True
        # window boundaries p_j = U^{-j}.0 increase from eps0 toward t
        self._p = [Fraction(0), self.eps0]

    def __repr__(self):
        return f"AcceleratedCKSMap(n={self.n})"

    def contains(self, x, closure=True):
        if closure:
            return 0 <= x <= self.r0
        return 0 < x <= self.r0

    def _p_j(self, j):
        uinv = self.u_mat.invert()
        while len(self._p) <= j:
            self._p.append(uinv.apply(self._p[-1]))
        return self._p[j]

    def digit(self, x) -> Digit | None:
        d = self.base.digit(x)
        if d is None:
            return None
        y = d.matrix.apply(x)
        if y == self.base.t:
            return None  # lands on the parabolic fixed point: never returns
        j = 0
        m = d.matrix
        while not (0 < y <= self.eps0):
            y = self.u_mat.apply(y)
            m = self.u_mat * m
            j += 1
            if j > 10000:
                raise RuntimeError("runaway return time")
        return Digit((d.label, j), m)

    def matrix_of(self, label) -> Moebius:
        base_label, j = label
        return self.u_mat.power(j) * self.base.matrix_of(base_label)

    def cylinder(self, label):
        base_label, j = label
        blo, bhi = self.base.cylinder(base_label)
        lo, hi = max(blo, Fraction(0)), min(bhi, self.eps0)
        if lo >= hi:
            raise ValueError(f"digit {label} not admissible (outside return domain)")
        m = self.base.matrix_of(base_label)
        w0, w1 = (self._p_j(j), self._p_j(j + 1)) if j > 0 else (Fraction(0), self.eps0)
        inv = m.invert()
        u, v = inv.apply(w0), inv.apply(w1)
        if u is INF or v is INF:
            raise ValueError(f"window preimage through infinity for {label}")
        if u > v:
            u, v = v, u
        lo, hi = max(lo, u), min(hi, v)
        if lo >= hi:
            raise ValueError(f"digit {label} not admissible for the accelerated map")
        return lo, hi


def make_map(family: str, alpha=None, n=None) -> PiecewiseMoebiusMap:
    if family == "nakada":
        return NakadaMap(alpha)
    if family == "cks":
        return CKSMap(n, alpha)
    if family == "cks-accel":
        return AcceleratedCKSMap(n)
    raise ValueError(f"unknown family {family!r}")

import math
import random
from fractions import Fraction as F

import mpmath
import pytest

from planarext.moebius import Moebius
from planarext.regions import (
    Cell,
    Region,
    cell_image,
    mu_box,
    mu_box_arg,
    region_image,
    z_conjugate,
    z_fiber,
)


def quad_oracle(x0, x1, y0, y1, dps=30):
    with mpmath.workdps(dps):
        val = mpmath.quad(
            lambda x: mpmath.quad(lambda y: (1 + x * y) ** -2, [float(y0), float(y1)]),
            [float(x0), float(x1)],
        )
        return float(val)


def random_polefree_box(rng):
    while True:
        x0 = F(rng.randint(-300, 300), 100)
        x1 = x0 + F(rng.randint(1, 150), 100)
        y0 = F(rng.randint(-300, 300), 100)
        y1 = y0 + F(rng.randint(1, 150), 100)
        corners = [1 + x * y for x in (x0, x1) for y in (y0, y1)]
        if all(c > F(1, 20) for c in corners) or all(c < -F(1, 20) for c in corners):
            return x0, x1, y0, y1


class TestMuBox:
    def test_unit_square_is_ln2_exactly(self):
        assert mu_box_arg(0, 1, 0, 1) == 2
        assert mu_box(0, 1, 0, 1) == math.log(2)

    def test_corner_on_hyperbola_is_infinite(self):
        assert mu_box(0, 1, -1, 0) == math.inf

    def test_degenerate_box(self):
        assert mu_box(F(0), F(1), F(0), F(0)) == 0.0

    def test_crossing_box_raises(self):
        with pytest.raises(ValueError):
            mu_box(F(1), F(2), F(-2), F(0))

    def test_against_quadrature(self):
        rng = random.Random(42)
        for _ in range(60):         # the full-scale 10^3 sweep runs in acceptance
            box = random_polefree_box(rng)
            v = mu_box(*box)
            assert math.isclose(v, quad_oracle(*box), rel_tol=1e-8, abs_tol=1e-12)


class TestRegionAlgebra:
    def test_unit_square_mass(self):
        r = Region.box(F(0), F(1), F(0), F(1))
        assert r.mass() == pytest.approx(math.log(2), rel=1e-15)
        assert r.mass_arg() == 2

    def test_fiber_mass_gauss_density(self):
        r = Region.box(F(0), F(1), F(0), F(1))
        for xq in (F(1, 7), F(2, 5), F(9, 10)):
            assert r.fiber_mass(xq) == 1 / (1 + xq)

    def test_fiber_of_empty_region(self):
        assert Region.empty().fiber(F(1, 2)) == []

    def test_difference_example(self):
        a = Region.box(F(0), F(1), F(0), F(1))
        b = Region.box(F(0), F(1), F(0), F(1, 2))
        d = a.subtract(b)
        assert len(d.cells) == 1
        assert d.cells[0].ys == ((F(1, 2), F(1)),)

    def test_symmetric_difference_self_is_empty(self):
        a = Region.box(F(0), F(1), F(0), F(1))
        assert a.symmetric_difference(a).is_empty()
        assert a.symmetric_difference_mass(a) == 0.0

    def test_mass_additivity_random_disjoint(self):
        rng = random.Random(9)
        for _ in range(100):
            x0, x1, y0, y1 = random_polefree_box(rng)
            ym = (y0 + y1) / 2
            lower = Region.box(x0, x1, y0, ym)
            upper = Region.box(x0, x1, ym, y1)
            both = lower.union(upper)
            assert math.isclose(
                both.mass(), mu_box(x0, x1, y0, y1), rel_tol=1e-12, abs_tol=1e-14
            )

    def test_normalization_merges_x_slabs(self):
        r = Region(
            [
                Cell(F(0), F(1, 2), ((F(0), F(1)),)),
                Cell(F(1, 2), F(1), ((F(0), F(1)),)),
            ]
        )
        assert len(r.cells) == 1

    def test_json_roundtrip(self):
        r = Region(
            [
                Cell(F(0), F(1, 3), ((F(0), F(1, 4)), (F(1, 2), F(1)))),
                Cell(F(1, 3), F(1), ((F(0), F(1)),)),
            ],
            tail=1e-9,
        )
        back = Region.from_json(r.to_json())
        assert back == r and back.tail == r.tail


class TestCellImage:
    def test_identity(self):
        c = Cell(F(1, 3), F(1, 2), ((F(0), F(1)),))
        assert cell_image(Moebius.identity(), c) == c

    def test_mass_preserved_exactly_random(self):
        rng = random.Random(31)
        digits = [Moebius(-d, e, 1, 0) for d in range(1, 8) for e in (1, -1)]
        checked = 0
        while checked < 1000:
            m = rng.choice(digits)
            x0, x1, y0, y1 = random_polefree_box(rng)
            c = Cell(x0, x1, ((y0, y1),))
            try:
                img = cell_image(m, c)
                q0 = mu_box_arg(c.x0, c.x1, y0, y1)
                q1 = mu_box_arg(img.x0, img.x1, *img.ys[0])
            except (ValueError, ZeroDivisionError):
                continue
            if q0 is None or q1 is None or q0 <= 0 or q1 <= 0:
                continue
            assert q1 == q0 or q1 == 1 / q0  # exact closed-form invariance
            checked += 1

    def test_pole_inside_reports(self):
        m = Moebius(-2, 1, 1, 0)  # pole at x = 0
        c = Cell(F(-1, 2), F(1, 2), ((F(0), F(1)),))
        with pytest.raises(ValueError):
            cell_image(m, c)

    def test_cks_n5_block_identity(self):
        # the alpha=1 staircase block over [1 + 1/t, r_{n-3}] lands on
        # (0, 1] x [-1, -1/t] after one step of the rightmost full branch
        from planarext.maps import CKSMap

        T = CKSMap(5, 1)
        t = T.t
        r = T.orbit_values(t, 4)  # r0=t, r1, r2, r3=1 (n-2 = 3 steps to 1)
        ac2 = T.matrix_of((1, 2))
        src = Cell(1 + 1 / t, r[2], ((-1 / r[2], F(0)),))
        img = cell_image(ac2, src)
        assert img.x0 == 0 and img.x1 == 1
        assert img.ys == ((-1, -1 / t),)


class TestZConjugate:
    def test_fixes_y_zero(self):
        assert z_fiber(F(1, 3), [(F(0), F(0))]) == [(F(0), F(0))]

    def test_area_matches_mass(self):
        r = Region.box(F(0), F(1), F(0), F(1))
        outer = z_conjugate(r, slabs=200, side="outer")
        inner = z_conjugate(r, slabs=200, side="inner")
        m = r.mass()
        assert inner.lebesgue_area() <= m + 1e-12 <= outer.lebesgue_area() + 1e-9
        assert outer.lebesgue_area() - inner.lebesgue_area() < 0.02

    def test_enclosure_monotone(self):
        r = Region.box(F(0), F(1), F(1, 4), F(1, 2))
        outer = z_conjugate(r, slabs=16, side="outer")
        inner = z_conjugate(r, slabs=16, side="inner")
        assert outer.contains_region(inner, slack=1e-12)

    def test_rejects_hyperbola(self):
        r = Region.box(F(1, 2), F(2), F(-1), F(-1, 2))
        with pytest.raises(ValueError):
            z_conjugate(r, slabs=4)

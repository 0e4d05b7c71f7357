import math
import random
from fractions import Fraction as F

import mpmath
import pytest

from planarext.scalars import (
    FieldElt,
    minimal_polynomial,
    nu,
    sign_of,
    floor_of,
    enclosure_of,
    scalar_to_json,
    scalar_from_json,
    parse_exact,
)


def poly_eval(coeffs, x):
    acc = mpmath.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
    return acc


def test_minimal_polynomial_small_n():
    assert minimal_polynomial(3) == (F(-1), F(1))          # x - 1
    assert minimal_polynomial(4) == (F(-2), F(0), F(1))    # x^2 - 2
    # frozen from the Chebyshev-factorization oracle below: x^2 - x - 1
    assert minimal_polynomial(5) == (F(-1), F(-1), F(1))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8, 9, 10, 12])
def test_minimal_polynomial_root_oracle(n):
    # oracle: psi_n(2 cos(pi/n)) must vanish to high precision
    with mpmath.workprec(200):
        root = 2 * mpmath.cos(mpmath.pi / n)
        val = poly_eval(minimal_polynomial(n), root)
        assert abs(val) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("n,deg", [(3, 1), (4, 2), (5, 2), (6, 2), (7, 3), (9, 3), (12, 4)])
def test_minimal_polynomial_degree(n, deg):
    # degree = phi(2n)/2
    assert len(minimal_polynomial(n)) - 1 == deg


def test_minimal_polynomial_rejects_small_n():
    with pytest.raises(ValueError):
        minimal_polynomial(2)


def test_sign_examples():
    assert sign_of(F(8, 5)) == 1
    assert sign_of(nu(3) - 1) == 0          # 2cos(pi/3) = 1, demoted to 0
    v5 = nu(5)
    assert sign_of(v5 * v5 - v5 - 1) == 0   # minimal polynomial of golden ratio


def test_field_arithmetic_demotes_rationals():
    v = nu(5)
    w = v * v - v   # = 1 by the minimal polynomial
    assert isinstance(w, F) and w == 1
    assert isinstance(v + (1 - v), F)


def test_field_inverse_and_division():
    v = nu(5)  # golden ratio
    inv = 1 / v
    assert v * inv == 1
    t = 1 + nu(7)
    assert t * (1 / t) == 1
    x = (3 * nu(7) ** 2 - nu(7) + F(1, 3)) / (nu(7) + 2)
    assert x * (nu(7) + 2) == 3 * nu(7) ** 2 - nu(7) + F(1, 3)


def test_comparisons_and_floor():
    v4 = nu(4)  # sqrt(2)
    assert F(1) < v4 < F(3, 2)
    assert floor_of(v4) == 1
    assert floor_of(-v4) == -2
    assert floor_of(10 * v4) == 14
    assert floor_of(F(7, 2)) == 3


def test_enclosure_soundness_random():
    rng = random.Random(7)
    with mpmath.workprec(220):
        for n in (4, 5, 7):
            root = 2 * mpmath.cos(mpmath.pi / n)
            deg = len(minimal_polynomial(n)) - 1
            for _ in range(25):
                coeffs = [F(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(deg)]
                e = FieldElt(n, coeffs)
                if isinstance(e, F):
                    continue
                lo, hi = enclosure_of(e, F(1, 10**30))
                assert hi - lo <= F(1, 10**30)
                true = poly_eval([F(c) for c in e.co], root)
                assert mpmath.mpf(lo.numerator) / lo.denominator <= true
                assert true <= mpmath.mpf(hi.numerator) / hi.denominator


def test_cross_field_mixing_is_an_error():
    with pytest.raises(ValueError):
        nu(5) + nu(7)


def test_serialization_roundtrip():
    for x in (F(22, 7), nu(5) + F(1, 2), 3 * nu(7) ** 2 - 1):
        back = scalar_from_json(scalar_to_json(x))
        assert back == x


def test_parse_exact():
    assert parse_exact("39/100") == F(39, 100)
    assert parse_exact("-61/100") == F(-61, 100)
    v = parse_exact("nu(5):1/2,1")
    assert v == nu(5) + F(1, 2)
    with pytest.raises(ValueError):
        parse_exact("0.39")

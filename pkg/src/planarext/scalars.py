"""Exact scalars: rationals and elements of the real fields Q(2 cos(pi/n)).

A scalar is either a ``fractions.Fraction`` or a :class:`FieldElt`, an element
of Q(nu) with nu = 2 cos(pi/n) represented by a coefficient vector reduced
modulo the minimal polynomial of nu.  Arithmetic demotes field elements with
no nu-part back to plain Fractions, so representations are canonical and
``==`` / ``hash`` behave like value equality.

Signs, comparisons and floors of field elements are decided by refining an
exact rational enclosure of nu (computed once per precision via mpmath and
padded by a couple of ulps) until the answer is unambiguous; the zero test is
structural, so refinement always terminates.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

import mpmath

Rat = Fraction

__all__ = [
    "Rat",
    "FieldElt",
    "RealField",
    "minimal_polynomial",
    "nu",
    "sign_of",
    "floor_of",
    "as_float",
    "enclosure_of",
    "scalar_to_json",
    "scalar_from_json",
    "parse_exact",
]


@lru_cache(maxsize=None)
def _cyclotomic(m: int) -> tuple[int, ...]:
    """Integer coefficients (ascending) of the m-th cyclotomic polynomial."""
    if m == 1:
        return (-1, 1)
    # divide x^m - 1 by the cyclotomic polynomials of the proper divisors
    num = [0] * (m + 1)
    num[0], num[m] = -1, 1
    for d in range(1, m):
        if m % d:
            continue
        q = _cyclotomic(d)
        # exact polynomial division, quotient replaces num
        out = [0] * (len(num) - len(q) + 1)
        rem = list(num)
        for i in range(len(out) - 1, -1, -1):
            c = rem[i + len(q) - 1]
            out[i] = c
            if c:
                for j, qj in enumerate(q):
                    rem[i + j] -= c * qj
        assert not any(rem[: len(q) - 1]), "cyclotomic division not exact"
        num = out
    return tuple(num)


@lru_cache(maxsize=None)
def minimal_polynomial(n: int) -> tuple[Fraction, ...]:
    """Monic minimal polynomial of 2 cos(pi/n) over Q, ascending coefficients.

    Degree is phi(2n)/2.  Obtained by folding the palindromic cyclotomic
    polynomial of order 2n through z^k + z^-k = V_k(z + 1/z), the Vieta
    (Dickson) polynomials.
    """
    if n < 3:
        raise ValueError(f"field index must be >= 3, got {n}")
    phi = _cyclotomic(2 * n)
    deg = (len(phi) - 1) // 2
    # phi is palindromic of even degree 2*deg; write as sum a_k (z^k + z^-k)
    # with the constant counted once, then substitute V_k(x).
    vk = [[2], [0, 1]]  # V_0 = 2, V_1 = x, V_{k+1} = x V_k - V_{k-1}
    for _ in range(2, deg + 1):
        prev, cur = vk[-2], vk[-1]
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        vk.append(nxt)
    out = [0] * (deg + 1)
    for k in range(1, deg + 1):
        a = phi[deg + k]
        for i, c in enumerate(vk[k]):
            out[i] += a * c
    out[0] += phi[deg]  # the z^0 term contributes once, not via V_0 = 2
    coeffs = [Fraction(c) for c in out]
    lead = coeffs[deg]
    return tuple(c / lead for c in coeffs)


class RealField:
    """The field Q(nu_n), nu_n = 2 cos(pi/n), with cached nu enclosures."""

    _registry: dict[int, "RealField"] = {}

    def __new__(cls, n: int):
        if n in cls._registry:
            return cls._registry[n]
        self = super().__new__(cls)
        self.n = n
        self.minpoly = minimal_polynomial(n)
        self.degree = len(self.minpoly) - 1
        self._enclosures = {}
        cls._registry[n] = self
        return self

    def __repr__(self):
        return f"RealField(n={self.n})"

    def nu_enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational interval certainly containing 2 cos(pi/n)."""
        enc = self._enclosures.get(bits)
        if enc is None:
            with mpmath.workprec(bits + 8):
                v = 2 * mpmath.cos(mpmath.pi / self.n)
            sign, man, exp, _ = v._mpf_
            man, exp = int(man), int(exp)
            mid = Fraction(-man if sign else man, 1) * Fraction(2) ** exp
            pad = Fraction(1, 2**bits)
            enc = (mid - pad, mid + pad)
            self._enclosures[bits] = enc
        return enc

    def reduce(self, coeffs: list[Fraction]) -> list[Fraction]:
        """Reduce a coefficient list modulo the minimal polynomial."""
        co = list(coeffs)
        mp = self.minpoly
        d = self.degree
        for i in range(len(co) - 1, d - 1, -1):
            c = co[i]
            if c:
                for j in range(d + 1):
                    co[i - d + j] -= c * mp[j]
        del co[d:]
        while len(co) < d:
            co.append(Fraction(0))
        return co


def _demote(field: RealField, co: list[Fraction]):
    if any(co[1:]):
        e = object.__new__(FieldElt)
        e.field = field
        e.co = tuple(co)
        return e
    return co[0]


class FieldElt:
    """Element of Q(nu_n) as a reduced coefficient vector in powers of nu."""

    __slots__ = ("field", "co")

    def __init__(self, n: int, coeffs):
        self.field = RealField(n)
        co = [Fraction(c) for c in coeffs]
        if len(co) > self.field.degree:
            co = self.field.reduce(co)
        while len(co) < self.field.degree:
            co.append(Fraction(0))
        self.co = tuple(co)

    # -- coercion -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElt):
            if other.field is not self.field:
                raise ValueError(
                    f"cannot mix Q(nu_{self.field.n}) and Q(nu_{other.field.n})"
                )
            return other.co
        if isinstance(other, (int, Fraction)):
            return (Fraction(other),) + (Fraction(0),) * (self.field.degree - 1)
        return None

    # -- ring operations ------------------------------------------------
    def __add__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return _demote(self.field, [a + b for a, b in zip(self.co, oc)])

    __radd__ = __add__

    def __neg__(self):
        return _demote(self.field, [-a for a in self.co])

    def __sub__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return _demote(self.field, [a - b for a, b in zip(self.co, oc)])

    def __rsub__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return _demote(self.field, [b - a for a, b in zip(self.co, oc)])

    def __mul__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.co):
            if a:
                for j, b in enumerate(oc):
                    if b:
                        prod[i + j] += a * b
        return _demote(self.field, self.field.reduce(prod))

    __rmul__ = __mul__

    def _inverse(self):
        # extended Euclid for self (as polynomial) and the minimal polynomial
        d = self.field.degree
        r0 = list(self.field.minpoly)
        r1 = list(self.co)
        s0, s1 = [Fraction(0)], [Fraction(1)]

        def deg(p):
            for i in range(len(p) - 1, -1, -1):
                if p[i]:
                    return i
            return -1

        while deg(r1) > 0:
            d0, d1 = deg(r0), deg(r1)
            if d0 < d1:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            c = r0[d0] / r1[d1]
            k = d0 - d1
            for i in range(d1 + 1):
                r0[i + k] -= c * r1[i]
            s1p = [Fraction(0)] * k + s1
            for i, v in enumerate(s1p):
                if i < len(s0):
                    s0[i] -= c * v
                else:
                    s0.append(-c * v)
            r0, r1, s0, s1 = r1, r0, s1, s0
        d1 = deg(r1)
        if d1 < 0:
            raise ZeroDivisionError("field element inversion of zero")
        c = r1[d1]
        inv = [v / c for v in s1]
        return _demote(self.field, self.field.reduce(inv))

    def __truediv__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return _demote(self.field, [a / Fraction(other) for a in self.co])
        return self * other._inverse()

    def __rtruediv__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        inv = self._inverse()
        if isinstance(inv, Fraction):
            return Fraction(other) / inv
        return inv * other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = base * out
            base = base * base
            k >>= 1
        return out

    def __abs__(self):
        return self if sign_of(self) >= 0 else -self

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, FieldElt):
            return self.field is other.field and self.co == other.co
        if isinstance(other, (int, Fraction)):
            return False  # canonical: rational values are demoted
        return NotImplemented

    def __hash__(self):
        return hash((self.field.n, self.co))

    def _cmp(self, other) -> int:
        diff = self - other
        return sign_of(diff)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- numerics ---------------------------------------------------------
    def enclosure(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Exact rational interval containing the real value."""
        lo, hi = self.field.nu_enclosure(bits)
        rlo, rhi = Fraction(0), Fraction(0)
        # interval Horner, exact over Q
        for c in reversed(self.co):
            cand = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
            rlo, rhi = min(cand) + c, max(cand) + c
        return rlo, rhi

    def refine_to(self, width: Fraction) -> tuple[Fraction, Fraction]:
        bits = 64
        lo, hi = self.enclosure(bits)
        while hi - lo > width:
            bits *= 2
            if bits > 1 << 20:
                raise RuntimeError("enclosure refinement runaway")
            lo, hi = self.enclosure(bits)
        return lo, hi

    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.co):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*nu{self.field.n}")
            else:
                terms.append(f"{c}*nu{self.field.n}^{i}")
        return " + ".join(terms) if terms else "0"


def nu(n: int):
    """The generator 2 cos(pi/n) as a scalar (demoted when rational)."""
    f = RealField(n)
    co = [Fraction(0)] * f.degree
    if f.degree == 1:
        # nu is rational: reduce x mod (x - c) gives c
        return -f.minpoly[0]
    co[1] = Fraction(1)
    return FieldElt(n, co)


# -- scalar helpers (work on Fraction and FieldElt alike) ------------------

def sign_of(x) -> int:
    if isinstance(x, FieldElt):
        bits = 64
        while True:
            lo, hi = x.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if lo == 0 and hi == 0:
                return 0
            bits *= 2
            if bits > 1 << 20:
                raise RuntimeError("sign refinement runaway")
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def floor_of(x) -> int:
    if isinstance(x, FieldElt):
        bits = 64
        while True:
            lo, hi = x.enclosure(bits)
            flo, fhi = math.floor(lo), math.floor(hi)
            if flo == fhi:
                return int(flo)
            # hi may sit exactly on an integer; a FieldElt is never an integer
            bits *= 2
            if bits > 1 << 20:
                raise RuntimeError("floor refinement runaway")
    return int(math.floor(x))


def as_float(x) -> float:
    if x is None:
        return math.nan
    return float(x)


def enclosure_of(x, width: Fraction) -> tuple[Fraction, Fraction]:
    if isinstance(x, FieldElt):
        return x.refine_to(width)
    q = Fraction(x)
    return q, q


# -- serialization ----------------------------------------------------------

def scalar_to_json(x):
    if isinstance(x, FieldElt):
        return {"nf": {"n": x.field.n, "coeffs": [str(c) for c in x.co]}}
    return {"q": str(Fraction(x))}


def scalar_from_json(obj):
    if "q" in obj:
        return Fraction(obj["q"])
    nf = obj["nf"]
    return FieldElt(int(nf["n"]), [Fraction(c) for c in nf["coeffs"]])


_RAT_RE = re.compile(r"^-?\d+(/\d+)?$")


def parse_exact(text: str):
    """Parse an exact scalar from a CLI string: 'p/q' or 'nu(n):c0,c1,...'."""
    text = text.strip()
    if _RAT_RE.match(text):
        return Fraction(text)
    if text.startswith("nu(") and ":" in text:
        head, _, tail = text.partition(":")
        n = int(head[3:-1])
        coeffs = [Fraction(c) for c in tail.split(",")]
        elt = FieldElt(n, coeffs)
        return elt if isinstance(elt, FieldElt) else elt
    raise ValueError(f"not an exact scalar: {text!r}")

"""Fibered planar regions and the invariant measure dmu = dx dy / (1+xy)^2.

A Region is a finite union of cells: an x-interval carrying a finite union of
y-intervals, constant in x.  All set algebra refines to common x-breakpoints
and then works fiberwise.  Endpoints are exact scalars; the `tail` attribute
carries an upper bound for mass that a constructor knowingly left unresolved
(deep cylinders, frozen fiber endpoints), so downstream tolerance checks can
account for it.

The mu-mass of a pole-free box has the closed form
ln((1+x1 y1)(1+x0 y0) / ((1+x1 y0)(1+x0 y1))); boxes strictly crossing the
singular hyperbola y = -1/x are an error, a corner on it gives +inf.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .moebius import INF, Moebius, interval_image
from .scalars import as_float, scalar_from_json, scalar_to_json, sign_of


# -- y-interval unions -------------------------------------------------------

def merge_intervals(ivs, gap=0):
    """Sorted disjoint union of closed intervals, merging gaps <= gap.

    Returns (merged, absorbed_gap_total).
    """
    ivs = sorted((iv for iv in ivs if iv[0] <= iv[1]))
    out = []
    absorbed = 0
    for lo, hi in ivs:
        if out and lo - out[-1][1] <= gap:
            if lo > out[-1][1]:
                absorbed += lo - out[-1][1]
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out, absorbed


def intervals_length(ivs):
    return sum(hi - lo for lo, hi in ivs)


def intervals_intersect(a, b):
    out = []
    i = j = 0
    a, b = list(a), list(b)
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return out


def intervals_subtract(a, b):
    out = []
    for lo, hi in a:
        cuts = [(lo, hi)]
        for blo, bhi in b:
            nxt = []
            for clo, chi in cuts:
                if bhi <= clo or chi <= blo:
                    nxt.append((clo, chi))
                else:
                    if clo < blo:
                        nxt.append((clo, blo))
                    if bhi < chi:
                        nxt.append((bhi, chi))
            cuts = nxt
        out.extend(cuts)
    return [iv for iv in out if iv[0] < iv[1]]


def intervals_map(m: Moebius, ivs):
    """Image of a union of y-intervals under a Moebius map, pole checked."""
    out = [interval_image(m, lo, hi) for lo, hi in ivs]
    for u, v in out:
        if u is INF or v is INF:
            raise ValueError("interval image through infinity")
    merged, _ = merge_intervals(out)
    return merged


# -- measure ------------------------------------------------------------------

def mu_box_arg(x0, x1, y0, y1):
    """Exact cross-ratio q with mu(box) = ln q; None if a factor vanishes."""
    num = (1 + x1 * y1) * (1 + x0 * y0)
    den = (1 + x1 * y0) * (1 + x0 * y1)
    if den == 0:
        return None
    return num / den


def mu_box(x0, x1, y0, y1) -> float:
    """mu-mass of [x0,x1] x [y0,y1]; +inf if a corner sits on y = -1/x."""
    if x0 == x1 or y0 == y1:
        return 0.0
    corners = [1 + x * y for x in (x0, x1) for y in (y0, y1)]
    signs = [sign_of(c) for c in corners]
    if any(s > 0 for s in signs) and any(s < 0 for s in signs):
        raise ValueError(
            f"box [{x0},{x1}]x[{y0},{y1}] crosses the hyperbola y=-1/x; split it"
        )
    if any(s == 0 for s in signs):
        return math.inf
    q = mu_box_arg(x0, x1, y0, y1)
    return math.log(as_float(q))


# -- cells and regions ---------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    x0: object
    x1: object
    ys: tuple  # tuple of (lo, hi) pairs, sorted and disjoint
    exact: bool = True

    def mass(self) -> float:
        return sum(mu_box(self.x0, self.x1, lo, hi) for lo, hi in self.ys)

    def y_length(self):
        return intervals_length(self.ys)


class Region:
    """Normalized union of fibered cells (disjoint x-interiors)."""

    __slots__ = ("cells", "tail")

    def __init__(self, cells, tail: float = 0.0, normalized=False):
        if normalized:
            self.cells = tuple(cells)
        else:
            self.cells = tuple(_normalize(cells))
        self.tail = tail

    # -- constructors -----------------------------------------------------
    @classmethod
    def box(cls, x0, x1, y0, y1):
        return cls([Cell(x0, x1, ((y0, y1),))])

    @classmethod
    def empty(cls):
        return cls([])

    def is_empty(self) -> bool:
        return not self.cells

    def __repr__(self):
        return f"Region({len(self.cells)} cells, mass~{self.mass():.6g})"

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self):
        return hash(self.cells)

    # -- geometry -----------------------------------------------------------
    def x_support(self):
        if not self.cells:
            return None
        return (self.cells[0].x0, self.cells[-1].x1)

    def breakpoints(self):
        pts = []
        for c in self.cells:
            pts.append(c.x0)
            pts.append(c.x1)
        return sorted(set(pts))

    def fiber(self, x):
        for c in self.cells:
            if c.x0 <= x < c.x1:
                return list(c.ys)
        for c in self.cells:  # closure fallback at the right edge
            if c.x0 <= x <= c.x1:
                return list(c.ys)
        return []

    def fiber_mass(self, x):
        """Marginal density: sum over fiber intervals of (d-c)/((1+xc)(1+xd))."""
        total = 0
        for lo, hi in self.fiber(x):
            total = total + (hi - lo) / ((1 + x * lo) * (1 + x * hi))
        return total

    def mass(self) -> float:
        return sum(c.mass() for c in self.cells) if self.cells else 0.0

    def mass_arg(self):
        """Exact product of box cross-ratios, or None if any factor is singular."""
        q = Fraction(1)
        for c in self.cells:
            for lo, hi in c.ys:
                f = mu_box_arg(c.x0, c.x1, lo, hi)
                if f is None:
                    return None
                q = q * f
        return q

    def lebesgue_area(self) -> float:
        return float(sum(as_float((c.x1 - c.x0)) * as_float(c.y_length()) for c in self.cells))

    def touches_negative_xy(self) -> bool:
        for c in self.cells:
            for lo, hi in c.ys:
                for x in (c.x0, c.x1):
                    for y in (lo, hi):
                        if sign_of(x) * sign_of(y) < 0:
                            return True
        return False

    # -- set algebra -----------------------------------------------------------
    def restrict_x(self, lo, hi) -> "Region":
        out = []
        for c in self.cells:
            a, b = max(c.x0, lo), min(c.x1, hi)
            if a < b:
                out.append(Cell(a, b, c.ys, c.exact))
        return Region(out, normalized=True)

    def _common_slabs(self, other: "Region"):
        pts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        for x0, x1 in zip(pts, pts[1:]):
            a = _slab_ys(self, x0, x1)
            b = _slab_ys(other, x0, x1)
            if a or b:
                yield x0, x1, a, b

    def union(self, other: "Region") -> "Region":
        cells = []
        for x0, x1, a, b in self._common_slabs(other):
            ys, _ = merge_intervals(list(a) + list(b))
            if ys:
                cells.append(Cell(x0, x1, tuple(ys)))
        return Region(cells, tail=self.tail + other.tail)

    def intersect(self, other: "Region") -> "Region":
        cells = []
        for x0, x1, a, b in self._common_slabs(other):
            ys = intervals_intersect(a, b)
            if ys:
                cells.append(Cell(x0, x1, tuple(ys)))
        return Region(cells, tail=self.tail + other.tail)

    def subtract(self, other: "Region") -> "Region":
        cells = []
        for x0, x1, a, b in self._common_slabs(other):
            ys = intervals_subtract(a, b)
            if ys:
                cells.append(Cell(x0, x1, tuple(ys)))
        return Region(cells, tail=self.tail + other.tail)

    def symmetric_difference(self, other: "Region") -> "Region":
        cells = []
        for x0, x1, a, b in self._common_slabs(other):
            ys = intervals_subtract(a, b) + intervals_subtract(b, a)
            ys, _ = merge_intervals(ys)
            if ys:
                cells.append(Cell(x0, x1, tuple(ys)))
        return Region(cells, tail=self.tail + other.tail)

    def symmetric_difference_mass(self, other: "Region") -> float:
        return self.symmetric_difference(other).mass()

    def contains_region(self, other: "Region", slack: float = 0.0) -> bool:
        return other.subtract(self).mass() <= slack

    # -- serialization ------------------------------------------------------
    def to_json(self):
        return {
            "tail": self.tail,
            "cells": [
                {
                    "x": [scalar_to_json(c.x0), scalar_to_json(c.x1)],
                    "ys": [[scalar_to_json(lo), scalar_to_json(hi)] for lo, hi in c.ys],
                    "exact": c.exact,
                }
                for c in self.cells
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj) -> "Region":
        cells = [
            Cell(
                scalar_from_json(c["x"][0]),
                scalar_from_json(c["x"][1]),
                tuple((scalar_from_json(lo), scalar_from_json(hi)) for lo, hi in c["ys"]),
                c.get("exact", True),
            )
            for c in obj["cells"]
        ]
        return cls(cells, tail=obj.get("tail", 0.0))


def _slab_ys(region: Region, x0, x1):
    for c in region.cells:
        if c.x0 <= x0 and x1 <= c.x1:
            return list(c.ys)
    return []


def _normalize(cells):
    cells = [c for c in cells if c.x0 < c.x1 and c.ys]
    if not cells:
        return []
    pts = sorted({p for c in cells for p in (c.x0, c.x1)})
    out = []
    for x0, x1 in zip(pts, pts[1:]):
        ys = []
        exact = True
        for c in cells:
            if c.x0 <= x0 and x1 <= c.x1:
                ys.extend(c.ys)
                exact = exact and c.exact
        if not ys:
            continue
        ys, _ = merge_intervals(ys)
        if out and out[-1].x1 == x0 and out[-1].ys == tuple(ys) and out[-1].exact == exact:
            out[-1] = Cell(out[-1].x0, x1, tuple(ys), exact)
        else:
            out.append(Cell(x0, x1, tuple(ys), exact))
    return out


# -- planar action ------------------------------------------------------------

def cell_image(m: Moebius, cell: Cell) -> Cell:
    """Image of a fibered cell under (x, y) -> (m.x, RmR^{-1}.y).

    Raises ValueError when a pole of m (resp. of the conjugate) lies inside
    the x-interval (resp. a y-interval); the caller must split there.
    """
    u, v = interval_image(m, cell.x0, cell.x1)
    if u is INF or v is INF:
        raise ValueError(f"x-interval [{cell.x0}, {cell.x1}] maps through infinity")
    n = m.conjugate_by_r()
    ys = intervals_map(n, cell.ys)
    return Cell(u, v, tuple(ys), cell.exact)


def region_image(m: Moebius, region: Region) -> Region:
    return Region([cell_image(m, c) for c in region.cells], tail=region.tail)


# -- the Z-conjugation ----------------------------------------------------------

def _z_point(x, y):
    den = 1 + x * y
    if den == 0:
        raise ValueError("Z undefined on y = -1/x")
    return y / den


def z_conjugate(region: Region, slabs: int = 8, side: str = "outer") -> Region:
    """Image of the region under Z(x,y) = (x, y/(1+xy)), bracketed per slab.

    Within a cell the image fiber endpoints become x-dependent, so each cell
    is split into `slabs` x-slabs and the curved fiber is bracketed between
    the endpoint evaluations: side="outer" (superset) or "inner" (subset).
    Output cells are tagged non-exact.
    """
    if side not in ("outer", "inner"):
        raise ValueError("side must be 'outer' or 'inner'")
    out = []
    for c in region.cells:
        w = (c.x1 - c.x0) / slabs
        for i in range(slabs):
            a = c.x0 + w * i
            b = c.x0 + w * (i + 1) if i < slabs - 1 else c.x1
            ys = []
            for lo, hi in c.ys:
                vals0 = sorted((_z_point(a, lo), _z_point(b, lo)))
                vals1 = sorted((_z_point(a, hi), _z_point(b, hi)))
                if side == "outer":
                    ys.append((vals0[0], vals1[1]))
                else:
                    lo2, hi2 = vals0[1], vals1[0]
                    if lo2 < hi2:
                        ys.append((lo2, hi2))
            ys, _ = merge_intervals(ys)
            if ys:
                out.append(Cell(a, b, tuple(ys), exact=False))
    return Region(out, tail=region.tail)


def z_fiber(x, ys):
    """Exact Z image of the fiber over a single x (no bracketing needed)."""
    out = [tuple(sorted((_z_point(x, lo), _z_point(x, hi)))) for lo, hi in ys]
    merged, _ = merge_intervals(out)
    return merged

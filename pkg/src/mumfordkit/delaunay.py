"""Delaunay and Voronoi decompositions of positive-definite integral forms.

The Voronoi cell of the origin is cut out by the bisector halfspaces
``2 B(m, x) <= B(m, m)`` for lattice vectors in a window; the window is
accepted once it contains every vector of norm at most four times the
largest norm of a cell vertex, which is exactly the set of vectors whose
bisector could cut the cell.  The Delaunay cells through the origin are the
sets of lattice points nearest to each Voronoi vertex.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt
from typing import Sequence

from .errors import ValidationError
from .lattice import (
    _double_description, as_matrix, det, dot, inverse, mat_vec, primitive, vec_sub,
)
from .polytope import Polytope

Form = tuple


def check_symmetric(B: Sequence[Sequence]) -> Form:
    B = as_matrix(B)
    n = len(B)
    if any(len(row) != n for row in B):
        raise ValidationError("form must be a square matrix")
    if any(B[i][j] != B[j][i] for i in range(n) for j in range(n)):
        raise ValidationError("form must be symmetric")
    return B


def is_positive_definite(B: Sequence[Sequence]) -> bool:
    n = len(B)
    return all(det([row[:k] for row in B[:k]]) > 0 for k in range(1, n + 1))


def qform(B, x, y=None):
    y = x if y is None else y
    return dot(x, mat_vec(B, y))


def window_scale() -> Fraction:
    raw = os.environ.get("MUMFORD_WINDOW_SCALE")
    if not raw:
        return Fraction(1)
    scale = Fraction(raw)
    if scale <= 0:
        raise ValidationError("MUMFORD_WINDOW_SCALE must be positive")
    return scale


def _sqrt_floor(q: Fraction) -> int:
    """Largest integer k with k*k <= q (q >= 0)."""
    k = isqrt(q.numerator // q.denominator)
    while (k + 1) ** 2 <= q:
        k += 1
    return k


def lattice_points_in_ellipsoid(B: Form, center: Sequence, radius: Fraction) -> list[tuple[int, ...]]:
    """All m in Z^g with B(m - c, m - c) <= radius, sorted."""
    g = len(B)
    radius = Fraction(radius)
    if radius < 0:
        return []
    Binv = inverse(B)
    spans = []
    for j in range(g):
        half = _sqrt_floor(radius * Binv[j][j]) + 1
        c = Fraction(center[j])
        lo = int(c) - half - 1
        hi = int(c) + half + 1
        spans.append(range(lo, hi + 1))
    out = []
    for m in product(*spans):
        d = tuple(a - Fraction(b) for a, b in zip(m, center))
        if qform(B, d) <= radius:
            out.append(m)
    return out


@dataclass(frozen=True)
class VoronoiCell:
    form: Form
    vertices: tuple[tuple[Fraction, ...], ...]
    relevant_vectors: tuple[tuple[int, ...], ...]  # one per facet
    window_radius: Fraction

    @property
    def facet_count(self) -> int:
        return len(self.relevant_vectors)

    def polytope(self) -> Polytope:
        return Polytope(self.vertices)


def voronoi_cell(B: Sequence[Sequence]) -> VoronoiCell:
    """Closed Voronoi cell of the origin, certified by the window rule above."""
    B = check_symmetric(B)
    if not is_positive_definite(B):
        raise ValidationError("form must be positive definite")
    g = len(B)
    zero = (0,) * g
    radius = 2 * max(B[i][i] for i in range(g)) * window_scale()
    while True:
        window = [m for m in lattice_points_in_ellipsoid(B, zero, radius) if any(m)]
        rows = [tuple(-2 * a for a in mat_vec(B, m)) + (qform(B, m),) for m in window]
        rows.append(zero + (1,))
        rays = _double_description(rows, g + 1)
        verts = sorted({tuple(Fraction(r[i], r[g]) for i in range(g)) for r in rays if r[g] > 0})
        need = 4 * max(qform(B, v) for v in verts)
        if radius >= need:
            break
        radius = need
    relevant = []
    for m in window:
        nm = qform(B, m)
        tight = [v for v in verts if 2 * qform(B, m, v) == nm]
        if len(tight) >= g and Polytope(tight).dim == g - 1:
            relevant.append(m)
    return VoronoiCell(B, tuple(verts), tuple(sorted(relevant)), radius)


def _canonical_lattice_cell(points) -> tuple[tuple[int, ...], ...]:
    pts = sorted(tuple(int(a) for a in p) for p in points)
    base = pts[0]
    return tuple(tuple(a - b for a, b in zip(p, base)) for p in pts)


class DelaunayComplex:
    """Delaunay decomposition of Z^g for a positive-definite form."""

    def __init__(self, B: Sequence[Sequence]):
        self.form = check_symmetric(B)
        if not is_positive_definite(self.form):
            raise ValidationError("form must be positive definite")
        self.g = len(self.form)
        self.voronoi = voronoi_cell(self.form)

    @cached_property
    def star_of_origin(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Maximal Delaunay cells containing the origin, as sorted vertex tuples."""
        cells = set()
        for x in self.voronoi.vertices:
            r = qform(self.form, x)
            pts = lattice_points_in_ellipsoid(self.form, x, r)
            pts = [p for p in pts if qform(self.form, vec_sub(p, x)) == r]
            cells.add(tuple(sorted(pts)))
        return tuple(sorted(cells))

    @cached_property
    def maximal_cells(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Translation classes of maximal cells, each with least vertex at 0."""
        return tuple(sorted({_canonical_lattice_cell(c) for c in self.star_of_origin}))

    @cached_property
    def cells(self) -> dict[int, tuple[tuple[tuple[int, ...], ...], ...]]:
        """Translation classes of all cells grouped by dimension."""
        out: dict[int, set] = {}
        for cell in self.maximal_cells:
            P = Polytope(cell)
            for d, faces in P.faces.items():
                for F in faces:
                    out.setdefault(d, set()).add(
                        _canonical_lattice_cell(P.vertices[i] for i in F))
        return {d: tuple(sorted(v)) for d, v in sorted(out.items())}

    def census(self) -> dict[int, int]:
        return {d: len(v) for d, v in self.cells.items()}

    def wall_normals(self) -> tuple[tuple[int, ...], ...]:
        """Primitive normals (up to sign) of codimension-one cells."""
        out = set()
        for cell in self.maximal_cells:
            for a, _ in Polytope(cell).facet_inequalities():
                p = primitive(a)
                out.add(max(p, tuple(-x for x in p)))
        return tuple(sorted(out))

    def edges_at_origin(self) -> tuple[tuple[int, ...], ...]:
        """Lattice vectors m with [0, m] a Delaunay edge."""
        return tuple(m for m in self.voronoi.relevant_vectors)

    def total_volume(self) -> Fraction:
        return sum((Polytope(c).volume() for c in self.maximal_cells), Fraction(0))


def delaunay(B: Sequence[Sequence]) -> DelaunayComplex:
    return DelaunayComplex(B)


def same_delaunay(B1: Sequence[Sequence], B2: Sequence[Sequence]) -> bool:
    """True iff the two forms induce the same Delaunay decomposition."""
    D1, D2 = DelaunayComplex(B1), DelaunayComplex(B2)
    return D1.g == D2.g and D1.maximal_cells == D2.maximal_cells

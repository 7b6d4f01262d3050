"""Convex quasi-periodic piecewise-linear functions on R^g.

Every section is stored as a positive combination of the building block

    T(s) = (n^2 - n)/2 + (s - n) n,   n = floor(s),

composed with ``x -> normal . x - offset``, plus an affine part.  ``T`` is
convex, agrees with ``(s^2 - s)/2`` at integers and bends by one at each
integer.  Sections coming from a quadratic form are converted into this
shape by reading off the walls of the Delaunay decomposition; the conversion
is checked, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import floor
from typing import Mapping, Sequence

from .arrangement import HyperplaneFamily, PeriodicArrangement, merge_families
from .delaunay import DelaunayComplex, check_symmetric
from .errors import Refusal, ValidationError
from .lattice import (
    as_matrix, complement_basis, content, denominator_lcm, det, dot, inverse,
    lex_positive, mat_add, mat_mul, nullspace, outer, primitive, rank, saturate,
    solve_rational, span_basis, transpose, zeros,
)


def tate(s) -> Fraction:
    """The basic convex function T with T(n) = (n^2 - n)/2 at integers."""
    s = Fraction(s)
    n = floor(s)
    return Fraction(n * n - n, 2) + (s - n) * n


@dataclass(frozen=True)
class HyperplaneTerm:
    """``param * T(normal . x - offset)``."""

    normal: tuple[int, ...]
    offset: Fraction
    param: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(int(a) for a in self.normal))
        object.__setattr__(self, "offset", Fraction(self.offset))
        object.__setattr__(self, "param", Fraction(self.param))
        if content(self.normal) != 1:
            raise ValidationError(f"normal {self.normal} must be primitive")
        if self.param <= 0:
            raise ValidationError("bending parameters must be positive")

    def evaluate(self, x: Sequence) -> Fraction:
        return self.param * tate(dot(self.normal, x) - self.offset)


@dataclass(frozen=True)
class PLSection:
    """A convex quasi-periodic PL function ``sum of terms + linear.x + constant``."""

    g: int
    terms: tuple[HyperplaneTerm, ...] = ()
    linear: tuple[Fraction, ...] = ()
    constant: Fraction = Fraction(0)
    form: tuple | None = field(default=None, compare=False)  # (B, L) when built from a form

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        lin = tuple(Fraction(a) for a in self.linear) if self.linear else (Fraction(0),) * self.g
        if len(lin) != self.g:
            raise ValidationError("linear part has wrong length")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "constant", Fraction(self.constant))
        for t in self.terms:
            if len(t.normal) != self.g:
                raise ValidationError("term normal has wrong length")

    # -- evaluation -----------------------------------------------------------

    def __call__(self, x: Sequence) -> Fraction:
        return self.evaluate(x)

    def evaluate(self, x: Sequence) -> Fraction:
        return sum((t.evaluate(x) for t in self.terms), Fraction(0)) + dot(self.linear, x) + self.constant

    def gradient_at(self, x: Sequence) -> tuple[Fraction, ...]:
        """Gradient at x, taking the slope just above every hyperplane through x."""
        grad = list(self.linear)
        for t in self.terms:
            k = floor(dot(t.normal, x) - t.offset)
            for j in range(self.g):
                grad[j] += t.param * k * t.normal[j]
        return tuple(grad)

    # -- algebra --------------------------------------------------------------

    def scale(self, c) -> "PLSection":
        c = Fraction(c)
        if c <= 0:
            raise ValidationError("scale factor must be positive")
        return PLSection(self.g, tuple(HyperplaneTerm(t.normal, t.offset, c * t.param) for t in self.terms),
                         tuple(c * a for a in self.linear), c * self.constant)

    def __add__(self, other: "PLSection") -> "PLSection":
        if other.g != self.g:
            raise ValidationError("sections live on different tori")
        return PLSection(self.g, self.terms + other.terms,
                         tuple(a + b for a, b in zip(self.linear, other.linear)),
                         self.constant + other.constant)

    # -- invariants -----------------------------------------------------------

    def quadratic_part(self) -> tuple[tuple[Fraction, ...], ...]:
        """The bilinear form B with b(x + m) - b(x) - B(m, x) independent of x."""
        Bq = zeros(self.g, self.g)
        for t in self.terms:
            Bq = mat_add(Bq, tuple(tuple(t.param * a for a in row) for row in outer(t.normal, t.normal)))
        return tuple(tuple(a if isinstance(a, Fraction) else Fraction(a) for a in row) for row in Bq)

    @cached_property
    def families(self) -> tuple[HyperplaneFamily, ...]:
        return merge_families((t.normal, t.offset, t.param) for t in self.terms)

    def arrangement(self) -> PeriodicArrangement:
        return PeriodicArrangement(self.g, self.families)

    @property
    def denominator(self) -> int:
        """Least d for which the section is (1/w)Z-valued on (1/w)Z^g whenever d | w."""
        vals = [t.offset for t in self.terms] + [t.param for t in self.terms]
        vals += list(self.linear) + [self.constant]
        return denominator_lcm(vals)

    def is_convex(self) -> bool:
        return all(t.param > 0 for t in self.terms)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        if self.form is not None:
            B, L = self.form
            return {"B": [list(r) for r in B], "L": list(L)}
        fams = {}
        for t in self.terms:
            fams.setdefault(t.normal, []).append(t)
        if len(fams) == 1 and not any(self.linear) and self.constant == 0:
            (n, ts), = fams.items()
            return {"normal": list(n), "offsets": [str(t.offset) for t in ts],
                    "params": [str(t.param) for t in ts]}
        out = {"terms": [{"normal": list(t.normal), "offset": str(t.offset), "param": str(t.param)}
                         for t in self.terms]}
        if any(self.linear):
            out["linear"] = [str(a) for a in self.linear]
        if self.constant:
            out["constant"] = str(self.constant)
        return out


def _frac(v, where: str) -> Fraction:
    try:
        return Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{where}: not a rational number: {v!r}") from exc


def section_from_json(obj: Mapping, g: int | None = None) -> PLSection:
    """Parse one section; accepted shapes are documented in the README."""
    if not isinstance(obj, Mapping):
        raise ValidationError("section must be a JSON object")
    if "sum" in obj:
        parts = [section_from_json(p, g) for p in obj["sum"]]
        weights = obj.get("weights", [1] * len(parts))
        if len(weights) != len(parts):
            raise ValidationError("sum: weights and parts differ in length")
        total = None
        for p, w in zip(parts, weights):
            p = p.scale(_frac(w, "weights"))
            total = p if total is None else total + p
        if total is None:
            raise ValidationError("sum: empty")
        return total
    if "B" in obj:
        B = obj["B"]
        L = obj.get("L")
        return pl_from_form(B, L)
    if "normal" in obj:
        n = [int(a) for a in obj["normal"]]
        offsets = [_frac(o, "offsets") for o in obj.get("offsets", [0])]
        params = [_frac(p, "params") for p in obj.get("params", [1] * len(offsets))]
        if len(params) != len(offsets):
            raise ValidationError("offsets and params differ in length")
        if not offsets:
            raise ValidationError("offsets must be nonempty")
        return PLSection(len(n), tuple(HyperplaneTerm(n, o, p) for o, p in zip(offsets, params)))
    if "terms" in obj:
        terms = tuple(HyperplaneTerm(t["normal"], _frac(t.get("offset", 0), "offset"),
                                     _frac(t.get("param", 1), "param")) for t in obj["terms"])
        if not terms and g is None:
            raise ValidationError("empty terms need an explicit g")
        gg = len(terms[0].normal) if terms else g
        return PLSection(gg, terms, tuple(_frac(a, "linear") for a in obj.get("linear", [])),
                         _frac(obj.get("constant", 0), "constant"))
    raise ValidationError("section needs one of 'normal', 'B', 'terms' or 'sum'")


# ---------------------------------------------------------------------------
# sections from quadratic forms

def is_positive_semidefinite(B: Sequence[Sequence]) -> bool:
    """All principal minors are nonnegative."""
    n = len(B)
    from itertools import combinations
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            if det([[B[i][j] for j in idx] for i in idx]) < 0:
                return False
    return True


def _form_quotient(B) -> tuple[tuple, tuple]:
    """(P, B0) with B = P^T B0 P, P saturated r x g and B0 positive definite."""
    g = len(B)
    rows = [r for r in B if any(r)]
    if not rows:
        return (), ()
    P = saturate(span_basis(rows, g)).basis
    comp = complement_basis(span_basis(P, g))
    inv = inverse(list(P) + comp)
    K = tuple(tuple(inv[i][j] for j in range(len(P))) for i in range(g))
    B0 = mat_mul(mat_mul(transpose(K), B), K)
    return P, tuple(tuple(int(a) for a in row) for row in B0)


def pl_from_form(B: Sequence[Sequence], L: Sequence | None = None) -> PLSection:
    """The convex section interpolating (B(m, m) - L(m))/2 on the lattice.

    Its bending locus is the Delaunay decomposition of B.  L defaults to the
    diagonal of B and must agree with it mod 2.  Forms whose Delaunay
    decomposition is not cut out by full hyperplanes are refused.
    """
    B = check_symmetric(B)
    g = len(B)
    if any(not isinstance(a, int) and Fraction(a).denominator != 1 for r in B for a in r):
        raise ValidationError("form must have integer entries")
    B = tuple(tuple(int(a) for a in r) for r in B)
    L = tuple(int(a) for a in (L if L is not None else [B[i][i] for i in range(g)]))
    if len(L) != g:
        raise ValidationError("L has wrong length")
    if any((B[i][i] - L[i]) % 2 for i in range(g)):
        raise ValidationError("L is not characteristic for B (B(m,m) and L(m) differ mod 2)")
    if not is_positive_semidefinite(B):
        raise ValidationError("form must be positive semi-definite")
    P, B0 = _form_quotient(B)
    normals: list[tuple[int, ...]] = []
    if P:
        for n0 in DelaunayComplex(B0).wall_normals():
            n = primitive([sum(n0[t] * P[t][j] for t in range(len(P))) for j in range(g)])
            normals.append(lex_positive(n))
    normals = sorted(set(normals))
    # B = sum lambda_n n n^T
    idx = [(i, j) for i in range(g) for j in range(i, g)]
    A = [[n[i] * n[j] for n in normals] for i, j in idx]
    rhs = [B[i][j] for i, j in idx]
    if normals:
        lam = solve_rational(A, rhs)
        if lam is None or rank(A) < len(normals) or any(x <= 0 for x in lam):
            raise Refusal("Delaunay decomposition of this form is not a hyperplane dicing")
    else:
        lam = ()
    terms = tuple(HyperplaneTerm(n, 0, l) for n, l in zip(normals, lam))
    shift = [sum((l * n[j] for n, l in zip(normals, lam)), Fraction(0)) for j in range(g)]
    linear = tuple((shift[j] - L[j]) / 2 for j in range(g))
    sec = PLSection(g, terms, linear, 0, form=(B, L))
    if terms and sec.arrangement().vertex_denominator() != 1:
        raise Refusal("Delaunay decomposition of this form is not a hyperplane dicing")
    return sec


# ---------------------------------------------------------------------------
# bending loci and dicing

@dataclass(frozen=True)
class ComplexCell:
    """One translation class of cells; vertices in quotient coordinates."""

    vertices: tuple[tuple[Fraction, ...], ...]
    dim: int
    weight: Fraction | None = None
    immersed: bool = False
    compact: bool = True
    labels: tuple = ()


@dataclass(frozen=True)
class PeriodicComplex:
    """A Z^g-periodic polyhedral complex stored by translation classes of cells.

    Cells are products of a polytope in the quotient ``R^r`` (given by
    ``projection``) with the kernel directions.
    """

    ambient_dim: int
    projection: tuple
    cells: tuple[ComplexCell, ...]

    def census(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.cells:
            out[c.dim] = out.get(c.dim, 0) + 1
        return dict(sorted(out.items()))

    def of_dim(self, d: int) -> list[ComplexCell]:
        return [c for c in self.cells if c.dim == d]

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "projection": [list(r) for r in self.projection],
            "census": {str(k): v for k, v in self.census().items()},
            "cells": [{"dim": c.dim, "vertices": [[str(a) for a in v] for v in c.vertices],
                       **({"weight": str(c.weight)} if c.weight is not None else {}),
                       "immersed": c.immersed, "compact": c.compact,
                       **({"labels": list(c.labels)} if c.labels else {})}
                      for c in self.cells],
        }


def complex_from_arrangement(A: PeriodicArrangement, max_dim: int | None = None,
                             weights: bool = False) -> PeriodicComplex:
    cells = []
    for cc in A.cells.values():
        d = cc.dim + A.h
        if max_dim is not None and d > max_dim:
            continue
        w = None
        if weights and cc.dim == A.r - 1 and len(cc.hyperplanes) == 1:
            f, h = cc.hyperplanes[0]
            fam = A.families[f]
            w = fam.weights[h % len(fam.offsets)]
        cells.append(ComplexCell(cc.vertices, d, w, cc.immersed, A.h == 0))
    return PeriodicComplex(A.g, A.projection, tuple(cells))


def bending_locus(b: PLSection) -> PeriodicComplex:
    """Codimension >= 1 cells of the section's domains of linearity, walls weighted."""
    A = b.arrangement()
    return complex_from_arrangement(A, max_dim=b.g - 1, weights=True)


def quadratic_part(b: PLSection):
    return b.quadratic_part()


def union_arrangement(bs: Sequence[PLSection]) -> PeriodicArrangement:
    if not bs:
        raise ValidationError("need at least one section")
    g = bs[0].g
    if any(b.g != g for b in bs):
        raise ValidationError("sections live on different tori")
    terms = [(t.normal, t.offset, t.param) for b in bs for t in b.terms]
    return PeriodicArrangement(g, merge_families(terms))


def is_dicing(bs: Sequence[PLSection]) -> tuple[bool, int]:
    """Whether the joint bending locus has integral vertices, and the least d
    such that all its vertices are (1/d)-integral."""
    A = union_arrangement(bs)
    if A.r < A.g:
        normals = [f.normal for f in A.families]
        missing = nullspace(normals, A.g)[0] if normals else (1,) + (0,) * (A.g - 1)
        raise ValidationError(f"no bending in direction {tuple(missing)}")
    d = A.vertex_denominator()
    return d == 1, d


# ---------------------------------------------------------------------------
# shifted matroidal arrangements

@dataclass(frozen=True)
class ShiftedArrangement:
    sections: tuple[PLSection, ...]
    transversal: bool
    hyperplane_classes: int


def shifted_matroidal_arrangement(rep, offsets: Sequence[Sequence]) -> ShiftedArrangement:
    """One section per ground element: unit bends along x_i(m) in offset + Z."""
    from .matroid import MatroidRep, is_unimodular
    if not isinstance(rep, MatroidRep):
        rep = MatroidRep(as_matrix(rep))
    if not is_unimodular(rep.columns):
        raise ValidationError("representation is not unimodular")
    if len(offsets) != rep.ground_size:
        raise ValidationError("need one offset list per ground element")
    sections = []
    for i in range(rep.ground_size):
        offs = [Fraction(o) for o in offsets[i]]
        if not offs:
            raise ValidationError(f"offsets for element {i + 1} are empty")
        x = rep.column(i)
        if not any(x):
            raise ValidationError(f"column {i + 1} is zero")
        sections.append(PLSection(rep.rank_ambient, tuple(HyperplaneTerm(x, o, 1) for o in offs)))
    A = union_arrangement(sections)
    classes = sum(len(f.offsets) for f in A.families)
    return ShiftedArrangement(tuple(sections), A.is_transversal(), classes)


# ---------------------------------------------------------------------------
# value tables

@dataclass(frozen=True)
class ValueForm:
    """Values on the grid (1/d)Z^g in [0, 1]^g plus the quadratic growth B.

    Values elsewhere on (1/d)Z^g follow from quasi-periodicity:
    b(x + m) = b(x) + B(m, x) + b(m) - b(0).
    """

    g: int
    d: int
    B: tuple
    table: Mapping

    @classmethod
    def from_section(cls, b: PLSection, d: int | None = None) -> "ValueForm":
        d = d or b.denominator
        grid = product(range(d + 1), repeat=b.g)
        table = {}
        for k in grid:
            x = tuple(Fraction(a, d) for a in k)
            table[x] = b.evaluate(x)
        return cls(b.g, d, b.quadratic_part(), table)

    def _at_lattice(self, m: Sequence[int]) -> Fraction:
        zero = (Fraction(0),) * self.g
        b0 = self.table[zero]
        val = b0 + Fraction(dot(m, [sum(self.B[i][j] * m[j] for j in range(self.g)) for i in range(self.g)]), 2)
        for j in range(self.g):
            e = tuple(Fraction(1 if i == j else 0) for i in range(self.g))
            lam = self.table[e] - b0 - Fraction(self.B[j][j], 2)
            val += lam * m[j]
        return val

    def evaluate(self, x: Sequence) -> Fraction:
        x = tuple(Fraction(a) for a in x)
        if any((a * self.d).denominator != 1 for a in x):
            raise ValidationError("point is not on the (1/d) grid")
        m = tuple(floor(a) for a in x)
        x0 = tuple(a - b for a, b in zip(x, m))
        Bmx = sum(m[i] * self.B[i][j] * x0[j] for i in range(self.g) for j in range(self.g))
        return self.table[x0] + Bmx + self._at_lattice(m) - self._at_lattice((0,) * self.g)

"""Truncated theta series and their multiplication.

A weight w theta function of the class v + Z^g (with w v integral) is

    sum over x in v + Z^g of  z^(w x) u^(w b_1(x), ..., w b_k(x)).

Only finitely many terms have total u-degree below a bound: writing the
total section as phi = psi + P with psi quadratic and 0 <= P <= sum(p)/8,
every term of degree <= T has psi(x) <= T / w, an ellipsoid.  Products of
two series are expanded back into theta functions of the summed weight;
the coefficient of a class is read off from a single lift of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import floor
from typing import Mapping, Sequence

from .delaunay import lattice_points_in_ellipsoid
from .errors import Refusal, ValidationError
from .lattice import (
    as_matrix, hermite_normal_form, inverse, lex_positive, mat_vec, primitive,
    smith_normal_form,
)

ThetaClass = tuple  # tuple of Fractions in [0, 1)
Poly = dict  # u-exponent tuple -> integer coefficient


# ---------------------------------------------------------------------------
# classes

def reduce_class(v: Sequence) -> ThetaClass:
    return tuple(Fraction(a) - floor(Fraction(a)) for a in v)


def parse_class(text: str, g: int | None = None) -> ThetaClass:
    """Parse ``"1/3"``, ``"0/1,1/2"`` or ``"(0,1/2)"`` into a reduced class."""
    body = text.strip().strip("()[]")
    try:
        parts = [Fraction(p.strip()) for p in body.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad theta class {text!r}") from exc
    if g is not None and len(parts) != g:
        raise ValidationError(f"theta class {text!r} has {len(parts)} coordinates, expected {g}")
    return reduce_class(parts)


def class_label(v: ThetaClass, w: int) -> str:
    return ",".join(f"{int(a * w)}/{w}" for a in v)


def check_class(v: ThetaClass, w: int) -> ThetaClass:
    v = reduce_class(v)
    if w <= 0:
        raise ValidationError("weight must be positive")
    if any((a * w).denominator != 1 for a in v):
        raise ValidationError(f"class {class_label_raw(v)} is not (1/{w})-integral")
    return v


def class_label_raw(v: ThetaClass) -> str:
    return "(" + ",".join(str(a) for a in v) + ")"


def theta_classes(g: int, w: int) -> list[ThetaClass]:
    """All classes of (1/w)Z^g / Z^g; there are exactly w^g of them."""
    if w <= 0:
        raise ValidationError("weight must be positive")
    return [tuple(Fraction(a, w) for a in k) for k in product(range(w), repeat=g)]


# ---------------------------------------------------------------------------
# the quadratic lower bound of the total section

@dataclass(frozen=True)
class _Bound:
    """phi(x) = psi(x) + P(x), psi(x) = B(x - c, x - c)/2 + low, 0 <= P <= top."""

    B: tuple
    center: tuple
    low: Fraction
    top: Fraction


def _bound(data) -> _Bound:
    g = data.g
    B = [[Fraction(0)] * g for _ in range(g)]
    lin = [Fraction(0)] * g
    const = Fraction(0)
    top = Fraction(0)
    for b in data.sections:
        for t in b.terms:
            # (s^2 - s)/2 with s = n.x - e
            e, p, n = t.offset, t.param, t.normal
            for i in range(g):
                lin[i] -= p * (e + Fraction(1, 2)) * n[i]
                for j in range(g):
                    B[i][j] += p * n[i] * n[j]
            const += p * (e * e + e) / 2
            top += p / 8
        for i in range(g):
            lin[i] += b.linear[i]
        const += b.constant
    if g == 0:
        return _Bound((), (), const, top)
    Binv = inverse(B)
    center = tuple(-a for a in mat_vec(Binv, lin))
    low = const + sum(lin[i] * center[i] for i in range(g)) / 2
    return _Bound(tuple(map(tuple, B)), center, low, top)


def _points(bound: _Bound, shift: Sequence, radius: Fraction) -> list[tuple]:
    """Points y in shift + Z^g with B(y - c, y - c) <= radius, c = bound.center."""
    g = len(shift)
    if radius < 0:
        return []
    if g == 0:
        return [()]
    c = tuple(a - s for a, s in zip(bound.center, shift))
    return [tuple(m_i + s for m_i, s in zip(m, shift))
            for m in lattice_points_in_ellipsoid(bound.B, c, radius)]


def _exponent(data, x: Sequence, w: int) -> tuple[int, ...]:
    out = []
    for b in data.sections:
        e = w * b.evaluate(x)
        if e.denominator != 1:
            raise ValidationError(f"exponent {e} at {class_label_raw(tuple(x))} is not integral")
        out.append(int(e))
    return tuple(out)


def _check_weight(data, w: int) -> None:
    if w <= 0:
        raise ValidationError("weight must be positive")
    if w % data.d:
        raise ValidationError(f"weight {w} is not divisible by the denominator d = {data.d}")


# ---------------------------------------------------------------------------
# series

@dataclass(frozen=True)
class ThetaSeries:
    """Terms ``z^zexp u^uexp * coeff`` with total u-degree at most ``trunc``."""

    weight: int
    cls: ThetaClass
    terms: Mapping  # (zexp, uexp) -> coeff
    trunc: int

    def monomials(self) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
        return sorted((z, u, c) for (z, u), c in self.terms.items())

    def coefficient(self, zexp: Sequence[int]) -> Poly:
        """Polynomial in u multiplying ``z^zexp``."""
        zexp = tuple(zexp)
        return {u: c for (z, u), c in self.terms.items() if z == zexp}

    def truncate(self, trunc: int) -> "ThetaSeries":
        return ThetaSeries(self.weight, self.cls,
                           {k: c for k, c in self.terms.items() if sum(k[1]) <= trunc}, min(trunc, self.trunc))

    def substitute(self, R: Sequence[Sequence[int]]) -> "ThetaSeries":
        """Pull back along u_i = prod_j t_j^R[i][j].

        A term of old degree e has new degree at least e * min row sum, so
        the result is exact up to ``trunc * min row sum``.
        """
        R = as_matrix(R)
        if any(e < 0 for (_, u) in self.terms for e in u):
            raise ValidationError("substitution needs nonnegative exponents")
        if not R or any(not any(row) for row in R):
            raise ValidationError("every old parameter must pull back to a nonconstant monomial")
        n = len(R[0])
        new_trunc = self.trunc * min(sum(row) for row in R)
        out: dict = {}
        for (z, u), c in self.terms.items():
            nu = tuple(sum(u[i] * R[i][j] for i in range(len(u))) for j in range(n))
            if sum(nu) <= new_trunc:
                out[(z, nu)] = out.get((z, nu), 0) + c
        return ThetaSeries(self.weight, self.cls, out, new_trunc)

    def format_lines(self) -> list[str]:
        return [f"{_fmt_exp('z', z)} {_fmt_exp('u', u)} * {c}" for z, u, c in self.monomials()]

    def to_json(self) -> list:
        return [{"z": list(z), "u": list(u), "coeff": c} for z, u, c in self.monomials()]


def _fmt_exp(var: str, e: Sequence[int]) -> str:
    if len(e) == 1 and var == "z":
        return f"{var}^{e[0]}"
    return f"{var}^(" + ",".join(str(a) for a in e) + ")"


def theta_expand(data, cls: Sequence, w: int, trunc: int, twist=None) -> ThetaSeries:
    """All terms of the weight-w theta function of ``cls`` of u-degree <= trunc.

    ``twist`` optionally maps a lift x to the integer coefficient of its
    term; the default is the trivial twist, coefficient 1 everywhere.
    """
    _check_weight(data, w)
    v = check_class(tuple(cls), w)
    if len(v) != data.g:
        raise ValidationError(f"class has {len(v)} coordinates, expected {data.g}")
    bound = _bound(data)
    radius = 2 * (Fraction(trunc, w) - bound.low)
    terms = {}
    for x in _points(bound, v, radius):
        u = _exponent(data, x, w)
        if sum(u) <= trunc:
            z = tuple(int(w * a) for a in x)
            c = 1 if twist is None else twist(x)
            if c:
                terms[(z, u)] = terms.get((z, u), 0) + c
    return ThetaSeries(w, v, terms, trunc)


# ---------------------------------------------------------------------------
# structure constants

@dataclass(frozen=True)
class StructureConstants:
    """Row of the multiplication table: product class -> polynomial in u."""

    left: tuple  # (class, weight)
    right: tuple
    weight: int
    coefficients: Mapping  # class -> Poly
    trunc: int

    def mod_u(self) -> dict:
        """Constant terms of the coefficients: the product modulo (u_1, ..., u_k)."""
        out = {}
        for v, poly in self.coefficients.items():
            c = sum(c for e, c in poly.items() if not any(e))
            if c:
                out[v] = c
        return out


def _poly_add(acc: Poly, poly: Poly, scale: int = 1) -> None:
    for e, c in poly.items():
        acc[e] = acc.get(e, 0) + scale * c
        if not acc[e]:
            del acc[e]


def _poly_mul(p: Poly, q: Poly, trunc: int) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if sum(e) <= trunc:
                out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _product_classes(v1, w1, v2, w2) -> list[ThetaClass]:
    W = w1 + w2
    g = len(v1)
    seen = set()
    for m in product(range(W), repeat=g):
        a3 = reduce_class(tuple((w1 * a + w2 * (b + k)) / W for a, b, k in zip(v1, v2, m)))
        seen.add(a3)
    return sorted(seen)


def _pair_coefficient(data, bound, v1, w1, v2, w2, a3, trunc) -> Poly:
    """Sum of u^(w1 b(x1) + w2 b(x2) - W b(a3)) over x1 + Z^g lifts with
    w1 x1 + w2 x2 = W a3."""
    W = w1 + w2
    base = tuple(W * b.evaluate(a3) for b in data.sections)
    phi3 = sum(base) / W
    psi3 = bound.low + sum((a3[i] - bound.center[i]) * bound.B[i][j] * (a3[j] - bound.center[j])
                           for i in range(data.g) for j in range(data.g)) / 2
    periodic = phi3 - psi3
    radius = Fraction(2 * w2) * (trunc + W * periodic) / (w1 * W)
    # y = x1 - a3 ranges over (v1 - a3) + Z^g; center the ellipsoid at 0
    shift = tuple(a - b for a, b in zip(v1, a3))
    shifted = _Bound(bound.B, (Fraction(0),) * data.g, bound.low, bound.top)
    out: Poly = {}
    for y in _points(shifted, shift, radius):
        x1 = tuple(a + b for a, b in zip(a3, y))
        x2 = tuple(a - Fraction(w1, w2) * b for a, b in zip(a3, y))
        if any(Fraction(c - d).denominator != 1 for c, d in zip(x2, v2)):
            continue
        e = []
        for i, b in enumerate(data.sections):
            val = w1 * b.evaluate(x1) + w2 * b.evaluate(x2) - base[i]
            if val.denominator != 1 or val < 0:
                raise ValidationError(f"structure exponent {val} is not a nonnegative integer")
            e.append(int(val))
        if sum(e) <= trunc:
            e = tuple(e)
            out[e] = out.get(e, 0) + 1
    return out


def theta_multiply(data, v1: Sequence, w1: int, v2: Sequence, w2: int, trunc: int) -> StructureConstants:
    """Coefficients c with Theta_v1 Theta_v2 = sum_v3 c_v3(u) Theta_v3, to u-degree trunc."""
    _check_weight(data, w1)
    _check_weight(data, w2)
    v1 = check_class(tuple(v1), w1)
    v2 = check_class(tuple(v2), w2)
    bound = _bound(data)
    coeffs = {}
    for a3 in _product_classes(v1, w1, v2, w2):
        poly = _pair_coefficient(data, bound, v1, w1, v2, w2, a3, trunc)
        if poly:
            coeffs[a3] = poly
    return StructureConstants((v1, w1), (v2, w2), w1 + w2, coeffs, trunc)


def theta_product(data, factors: Sequence[tuple[Sequence, int]], trunc: int) -> dict:
    """Expand a product of theta functions as {class: poly}, weight = sum of weights."""
    if not factors:
        raise ValidationError("empty product")
    k = data.k
    (v, w), rest = factors[0], factors[1:]
    _check_weight(data, w)
    current = {check_class(tuple(v), w): {(0,) * k: 1}}
    weight = w
    for v2, w2 in rest:
        nxt: dict = {}
        for v1, p in current.items():
            row = theta_multiply(data, v1, weight, v2, w2, trunc)
            for v3, q in row.coefficients.items():
                acc = nxt.setdefault(v3, {})
                _poly_add(acc, _poly_mul(p, q, trunc))
        current = {a: p for a, p in nxt.items() if p}
        weight += w2
    return current


def _series_product(s1: ThetaSeries, s2: ThetaSeries, trunc: int) -> dict:
    out: dict = {}
    for (z1, u1), c1 in s1.terms.items():
        for (z2, u2), c2 in s2.terms.items():
            u = tuple(a + b for a, b in zip(u1, u2))
            if sum(u) <= trunc:
                key = (tuple(a + b for a, b in zip(z1, z2)), u)
                out[key] = out.get(key, 0) + c1 * c2
    return out


# ---------------------------------------------------------------------------
# relations of the central fiber

@dataclass(frozen=True)
class Relation:
    """sum of coeff * monomial = 0, monomials are sorted tuples of classes."""

    weight: int
    terms: tuple  # ((monomial, coeff), ...)

    def _render(self, side) -> str:
        parts = []
        for mono, c in side:
            counts: dict = {}
            for v in mono:
                counts[v] = counts.get(v, 0) + 1
            text = "".join(f"T[{class_label(v, self.weight)}]" + (f"^{n}" if n > 1 else "")
                           for v, n in sorted(counts.items()))
            parts.append(text if c == 1 else f"{c}*{text}")
        return " + ".join(parts) if parts else "0"

    def equation(self) -> str:
        pos = [(m, c) for m, c in self.terms if c > 0]
        neg = [(m, -c) for m, c in self.terms if c < 0]
        if len(pos) > len(neg):
            pos, neg = neg, pos
        return f"{self._render(pos)} = {self._render(neg)}"

    def to_json(self) -> dict:
        return {"equation": self.equation(),
                "terms": [{"monomial": [class_label(v, self.weight) for v in m], "coeff": c}
                          for m, c in self.terms]}


@dataclass(frozen=True)
class RelationReport:
    weight: int
    degree: int
    monomials: tuple  # sorted tuples of classes
    products: Mapping  # monomial -> {class of weight degree*w: coeff}, mod u
    relations: tuple[Relation, ...]
    zero_products: tuple

    def to_json(self) -> dict:
        W = self.weight * self.degree
        return {
            "weight": self.weight,
            "degree": self.degree,
            "monomials": len(self.monomials),
            "relations": [r.to_json() for r in self.relations],
            "zero_products": [[class_label(v, self.weight) for v in m] for m in self.zero_products],
            "products": [{"monomial": [class_label(v, self.weight) for v in m],
                          "expansion": {class_label(v, W): c for v, c in sorted(self.products[m].items())}}
                         for m in self.monomials],
        }


def _left_kernel(rows: list[list[int]]) -> list[tuple[int, ...]]:
    """Integer basis of {x : x^T A = 0}, reduced to Hermite form."""
    n = len(rows)
    if n == 0:
        return []
    if not rows[0]:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    U, D, _ = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    basis = [tuple(U[i]) for i in range(r, n)]
    return [tuple(v) for v in hermite_normal_form(basis)] if basis else []


def central_fiber_relations(data, w: int, degree: int, require_embedded: bool = False) -> RelationReport:
    """Integer linear relations among degree-``degree`` monomials in weight-w
    theta functions, modulo (u_1, ..., u_k)."""
    _check_weight(data, w)
    if degree <= 0:
        raise ValidationError("degree must be positive")
    if require_embedded:
        for cell in data.full.cells.values():
            if cell.immersed:
                pts = ", ".join("(" + ", ".join(map(str, v)) + ")" for v in cell.vertices)
                raise Refusal(f"cell with vertices {pts} is immersed in the torus")
    classes = theta_classes(data.g, w)
    monomials = list(combinations_with_replacement(classes, degree))
    zero = (0,) * data.k
    products = {}
    for mono in monomials:
        expansion = theta_product(data, [(v, w) for v in mono], 0)
        products[mono] = {v: p[zero] for v, p in expansion.items() if p.get(zero)}
    targets = sorted({v for row in products.values() for v in row})
    index = {v: j for j, v in enumerate(targets)}
    matrix = []
    for mono in monomials:
        row = [0] * len(targets)
        for v, c in products[mono].items():
            row[index[v]] = c
        matrix.append(row)
    relations = []
    for vec in _left_kernel(matrix):
        vec = primitive(vec)
        if not lex_positive(vec):
            vec = tuple(-a for a in vec)
        relations.append(Relation(w, tuple((monomials[i], c) for i, c in enumerate(vec) if c)))
    zeros = tuple(m for m in monomials if not products[m])
    return RelationReport(w, degree, tuple(monomials), products, tuple(relations), zeros)

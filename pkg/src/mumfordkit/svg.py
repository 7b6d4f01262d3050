"""SVG pictures of periodic complexes in the unit square of R^1 or R^2.

Cells are unfolded from their translation classes and clipped to [0, 1]^g;
coordinates are exact until they are printed with three decimals.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import floor
from typing import Sequence

from .errors import ValidationError
from .lattice import inverse, mat_vec
from .plsection import PeriodicComplex, bending_locus

PALETTE = ("#c0392b", "#27ae60", "#2471a3", "#8e44ad", "#d68910", "#17a589")
SIZE = 400
MARGIN = 30


def _fmt(v) -> str:
    return f"{float(v):.3f}"


def _clip(p, q):
    """Part of the segment p-q inside [0, 1]^2 (Liang-Barsky), or None."""
    t0, t1 = Fraction(0), Fraction(1)
    d = (q[0] - p[0], q[1] - p[1])
    for k in range(2):
        for num, den in ((p[k], -d[k]), (1 - p[k], d[k])):
            # constraint den * t <= num
            if den == 0:
                if num < 0:
                    return None
                continue
            t = Fraction(num) / den
            if den < 0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
    if t0 >= t1:
        return None
    return (tuple(p[k] + t0 * d[k] for k in range(2)), tuple(p[k] + t1 * d[k] for k in range(2)))


def _point(x) -> tuple[str, str]:
    if len(x) == 1:
        return _fmt(MARGIN + x[0] * SIZE), _fmt(MARGIN + SIZE / 2)
    return _fmt(MARGIN + x[0] * SIZE), _fmt(MARGIN + (1 - x[1]) * SIZE)


def _unfold_segment(a, b) -> list:
    lo = [floor(min(a[k], b[k])) for k in range(2)]
    hi = [floor(max(a[k], b[k])) for k in range(2)]
    out = []
    for m in product(*[range(-h - 1, -l + 2) for l, h in zip(lo, hi)]):
        piece = _clip(tuple(a[k] + m[k] for k in range(2)), tuple(b[k] + m[k] for k in range(2)))
        if piece is not None:
            out.append(piece)
    return out


def _line_pieces(normal: Sequence[int], level: Fraction) -> list:
    """The lines normal . x in level + Z, clipped to the unit square."""
    n = tuple(normal)
    span = sum(abs(a) for a in n)
    direction = (-n[1], n[0])
    out = []
    for k in range(-span - 1, span + 2):
        c = level + k
        # a point on normal . x = c
        if n[0]:
            x0 = (Fraction(c, n[0]) if isinstance(c, int) else c / n[0], Fraction(0))
        else:
            x0 = (Fraction(0), c / n[1])
        big = 4 * (span + 2)
        p = tuple(x0[i] - big * direction[i] for i in range(2))
        q = tuple(x0[i] + big * direction[i] for i in range(2))
        piece = _clip(p, q)
        if piece is not None:
            out.append(piece)
    return out


def emit_svg(layers, title: str = "", show_weights: bool = True) -> str:
    """Render one complex or a list of (complex, colour, name) layers."""
    if isinstance(layers, PeriodicComplex):
        layers = [(layers, PALETTE[0], "")]
    layers = [(c, col or PALETTE[i % len(PALETTE)], name) for i, (c, col, name) in enumerate(layers)]
    if not layers:
        raise ValidationError("nothing to draw")
    g = layers[0][0].ambient_dim
    if g not in (1, 2) or any(c.ambient_dim != g for c, _, _ in layers):
        raise ValidationError(f"can only draw complexes in dimension 1 or 2, got {g}")
    total = SIZE + 2 * MARGIN
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" '
        f'viewBox="0 0 {total} {total}">',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" '
        'stroke="#555" stroke-dasharray="4 3"/>',
    ]
    if title:
        lines.append(f'<text x="{MARGIN}" y="{MARGIN - 10}" font-size="14">{title}</text>')
    if g == 1:
        y = _fmt(MARGIN + SIZE / 2)
        lines.append(f'<line x1="{MARGIN}" y1="{y}" x2="{MARGIN + SIZE}" y2="{y}" stroke="#999"/>')
    for complex_, colour, name in layers:
        r = len(complex_.projection)
        P = complex_.projection
        Pinv = inverse(P) if r == g else None
        items = []
        for cell in complex_.cells:
            weight = "" if cell.weight is None or not show_weights else str(cell.weight)
            if g == 1:
                if cell.dim == 0 and r == 1:
                    x = (cell.vertices[0][0] / P[0][0],)
                    x = (x[0] - floor(x[0]),)
                    items.append(("point", x, weight))
                continue
            if r == g:
                verts = [mat_vec(Pinv, v) for v in cell.vertices]
                if cell.dim == 1:
                    for a, b in _unfold_segment(verts[0], verts[-1]):
                        items.append(("segment", (a, b), weight))
                elif cell.dim == 0:
                    x = tuple(a - floor(a) for a in verts[0])
                    items.append(("point", x, ""))
            elif r == 1 and cell.dim == 1:
                for a, b in _line_pieces(P[0], cell.vertices[0][0]):
                    items.append(("segment", (a, b), weight))
        for kind, geom, weight in sorted(items, key=lambda it: (it[0], str(it[1]))):
            if kind == "segment":
                (x1, y1), (x2, y2) = _point(geom[0]), _point(geom[1])
                lines.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}" stroke-width="3"/>')
                if weight:
                    mx, my = _point(tuple((a + b) / 2 for a, b in zip(*geom)))
                    lines.append(f'<text x="{mx}" y="{my}" font-size="12" fill="{colour}">{weight}</text>')
            else:
                x, y = _point(geom)
                lines.append(f'<circle cx="{x}" cy="{y}" r="5" fill="{colour}"/>')
                if weight:
                    lines.append(f'<text x="{x}" y="{_fmt(float(y) - 10)}" font-size="12" fill="{colour}">{weight}</text>')
        if name:
            idx = layers.index((complex_, colour, name))
            lines.append(f'<text x="{MARGIN + 10 + 90 * idx}" y="{total - 8}" font-size="12" '
                         f'fill="{colour}">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def data_svg(data, title: str = "") -> str:
    """Bending loci of all sections of a Mumford datum, one colour each."""
    layers = [(bending_locus(b), PALETTE[i % len(PALETTE)], f"b{i + 1}") for i, b in enumerate(data.sections)]
    return emit_svg(layers, title or data.name)

"""Lattice-periodic hyperplane arrangements.

A family is a primitive normal ``n`` together with offsets ``e`` in [0, 1);
it contributes the hyperplanes ``n.x = e + j`` for every integer ``j``.  The
union of finitely many families is invariant under ``Z^g``.

When the normals do not span, everything is computed on the quotient
``R^g -> R^r`` given by a saturated basis of their span; cells upstairs are
products of quotient cells with ``R^(g - r)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import ceil, floor
from typing import Iterable, Sequence

from .lattice import (
    affine_rank, complement_basis, denominator_lcm, dot, inverse, lex_positive,
    mat_vec, nullspace, primitive, rank, saturate, smith_normal_form, solve_rational,
    span_basis, vec_add, vec_sub,
)
from .polytope import barycenter, face_closure

Point = tuple


def frac(x: Fraction) -> Fraction:
    return x - floor(x)


@dataclass(frozen=True)
class HyperplaneFamily:
    """Parallel hyperplanes ``normal . x in offset + Z`` with weights.

    ``multiplicity`` counts how many independent terms share each offset; a
    hyperplane carried by two sections counts twice for transversality.
    """

    normal: tuple[int, ...]
    offsets: tuple[Fraction, ...]
    weights: tuple[Fraction, ...]
    multiplicity: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.multiplicity:
            object.__setattr__(self, "multiplicity", (1,) * len(self.offsets))

    def value(self, h: int) -> Fraction:
        """Level of the h-th hyperplane (indices increase with level)."""
        L = len(self.offsets)
        return self.offsets[h % L] + h // L

    def index_at(self, s: Fraction) -> int | None:
        """Index of the hyperplane at level s, or None."""
        f = frac(s)
        try:
            j = self.offsets.index(f)
        except ValueError:
            return None
        return (floor(s)) * len(self.offsets) + j

    def slot(self, s: Fraction) -> int:
        """Index h with value(h) <= s < value(h + 1)."""
        f = frac(s)
        below = sum(1 for o in self.offsets if o <= f)
        return floor(s) * len(self.offsets) + below - 1


def merge_families(terms: Iterable[tuple[Sequence[int], Fraction, Fraction]]) -> tuple[HyperplaneFamily, ...]:
    """Merge (normal, offset, weight) terms into families keyed by normal."""
    table: dict[tuple, dict[Fraction, list]] = {}
    for normal, offset, weight in terms:
        n = tuple(int(a) for a in normal)
        p = primitive(n)
        if p != n and tuple(-a for a in p) != n:
            raise ValueError(f"normal {n} is not primitive")
        sign = 1 if lex_positive(n) == n else -1
        n = lex_positive(n)
        o = frac(Fraction(offset) * sign)
        slot = table.setdefault(n, {}).setdefault(o, [Fraction(0), 0])
        slot[0] += Fraction(weight)
        slot[1] += 1
    fams = []
    for n in sorted(table):
        offs = sorted(table[n])
        fams.append(HyperplaneFamily(n, tuple(offs), tuple(table[n][o][0] for o in offs),
                                     tuple(table[n][o][1] for o in offs)))
    return tuple(fams)


@dataclass
class Chamber:
    key: tuple[int, ...]
    vertices: tuple[Point, ...]
    facets: list = field(default_factory=list)  # (family, side, frozenset of points)


@dataclass(frozen=True)
class CellClass:
    """A translation class of cells of the quotient arrangement."""

    vertices: tuple[Point, ...]
    dim: int
    hyperplanes: tuple[tuple[int, int], ...]  # (family index, hyperplane index) containing it
    immersed: bool


def canonical_shift(points: Iterable[Point]) -> tuple[int, ...]:
    """Integer vector moving the lexicographically least point into [0, 1)^r."""
    p = min(points)
    return tuple(floor(a) for a in p)


def translate(points: Iterable[Point], m: Sequence[int], sign: int = -1) -> tuple[Point, ...]:
    return tuple(sorted(tuple(a + sign * b for a, b in zip(p, m)) for p in points))


def has_lattice_identification(points: Sequence[Point]) -> bool:
    """True if two of the points differ by a nonzero integer vector."""
    seen = set()
    for p in points:
        key = tuple(frac(a) for a in p)
        if key in seen:
            return True
        seen.add(key)
    return False


class PeriodicArrangement:
    """The arrangement cut out by a list of hyperplane families in R^g."""

    def __init__(self, g: int, families: Sequence[HyperplaneFamily]):
        self.g = g
        self.families = tuple(families)
        normals = [f.normal for f in self.families]
        if normals and rank(normals) == g:
            self.r = g
            self.projection = tuple(tuple(1 if i == j else 0 for j in range(g)) for i in range(g))
        else:
            S = saturate(span_basis(normals, g)) if normals else None
            self.projection = S.basis if S else ()
            self.r = len(self.projection)
        # reduced normals: n = a . projection
        P = self.projection
        self.reduced = []
        for n in normals:
            if self.r == g:
                self.reduced.append(tuple(n))
            else:
                a = solve_rational([list(col) for col in zip(*P)], n)
                self.reduced.append(tuple(int(x) for x in a))

    # -- basic geometry -----------------------------------------------------

    @property
    def h(self) -> int:
        """Dimension of the directions along which nothing bends."""
        return self.g - self.r

    def project(self, x: Sequence) -> Point:
        return tuple(Fraction(dot(row, x)) for row in self.projection)

    @cached_property
    def lift_matrix(self) -> tuple:
        """A g x r integer matrix K with projection . K = identity."""
        if self.r == self.g:
            return self.projection
        comp = complement_basis(span_basis(self.projection, self.g))
        full = list(self.projection) + comp
        inv = inverse(full)
        return tuple(tuple(int(inv[i][j]) for j in range(self.r)) for i in range(self.g))

    def lift(self, y: Sequence) -> Point:
        return tuple(Fraction(sum(row[j] * y[j] for j in range(self.r))) for row in self.lift_matrix)

    def level(self, f: int, y: Sequence) -> Fraction:
        return Fraction(dot(self.reduced[f], y))

    def hyperplanes_through(self, y: Sequence) -> tuple[tuple[int, int], ...]:
        out = []
        for f, fam in enumerate(self.families):
            h = fam.index_at(self.level(f, y))
            if h is not None:
                out.append((f, h))
        return tuple(out)

    def multiplicity_through(self, y: Sequence) -> int:
        total = 0
        for f, h in self.hyperplanes_through(y):
            fam = self.families[f]
            total += fam.multiplicity[h % len(fam.offsets)]
        return total

    def position(self, y: Sequence) -> tuple[int, ...]:
        """Chamber key of a point lying on no hyperplane."""
        return tuple(fam.slot(self.level(f, y)) for f, fam in enumerate(self.families))

    def generic_point(self) -> Point:
        p = 1009
        while True:
            y = tuple(Fraction(1, p ** (j + 1)) + Fraction(j + 1, 7 * p) for j in range(self.r))
            if not self.hyperplanes_through(y):
                return y
            p += 2

    # -- vertices -------------------------------------------------------------

    @cached_property
    def _independent_subsets(self) -> list[tuple[int, ...]]:
        out = []
        for S in combinations(range(len(self.families)), self.r):
            if rank([self.reduced[f] for f in S]) == self.r:
                out.append(S)
        return out

    @cached_property
    def vertex_classes(self) -> tuple[Point, ...]:
        """Vertices of the quotient arrangement, reduced into [0, 1)^r."""
        if self.r == 0:
            return ((),)
        found = set()
        for S in self._independent_subsets:
            A = [self.reduced[f] for f in S]
            U, D, V = smith_normal_form(A)
            Uinv = inverse(U)
            Ainv = inverse(A)
            divs = [D[i][i] for i in range(self.r)]
            cosets = [mat_vec(Uinv, t) for t in product(*(range(d) for d in divs))]
            for offs in product(*(self.families[f].offsets for f in S)):
                for k in cosets:
                    y = mat_vec(Ainv, vec_add(offs, k))
                    found.add(tuple(frac(a) for a in y))
        return tuple(sorted(found))

    def is_transversal(self) -> bool:
        """Every vertex lies on exactly r hyperplanes, counted with multiplicity."""
        return all(self.multiplicity_through(v) == self.r for v in self.vertex_classes)

    def vertex_denominator(self) -> int:
        """Least D with every vertex in (1/D)Z^r."""
        return denominator_lcm(a for v in self.vertex_classes for a in v)

    # -- chambers -------------------------------------------------------------

    @cached_property
    def _box_subset(self) -> tuple[tuple[int, ...], tuple]:
        best = None
        for S in self._independent_subsets:
            Ainv = inverse([self.reduced[f] for f in S])
            gaps = [max(self.families[f].value(i + 1) - self.families[f].value(i)
                        for i in range(len(self.families[f].offsets))) for f in S]
            cost = 1
            for j in range(self.r):
                cost *= sum(abs(Ainv[j][t]) * gaps[t] for t in range(self.r)) + 1
            if best is None or cost < best[0]:
                best = (cost, S, Ainv)
        return best[1], best[2]

    def chamber_vertices(self, key: Sequence[int]) -> tuple[Point, ...]:
        key = tuple(key)
        cache = self.__dict__.setdefault("_vertex_cache", {})
        if key not in cache:
            cache[key] = self._chamber_vertices(key)
        return cache[key]

    def _chamber_vertices(self, key: tuple[int, ...]) -> tuple[Point, ...]:
        S, Ainv = self._box_subset
        lo_s = [self.families[f].value(key[f]) for f in S]
        hi_s = [self.families[f].value(key[f] + 1) for f in S]
        ranges = []
        for j in range(self.r):
            lo = sum(min(Ainv[j][t] * lo_s[t], Ainv[j][t] * hi_s[t]) for t in range(self.r))
            hi = sum(max(Ainv[j][t] * lo_s[t], Ainv[j][t] * hi_s[t]) for t in range(self.r))
            ranges.append((lo, hi))
        D = self._scale
        bounds = [(D * fam.value(key[f]), D * fam.value(key[f] + 1)) for f, fam in enumerate(self.families)]
        bounds = [(int(lo), int(hi)) for lo, hi in bounds]
        normals = self.reduced
        out = []
        for v, V in zip(self.vertex_classes, self._scaled_vertices):
            spans = [range(ceil(lo - v[j]), floor(hi - v[j]) + 1) for j, (lo, hi) in enumerate(ranges)]
            for m in product(*spans):
                Y = [a + D * b for a, b in zip(V, m)]
                ok = True
                for a, (lo, hi) in zip(normals, bounds):
                    s = sum(x * y for x, y in zip(a, Y))
                    if s < lo or s > hi:
                        ok = False
                        break
                if ok:
                    out.append(tuple(Fraction(y, D) for y in Y))
        return tuple(sorted(out))

    @cached_property
    def _scale(self) -> int:
        return denominator_lcm([a for v in self.vertex_classes for a in v]
                               + [o for fam in self.families for o in fam.offsets])

    @cached_property
    def _scaled_vertices(self) -> list[tuple[int, ...]]:
        return [tuple(int(a * self._scale) for a in v) for v in self.vertex_classes]

    def shift_key(self, key: Sequence[int], m: Sequence[int]) -> tuple[int, ...]:
        """Key of the chamber translated by the integer vector m."""
        return tuple(h + len(fam.offsets) * dot(self.reduced[f], m)
                     for f, (h, fam) in enumerate(zip(key, self.families)))

    def _chamber(self, key: tuple[int, ...]) -> tuple[Chamber, list[tuple[int, ...]]]:
        verts = self.chamber_vertices(key)
        facets = []
        neighbours = []
        for f, fam in enumerate(self.families):
            for side, h in ((+1, key[f]), (-1, key[f] + 1)):
                level = fam.value(h)
                on = frozenset(v for v in verts if self.level(f, v) == level)
                if len(on) and affine_rank(sorted(on)) == self.r - 1:
                    facets.append((f, side, on))
                    nk = list(key)
                    nk[f] -= side
                    neighbours.append(tuple(nk))
        return Chamber(tuple(key), verts, facets), neighbours

    def canonical_chamber_key(self, key: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(canonical key, shift m) where the canonical chamber is key translated by -m."""
        m = canonical_shift(self.chamber_vertices(key))
        return self.shift_key(key, tuple(-a for a in m)), m

    @cached_property
    def chambers(self) -> dict[tuple[int, ...], Chamber]:
        """Chamber classes keyed by canonical position vector."""
        if self.r == 0:
            return {(): Chamber((), ((),), [])}
        start = self.canonical_chamber_key(self.position(self.generic_point()))[0]
        out: dict[tuple[int, ...], Chamber] = {}
        queue = deque([start])
        seen = {start}
        while queue:
            key = queue.popleft()
            ch, nbrs = self._chamber(key)
            out[key] = ch
            for nk in nbrs:
                ck = self.canonical_chamber_key(nk)[0]
                if ck not in seen:
                    seen.add(ck)
                    queue.append(ck)
        return dict(sorted(out.items()))

    # -- all cells ------------------------------------------------------------

    def canonical_cell(self, points: Iterable[Point]) -> tuple[tuple[Point, ...], tuple[int, ...]]:
        pts = tuple(points)
        m = canonical_shift(pts)
        return translate(pts, m), m

    @cached_property
    def cells(self) -> dict[tuple[Point, ...], CellClass]:
        """Every cell class of the quotient arrangement keyed by canonical vertices."""
        out: dict[tuple[Point, ...], CellClass] = {}
        for ch in self.chambers.values():
            pts = list(ch.vertices)
            index = {p: i for i, p in enumerate(pts)}
            facet_sets = [frozenset(index[p] for p in on) for _, _, on in ch.facets]
            faces = face_closure(pts, facet_sets) if self.r else {0: (frozenset([0]),)}
            for d, fs in faces.items():
                for F in fs:
                    key, _ = self.canonical_cell(pts[i] for i in F)
                    if key in out:
                        continue
                    hyps = self.hyperplanes_through(barycenter(key)) if self.r else ()
                    out[key] = CellClass(key, d, hyps, has_lattice_identification(key))
        return dict(sorted(out.items(), key=lambda kv: (kv[1].dim, kv[0])))

    def census(self) -> dict[int, int]:
        """Number of cell classes by dimension in R^g (quotient dim + h)."""
        out: dict[int, int] = {}
        for c in self.cells.values():
            out[c.dim + self.h] = out.get(c.dim + self.h, 0) + 1
        return dict(sorted(out.items()))

    # -- cellular chains of the dual complex ----------------------------------

    def dual_boundaries(self):
        """Boundary matrices of the complex dual to the quotient arrangement.

        Dual 0-cells are chambers, dual 1-cells walls and dual 2-cells the
        codimension-two cells.  Returns (chamber keys, wall keys, ridge keys,
        d1, d2) with d1 of shape chambers x walls and d2 walls x ridges.
        """
        chambers = list(self.chambers)
        ch_index = {k: i for i, k in enumerate(chambers)}
        walls: dict[tuple, dict] = {}
        ridges: dict[tuple, dict] = {}
        for key, ch in self.chambers.items():
            for f, side, on in ch.facets:
                wkey, _ = self.canonical_cell(on)
                entry = walls.setdefault(wkey, {"family": f, "plus": None, "minus": None})
                entry["plus" if side > 0 else "minus"] = key
            for (f1, s1, w1), (f2, s2, w2) in combinations(ch.facets, 2):
                K = w1 & w2
                if not K or affine_rank(sorted(K)) != self.r - 2:
                    continue
                kkey, m = self.canonical_cell(K)
                around = ridges.setdefault(kkey, {})
                for f, w in ((f1, w1), (f2, w2)):
                    around[translate(w, m)] = f
        wall_keys = sorted(walls)
        self.wall_sides = [(walls[wk]["plus"], walls[wk]["minus"]) for wk in wall_keys]
        w_index = {k: i for i, k in enumerate(wall_keys)}
        d1 = [[0] * len(wall_keys) for _ in chambers]
        for j, wk in enumerate(wall_keys):
            d1[ch_index[walls[wk]["plus"]]][j] += 1
            d1[ch_index[walls[wk]["minus"]]][j] -= 1
        ridge_keys = sorted(ridges)
        d2 = [[0] * len(ridge_keys) for _ in wall_keys]
        for j, rk in enumerate(ridge_keys):
            base = rk[0]
            dirs = [vec_sub(p, base) for p in rk[1:]]
            c1, c2 = nullspace(dirs, self.r) if dirs else [tuple(1 if i == t else 0 for i in range(self.r)) for t in range(2)]
            bk = barycenter(rk)
            for w, f in ridges[rk].items():
                a = self.reduced[f]
                alpha, beta = solve_rational([[c1[i], c2[i]] for i in range(self.r)], a)
                bw = barycenter(w)
                diff = vec_sub(bw, bk)
                r1, r2 = dot(c1, diff), dot(c2, diff)
                s = -alpha * r2 + beta * r1
                wkey, _ = self.canonical_cell(w)
                d2[w_index[wkey]][j] += 1 if s > 0 else -1
        return chambers, wall_keys, ridge_keys, d1, d2

"""Rational polytopes given by vertices: facets, face lattice, triangulation."""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Iterable, Sequence

from .lattice import RationalCone, affine_rank, det, dot, vec_sub

Point = tuple


def as_point(p: Iterable) -> Point:
    return tuple(Fraction(a) for a in p)


def barycenter(points: Sequence[Sequence]) -> Point:
    n = len(points)
    return tuple(sum(Fraction(p[i]) for p in points) / n for i in range(len(points[0])))


class Polytope:
    """Convex hull of finitely many rational points.

    Faces are reported as frozensets of indices into ``vertices``.
    """

    def __init__(self, points: Iterable[Sequence]):
        pts = sorted({as_point(p) for p in points})
        if not pts:
            raise ValueError("empty polytope")
        self.ambient_dim = len(pts[0])
        n = self.ambient_dim
        if len(pts) == 1:
            self.vertices: tuple[Point, ...] = tuple(pts)
            self._facet_ineqs: list[tuple] = []
            self._equations = [tuple(1 if i == j else 0 for i in range(n)) + (-pts[0][j],)
                               for j in range(n)]
            return
        cone = RationalCone.from_generators([p + (1,) for p in pts], n + 1)
        verts = sorted(tuple(Fraction(r[i], r[n]) for i in range(n)) for r in cone.rays)
        self.vertices = tuple(verts)
        # facet inequality h . (x, 1) >= 0
        self._facet_ineqs = list(cone.halfspaces)
        self._equations = list(cone.equations)

    @cached_property
    def dim(self) -> int:
        return affine_rank(self.vertices)

    def facet_inequalities(self) -> list[tuple[tuple, int]]:
        """Pairs (a, c) with a.x + c >= 0 on the polytope, one per facet."""
        n = self.ambient_dim
        return [(h[:n], h[n]) for h in self._facet_ineqs]

    @cached_property
    def facets(self) -> tuple[frozenset, ...]:
        out = []
        for a, c in self.facet_inequalities():
            out.append(frozenset(i for i, v in enumerate(self.vertices) if dot(a, v) + c == 0))
        return tuple(sorted(out, key=sorted))

    @cached_property
    def faces(self) -> dict[int, tuple[frozenset, ...]]:
        """All nonempty faces grouped by dimension."""
        return face_closure(self.vertices, self.facets)

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.faces.get(i, ())) for i in range(self.dim + 1))

    def contains(self, x: Sequence) -> bool:
        x = as_point(x) + (1,)
        if any(dot(e, x) != 0 for e in self._equations):
            return False
        return all(dot(h, x) >= 0 for h in self._facet_ineqs)

    def pulling_triangulation(self, order: Sequence[int] | None = None) -> list[tuple[int, ...]]:
        """Triangulate by pulling vertices in the given order (default: index order)."""
        rank_of = {i: k for k, i in enumerate(order or range(len(self.vertices)))}
        return pulling_triangulation(self.vertices, self.faces, rank_of)

    def volume(self) -> Fraction:
        """Euclidean volume; zero unless full-dimensional."""
        if self.dim < self.ambient_dim:
            return Fraction(0)
        total = Fraction(0)
        d = self.dim
        for simplex in self.pulling_triangulation():
            v0 = self.vertices[simplex[0]]
            total += abs(Fraction(det([vec_sub(self.vertices[i], v0) for i in simplex[1:]])))
        return total / factorial(d)

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)})"


def face_closure(points: Sequence[Point], facets: Iterable[frozenset]) -> dict[int, tuple[frozenset, ...]]:
    """Close a list of facet vertex-sets under intersection and sort by dimension."""
    facets = [f for f in facets if f]
    full = frozenset(range(len(points)))
    seen = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for F in frontier:
            for G in facets:
                H = F & G
                if H and H != F and H not in seen:
                    seen.add(H)
                    nxt.append(H)
        frontier = nxt
    by_dim: dict[int, list[frozenset]] = {}
    for F in seen:
        by_dim.setdefault(affine_rank([points[i] for i in sorted(F)]), []).append(F)
    return {d: tuple(sorted(fs, key=sorted)) for d, fs in sorted(by_dim.items())}


def pulling_triangulation(points: Sequence[Point], faces: dict[int, tuple[frozenset, ...]],
                          rank_of: dict[int, int]) -> list[tuple[int, ...]]:
    """Pulling triangulation of the top face using the face lattice."""
    top_dim = max(faces)
    memo: dict[frozenset, list[tuple[int, ...]]] = {}

    def subfaces(F: frozenset, d: int) -> list[frozenset]:
        return [G for G in faces.get(d - 1, ()) if G < F]

    def tri(F: frozenset, d: int) -> list[tuple[int, ...]]:
        if F in memo:
            return memo[F]
        if d == 0:
            res = [tuple(F)]
        else:
            apex = min(F, key=lambda i: rank_of[i])
            res = []
            for G in subfaces(F, d):
                if apex in G:
                    continue
                for s in tri(G, d - 1):
                    res.append(tuple(sorted(s + (apex,))))
        memo[F] = res
        return res

    return sorted(tri(faces[top_dim][0], top_dim))

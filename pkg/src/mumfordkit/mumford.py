"""Mumford degenerations assembled from convex PL sections.

For sections b_1..b_k the relevant polyhedron is the overgraph
{(x, h) : h_i >= b_i(x)} in R^g x R^k.  Its faces are pairs (J, F) with J a
set of tight coordinates and F a cell of the common refinement of the
bending loci of b_j, j in J.  The normal cone of (J, F) is generated by the
vectors (-q, e_j) with q a vertex of the subdifferential of b_j along F.
Each subdifferential is a zonotope whose segments come from the
hyperplanes through F, so the cones are written down directly.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import floor
from typing import Iterable, Mapping, Sequence

from .arrangement import PeriodicArrangement, merge_families
from .errors import ValidationError
from .lattice import (
    RationalCone, affine_rank, dot, elementary_divisors,
    integer_kernel, is_standard_affine, lcm, rank, rays_form_basis_part,
    smith_normal_form, solve_integer, transpose, vec_add, vec_sub,
)
from .matroid import MatroidRep, is_unimodular
from .plsection import (
    ComplexCell, PLSection, PeriodicComplex, section_from_json,
)
from .polytope import Polytope, barycenter

NODAL = "nodal"
SEMISTABLE = "semistable"
NEARLY_NODAL = "nearly-nodal"
OTHER = "other"


# ---------------------------------------------------------------------------
# input data

@dataclass(frozen=True)
class MumfordData:
    g: int
    sections: tuple[PLSection, ...]
    d: int = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(self.sections))
        if not self.sections:
            raise ValidationError("need at least one section")
        for i, b in enumerate(self.sections):
            if b.g != self.g:
                raise ValidationError(f"section {i + 1} lives on a torus of rank {b.g}, expected {self.g}")
            if not b.is_convex():
                raise ValidationError(f"section {i + 1} is not convex")
        base = 1
        for b in self.sections:
            base = lcm(base, b.denominator)
        if self.d and self.d % base:
            raise ValidationError(f"d = {self.d} is not a multiple of the section denominator {base}")
        object.__setattr__(self, "d", self.d or base)
        if self.g and rank([t.normal for b in self.sections for t in b.terms] or [(0,) * self.g]) < self.g:
            raise ValidationError("sections do not bend in every direction (no bounded cells)")

    @property
    def k(self) -> int:
        return len(self.sections)

    def total(self) -> PLSection:
        out = self.sections[0]
        for b in self.sections[1:]:
            out = out + b
        return out

    def quadratic_parts(self) -> list:
        return [b.quadratic_part() for b in self.sections]

    def stratum(self, J: Iterable[int]) -> PeriodicArrangement:
        """Arrangement of the bending loci of the sections indexed by J (0-based)."""
        J = sorted(set(J))
        terms = [(t.normal, t.offset, t.param) for j in J for t in self.sections[j].terms]
        return PeriodicArrangement(self.g, merge_families(terms))

    @cached_property
    def full(self) -> PeriodicArrangement:
        return self.stratum(range(self.k))

    @classmethod
    def from_json(cls, obj: Mapping) -> "MumfordData":
        if not isinstance(obj, Mapping):
            raise ValidationError("configuration must be a JSON object")
        if "sections" not in obj:
            raise ValidationError("configuration needs 'sections'")
        secs = obj["sections"]
        if not isinstance(secs, list) or not secs:
            raise ValidationError("'sections' must be a nonempty list")
        g = obj.get("g")
        parsed = [section_from_json(s, g) for s in secs]
        g = int(g) if g is not None else parsed[0].g
        if "k" in obj and int(obj["k"]) != len(parsed):
            raise ValidationError(f"k = {obj['k']} but {len(parsed)} sections given")
        return cls(g, tuple(parsed), int(obj.get("d", 0)), str(obj.get("name", "")))

    def to_json(self) -> dict:
        return {"name": self.name, "g": self.g, "k": self.k, "d": self.d,
                "sections": [b.to_json() for b in self.sections]}


def load_data(text: str) -> MumfordData:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return MumfordData.from_json(obj)


# ---------------------------------------------------------------------------
# local subdifferentials and cones

@dataclass(frozen=True)
class Subdifferential:
    """base + sum of segments [0, g] for g in generators."""

    base: tuple[Fraction, ...]
    generators: tuple[tuple[Fraction, ...], ...]

    def vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        pts = set()
        for signs in product((0, 1), repeat=len(self.generators)):
            p = self.base
            for s, v in zip(signs, self.generators):
                if s:
                    p = vec_add(p, v)
            pts.add(p)
        if len(self.generators) <= 1:
            return tuple(sorted(pts))
        return Polytope(pts).vertices


def subdifferential(b: PLSection, x: Sequence) -> Subdifferential:
    """Subdifferential of b at the point x."""
    base = list(b.linear)
    gens: dict[tuple, Fraction] = {}
    for t in b.terms:
        s = dot(t.normal, x) - t.offset
        k = floor(s)
        if s == k:
            k -= 1
            key = t.normal
            gens[key] = gens.get(key, Fraction(0)) + t.param
        for j in range(b.g):
            base[j] += t.param * k * t.normal[j]
    generators = tuple(tuple(p * a for a in n) for n, p in sorted(gens.items()))
    return Subdifferential(tuple(base), generators)


def _parallelotope_edges(verts: Sequence[tuple]) -> list[tuple] | None:
    """Edge vectors e_1..e_m if verts = v0 + sum of [0, e_t], else None."""
    m = affine_rank(verts)
    if len(verts) != 2 ** m:
        return None
    if m == 0:
        return []
    P = Polytope(verts)
    v0 = P.vertices[0]
    edges = [vec_sub(P.vertices[[i for i in E if i != 0][0]], v0) for E in P.faces.get(1, ()) if 0 in E]
    if len(edges) != m:
        return None
    sums = set()
    for signs in product((0, 1), repeat=m):
        p = v0
        for s, e in zip(signs, edges):
            if s:
                p = vec_add(p, e)
        sums.add(p)
    return edges if sums == set(P.vertices) else None


def classify_local(polytopes: Mapping[int, Sequence[tuple]]) -> tuple[str, str]:
    """Local normal form of the cone Cone{(-q, e_j) : q in polytope j}.

    Returns (label, reason).  Factors must be unimodular simplices or unit
    parallelotopes whose edge vectors are jointly part of a lattice basis.
    """
    directions = []
    kinds = []
    for j, verts in sorted(polytopes.items()):
        verts = sorted(set(tuple(Fraction(a) for a in v) for v in verts))
        if any(a.denominator != 1 for v in verts for a in v):
            return OTHER, f"non-integral vertex in factor {j + 1}"
        m = affine_rank(verts)
        if len(verts) == m + 1:
            directions += [vec_sub(v, verts[0]) for v in verts[1:]]
            kinds.append(("simplex", m))
            continue
        edges = _parallelotope_edges(verts)
        if edges is None:
            return OTHER, f"factor {j + 1} is neither a simplex nor a parallelotope"
        directions += edges
        kinds.append(("cube", m))
    ints = [tuple(int(a) for a in v) for v in directions]
    if ints and not rays_form_basis_part(ints):
        return OTHER, "edge directions are not part of a lattice basis"
    if all(kind == "simplex" or dim <= 1 for kind, dim in kinds):
        if all(dim <= 1 for _, dim in kinds):
            return NODAL, ""
        return SEMISTABLE, ""
    if all(kind == "cube" or dim <= 1 for kind, dim in kinds):
        return NEARLY_NODAL, ""
    return OTHER, "mixes a simplex and a parallelotope of dimension >= 2"


def combine_labels(labels: Iterable[str]) -> str:
    labels = set(labels)
    if labels <= {NODAL}:
        return NODAL
    if labels <= {NODAL, SEMISTABLE}:
        return SEMISTABLE
    if labels <= {NODAL, NEARLY_NODAL}:
        return NEARLY_NODAL
    return OTHER


def local_cone(polytopes: Mapping[int, Sequence[tuple]], g: int, k: int) -> RationalCone:
    gens = []
    for j, verts in polytopes.items():
        for q in verts:
            gens.append(tuple(-Fraction(a) for a in q) + tuple(1 if i == j else 0 for i in range(k)))
    return RationalCone.from_generators(gens, g + k)


# ---------------------------------------------------------------------------
# overgraph faces

@dataclass(frozen=True)
class FaceRecord:
    """One translation class of faces of the overgraph."""

    J: tuple[int, ...]                 # tight coordinates, 0-based
    cell: tuple[tuple[Fraction, ...], ...]  # vertices in quotient coordinates
    dim: int                           # dimension of the cell in R^g
    h: int                             # rank of the lattice stabilizer
    compact: bool
    immersed: bool
    subdifferentials: tuple[tuple[int, tuple[tuple[Fraction, ...], ...]], ...]
    cone: RationalCone

    @property
    def image_face(self) -> tuple[int, ...]:
        return self.J

    def label(self) -> str:
        return classify_local(dict(self.subdifferentials))[0]

    def to_json(self) -> dict:
        return {"J": [j + 1 for j in self.J], "dim": self.dim, "h": self.h,
                "compact": self.compact, "immersed": self.immersed,
                "cell": [[str(a) for a in v] for v in self.cell],
                "cone_rays": [list(r) for r in self.cone.rays],
                "cone_standard": is_standard_affine(self.cone)}


def _face_record(data: MumfordData, J: tuple[int, ...], A: PeriodicArrangement, cell) -> FaceRecord:
    y = barycenter(cell.vertices) if A.r else ()
    x = A.lift(y) if A.r else (Fraction(0),) * data.g
    subs = tuple((j, subdifferential(data.sections[j], x).vertices()) for j in J)
    cone = local_cone(dict(subs), data.g, data.k)
    return FaceRecord(J, cell.vertices, cell.dim + A.h, A.h, A.h == 0, cell.immersed, subs, cone)


def subsets(k: int) -> list[tuple[int, ...]]:
    return [J for size in range(1, k + 1) for J in combinations(range(k), size)]


def overgraph_faces(data: MumfordData) -> list[FaceRecord]:
    """Face classes (J, F) for every nonempty J; the face J = {} is the generic fibre."""
    out = []
    for J in subsets(data.k):
        A = data.stratum(J)
        for cell in A.cells.values():
            out.append(_face_record(data, J, A, cell))
    return out


def minimal_faces(data: MumfordData, J: tuple[int, ...]) -> list[FaceRecord]:
    """Faces (J, F) with F a minimal cell of the J-refinement."""
    A = data.stratum(J)
    from .arrangement import CellClass
    out = []
    for v in A.vertex_classes:
        cell = CellClass((v,), 0, A.hyperplanes_through(v) if A.r else (), False)
        out.append(_face_record(data, J, A, cell))
    return out


# ---------------------------------------------------------------------------
# strata

@dataclass(frozen=True)
class Stratification:
    J: tuple[int, ...]
    complex: PeriodicComplex
    components: tuple[dict, ...]

    def summary(self) -> str:
        compact = [c for c in self.components if c["compact"]]
        parts = []
        if compact:
            shapes = {}
            for c in compact:
                shapes[c["shape"]] = shapes.get(c["shape"], 0) + 1
            desc = ", ".join(f"{n} {s}{'s' if n > 1 else ''}" for s, n in sorted(shapes.items()))
            d = compact[0]["dim"]
            parts.append(f"{len(compact)} compact {d}-cell{'s' if len(compact) > 1 else ''} ({desc})")
        rest = [c for c in self.components if not c["compact"]]
        if rest:
            parts.append(f"{len(rest)} non-compact component{'s' if len(rest) > 1 else ''} "
                         + ", ".join(f"F0 x T^{c['h']} with F0 a {c['shape']}" for c in rest))
        return "; ".join(parts)


_SHAPES = {0: {1: "point"}, 1: {2: "segment"}, 2: {3: "triangle", 4: "quadrilateral", 5: "pentagon", 6: "hexagon"}}


def shape_name(dim: int, nverts: int) -> str:
    return _SHAPES.get(dim, {}).get(nverts, f"{dim}-polytope with {nverts} vertices")


def stratification(data: MumfordData, I: Iterable[int]) -> Stratification:
    """Common refinement of the bending loci for I (0-based) with component descriptors."""
    J = tuple(sorted(set(I)))
    if not J:
        raise ValidationError("I must be nonempty")
    if any(j < 0 or j >= data.k for j in J):
        raise ValidationError(f"I must be a subset of 1..{data.k}")
    A = data.stratum(J)
    cells = []
    comps = []
    for cc in A.cells.values():
        labels = tuple(sorted({j + 1 for j in J for f, _ in cc.hyperplanes
                               if any(tuple(t.normal) in (A.families[f].normal, tuple(-a for a in A.families[f].normal))
                                      for t in data.sections[j].terms)}))
        cells.append(ComplexCell(cc.vertices, cc.dim + A.h, None, cc.immersed, A.h == 0, labels))
        if cc.dim == A.r:
            comps.append({"dim": cc.dim + A.h, "compact": A.h == 0, "h": A.h,
                          "shape": shape_name(cc.dim, len(cc.vertices)),
                          "vertices": [[str(a) for a in v] for v in cc.vertices],
                          "self_glued": cc.immersed})
    return Stratification(J, PeriodicComplex(data.g, A.projection, tuple(cells)), tuple(comps))


# ---------------------------------------------------------------------------
# singularities

@dataclass(frozen=True)
class SingularityReport:
    smooth: bool
    classification: str
    strata: dict
    strict: bool
    witnesses: tuple

    def to_json(self) -> dict:
        return {"smooth": self.smooth, "classification": self.classification,
                "strict": self.strict,
                "strata": {",".join(str(j + 1) for j in J): lab for J, lab in self.strata.items()},
                "witnesses": list(self.witnesses)}


def classify_singularities(data: MumfordData) -> SingularityReport:
    strata = {}
    witnesses = []
    for J in subsets(data.k):
        labels = []
        for rec in minimal_faces(data, J):
            lab, why = classify_local(dict(rec.subdifferentials))
            labels.append(lab)
            if lab == OTHER and len(witnesses) < 8:
                witnesses.append({"J": [j + 1 for j in J],
                                  "point": [str(a) for a in rec.cell[0]],
                                  "reason": why,
                                  "cone_rays": [list(r) for r in rec.cone.rays]})
        strata[J] = combine_labels(labels)
    smooth = all(is_standard_affine(rec.cone) for rec in minimal_faces(data, tuple(range(data.k))))
    strict = all(not ch_immersed for ch_immersed in _singleton_chamber_flags(data))
    return SingularityReport(smooth, combine_labels(strata.values()), strata, strict, tuple(witnesses))


def _singleton_chamber_flags(data: MumfordData) -> list[bool]:
    flags = []
    for j in range(data.k):
        A = data.stratum((j,))
        for cc in A.cells.values():
            if cc.dim == A.r:
                flags.append(cc.immersed)
    return flags


def is_smooth(data: MumfordData) -> bool:
    return classify_singularities(data).smooth


# ---------------------------------------------------------------------------
# K-triviality and the dual complex

def chamber_gradients(data: MumfordData) -> dict:
    A = data.full
    phi = data.total()
    out = {}
    for key, ch in A.chambers.items():
        out[key] = phi.gradient_at(barycenter(ch.vertices))
    return out


def is_K_trivial(data: MumfordData) -> bool:
    """All vertices of the height-one slice, i.e. minus the chamber gradients of
    the summed section, are integral.

    Translating a chamber by m moves its gradient by B m, so the
    representatives and the total quadratic part must both be integral.
    """
    B = data.total().quadratic_part()
    if any(Fraction(a).denominator != 1 for row in B for a in row):
        return False
    return all(a.denominator == 1 for grad in chamber_gradients(data).values() for a in grad)


class Homology1:
    """First homology of a chain complex C2 -> C1 -> C0 given by integer matrices.

    The rank uses rational elimination; torsion and cycle coordinates need
    Smith forms and are computed on demand.
    """

    def __init__(self, n_walls: int, d1: Sequence[Sequence[int]], d2: Sequence[Sequence[int]]):
        self.n = n_walls
        self.d1 = [list(r) for r in d1]
        self.d2 = [list(r) for r in d2]
        r1 = rank(self.d1) if self.d1 and n_walls else 0
        r2 = rank(self.d2) if self.d2 and self.d2[0] else 0
        self.rank = n_walls - r1 - r2

    @cached_property
    def torsion(self) -> tuple[int, ...]:
        if not (self.d2 and self.d2[0]):
            return ()
        return tuple(d for d in elementary_divisors(self.d2) if d > 1)

    @cached_property
    def _basis(self):
        n = self.n
        if self.d1 and n:
            Z = integer_kernel(self.d1, n)
        else:
            Z = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
        s = len(Z)
        ZT = transpose(Z)
        coords = []
        for c in (transpose(self.d2) if self.d2 and self.d2[0] else []):
            z = solve_integer(ZT, c)
            if z is None:
                raise ArithmeticError("boundary of a 2-cell is not a cycle")
            coords.append(z)
        if coords:
            U, D, _ = smith_normal_form(transpose(coords))
            diag = [D[i][i] if i < len(D[0]) else 0 for i in range(s)]
        else:
            U = tuple(tuple(1 if i == j else 0 for j in range(s)) for i in range(s))
            diag = [0] * s
        free = [i for i in range(s) if diag[i] == 0]
        return ZT, U, free

    def coordinates(self, cycle: Sequence[int]) -> tuple[int, ...]:
        """Free coordinates of the class of a 1-cycle."""
        ZT, U, free = self._basis
        if not free:
            return ()
        z = solve_integer(ZT, cycle)
        if z is None:
            raise ValueError("chain is not a cycle")
        u = [sum(a * b for a, b in zip(row, z)) for row in U]
        return tuple(u[i] for i in free)


def homology_1(n_walls: int, d1: Sequence[Sequence[int]], d2: Sequence[Sequence[int]]) -> Homology1:
    return Homology1(n_walls, d1, d2)


@dataclass
class DualComplex:
    chambers: list
    walls: list
    ridges: list
    d1: list
    d2: list
    h1: Homology1
    arrangement: PeriodicArrangement = field(repr=False)

    def census(self) -> dict[int, int]:
        return {0: len(self.chambers), 1: len(self.walls), 2: len(self.ridges)}

    def is_cycle_graph(self) -> bool:
        """True when the 1-skeleton is a single cycle through every vertex."""
        n = len(self.chambers)
        if len(self.walls) != n:
            return False
        index = {c: i for i, c in enumerate(self.chambers)}
        deg = [0] * n
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        for plus, minus in self.arrangement.wall_sides:
            a, b = index[plus], index[minus]
            deg[a] += 1
            deg[b] += 1
            parent[find(a)] = find(b)
        return all(x == 2 for x in deg) and len({find(i) for i in range(n)}) == 1

    def cycle_lift(self, direction: Sequence[int]) -> list[int]:
        """1-cycle obtained from a chamber path from C to C + direction."""
        A = self.arrangement
        start = self.chambers[0]
        target = A.shift_key(start, direction)
        prev = {start: None}
        queue = deque([start])
        while queue:
            key = queue.popleft()
            if key == target:
                break
            ch, nbrs = A._chamber(key)
            for (f, side, on), nk in zip(ch.facets, nbrs):
                if nk not in prev:
                    prev[nk] = (key, side, on)
                    queue.append(nk)
        if target not in prev:
            raise ArithmeticError("no chamber path found")
        wall_index = {w: i for i, w in enumerate(self.walls)}
        chain = [0] * len(self.walls)
        key = target
        while prev[key] is not None:
            pk, side, on = prev[key]
            wkey, _ = A.canonical_cell(on)
            chain[wall_index[wkey]] += -1 if side > 0 else 1
            key = pk
        return chain


def dual_complex(data: MumfordData) -> DualComplex:
    A = data.full
    chambers, walls, ridges, d1, d2 = A.dual_boundaries()
    h1 = homology_1(len(walls), d1, d2)
    return DualComplex(chambers, walls, ridges, d1, d2, h1, A)


# ---------------------------------------------------------------------------
# transversely shifted matroidal data

@dataclass(frozen=True)
class RecoveredArrangement:
    rep: MatroidRep
    offsets: tuple[tuple[Fraction, ...], ...]


def recover_arrangement(data: MumfordData) -> RecoveredArrangement | None:
    """Inverse of the shifted matroidal construction, or None when the data is
    not a transversal unimodular arrangement with unit bends."""
    cols = []
    offsets = []
    for b in data.sections:
        if not b.terms or any(t.param != 1 for t in b.terms):
            return None
        normal = b.terms[0].normal
        offs = []
        for t in b.terms:
            if t.normal == normal:
                offs.append(t.offset - floor(t.offset))
            elif t.normal == tuple(-a for a in normal):
                o = -t.offset
                offs.append(o - floor(o))
            else:
                return None
        if len(set(offs)) != len(offs):
            return None
        cols.append(normal)
        offsets.append(tuple(sorted(offs)))
    rows = tuple(tuple(c[i] for c in cols) for i in range(data.g))
    if not is_unimodular(rows):
        return None
    if not data.full.is_transversal():
        return None
    return RecoveredArrangement(MatroidRep(rows), tuple(offsets))

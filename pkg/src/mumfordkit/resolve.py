"""Monomial base change of Mumford data and its toroidal resolution.

Pulling back along u_i = prod_j w_j^r_ij replaces the sections b_i by
c_j = sum_i r_ij b_i.  Near a node x y = u_i the pullback reads
x y = w^r_i, which is singular once |r_i| > 1.  The first stage replaces a
bend of vector r_i at z = 0 by unit bends e_j at z = jN + l (l = 1..r_ij),
so every local equation becomes x y = w_j; the result is nearly nodal.  The
second stage splits the remaining cube singularities x_1 y_1 = ... = x_m y_m
= w by pulling triangulations of [0, 1]^m, giving a semistable model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

from .errors import Refusal, ValidationError
from .lattice import as_matrix, det, is_standard_affine, vec_sub
from .mumford import (
    NEARLY_NODAL, NODAL, OTHER, MumfordData, _parallelotope_edges,
    classify_local, classify_singularities, combine_labels, dual_complex,
    local_cone, minimal_faces, subsets,
)
from .plsection import HyperplaneTerm, PLSection
from .polytope import Polytope, barycenter


# ---------------------------------------------------------------------------
# monomial maps

@dataclass(frozen=True)
class MonomialMap:
    """u_i = prod_j w_j^exponents[i][j]; k old rows, n new columns."""

    exponents: tuple

    def __post_init__(self):
        R = as_matrix(self.exponents)
        if not R or not R[0]:
            raise ValidationError("exponent matrix is empty")
        if any(len(r) != len(R[0]) for r in R):
            raise ValidationError("exponent matrix is ragged")
        if any(a != int(a) or a < 0 for r in R for a in r):
            raise ValidationError("exponents must be nonnegative integers")
        R = tuple(tuple(int(a) for a in r) for r in R)
        for i, row in enumerate(R):
            if not any(row):
                raise ValidationError(f"u_{i + 1} pulls back to a constant (zero row)")
        for j in range(len(R[0])):
            if not any(row[j] for row in R):
                raise ValidationError(f"w_{j + 1} does not occur (zero column)")
        object.__setattr__(self, "exponents", R)

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def n(self) -> int:
        return len(self.exponents[0])

    @property
    def snc(self) -> bool:
        """The reduced preimage of the coordinate divisor is snc (always, for monomial charts)."""
        return True

    def row(self, i: int) -> tuple[int, ...]:
        return self.exponents[i]


def monomial_base_change(data: MumfordData, R) -> MumfordData:
    """Sections c_j = sum_i r_ij b_i of the pulled-back degeneration."""
    if not isinstance(R, MonomialMap):
        R = MonomialMap(R)
    if R.k != data.k:
        raise ValidationError(f"exponent matrix has {R.k} rows but the data has {data.k} sections")
    sections = []
    for j in range(R.n):
        c = None
        for i in range(R.k):
            r = R.exponents[i][j]
            if r:
                part = data.sections[i].scale(r)
                c = part if c is None else c + part
        sections.append(c)
    return MumfordData(data.g, tuple(sections), 0, f"{data.name} base change" if data.name else "")


# ---------------------------------------------------------------------------
# plans

@dataclass(frozen=True)
class ResolutionPlan:
    """Separation constant N, order of the new divisors, order of components.

    ``divisor_order`` lists the new divisors (0-based) from first to last;
    ``component_order`` is "lex" or "revlex" on canonical chamber keys.
    """

    N: int
    divisor_order: tuple[int, ...]
    component_order: str = "lex"

    def __post_init__(self):
        object.__setattr__(self, "divisor_order", tuple(int(a) for a in self.divisor_order))
        if self.N <= 0:
            raise ValidationError("N must be positive")
        if sorted(self.divisor_order) != list(range(len(self.divisor_order))):
            raise ValidationError("divisor order must be a permutation of the new divisors")
        if self.component_order not in ("lex", "revlex"):
            raise ValidationError("component order must be 'lex' or 'revlex'")

    @classmethod
    def default(cls, R: Sequence[Sequence[int]], N: int | None = None,
                divisor_order: Sequence[int] | None = None, component_order: str = "lex") -> "ResolutionPlan":
        R = as_matrix(R)
        n = len(R[0])
        top = max(max(r) for r in R)
        N = n * (1 + top) if N is None else N
        return cls(N, tuple(range(n)) if divisor_order is None else tuple(divisor_order), component_order)

    def label(self, j: int) -> int:
        """1-based position of divisor j in the order; bends of j sit at label*N + l."""
        return self.divisor_order.index(j) + 1

    def check(self, R: Sequence[Sequence[int]]) -> None:
        n = len(self.divisor_order)
        if any(len(r) != n for r in R):
            raise ValidationError(f"plan orders {n} divisors, exponent vectors have another length")
        top = max((a for r in R for a in r), default=0)
        if self.N < top:
            raise ValidationError(f"N = {self.N} is too small: bend positions collide unless N >= {top}")

    def positions(self, r: Sequence[int]) -> list[tuple[int, int]]:
        """Sorted (position, divisor) bends of one node with exponent vector r."""
        out = [(self.label(j) * self.N + l, j) for j in range(len(r)) for l in range(1, r[j] + 1)]
        return sorted(out)

    def to_json(self) -> dict:
        return {"N": self.N, "divisor_order": [j + 1 for j in self.divisor_order],
                "component_order": self.component_order}


# ---------------------------------------------------------------------------
# local stage one

@dataclass(frozen=True)
class LocalFace:
    """A minimal domain of linearity of c: node i sits at positions[i] (None = free)."""

    positions: tuple
    colors: tuple
    polytopes: Mapping  # divisor -> vertices of the subdifferential
    label: str
    rule_label: str


@dataclass(frozen=True)
class LocalRefinement:
    local_r: tuple
    plan: ResolutionPlan
    bends: tuple  # per node: ((position, divisor), ...)
    faces: tuple[LocalFace, ...]
    before: tuple  # labels of the unrefined faces of P, by node subset
    refines: bool

    @property
    def classification(self) -> str:
        return combine_labels(f.label for f in self.faces)

    @property
    def consistent(self) -> bool:
        """The polytope classifier and the distinct-divisor rule agree on every face."""
        return all(f.label == f.rule_label for f in self.faces)

    def exceptional_components(self) -> list[int]:
        """New components over each node: one fewer than its number of bends."""
        return [max(len(b) - 1, 0) for b in self.bends]

    def to_json(self) -> dict:
        return {
            "plan": self.plan.to_json(),
            "bends": [[{"position": p, "divisor": j + 1} for p, j in b] for b in self.bends],
            "classification": self.classification,
            "consistent": self.consistent,
            "refines_P": self.refines,
            "faces": len(self.faces),
            "face_labels": _count(f.label for f in self.faces),
            "unrefined_labels": {",".join(str(i + 1) for i in I): lab for I, lab in self.before},
        }


def _count(labels) -> dict:
    out: dict = {}
    for lab in labels:
        out[lab] = out.get(lab, 0) + 1
    return dict(sorted(out.items()))


def _slope(bends: Sequence[tuple[int, int]], j: int, z: Fraction) -> int:
    """Slope in z of the j-th coordinate of c_i just above z."""
    return -sum(1 for p, jj in bends if jj == j and p > z)


def _c_value(bends: Sequence[tuple[int, int]], n: int, z: Fraction) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * n
    for p, j in bends:
        if p > z:
            out[j] += p - z
    return tuple(out)


def _box_polytopes(m: int, n: int, segments: Mapping[int, tuple[int, Sequence[int], Sequence[int]]]) -> dict:
    """Per divisor, the product of the given coordinate segments as vertex lists.

    ``segments`` maps a node i to (divisor, low slope vector, high slope vector).
    """
    out = {}
    for j in range(n):
        axes = []
        for i in range(m):
            seg = segments.get(i)
            if seg is not None and seg[0] == j:
                axes.append((seg[1][j], seg[2][j]))
            else:
                axes.append((segments[i][1][j],) if i in segments else (0,))
        out[j] = sorted(set(product(*[sorted(set(a)) for a in axes])))
    return out


def nearly_nodal_stage(local_r: Sequence[Sequence[int]], plan: ResolutionPlan) -> LocalRefinement:
    """Replace the bend r_i at z_i = 0 by unit bends e_j at z_i = label(j) N + l."""
    local_r = tuple(tuple(int(a) for a in r) for r in local_r)
    if not local_r:
        raise ValidationError("need at least one node")
    if any(a < 0 for r in local_r for a in r) or any(not any(r) for r in local_r):
        raise ValidationError("exponent vectors must be nonnegative and nonzero")
    plan.check(local_r)
    m, n = len(local_r), len(plan.divisor_order)
    bends = tuple(tuple(plan.positions(r)) for r in local_r)

    faces = []
    for I in (I for size in range(m + 1) for I in combinations(range(m), size)):
        for choice in product(*[bends[i] for i in I]):
            segments = {}
            for i, (p, j) in zip(I, choice):
                hi = [_slope(bends[i], jj, Fraction(p)) for jj in range(n)]
                lo = [a - (1 if jj == j else 0) for jj, a in enumerate(hi)]
                segments[i] = (j, lo, hi)
            polys = _box_polytopes(m, n, segments)
            label = classify_local(polys)[0]
            colors = tuple(j for _, j in choice)
            rule = NODAL if len(set(colors)) == len(colors) else NEARLY_NODAL
            pos = [None] * m
            for i, (p, _) in zip(I, choice):
                pos[i] = p
            faces.append(LocalFace(tuple(pos), colors, polys, label, rule))

    before = []
    for I in (I for size in range(1, m + 1) for I in combinations(range(m), size)):
        polys = {}
        for j in range(n):
            axes = [(-local_r[i][j], 0) if i in I else (0,) for i in range(m)]
            polys[j] = sorted(set(product(*[sorted(set(a)) for a in axes])))
        before.append((I, classify_local(polys)[0]))

    # Q refines P: c_i - b_i is constant for z <= 0 and vanishes beyond the last bend
    refines = True
    for r, b in zip(local_r, bends):
        last = max(p for p, _ in b)
        for j in range(n):
            if _slope(b, j, Fraction(-1)) != -r[j] or _slope(b, j, Fraction(last)) != 0:
                refines = False
    return LocalRefinement(local_r, plan, bends, tuple(faces), tuple(before), refines)


def coherence_check(refinement: LocalRefinement) -> bool:
    """For every J' inside J, forgetting the colours outside J' of the J
    refinement gives the refinement computed for J' directly."""
    n = len(refinement.plan.divisor_order)
    for size in range(1, n):
        for keep in combinations(range(n), size):
            projected = [tuple((p, j) for p, j in b if j in keep) for b in refinement.bends]
            direct = [tuple(refinement.plan.positions(tuple(a if j in keep else 0 for j, a in enumerate(r))))
                      for r in refinement.local_r]
            if projected != direct:
                return False
            # same PL function after projection, checked at every breakpoint and between
            pts = sorted({Fraction(p) for b in refinement.bends for p, _ in b} | {Fraction(0)})
            pts += [p + Fraction(1, 2) for p in pts]
            for b, d in zip(refinement.bends, direct):
                for z in pts:
                    full = _c_value(b, n, z)
                    if tuple(full[j] for j in keep) != tuple(_c_value(d, n, z)[j] for j in keep):
                        return False
    return True


# ---------------------------------------------------------------------------
# cube subdivision

def cube_vertices(m: int) -> list[tuple[int, ...]]:
    return list(product((0, 1), repeat=m))


def cube_subdivision(m: int, order: Sequence[Sequence[int]] | None = None) -> list[tuple[tuple[int, ...], ...]]:
    """Triangulate [0, 1]^m by pulling vertices in ``order`` (default lexicographic).

    Each pull inserts the diagonals of the remaining cells through that vertex.
    """
    if m < 0:
        raise ValidationError("dimension must be nonnegative")
    verts = cube_vertices(m)
    if m == 0:
        return [((),)]
    order = [tuple(int(a) for a in v) for v in order] if order is not None else sorted(verts)
    if sorted(order) != sorted(verts):
        raise ValidationError("order must list every cube vertex exactly once")
    P = Polytope(verts)
    index = {v: i for i, v in enumerate(P.vertices)}
    ranked = [index[tuple(Fraction(a) for a in v)] for v in order]
    simplices = P.pulling_triangulation(ranked)
    return [tuple(tuple(int(a) for a in P.vertices[i]) for i in s) for s in simplices]


def is_unimodular_simplex(simplex: Sequence[Sequence]) -> bool:
    v0 = simplex[0]
    rows = [vec_sub(v, v0) for v in simplex[1:]]
    return len(rows) == 0 or abs(det(rows)) == 1


def is_staircase(simplex: Sequence[Sequence[int]]) -> bool:
    """Whether the vertices form a monotone cube path, i.e. the simplex is
    {0 <= z_s1 <= ... <= z_sm <= 1} up to reflecting coordinates."""
    m = len(simplex[0])
    pts = [tuple(v) for v in simplex]
    for start in pts:
        path = [start]
        rest = set(pts) - {start}
        used: set = set()
        while rest:
            nxt = [p for p in rest if sum(a != b for a, b in zip(p, path[-1])) == 1
                   and [i for i in range(m) if p[i] != path[-1][i]][0] not in used]
            if len(nxt) != 1:
                break
            used.add([i for i in range(m) if nxt[0][i] != path[-1][i]][0])
            path.append(nxt[0])
            rest.discard(nxt[0])
        if not rest:
            return True
    return False


# ---------------------------------------------------------------------------
# global stage one

@dataclass(frozen=True)
class BendPattern:
    """The unit-bend copies generated by one original hyperplane."""

    section: int       # original section, 0-based
    normal: tuple
    offset: Fraction   # original offset
    copies: tuple      # ((position, divisor), ...), sorted by position

    def to_json(self) -> dict:
        return {"section": self.section + 1, "normal": list(self.normal), "offset": str(self.offset),
                "copies": [{"position": p, "divisor": j + 1} for p, j in self.copies]}


@dataclass(frozen=True)
class Stage1:
    base_changed: MumfordData
    data: MumfordData          # nearly nodal model
    plan: ResolutionPlan
    R: MonomialMap
    spacing: Fraction          # distance between consecutive bend positions
    pattern: tuple[BendPattern, ...]
    report: object             # SingularityReport of the nearly nodal model
    predicted_vertices: int

    def to_json(self) -> dict:
        return {"plan": self.plan.to_json(), "spacing": str(self.spacing),
                "classification": self.report.classification, "smooth": self.report.smooth,
                "pattern": [p.to_json() for p in self.pattern],
                "data": self.data.to_json()}


def _family_gap(data: MumfordData) -> Fraction:
    gap = Fraction(1)
    for fam in data.full.families:
        offs = list(fam.offsets) + [fam.offsets[0] + 1]
        for a, b in zip(offs, offs[1:]):
            gap = min(gap, b - a)
    return gap


def _predicted_vertices(data: MumfordData, R: MonomialMap) -> int:
    """Vertices expected near each original vertex: product of the copy counts."""
    A = data.full
    copies = {}
    for i, b in enumerate(data.sections):
        for t in b.terms:
            copies.setdefault(t.normal, {})
    total = 0
    for v in A.vertex_classes:
        x = A.lift(v)
        count = 1
        for i, b in enumerate(data.sections):
            for t in b.terms:
                s = sum(a * c for a, c in zip(t.normal, x)) - t.offset
                if s.denominator == 1:
                    count *= sum(R.row(i))
        total += count
    return total


def nearly_nodal_model(data: MumfordData, R, plan: ResolutionPlan | None = None) -> Stage1:
    """Global stage one: split each original hyperplane into unit bends of the new sections."""
    if not isinstance(R, MonomialMap):
        R = MonomialMap(R)
    if R.k != data.k:
        raise ValidationError(f"exponent matrix has {R.k} rows but the data has {data.k} sections")
    plan = plan or ResolutionPlan.default(R.exponents)
    plan.check(R.exponents)
    if len(plan.divisor_order) != R.n:
        raise ValidationError("plan and exponent matrix disagree on the number of new divisors")
    report0 = classify_singularities(data)
    if report0.classification != NODAL:
        raise ValidationError(f"resolution needs nodal input, got {report0.classification}")
    if any(t.param != 1 for b in data.sections for t in b.terms):
        raise ValidationError("resolution needs unit bending parameters")
    base = monomial_base_change(data, R)
    top = len(plan.divisor_order) * plan.N + max(max(r) for r in R.exponents)
    gap = _family_gap(data)
    predicted = _predicted_vertices(data, R)
    for attempt in range(8):
        spacing = gap / ((top + 1) * 2 ** attempt)
        terms = [[] for _ in range(R.n)]
        pattern = []
        for i, b in enumerate(data.sections):
            copies = plan.positions(R.row(i))
            for t in b.terms:
                for p, j in copies:
                    terms[j].append(HyperplaneTerm(t.normal, t.offset + p * spacing, t.param))
                pattern.append(BendPattern(i, t.normal, t.offset, tuple(copies)))
        sections = tuple(PLSection(data.g, tuple(ts)) for ts in terms)
        model = MumfordData(data.g, sections, 0, f"{data.name} nearly nodal" if data.name else "")
        A = model.full
        if A.is_transversal() and len(A.vertex_classes) == predicted:
            report = classify_singularities(model)
            return Stage1(base, model, plan, R, spacing, tuple(pattern), report, predicted)
    raise Refusal("could not separate the bend copies; the arrangement is too tight")


def check_bend_pattern(stage: Stage1) -> list[str]:
    """Problems with the colour ordering; empty when copies lie on the positive
    side, divisors appear in plan order, and divisor j appears r_ij times."""
    problems = []
    for pat in stage.pattern:
        r = stage.R.row(pat.section)
        if any(p <= 0 for p, _ in pat.copies):
            problems.append(f"copy of section {pat.section + 1} on the negative side")
        labels = [stage.plan.label(j) for _, j in pat.copies]
        if labels != sorted(labels):
            problems.append(f"divisors out of order for section {pat.section + 1}")
        for j in range(stage.R.n):
            if sum(1 for _, jj in pat.copies if jj == j) != r[j]:
                problems.append(f"divisor {j + 1} appears the wrong number of times for section {pat.section + 1}")
    # read the copies back from the model
    for j, c in enumerate(stage.data.sections):
        expected = sum(stage.R.row(pat.section)[j] for pat in stage.pattern)
        if len(c.terms) != expected:
            problems.append(f"section c_{j + 1} has {len(c.terms)} bends, expected {expected}")
    return problems


def global_coherence(stage: Stage1) -> bool:
    """Restricting to the divisors J' keeps exactly the copies coloured by J'."""
    n = stage.R.n
    for size in range(1, n):
        for keep in combinations(range(n), size):
            for j in keep:
                expected = sorted((t.normal, t.offset + p * stage.spacing)
                                  for i, b0 in enumerate(_originals(stage))
                                  for t in b0.terms
                                  for p, jj in stage.plan.positions(
                                      tuple(a if jj2 in keep else 0 for jj2, a in enumerate(stage.R.row(i))))
                                  if jj == j)
                got = sorted((t.normal, t.offset) for t in stage.data.sections[j].terms)
                if expected != got:
                    return False
    return True


def _originals(stage: Stage1) -> list[PLSection]:
    out = {}
    for pat in stage.pattern:
        out.setdefault(pat.section, []).append(HyperplaneTerm(pat.normal, pat.offset, 1))
    g = stage.data.g
    return [PLSection(g, tuple(out.get(i, ()))) for i in range(stage.R.k)]


def local_cross_check(stage: Stage1) -> bool:
    """Face labels of the global model agree with the local stage-one charts
    at every original vertex."""
    data = _originals(stage)
    original = MumfordData(stage.data.g, tuple(data))
    A = original.full
    expected: dict = {}
    for v in A.vertex_classes:
        x = A.lift(v)
        nodes = []
        for i, b in enumerate(data):
            for t in b.terms:
                s = sum(a * c for a, c in zip(t.normal, x)) - t.offset
                if s.denominator == 1:
                    nodes.append(stage.R.row(i))
        local = nearly_nodal_stage(nodes, stage.plan)
        for f in local.faces:
            if all(p is not None for p in f.positions):
                expected[f.label] = expected.get(f.label, 0) + 1
    got: dict = {}
    for rec in minimal_faces(stage.data, tuple(range(stage.data.k))):
        lab = classify_local(dict(rec.subdifferentials))[0]
        got[lab] = got.get(lab, 0) + 1
    return expected == got


# ---------------------------------------------------------------------------
# stage two

@dataclass(frozen=True)
class Stage2:
    plan: ResolutionPlan
    classification: str
    standard_affine: bool
    cells: int                 # refined local cells checked
    subdivided: dict           # cube dimension -> number of subdivided cube factors, all strata
    witnesses: tuple
    split_vertices: int = 0    # square factors split at vertices of the deepest stratum

    def to_json(self) -> dict:
        return {"classification": self.classification, "standard_affine": self.standard_affine,
                "cells_checked": self.cells,
                "subdivided_cubes": {str(d): c for d, c in sorted(self.subdivided.items())},
                "split_vertices": self.split_vertices,
                "witnesses": list(self.witnesses)}


def _refine_factor(verts: Sequence[tuple], order_key) -> list[tuple]:
    """Simplices of a pulling triangulation of a parallelotope factor, or the factor itself."""
    verts = sorted(set(verts))
    m = len(_parallelotope_edges(verts) or []) if len(verts) > 2 else 0
    if m < 2:
        return [tuple(verts)]
    P = Polytope(verts)
    ranked = sorted(range(len(P.vertices)), key=lambda i: order_key(P.vertices[i]))
    return [tuple(P.vertices[i] for i in s) for s in P.pulling_triangulation(ranked)]


def _check_refined(polys: Mapping[int, Sequence[tuple]], order_keys, g: int, k: int,
                   tally: dict, witnesses: list) -> tuple[list[str], bool, int]:
    factors = []
    for j in sorted(polys):
        pieces = _refine_factor(polys[j], order_keys(j))
        if len(pieces) > 1:
            m = len(pieces[0]) - 1
            tally[m] = tally.get(m, 0) + 1
        factors.append([(j, p) for p in pieces])
    labels = []
    smooth = True
    count = 0
    for combo in product(*factors):
        cell = dict(combo)
        lab, why = classify_local(cell)
        labels.append(lab)
        count += 1
        cone = local_cone(cell, g, k)
        if not is_standard_affine(cone):
            smooth = False
        if (lab == OTHER or lab == NEARLY_NODAL or not is_standard_affine(cone)) and len(witnesses) < 8:
            witnesses.append({"factors": {str(j + 1): [[str(a) for a in v] for v in p] for j, p in cell.items()},
                              "label": lab, "reason": why, "cone_rays": [list(r) for r in cone.rays]})
    return labels, smooth, count


def _chamber_order_key(stage_data: MumfordData, x: Sequence, j: int, reverse: bool):
    """Order subdifferential vertices of c_j at x by the canonical key of the
    chamber (of the bending locus of c_j) on which c_j has that gradient."""
    A = stage_data.stratum((j,))
    c = stage_data.sections[j]
    y = A.project(x)
    through = A.hyperplanes_through(y)
    keys = {}
    base = list(A.position(y))
    for signs in product((0, 1), repeat=len(through)):
        key = list(base)
        for (f, h), s in zip(through, signs):
            key[f] = h if s else h - 1
        key = tuple(key)
        verts = A.chamber_vertices(key)
        grad = c.gradient_at(A.lift(barycenter(verts)))
        canon = A.canonical_chamber_key(key)[0]
        keys[tuple(grad)] = canon
    sign = -1 if reverse else 1

    def order(q):
        canon = keys.get(tuple(q))
        if canon is None:
            raise Refusal(f"no chamber carries the gradient {q}")
        return tuple(sign * a for a in canon)

    return order


def semistable_stage(stage: Stage1 | LocalRefinement, plan: ResolutionPlan | None = None) -> Stage2:
    """Subdivide every cube factor and classify the resulting cones."""
    tally: dict = {}
    witnesses: list = []
    labels: list = []
    smooth = True
    cells = 0
    split = 0
    if isinstance(stage, LocalRefinement):
        plan = plan or stage.plan
        reverse = plan.component_order == "revlex"
        n = len(plan.divisor_order)
        m = len(stage.local_r)
        for face in stage.faces:
            key = (lambda j: (lambda q: tuple((-1 if reverse else 1) * a for a in q)))
            labs, ok, c = _check_refined(face.polytopes, key, m, n, tally, witnesses)
            labels += labs
            smooth = smooth and ok
            cells += c
    else:
        plan = plan or stage.plan
        reverse = plan.component_order == "revlex"
        data = stage.data
        for J in subsets(data.k):
            for rec in minimal_faces(data, J):
                A = data.stratum(J)
                x = A.lift(rec.cell[0]) if A.r else (Fraction(0),) * data.g
                keys = {j: _chamber_order_key(data, x, j, reverse) for j in J}
                local: dict = {}
                labs, ok, c = _check_refined(dict(rec.subdifferentials), lambda j: keys[j],
                                             data.g, data.k, local, witnesses)
                for d, count in local.items():
                    tally[d] = tally.get(d, 0) + count
                if len(J) == data.k:
                    split += local.get(2, 0)
                labels += labs
                smooth = smooth and ok
                cells += c
    return Stage2(plan, combine_labels(labels), smooth, cells, tally, tuple(witnesses), split)


# ---------------------------------------------------------------------------
# pipeline

@dataclass(frozen=True)
class Resolution:
    stage1: Stage1
    stage2: Stage2
    pattern_problems: tuple
    coherent: bool
    local_agreement: bool
    dual_census: dict
    dual_is_cycle: bool

    def final_dual_census(self) -> dict | None:
        """Dual complex after the small resolution; each split square adds one
        edge and one triangle.  Only tracked when no higher cube was split."""
        if any(d > 2 for d in self.stage2.subdivided):
            return None
        out = dict(self.dual_census)
        s = self.stage2.split_vertices
        if s:
            out[1] = out.get(1, 0) + s
            out[2] = out.get(2, 0) + s
        return out

    def to_json(self) -> dict:
        return {
            "plan": self.stage1.plan.to_json(),
            "stage1": {"classification": self.stage1.report.classification,
                       "smooth": self.stage1.report.smooth,
                       "pattern": [p.to_json() for p in self.stage1.pattern],
                       "pattern_problems": list(self.pattern_problems),
                       "coherent": self.coherent,
                       "local_agreement": self.local_agreement,
                       "spacing": str(self.stage1.spacing)},
            "stage2": self.stage2.to_json(),
            "dual_complex": {"census": {str(d): c for d, c in self.dual_census.items()},
                             "cycle": self.dual_is_cycle,
                             "after_small_resolution": None if self.final_dual_census() is None else
                             {str(d): c for d, c in self.final_dual_census().items()}},
            "model": self.stage1.data.to_json(),
        }


def resolve(data: MumfordData, R, plan: ResolutionPlan | None = None) -> Resolution:
    """Base change by R, then the nearly nodal and semistable stages."""
    if not isinstance(R, MonomialMap):
        R = MonomialMap(R)
    plan = plan or ResolutionPlan.default(R.exponents)
    s1 = nearly_nodal_model(data, R, plan)
    s2 = semistable_stage(s1, plan)
    dc = dual_complex(s1.data)
    return Resolution(s1, s2, tuple(check_bend_pattern(s1)), global_coherence(s1),
                      local_cross_check(s1), dc.census(), dc.is_cycle_graph())

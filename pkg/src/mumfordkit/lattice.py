"""Exact integer and rational linear algebra.

Matrices are tuples of row tuples.  Entries are Python ints or
``fractions.Fraction``; nothing in here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

Vector = tuple
Matrix = tuple


# ---------------------------------------------------------------------------
# basic helpers

def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple((0,) * n for _ in range(m))


def transpose(A: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = transpose(B)
    if not Bt:
        return tuple(() for _ in A)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def mat_vec(A: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vec_add(u, v) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v) -> Vector:
    return tuple(c * a for a in v)


def mat_add(A, B) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(A, B))


def mat_scale(c, A) -> Matrix:
    return tuple(tuple(c * a for a in r) for r in A)


def outer(u, v) -> Matrix:
    return tuple(tuple(a * b for b in v) for a in u)


def content(v: Iterable[int]) -> int:
    return reduce(gcd, (abs(int(a)) for a in v), 0)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else 0


def denominator_lcm(values: Iterable) -> int:
    d = 1
    for x in values:
        d = lcm(d, Fraction(x).denominator)
    return d


def primitive(v: Sequence) -> Vector:
    """Smallest positive integer multiple direction of a rational vector."""
    d = denominator_lcm(v)
    w = [int(Fraction(a) * d) for a in v]
    c = content(w)
    if c == 0:
        return tuple(w)
    return tuple(a // c for a in w)


def lex_positive(v: Sequence) -> Vector:
    """Return v or -v, whichever has a positive first nonzero entry."""
    for a in v:
        if a > 0:
            return tuple(v)
        if a < 0:
            return tuple(-x for x in v)
    return tuple(v)


def is_integral(v: Iterable) -> bool:
    return all(Fraction(a).denominator == 1 for a in v)


# ---------------------------------------------------------------------------
# elimination over Q

def rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    M = [[Fraction(a) for a in row] for row in A]
    if not M:
        return M, []
    n = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [a * inv for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(A: Sequence[Sequence]) -> int:
    return len(rref(A)[1]) if A else 0


def nullspace(A: Sequence[Sequence], n: int | None = None) -> list[Vector]:
    """Integer primitive basis of the rational right kernel of A."""
    if n is None:
        n = len(A[0]) if A else 0
    R, piv = rref(A) if A else ([], [])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def solve_rational(A: Sequence[Sequence], b: Sequence) -> Vector | None:
    """Some rational solution of A x = b, or None."""
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [list(A[i]) + [b[i]] for i in range(m)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(R, piv):
        x[p] = row[n]
    return tuple(x)


def inverse(A: Sequence[Sequence]) -> Matrix:
    n = len(A)
    aug = [list(A[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def det(A: Sequence[Sequence]):
    """Determinant; fraction-free Bareiss elimination for integer input."""
    n = len(A)
    if n == 0:
        return 1
    if any(isinstance(a, Fraction) and a.denominator != 1 for row in A for a in row):
        M = [[Fraction(a) for a in row] for row in A]
        sign, prod = 1, Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if M[i][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                M[c], M[p] = M[p], M[c]
                sign = -sign
            prod *= M[c][c]
            for i in range(c + 1, n):
                f = M[i][c] / M[c][c]
                if f:
                    M[i] = [a - f * b for a, b in zip(M[i], M[c])]
        return sign * prod
    M = [[int(a) for a in row] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if p is None:
                return 0
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# integer normal forms

def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U*A*V = D in Smith normal form.

    U and V are unimodular, D is diagonal with nonnegative entries and
    d_1 | d_2 | ... .  The procedure is deterministic.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(a) for a in row] for row in A]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst -= q * row src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):  # col dst -= q * col src
        for row in D:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    a = D[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, D[i][t] // p)
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, D[t][j] // p)
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, -1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return as_matrix(U), as_matrix(D), as_matrix(V)


def elementary_divisors(A: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith form."""
    if not A or not A[0]:
        return ()
    _, D, _ = smith_normal_form(A)
    return tuple(D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i])


def hermite_normal_form(A: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form with zero rows dropped.

    Pivots are positive, and entries above each pivot lie in [0, pivot).
    """
    M = [[int(a) for a in row] for row in A]
    if not M:
        return ()
    n = len(M[0])
    r = 0
    for c in range(n):
        rows = [i for i in range(r, len(M)) if M[i][c]]
        if not rows:
            continue
        while len(rows) > 1:
            rows.sort(key=lambda i: abs(M[i][c]))
            p = rows[0]
            for i in rows[1:]:
                q = M[i][c] // M[p][c]
                M[i] = [a - q * b for a, b in zip(M[i], M[p])]
            rows = [i for i in rows if M[i][c]]
        p = rows[0]
        M[r], M[p] = M[p], M[r]
        if M[r][c] < 0:
            M[r] = [-a for a in M[r]]
        for i in range(r):
            q = M[i][c] // M[r][c]
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return as_matrix(M[:r])


def integer_kernel(A: Sequence[Sequence[int]], n: int | None = None) -> list[Vector]:
    """Basis (in Hermite form) of the lattice {x in Z^n : A x = 0}."""
    if n is None:
        n = len(A[0]) if A else 0
    if not A:
        return [tuple(r) for r in identity(n)]
    _, D, V = smith_normal_form(A)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    cols = transpose(V)[r:]
    if not cols:
        return []
    return list(hermite_normal_form(cols))


def solve_integer(A: Sequence[Sequence[int]], v: Sequence[int]) -> Vector | None:
    """Integer solution of A x = v, or None when none exists.

    Among all solutions the one returned has its trailing coordinates
    reduced against an echelon basis of the kernel taken from the last
    column backwards, so solutions prefer the leading columns.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    U, D, V = smith_normal_form(A)
    w = mat_vec(U, v)
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if w[i] != 0:
                return None
        else:
            if w[i] % d:
                return None
            y[i] = w[i] // d
    x = list(mat_vec(V, y))
    kernel = integer_kernel(A, n)
    if kernel:
        rev = hermite_normal_form([tuple(reversed(k)) for k in kernel])
        for row in rev:
            c = next(j for j, a in enumerate(row) if a)
            col = n - 1 - c
            q = x[col] // row[c]
            if q:
                x = [a - q * b for a, b in zip(x, reversed(row))]
    return tuple(x)


lattice_membership = solve_integer


# ---------------------------------------------------------------------------
# sublattices

@dataclass(frozen=True)
class SublatticeBasis:
    """A sublattice of Z^n given by linearly independent basis vectors."""

    ambient_rank: int
    basis: tuple[Vector, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(tuple(int(a) for a in b) for b in self.basis))
        if any(len(b) != self.ambient_rank for b in self.basis):
            raise ValueError("basis vector has wrong length")
        if rank(self.basis) != len(self.basis):
            raise ValueError("basis vectors are linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def index_in_saturation(self) -> int:
        if not self.basis:
            return 1
        return reduce(lambda a, b: a * b, elementary_divisors(self.basis), 1)

    def contains(self, v: Sequence[int]) -> bool:
        if not self.basis:
            return all(a == 0 for a in v)
        return solve_integer(transpose(self.basis), v) is not None

    def canonical(self) -> "SublatticeBasis":
        return SublatticeBasis(self.ambient_rank, hermite_normal_form(self.basis))


def span_basis(vectors: Sequence[Sequence[int]], ambient_rank: int) -> SublatticeBasis:
    """Hermite basis of the Z-span of arbitrary integer vectors."""
    vs = [tuple(int(a) for a in v) for v in vectors if any(v)]
    return SublatticeBasis(ambient_rank, hermite_normal_form(vs) if vs else ())


def saturate(S: SublatticeBasis) -> SublatticeBasis:
    """All lattice points in the rational span of S."""
    if not S.basis:
        return S
    _, _, V = smith_normal_form(S.basis)
    r = len(S.basis)
    Vinv = inverse(V)
    rows = [tuple(int(a) for a in Vinv[i]) for i in range(r)]
    return SublatticeBasis(S.ambient_rank, hermite_normal_form(rows))


def complement_basis(S: SublatticeBasis) -> list[Vector]:
    """Vectors extending a saturated sublattice basis to a basis of Z^n.

    Standard basis vectors are preferred, tried in order; any remaining
    gap is filled from a Smith-form completion.
    """
    n = S.ambient_rank
    chosen: list[Vector] = []
    current = list(S.basis)
    for j in range(n):
        if len(current) == n:
            break
        e = tuple(1 if i == j else 0 for i in range(n))
        cand = current + [e]
        if rank(cand) == len(cand) and all(d == 1 for d in elementary_divisors(cand)):
            current = cand
            chosen.append(e)
    if len(current) < n:
        _, _, V = smith_normal_form(current)
        Vinv = inverse(V)
        for i in range(len(current), n):
            chosen.append(tuple(int(a) for a in Vinv[i]))
    return chosen


# ---------------------------------------------------------------------------
# rational polyhedral cones

def _double_description(rows: list[Vector], d: int) -> list[Vector]:
    """Extreme rays of {c in Q^d : r.c >= 0 for all rows}; rows span Q^d."""
    chosen: list[int] = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r]) > len(chosen):
            chosen.append(i)
            if len(chosen) == d:
                break
    A0 = [rows[i] for i in chosen]
    inv = inverse(A0)
    rays = []
    for j in range(d):
        col = primitive([inv[i][j] for i in range(d)])
        zero = frozenset(chosen[t] for t in range(d) if t != j)
        rays.append((col, zero))
    processed = set(chosen)
    for i, a in enumerate(rows):
        if i in processed:
            continue
        processed.add(i)
        vals = [dot(a, r) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new = [(rays[k][0], rays[k][1]) for k in pos]
        new += [(rays[k][0], rays[k][1] | {i}) for k in zer]
        for p in pos:
            for q in neg:
                common = rays[p][1] & rays[q][1]
                if len(common) < d - 2:
                    continue
                if any(k != p and k != q and common <= rays[k][1] for k in range(len(rays))):
                    continue
                vp, vq = vals[p], vals[q]
                comb = tuple(vp * x - vq * y for x, y in zip(rays[q][0], rays[p][0]))
                new.append((primitive(comb), common | {i}))
        rays = new
    return [r for r, _ in rays]


@dataclass(frozen=True)
class RationalCone:
    """A rational polyhedral cone with both representations.

    ``rays`` are primitive integer generators of the pointed part,
    ``lines`` a basis of the lineality space, ``halfspaces`` primitive
    covectors h with h.x >= 0 on the cone, and ``equations`` a basis of
    the covectors vanishing on its span.
    """

    ambient_dim: int
    rays: tuple[Vector, ...]
    lines: tuple[Vector, ...] = ()
    halfspaces: tuple[Vector, ...] = ()
    equations: tuple[Vector, ...] = ()
    _span_dim: int = field(default=-1, compare=False, repr=False)

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence], ambient_dim: int) -> "RationalCone":
        gens = [primitive(g) for g in generators]
        gens = [g for g in gens if any(g)]
        n = ambient_dim
        if not gens:
            return cls(n, (), (), (), tuple(identity(n)), 0)
        R, _ = rref(gens)
        d = len(R)
        S = [primitive(r) for r in R]
        eqs = tuple(nullspace(S, n)) if d < n else ()
        # coordinates of generators with respect to the span basis S
        coords = [tuple(dot(s, g) for s in S) for g in gens]
        facets_c = _double_description(coords, d)
        facets = []
        for c in facets_c:
            a = primitive([sum(c[t] * S[t][j] for t in range(d)) for j in range(n)])
            facets.append(a)
        facets = sorted(set(facets))
        if facets:
            lin = nullspace(facets + list(eqs), n)
        else:
            lin = nullspace(list(eqs), n) if eqs else [tuple(r) for r in identity(n)]
        lin = [tuple(v) for v in lin]
        l = len(lin)
        rays = set()
        for g in gens:
            if lin and rank(lin + [g]) == l:
                continue
            tight = [f for f in facets if dot(f, g) == 0] + list(eqs)
            if (rank(tight) if tight else 0) == n - l - 1:
                rays.add(g)
        if l:
            lin = list(hermite_normal_form(lin))
        return cls(n, tuple(sorted(rays)), tuple(lin), tuple(facets), tuple(eqs), d)

    @property
    def dim(self) -> int:
        if self._span_dim >= 0:
            return self._span_dim
        return rank(list(self.rays) + list(self.lines))

    @property
    def strongly_convex(self) -> bool:
        return not self.lines

    def contains(self, x: Sequence) -> bool:
        return (all(dot(h, x) >= 0 for h in self.halfspaces)
                and all(dot(e, x) == 0 for e in self.equations))

    def generators(self) -> list[Vector]:
        return list(self.rays) + list(self.lines) + [tuple(-a for a in l) for l in self.lines]


def dual_cone(C: RationalCone) -> RationalCone:
    """The cone of functionals that are nonnegative on C."""
    gens = list(C.halfspaces) + list(C.equations) + [tuple(-a for a in e) for e in C.equations]
    return RationalCone.from_generators(gens, C.ambient_dim)


def rays_form_basis_part(rays: Sequence[Sequence[int]]) -> bool:
    """True iff the integer vectors extend to a Z-basis of the ambient lattice."""
    rays = [tuple(int(a) for a in r) for r in rays]
    if not rays:
        return True
    if rank(rays) != len(rays):
        return False
    return all(d == 1 for d in elementary_divisors(rays))


def is_standard_affine(C: RationalCone) -> bool:
    """Primitive ray generators of a strongly convex cone extend to a Z-basis."""
    if not C.strongly_convex:
        return False
    return rays_form_basis_part(C.rays)


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of a nonempty point set."""
    if not points:
        return -1
    p0 = points[0]
    return rank([vec_sub(p, p0) for p in points[1:]]) if len(points) > 1 else 0


def minors(A: Sequence[Sequence[int]], size: int):
    """Yield (column subset, determinant) over all size x size column minors."""
    m = len(A)
    n = len(A[0]) if m else 0
    for rows in combinations(range(m), size):
        for cols in combinations(range(n), size):
            yield (rows, cols), det([[A[r][c] for c in cols] for r in rows])

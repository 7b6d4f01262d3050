"""Brute-force reference implementations used only by the tests.

None of these import the package's algorithms; they favour obviousness
over speed and are only run on small inputs.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product
from math import floor, gcd


def det(M):
    """Leibniz determinant."""
    n = len(M)
    if n == 0:
        return 1
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


def all_minors(A, k):
    rows, cols = len(A), len(A[0]) if A else 0
    for R in combinations(range(rows), k):
        for C in combinations(range(cols), k):
            yield det([[A[r][c] for c in C] for r in R])


def determinantal_divisors(A):
    """Elementary divisors d_k = D_k / D_(k-1), with D_k the gcd of k x k minors."""
    rows, cols = len(A), len(A[0]) if A else 0
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for m in all_minors(A, k):
            g = gcd(g, m)
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def matrix_rank(A):
    rows, cols = len(A), len(A[0]) if A else 0
    for k in range(min(rows, cols), 0, -1):
        if any(m != 0 for m in all_minors(A, k)):
            return k
    return 0


def brute_unimodular(A):
    r = len(A)
    return all(m in (-1, 0, 1) for m in all_minors(A, r))


def brute_integer_solution(A, v, bound):
    n = len(A[0])
    for x in product(range(-bound, bound + 1), repeat=n):
        if all(sum(a * b for a, b in zip(row, x)) == c for row, c in zip(A, v)):
            return x
    return None


def tate_value(s):
    """Linear interpolation of n(n-1)/2 between consecutive integers."""
    s = Fraction(s)
    lo = floor(s)
    f_lo, f_hi = Fraction(lo * (lo - 1), 2), Fraction((lo + 1) * lo, 2)
    return f_lo + (s - lo) * (f_hi - f_lo)


def section_value(terms, x, linear=None, constant=0):
    """terms: (normal, offset, param) triples."""
    val = Fraction(constant)
    for normal, offset, param in terms:
        val += Fraction(param) * tate_value(sum(a * Fraction(b) for a, b in zip(normal, x)) - Fraction(offset))
    if linear:
        val += sum(Fraction(a) * Fraction(b) for a, b in zip(linear, x))
    return val


def brute_theta(sections, cls, w, trunc, box):
    """All terms of degree <= trunc among lifts with |x_i - cls_i| <= box.

    ``sections`` is a list of (terms, linear, constant).
    """
    out = {}
    g = len(cls)
    for m in product(range(-box, box + 1), repeat=g):
        x = tuple(Fraction(c) + a for c, a in zip(cls, m))
        u = []
        for terms, linear, constant in sections:
            e = w * section_value(terms, x, linear, constant)
            assert e.denominator == 1
            u.append(int(e))
        if sum(u) <= trunc:
            z = tuple(int(w * a) for a in x)
            out[(z, tuple(u))] = out.get((z, tuple(u)), 0) + 1
    return out


def series_product(a, b, trunc):
    out = {}
    for (z1, u1), c1 in a.items():
        for (z2, u2), c2 in b.items():
            u = tuple(p + q for p, q in zip(u1, u2))
            if sum(u) <= trunc:
                key = (tuple(p + q for p, q in zip(z1, z2)), u)
                out[key] = out.get(key, 0) + c1 * c2
    return out


def is_independent(columns):
    """Columns are independent iff some full-size minor is nonzero."""
    if not columns:
        return True
    A = [list(r) for r in zip(*columns)]  # rows
    return matrix_rank(A) == len(columns)


def genus(vertices, edges):
    parent = list(range(vertices))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    comps = vertices
    for u, v in edges:
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            comps -= 1
    return len(edges) - vertices + comps


def simplex_volume_times_factorial(simplex):
    """|det| of edge vectors, i.e. m! times the Euclidean volume."""
    base = simplex[0]
    M = [[p[i] - base[i] for i in range(len(base))] for p in simplex[1:]]
    return abs(det(M))


def sym_mat_eq(A, B):
    return all(Fraction(a) == Fraction(b) for ra, rb in zip(A, B) for a, b in zip(ra, rb))

from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from mumfordkit.delaunay import delaunay, same_delaunay, voronoi_cell
from mumfordkit.errors import ValidationError
from mumfordkit.lattice import mat_mul, transpose
from mumfordkit.matroid import r10
from mumfordkit.plsection import pl_from_form

import oracles


def qf(B, x, y=None):
    y = x if y is None else y
    return sum(x[i] * B[i][j] * y[j] for i in range(len(x)) for j in range(len(x)))


def brute_delaunay_triangles(B, box=3):
    """Triangles with an empty circum-ellipse, one per translation class."""
    pts = list(product(range(-box, box + 1), repeat=2))
    near = [p for p in pts if max(map(abs, p)) <= 1]
    found = set()
    for a, b in [(a, b) for a in near for b in near if a < b]:
        tri = ((0, 0), a, b)
        if oracles.det([list(a), list(b)]) == 0:
            continue
        # circumcentre c with B(p - c, p - c) equal for all three vertices
        # 2 B(p, c) = B(p, p) for p = a, b
        M = [[2 * qf(B, p, e) for e in ((1, 0), (0, 1))] for p in (a, b)]
        rhs = [qf(B, a), qf(B, b)]
        D = oracles.det(M)
        c = (Fraction(rhs[0] * M[1][1] - rhs[1] * M[0][1], D), Fraction(M[0][0] * rhs[1] - M[1][0] * rhs[0], D))
        r = qf(B, c)
        if all(qf(B, tuple(p[i] - c[i] for i in range(2))) >= r for p in pts):
            if all(qf(B, tuple(p[i] - c[i] for i in range(2))) > r for p in pts if p not in tri):
                base = min(tri)
                found.add(tuple(sorted(tuple(p[i] - base[i] for i in range(2)) for p in tri)))
    return found


def test_census_4_1_3():
    D = delaunay([[4, 1], [1, 3]])
    assert D.census() == {0: 1, 1: 3, 2: 2}
    assert set(D.maximal_cells) == brute_delaunay_triangles([[4, 1], [1, 3]])


def test_identity_square():
    D = delaunay([[1, 0], [0, 1]])
    assert D.census() == {0: 1, 1: 2, 2: 1}
    assert D.maximal_cells == (((0, 0), (0, 1), (1, 0), (1, 1)),)


def test_one_dimensional():
    assert delaunay([[2]]).census() == {0: 1, 1: 1}
    assert delaunay([[2]]).maximal_cells == (((0,), (1,)),)


def test_indefinite_rejected():
    with pytest.raises(ValidationError):
        delaunay([[1, 2], [2, 1]])


def test_voronoi_examples():
    square = voronoi_cell([[1, 0], [0, 1]])
    h = Fraction(1, 2)
    assert set(square.vertices) == {(-h, -h), (-h, h), (h, -h), (h, h)}
    assert voronoi_cell([[2, 1], [1, 2]]).facet_count == 6
    V = voronoi_cell([[4, 1], [1, 3]])
    assert V.facet_count == 6 and len(V.vertices) == 6


def test_voronoi_against_bisectors():
    B = [[4, 1], [1, 3]]
    V = voronoi_cell(B)
    for v in V.vertices:
        d0 = qf(B, v)
        dists = [qf(B, tuple(v[i] - m[i] for i in range(2))) for m in product(range(-3, 4), repeat=2)]
        assert min(dists) == d0
        assert sum(1 for d in dists if d == d0) == 3  # a vertex of a hexagon is equidistant to 3 points


def test_same_delaunay_examples():
    assert same_delaunay([[2, 1], [1, 2]], [[4, 1], [1, 3]])
    assert not same_delaunay([[1, 0], [0, 1]], [[2, 1], [1, 2]])
    assert same_delaunay([[3, 1], [1, 3]], [[3, 1], [1, 3]])


def test_voronoi_delaunay_duality():
    for B in ([[4, 1], [1, 3]], [[1, 0], [0, 1]], [[2, 1], [1, 2]]):
        D = delaunay(B)
        V = voronoi_cell(B)
        assert len(V.vertices) == len(D.star_of_origin)
        assert V.facet_count == len(D.edges_at_origin())


def test_delaunay_is_bending_locus():
    for B in ([[4, 1], [1, 3]], [[2, 1], [1, 2]], [[2, -1], [-1, 3]]):
        D = delaunay(B)
        normals = {tuple(n) for n in D.wall_normals()}
        walls = {t.normal for t in pl_from_form(B).terms}
        assert normals == walls


unimod = st.sampled_from([((1, 0), (0, 1)), ((1, 1), (0, 1)), ((2, 1), (1, 1)), ((1, -2), (0, 1)),
                          ((0, 1), (1, 0)), ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((1, 1, 0), (0, 1, 1), (0, 0, 1))])


@settings(max_examples=25)
@given(unimod)
def test_gl_covariance(A):
    g = len(A)
    B = [[4, 1], [1, 3]] if g == 2 else [[3, 1, 0], [1, 3, 1], [0, 1, 3]]
    C = mat_mul(mat_mul(transpose(A), B), A)
    DB, DC = delaunay(B), delaunay(C)
    assert DB.census() == DC.census()
    # cells of Del_C are A^-1 images of cells of Del_B: check via volumes and vertex counts
    assert sorted(len(c) for c in DB.maximal_cells) == sorted(len(c) for c in DC.maximal_cells)


@pytest.mark.parametrize("B", [[[4, 1], [1, 3]], [[1, 0], [0, 1]], [[3, 1, 0], [1, 3, 1], [0, 1, 3]], [[2]]])
def test_tiling_volume(B):
    assert delaunay(B).total_volume() == 1


@settings(max_examples=10)
@given(st.lists(st.integers(1, 3), min_size=4, max_size=4))
def test_matroidal_interior_forms_are_unimodular(r):
    # forms sum r_i x_i^2 over four columns of R10 spanning a rank-3 part
    cols = [c[:3] for c in r10().column_vectors()[:3]] + [(1, -1, 1)]
    B = [[sum(ri * c[i] * c[j] for ri, c in zip(r, cols)) for j in range(3)] for i in range(3)]
    for cell in delaunay(B).maximal_cells:
        for simplex in combinations(cell, 4):
            assert oracles.simplex_volume_times_factorial(simplex) in (0, 1)

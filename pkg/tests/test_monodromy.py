import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mumfordkit import (
    Graph, SymplecticLattice, ValidationError, cographic_rep, graph_monodromy, graph_vanishing_forms,
    matroidal_cone, monodromy_forms, picard_lefschetz, unipotent_from_forms, weight_filtration,
)
from mumfordkit.lattice import det, inverse, mat_mul, transpose
from mumfordkit.monodromy import cycle_basis, default_forest, is_maximal, monodromy_of_data

THETA = Graph(2, ((0, 1), (0, 1), (0, 1)))
THETA_FORMS = [((1, 0), (0, 0)), ((0, 0), (0, 1)), ((1, 1), (1, 1))]


def span_rank(vectors):
    return oracles.matrix_rank([list(v) for v in vectors]) if vectors else 0


def test_rank_one_filtration():
    W = weight_filtration([[[0, 1], [0, 0]]])
    assert W.W2.basis == ((1, 0),)
    assert W.W1.basis == ((1, 0),)
    assert W.ranks() == (1, 0, 1)


def test_filtration_is_saturated():
    W = weight_filtration([[[0, 2], [0, 0]]])
    assert W.W2.basis == ((1, 0),)


def test_zero_operator():
    W = weight_filtration([[[0, 0], [0, 0]]])
    assert W.W2.rank == 0 and W.W1.rank == 2
    assert not is_maximal([[[0, 0], [0, 0]]])


def test_theta_graph_filtration():
    Ns = unipotent_from_forms(THETA_FORMS)
    W = weight_filtration(Ns)
    # kernel of [[0, B], [0, 0]] for B positive definite is y = 0
    assert W.W1.rank == W.W2.rank == 2
    for v in W.W1.basis:
        assert v[2:] == (0, 0)
    assert is_maximal(Ns)


def test_not_maximal():
    N = [[0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert not is_maximal([N])
    with pytest.raises(ValidationError):
        monodromy_forms([N], SymplecticLattice.standard_lattice(2))


def test_rejects_bad_operators():
    with pytest.raises(ValidationError):
        weight_filtration([[[0, 1], [0, 0]], [[0, 0], [1, 0]]])  # do not commute
    with pytest.raises(ValidationError):
        weight_filtration([[[1, 0], [0, 0]]])  # not square zero
    with pytest.raises(ValidationError):
        weight_filtration([])
    with pytest.raises(ValidationError):
        monodromy_forms(unipotent_from_forms([[[1, 1], [0, 1]]]), SymplecticLattice.standard_lattice(2))


def test_pairing_validation():
    with pytest.raises(ValidationError):
        SymplecticLattice(((0, 1), (1, 0)))
    with pytest.raises(ValidationError):
        SymplecticLattice(((0, 2), (-2, 0)))
    lat = SymplecticLattice.standard_lattice(2)
    assert lat.pair((1, 0, 0, 0), (0, 0, 1, 0)) == 1


def test_standard_unipotent_recovers_forms():
    lat = SymplecticLattice.standard_lattice(2)
    M = monodromy_forms(unipotent_from_forms(THETA_FORMS), lat)
    assert [list(B) for B in M.forms] == [list(B) for B in THETA_FORMS]
    assert M.in_closure and M.rank_gr0 == 2


def test_theta_graph_dehn_twists():
    lat, Ns = graph_monodromy(THETA)
    assert list(monodromy_forms(Ns, lat).forms) == THETA_FORMS
    assert graph_vanishing_forms(THETA) == THETA_FORMS


def test_tree_and_loop():
    tree = Graph(3, ((0, 1), (1, 2)))
    assert cycle_basis(tree) == []
    assert graph_vanishing_forms(tree) == [(), ()]
    assert graph_vanishing_forms(Graph(1, ((0, 0),))) == [((1,),)]


def test_data_monodromy_returns_quadratic_parts(examples):
    for name in ("tate", "theta3", "shifted-theta"):
        data = examples[name]
        lat, Ns = monodromy_of_data(data)
        M = monodromy_forms(Ns, lat)
        assert [tuple(tuple(int(a) for a in r) for r in B) for B in data.quadratic_parts()] == list(M.forms)


def test_picard_lefschetz_is_symplectic():
    lat = SymplecticLattice.standard_lattice(2)
    rng = random.Random(3)
    L = lat.pairing
    for _ in range(20):
        gamma = tuple(rng.randint(-3, 3) for _ in range(4))
        N = picard_lefschetz(lat, gamma)
        T = tuple(tuple(int(i == j) + N[i][j] for j in range(4)) for i in range(4))
        assert mat_mul(N, N) == tuple(tuple(0 for _ in range(4)) for _ in range(4))
        assert mat_mul(mat_mul(transpose(T), L), T) == L


def random_gl(rng, g):
    while True:
        D = [[rng.randint(-2, 2) for _ in range(g)] for _ in range(g)]
        if abs(oracles.det(D)) == 1:
            return D


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_conjugation_covariance(seed):
    rng = random.Random(seed)
    g = rng.randint(1, 3)
    forms = []
    for _ in range(rng.randint(1, 3)):
        v = [rng.randint(-2, 2) for _ in range(g)]
        forms.append([[a * b for b in v] for a in v])
    forms.append([[int(i == j) for j in range(g)] for i in range(g)])
    Ns = unipotent_from_forms(forms)
    lat = SymplecticLattice.standard_lattice(g)
    D = random_gl(rng, g)
    A = transpose(inverse(D))
    S = [[0] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            S[i][j] = S[j][i] = rng.randint(-2, 2)
    X = mat_mul(A, S)
    M = [list(A[i]) + list(X[i]) for i in range(g)] + [[0] * g + list(D[i]) for i in range(g)]
    assert mat_mul(mat_mul(transpose(M), lat.pairing), M) == lat.pairing
    Minv = inverse(M)
    conj = [tuple(tuple(int(a) for a in r) for r in mat_mul(mat_mul(Minv, N), M)) for N in Ns]
    got = monodromy_forms(conj, lat).forms
    for B, B2 in zip(forms, got):
        assert oracles.sym_mat_eq(mat_mul(mat_mul(transpose(D), B), D), B2)


def random_graph(rng):
    n = rng.randint(1, 4)
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(1, 6))]
    return Graph(n, tuple(edges))


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6))
def test_graph_forms_match_cographic_cone(seed):
    G = random_graph(random.Random(seed))
    forest = default_forest(G)
    forms = graph_vanishing_forms(G, forest)
    h = oracles.genus(G.vertices, G.edges)
    assert len(cycle_basis(G, forest)) == h
    if h:
        assert forms == matroidal_cone(cographic_rep(G, forest))
    for B in forms:
        assert span_rank(B) <= 1


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_dehn_twist_forms_are_semidefinite(seed):
    G = random_graph(random.Random(seed))
    if oracles.genus(G.vertices, G.edges) == 0:
        return
    lat, Ns = graph_monodromy(G)
    h = lat.g
    total = [[sum(B[i][j] for B in graph_vanishing_forms(G)) for j in range(h)] for i in range(h)]
    if oracles.det(total) == 0:
        assert not is_maximal(Ns)
        return
    M = monodromy_forms(Ns, lat)
    assert M.in_closure
    assert list(M.forms) == graph_vanishing_forms(G)
    for B in M.forms:
        # principal minors of a rank-one square are nonnegative
        for k in range(1, h + 1):
            assert all(m >= 0 for m in principal_minors(B, k))


def principal_minors(B, k):
    for idx in combinations(range(len(B)), k):
        yield oracles.det([[B[i][j] for j in idx] for i in idx])


def test_cycle_basis_is_fundamental():
    forest = default_forest(THETA)
    cycles = cycle_basis(THETA, forest)
    chords = [e for e in range(3) if e not in forest]
    for i, c in enumerate(cycles):
        assert [c[e] for e in chords] == [int(i == j) for j in range(len(chords))]
    assert abs(det([[c[e] for e in chords] for c in cycles])) == 1

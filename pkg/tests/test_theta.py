import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from generators import random_unimodular_rep
from mumfordkit.theta import theta_classes
from mumfordkit import (
    HyperplaneTerm, MumfordData, PLSection, ValidationError, central_fiber_relations,
    monomial_base_change, theta_expand, theta_multiply, theta_product,
)


def oracle_sections(data):
    return [([(t.normal, t.offset, t.param) for t in b.terms], b.linear, b.constant) for b in data.sections]


def brute(data, cls, w, trunc, box=6):
    out = oracles.brute_theta(oracle_sections(data), cls, w, trunc, box)
    # the window is large enough only if nothing shows up on its boundary
    for (z, _), _c in out.items():
        for a, c in zip(z, cls):
            assert abs(F(a, w) - F(c)) < box
    return out


def frac(s):
    return F(s)


# ---------------------------------------------------------------------------
# Tate goldens, as printed (z exponent, u exponent)

TATE_PRINTED = {
    ("0", 1): [(-3, 6), (-2, 3), (-1, 1), (0, 0), (1, 0), (2, 1), (3, 3)],
    ("0", 2): [(-6, 12), (-4, 6), (-2, 2), (0, 0), (2, 0), (4, 2), (6, 6)],
    ("1/2", 2): [(-5, 9), (-3, 4), (-1, 1), (1, 0), (3, 1), (5, 4), (7, 9)],
    ("0", 3): [(-9, 18), (-6, 9), (-3, 3), (0, 0), (3, 0), (6, 3), (9, 9)],
    ("1/3", 3): [(-8, 15), (-5, 7), (-2, 2), (1, 0), (4, 1), (7, 5), (10, 12)],
    ("2/3", 3): [(-7, 12), (-4, 5), (-1, 1), (2, 0), (5, 2), (8, 7), (11, 15)],
}


@pytest.mark.parametrize("key", sorted(TATE_PRINTED))
def test_tate_printed_terms(examples, key):
    cls, w = key
    series = theta_expand(examples["tate"], (frac(cls),), w, 9)
    got = {(z[0], u[0]): c for z, u, c in series.monomials()}
    for z, u in TATE_PRINTED[key]:
        if u <= 9:
            assert got.get((z, u)) == 1
    assert all(c == 1 for c in got.values())


@pytest.mark.parametrize("key", sorted(TATE_PRINTED))
def test_tate_matches_brute_force(examples, key):
    cls, w = key
    series = theta_expand(examples["tate"], (frac(cls),), w, 9)
    assert dict(series.terms) == brute(examples["tate"], (frac(cls),), w, 9)


def test_tate_small_truncations(examples):
    s = theta_expand(examples["tate"], (0,), 1, 3)
    assert [(z[0], u[0], c) for z, u, c in s.monomials()] == [
        (-2, 3, 1), (-1, 1, 1), (0, 0, 1), (1, 0, 1), (2, 1, 1), (3, 3, 1)]
    s = theta_expand(examples["tate"], (F(1, 2),), 2, 4)
    got = sorted((z[0], u[0]) for z, u, _ in s.monomials())
    assert {(-1, 1), (1, 0), (3, 1), (5, 4)} <= set(got)
    # z^-3 u^4 is printed too and has degree 4
    assert got == [(-3, 4), (-1, 1), (1, 0), (3, 1), (5, 4)]


def test_format_lines(examples):
    lines = theta_expand(examples["tate"], (0,), 1, 1).format_lines()
    assert lines == ["z^-1 u^(1) * 1", "z^0 u^(0) * 1", "z^1 u^(0) * 1", "z^2 u^(1) * 1"]


# ---------------------------------------------------------------------------
# Tate cubics modulo u

def cls9(n):
    return (F(n, 9),)


TATE_CUBICS = {
    (0, 0, 0): {0: 1, 3: 3, 6: 3},
    (1, 1, 1): {3: 1},
    (0, 0, 1): {1: 1, 4: 2, 7: 1},
    (1, 1, 2): {4: 1},
    (0, 1, 1): {2: 1, 5: 1},
    (0, 0, 2): {2: 1, 5: 2, 8: 1},
    (1, 2, 2): {5: 1},
    (0, 2, 2): {4: 1, 7: 1},
    (0, 1, 2): {3: 1, 6: 1},
    (2, 2, 2): {6: 1},
}


@pytest.mark.parametrize("mono", sorted(TATE_CUBICS))
def test_tate_cubic_products(examples, mono):
    prod = theta_product(examples["tate"], [((F(a, 3),), 3) for a in mono], 0)
    got = {v: p[(0,)] for v, p in prod.items() if p.get((0,))}
    assert got == {cls9(n): c for n, c in TATE_CUBICS[mono].items()}


def test_tate_cubic_relation(examples):
    report = central_fiber_relations(examples["tate"], 3, 3)
    assert len(report.monomials) == 10
    assert len(report.relations) == 1
    assert report.relations[0].equation() == "T[0/3]T[1/3]T[2/3] = T[1/3]^3 + T[2/3]^3"
    terms = {tuple(int(3 * v[0]) for v in m): c for m, c in report.relations[0].terms}
    assert terms == {(0, 1, 2): 1, (1, 1, 1): -1, (2, 2, 2): -1}
    for m in report.monomials:
        key = tuple(int(3 * v[0]) for v in m)
        assert report.products[m] == {cls9(n): c for n, c in TATE_CUBICS[key].items()}


def test_tate_degree_one_has_no_relations(examples):
    report = central_fiber_relations(examples["tate"], 3, 1)
    assert len(report.monomials) == 3
    assert report.relations == ()


def test_tate_node_is_smoothed_to_first_order(examples):
    """Order-u part of xyz - x^3 - y^3 has a unit coefficient at the node [0:0:1].

    At the node only the class 0/9 survives, so the local equation becomes
    xy = u up to units.
    """
    tate = examples["tate"]
    t = F(1, 3)
    relation = {(0, t, 2 * t): 1, (t, t, t): -1, (2 * t, 2 * t, 2 * t): -1}
    combined = {}
    for mono, sign in relation.items():
        for v, poly in theta_product(tate, [((a,), 3) for a in mono], 1).items():
            for e, c in poly.items():
                combined[(v, e)] = combined.get((v, e), 0) + sign * c
    combined = {k: c for k, c in combined.items() if c}
    assert all(e == (1,) for _, e in combined)
    assert combined == {(cls9(0), (1,)): 1, (cls9(3), (1,)): -2, (cls9(6), (1,)): -2}

    # same statement from the brute-force series, to order u
    oracle = {}
    for mono, sign in relation.items():
        series = brute(tate, (mono[0],), 3, 1)
        for a in mono[1:]:
            series = oracles.series_product(series, brute(tate, (a,), 3, 1), 1)
        for key, c in series.items():
            oracle[key] = oracle.get(key, 0) + sign * c
    oracle = {k: c for k, c in oracle.items() if c}
    expected = {}
    for (v, e), c in combined.items():
        for (z, u), c2 in brute(tate, v, 9, 0).items():
            key = (z, (u[0] + 1,))
            expected[key] = expected.get(key, 0) + c * c2
    assert oracle == expected


# ---------------------------------------------------------------------------
# theta graph

THETA3_BLOCK = {
    (-1, 1): (1, 0, 0), (0, 1): (0, 0, 0), (1, 1): (0, 0, 1),
    (-1, 0): (1, 0, 1), (0, 0): (0, 0, 0), (1, 0): (0, 0, 0),
    (-1, -1): (1, 1, 3), (0, -1): (0, 1, 1), (1, -1): (0, 1, 0),
}


def test_theta3_block(examples):
    s = theta_expand(examples["theta3"], (0, 0), 1, 5)
    for z, u in THETA3_BLOCK.items():
        assert s.coefficient(z) == {u: 1}


def test_theta3_matches_brute_force(examples):
    s = theta_expand(examples["theta3"], (0, 0), 1, 6)
    assert dict(s.terms) == brute(examples["theta3"], (0, 0), 1, 6)


def test_theta3_restricts_to_theta1(examples):
    s3 = theta_expand(examples["theta3"], (0, 0), 1, 10).substitute([[3], [2], [1]]).truncate(10)
    s1 = theta_expand(examples["theta1"], (0, 0), 1, 10)
    assert dict(s3.terms) == dict(s1.terms)
    r1, r2, r3 = 3, 2, 1
    printed = {(-1, 1): r1, (0, 1): 0, (1, 1): r3, (-1, 0): r1 + r3, (0, 0): 0, (1, 0): 0,
               (-1, -1): r1 + r2 + 3 * r3, (0, -1): r2 + r3, (1, -1): r2}
    for z, u in printed.items():
        assert s1.coefficient(z) == {(u,): 1}


# ---------------------------------------------------------------------------
# structure constants

def test_interior_products_give_the_midpoint(examples):
    tate = examples["tate"]
    for a in (1, 2):
        for b in (1, 2):
            row = theta_multiply(tate, (F(a, 3),), 3, (F(b, 3),), 3, 0)
            assert row.mod_u() == {(F(a + b, 6) % 1,): 1}
    theta3 = examples["theta3"]
    for p in ((F(1, 3), F(1, 3)), (F(2, 3), F(2, 3))):
        row = theta_multiply(theta3, p, 3, p, 3, 0)
        assert row.mod_u() == {p: 1}


def test_products_across_cells_vanish(examples):
    theta3 = examples["theta3"]
    row = theta_multiply(theta3, (F(1, 3), F(1, 3)), 3, (F(2, 3), F(2, 3)), 3, 2)
    assert row.mod_u() == {}
    assert row.coefficients  # nonzero to higher order


def test_zero_products_are_recorded(examples):
    data = examples["theta3"]
    report = central_fiber_relations(data, 3, 2)
    assert ((F(1, 3), F(1, 3)), (F(2, 3), F(2, 3))) in report.zero_products
    for mono in report.zero_products:
        a = brute(data, mono[0], 3, 0)
        b = brute(data, mono[1], 3, 0)
        assert oracles.series_product(a, b, 0) == {}
    for mono in report.monomials:
        if mono not in report.zero_products:
            assert report.products[mono]


def test_weight_must_be_divisible_by_d(examples):
    data = examples["shifted-theta"]
    assert data.d == 2
    with pytest.raises(ValidationError):
        theta_expand(data, (0, 0), 1, 2)
    with pytest.raises(ValidationError):
        theta_multiply(data, (0, 0), 1, (0, 0), 2, 2)
    theta_expand(data, (0, 0), 2, 2)


def test_genus_zero_guard():
    data = MumfordData(0, (PLSection(0),))
    row = theta_multiply(data, (), 1, (), 1, 0)
    assert row.coefficients == {(): {(0,): 1}}


def test_twist_hook(examples):
    tate = examples["tate"]
    plain = theta_expand(tate, (0,), 1, 6)
    doubled = theta_expand(tate, (0,), 1, 6, twist=lambda x: 2)
    assert doubled.terms == {k: 2 * c for k, c in plain.terms.items()}
    signed = theta_expand(tate, (0,), 1, 6, twist=lambda x: (-1) ** int(x[0]))
    assert signed.terms == {k: (-1) ** k[0][0] * c for k, c in plain.terms.items()}
    halved = theta_expand(tate, (0,), 1, 6, twist=lambda x: 1 if x[0] >= 0 else 0)
    assert halved.terms == {k: c for k, c in plain.terms.items() if k[0][0] >= 0}


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("w", [1, 2, 3, 4])
def test_class_count(g, w):
    classes = theta_classes(g, w)
    assert len(classes) == w ** g == len(set(classes))


# ---------------------------------------------------------------------------
# properties on random small data

def random_data(seed, max_g=2, max_k=3):
    rng = random.Random(seed)
    g = rng.randint(1, max_g)
    k = rng.randint(g, max_k)
    rep = random_unimodular_rep(rng, g, k)
    while any(abs(a) > 1 for r in rep for a in r):
        rep = random_unimodular_rep(rng, g, k)
    sections = []
    for j in range(k):
        normal = tuple(r[j] for r in rep)
        offset = rng.choice((F(0), F(1, 2)))
        sections.append(PLSection(g, (HyperplaneTerm(normal, offset, rng.randint(1, 2)),)))
    return MumfordData(g, tuple(sections))


def random_class(rng, g, w):
    return tuple(F(rng.randrange(w), w) for _ in range(g))


def product_classes_oracle(v1, w1, v2, w2):
    W = w1 + w2
    out = set()
    for m in range(W ** len(v1)):
        shift = [(m // W ** i) % W for i in range(len(v1))]
        out.add(tuple((w1 * a + w2 * (b + s)) / W % 1 for a, b, s in zip(v1, v2, shift)))
    return out


def expand_row(data, coefficients, W, trunc):
    out = {}
    for v, poly in coefficients.items():
        series = brute(data, v, W, trunc)
        for (z, u), c in series.items():
            for e, c2 in poly.items():
                uu = tuple(a + b for a, b in zip(u, e))
                if sum(uu) <= trunc:
                    out[(z, uu)] = out.get((z, uu), 0) + c * c2
    return {k: c for k, c in out.items() if c}


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(0, 3))
def test_structure_constants_reproduce_series_product(seed, trunc):
    data = random_data(seed)
    rng = random.Random(seed + 1)
    d = data.d
    w1, w2 = d * rng.randint(1, 2), d
    v1, v2 = random_class(rng, data.g, w1), random_class(rng, data.g, w2)
    row = theta_multiply(data, v1, w1, v2, w2, trunc)
    direct = oracles.series_product(brute(data, v1, w1, trunc), brute(data, v2, w2, trunc), trunc)
    direct = {k: c for k, c in direct.items() if c}
    assert expand_row(data, row.coefficients, w1 + w2, trunc) == direct
    assert set(row.coefficients) <= product_classes_oracle(v1, w1, v2, w2)
    assert all(c > 0 and min(e) >= 0 for p in row.coefficients.values() for e, c in p.items())


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6), st.integers(0, 6))
def test_associativity(seed, trunc):
    data = random_data(seed)
    rng = random.Random(seed + 2)
    w = data.d
    a, b, c = (random_class(rng, data.g, w) for _ in range(3))
    left = theta_product(data, [(a, w), (b, w), (c, w)], trunc)
    bc = theta_multiply(data, b, w, c, w, trunc).coefficients
    right = {}
    for v, p in bc.items():
        row = theta_multiply(data, a, w, v, 2 * w, trunc)
        for v3, q in row.coefficients.items():
            acc = right.setdefault(v3, {})
            for e1, c1 in p.items():
                for e2, c2 in q.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    if sum(e) <= trunc:
                        acc[e] = acc.get(e, 0) + c1 * c2
    right = {v: {e: k for e, k in p.items() if k} for v, p in right.items()}
    right = {v: p for v, p in right.items() if p}
    assert left == right
    assert all(min(e) >= 0 for p in left.values() for e in p)


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6), st.integers(0, 5))
def test_base_change_compatibility(seed, trunc):
    data = random_data(seed)
    rng = random.Random(seed + 3)
    n = rng.randint(1, 2)
    R = [[rng.randint(0, 2) for _ in range(n)] for _ in range(data.k)]
    for row in R:
        if not any(row):
            row[0] = 1
    for j in range(n):
        if not any(row[j] for row in R):
            R[0][j] = 1
    new = monomial_base_change(data, R)
    w = data.d
    v = random_class(rng, data.g, w)
    pulled = theta_expand(data, v, w, trunc).substitute(R).truncate(trunc)
    assert dict(theta_expand(new, v, w, trunc).terms) == dict(pulled.terms)

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voronoi_sln.exactmath import random_unimodular
from voronoi_sln.groupring import (GroupRingElem, GroupRingMatrix, boundary_operator,
                                   characteristic_diagonal, flat, ginv, gmul, identity_elem,
                                   laplacian, laplacian_prime, matrix_star, multiply, star)


def elements(n):
    mats = st.integers(0, 10**6).map(lambda s: flat(random_unimodular(n, random.Random(s), 4)))
    coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=6)
    return st.dictionaries(mats, coeffs, max_size=4).map(GroupRingElem)


@settings(max_examples=60, deadline=None)
@given(elements(2), elements(2), elements(2))
def test_ring_axioms(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, b + c) == multiply(a, b) + multiply(a, c)
    assert multiply(a + b, c) == multiply(a, c) + multiply(b, c)
    one = GroupRingElem.one(2)
    assert multiply(one, a) == a == multiply(a, one)


@settings(max_examples=60, deadline=None)
@given(elements(3), elements(3))
def test_involution_axioms(a, b):
    assert star(star(a)) == a
    assert star(a + b) == star(a) + star(b)
    assert star(multiply(a, b)) == multiply(star(b), star(a))


def test_elementary_examples():
    rng = random.Random(0)
    g = flat(random_unimodular(3, rng))
    x = GroupRingElem.from_group_elem(g)
    assert multiply(x, GroupRingElem.from_group_elem(ginv(g))) == GroupRingElem.one(3)
    assert gmul(g, ginv(g)) == identity_elem(3)
    assert star(GroupRingElem.one(3)) == GroupRingElem.one(3)
    assert star(x.scale(Fraction(2, 3))) == GroupRingElem.from_group_elem(ginv(g), Fraction(2, 3))
    assert (x - x) == 0


def test_ginv_n4():
    rng = random.Random(3)
    for _ in range(10):
        g = flat(random_unimodular(4, rng))
        assert gmul(g, ginv(g)) == identity_elem(4)


def test_idempotents_of_n2(c2):
    for n in c2.degrees:
        for cell in c2.orbits[n]:
            v = cell.idempotent()
            assert multiply(v, v) == v
            assert star(v) == v
            for h, s in cell.stabilizer:
                hv = GroupRingElem.from_group_elem(h)
                assert multiply(hv, v) == v.scale(s) == multiply(v, hv)


def _hand_square(v):
    """Independent convolution by explicit double loop over nested matrices."""
    out = {}
    for g, a in v.terms.items():
        for h, b in v.terms.items():
            G = [g[0:2], g[2:4]]
            H = [h[0:2], h[2:4]]
            k = tuple(sum(G[i][t] * H[t][j] for t in range(2)) for i in range(2) for j in range(2))
            out[k] = out.get(k, 0) + a * b
    return GroupRingElem(out)


def test_n2_top_idempotent_square_by_independent_convolution(c2):
    v = c2.orbits[2][0].idempotent()
    assert len(v) == 6
    assert _hand_square(v) == v


def test_v_plus_w_decomposition(c3):
    rng = random.Random(5)
    for cell in (cell for n in c3.degrees for cell in c3.orbits[n]):
        v = cell.idempotent()
        xi = GroupRingElem({flat(random_unimodular(3, rng)): rng.randint(-3, 3) for _ in range(3)})
        first = multiply(v, xi)
        second = xi - first
        assert multiply(v, first) == first
        assert multiply(v, second) == 0
        assert first + second == xi


def _random_matrix(rng, rows, cols):
    m = GroupRingMatrix(rows, cols)
    for i in range(rows):
        for j in range(cols):
            m[i, j] = GroupRingElem({flat(random_unimodular(2, rng, 3)): Fraction(rng.randint(-2, 2), rng.randint(1, 3))
                                     for _ in range(2)})
    return m


def test_matrix_star_properties(c3):
    rng = random.Random(6)
    for _ in range(5):
        a, b = _random_matrix(rng, 2, 2), _random_matrix(rng, 2, 2)
        assert matrix_star(matrix_star(a)) == a
        assert matrix_star(a @ b) == matrix_star(b) @ matrix_star(a)
    for n in c3.degrees:
        d = characteristic_diagonal(c3, n)
        assert matrix_star(d) == d


def test_laplacians_star_symmetric_n3(c3):
    for n in c3.degrees:
        lap = laplacian(c3, n)
        assert matrix_star(lap) == lap
        lp = laplacian_prime(c3, n)
        assert matrix_star(lp) == lp


def test_n2_laplacian_shapes(c2):
    d2 = boundary_operator(c2, 2)
    assert (d2.rows, d2.cols) == (1, 1)
    assert laplacian(c2, 1) == d2 @ matrix_star(d2)
    assert laplacian(c2, 2) == matrix_star(d2) @ d2


def test_laplacian_prime_equals_laplacian_for_trivial_positive_stabilizers(c3):
    class Trivial:
        def __init__(self, cell):
            self.cell = cell

        def idempotent(self):
            return GroupRingElem.one(3)

    class Shim:
        N = 3

        def orbits_in(self, n):
            return [Trivial(c) for c in c3.orbits_in(n)]

        def differential(self, n):
            return c3.differential(n)

    assert laplacian_prime(Shim(), 3) == laplacian(c3, 3)


def test_json_round_trip(c3):
    for n in c3.degrees:
        m = laplacian_prime(c3, n)
        assert GroupRingMatrix.from_json(m.to_json(degree=n)) == m
    e = GroupRingElem({identity_elem(2): Fraction(-1, 3)})
    assert GroupRingElem.from_json(e.to_json()) == e
    assert e.to_json() == [{"g": [[1, 0], [0, 1]], "coeff": "-1/3"}]


def test_matmul_shape_mismatch():
    with pytest.raises(ValueError):
        GroupRingMatrix(2, 3) @ GroupRingMatrix(2, 3)

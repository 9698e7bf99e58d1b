import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from voronoi_sln.exactmath import ContractError, random_unimodular, rank_int_array
from voronoi_sln.groupring import GroupRingElem, GroupRingMatrix, flat, gmul, matrix_star
from voronoi_sln.reps import (EXPECTED_ORDER, H3_GENERATORS, FiniteGroupTable, OrthogonalRep,
                              build_rep_data, build_rho, induce, invariant_vector_dim,
                              elementary_images, mod_reduce, representing_matrix, sl_order,
                              trivial_rep)


def order_formula(n, p):
    out = p ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        out *= p ** k - 1
    return out


def test_group_orders():
    assert order_formula(3, 3) == 5616 and order_formula(4, 2) == 20160
    for (n, p), order in EXPECTED_ORDER.items():
        assert order == order_formula(n, p) == sl_order(n, p)
    t2 = FiniteGroupTable(2, 2)
    brute = [m for m in itertools.product(range(2), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % 2 == 1]
    assert len(t2) == len(brute) == 6


def test_table_orders(pi3, pi4):
    assert len(pi3[1].table) == 5616
    assert len(pi4[1].table) == 20160


def test_subgroup_orders(pi3, pi4):
    d3, d4 = pi3[1], pi4[1]
    assert len(d3.h_n) == 36 and len(d3.h) == 18
    assert len(d4.h_n) == 576 and len(d4.h) == 96


def test_rho_values(pi3, pi4):
    rho3 = build_rho(3, pi3[1])
    assert rho3.matrix(1).tolist() == [[-1]]
    rho4 = build_rho(4, pi4[1])
    assert rho4.matrix(1).tolist() == [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    for rho in (rho3, rho4):
        fixed = [np.array_equal(rho.matrix(c), np.eye(rho.dim, dtype=np.int64))
                 for c in range(len(rho.perm))]
        # only the identity class fixes everything; no common invariant vector
        stacked = np.vstack([rho.matrix(c) - np.eye(rho.dim, dtype=np.int64)
                             for c in range(len(rho.perm))])
        assert rank_int_array(stacked) == rho.dim
        assert fixed.count(True) == 1


def test_induced_dimensions(pi3, pi4):
    assert pi3[0].dim == 5616 // 36 * 1 == 156
    assert pi4[0].dim == 20160 // 576 * 3 == 105


@pytest.mark.parametrize("which", ["pi3", "pi4"])
def test_orthogonal_and_homomorphic(which, request):
    rep, _ = request.getfixturevalue(which)
    assert rep.is_orthogonal()
    for idx in range(0, len(rep.table), 997):
        m = rep.matrix(idx)
        assert np.array_equal(m.T @ m, np.eye(rep.dim, dtype=np.int64))
    rng = np.random.default_rng(0)
    a = rng.integers(0, len(rep.table), 10_000)
    b = rng.integers(0, len(rep.table), 10_000)
    assert rep.homomorphism_defects(a, b) == 0


@pytest.mark.parametrize("which", ["pi3", "pi4"])
def test_no_invariant_vectors(which, request):
    rep, _ = request.getfixturevalue(which)
    assert invariant_vector_dim(rep, elementary_images(rep.table)) == 0


def test_trivial_rep_invariants():
    t = FiniteGroupTable(2, 2)
    rep = trivial_rep(t, 3)
    assert invariant_vector_dim(rep, elementary_images(t)) == 3


def test_induction_from_whole_group_is_trivial():
    from voronoi_sln.reps import RepData
    t = FiniteGroupTable(2, 2)
    everything = np.arange(len(t))
    data = RepData(2, t, everything, everything, [t.identity],
                   [(np.array([0]), np.array([1]))])
    rep = induce(data)
    assert rep.dim == 1
    assert all(rep.matrix(i).tolist() == [[1]] for i in range(len(t)))


def test_transposed_matrix_breaks_homomorphism(pi3):
    rep, _ = pi3
    t = rep.table
    bad_idx = next(i for i in range(len(t)) if not np.array_equal(rep.matrix(i), rep.matrix(i).T))
    perm, sign = rep.perm.copy(), rep.sign.copy()
    # the transpose of a signed permutation is its inverse
    inv = np.argsort(perm[bad_idx])
    sign[bad_idx] = sign[bad_idx][inv]
    perm[bad_idx] = inv
    mutated = OrthogonalRep(t, perm, sign)
    assert np.array_equal(mutated.matrix(bad_idx), rep.matrix(bad_idx).T)
    from voronoi_sln.engine import check_rep
    assert "homomorphism-generators" in check_rep(mutated)


def test_mod_reduce(pi3):
    t = pi3[1].table
    rng = random.Random(1)
    assert mod_reduce(np.eye(3, dtype=int), t) == t.identity
    for _ in range(50):
        g, h = flat(random_unimodular(3, rng)), flat(random_unimodular(3, rng))
        assert mod_reduce(gmul(g, h), t) == int(t.mul(mod_reduce(g, t), mod_reduce(h, t)))
        shifted = tuple(x + 3 * rng.randint(-2, 2) for x in g)
        assert mod_reduce(shifted, t) == mod_reduce(g, t)
    with pytest.raises(ContractError):
        mod_reduce([[1, 0, 0], [0, 1, 0], [0, 0, 0]], t)


def test_structure_data_embedded():
    # the printed N=3 data repeats one generator; kept as printed
    assert H3_GENERATORS
    data = build_rep_data(3)
    assert len(data.h_n) == 2 * len(data.h)


def _random_elem(rng, n=3, k=3):
    return GroupRingElem({flat(random_unimodular(n, rng)): Fraction(rng.randint(-3, 3), rng.randint(1, 4))
                          for _ in range(k)})


def test_representing_matrix_properties(pi3):
    rep = pi3[0]
    rng = random.Random(4)
    one = GroupRingMatrix.identity(1, 3)
    ev = representing_matrix(one, rep)
    assert ev.denom == 1 and np.array_equal(ev.numer, np.eye(rep.dim, dtype=np.int64))
    for _ in range(5):
        m = GroupRingMatrix(2, 2, [[_random_elem(rng) for _ in range(2)] for _ in range(2)])
        a = GroupRingMatrix(1, 1, [[_random_elem(rng)]])
        b = GroupRingMatrix(1, 1, [[_random_elem(rng)]])
        assert representing_matrix(matrix_star(m), rep) == representing_matrix(m, rep).transpose()
        ea, eb = representing_matrix(a, rep), representing_matrix(b, rep)
        prod = representing_matrix(a @ b, rep)
        assert np.array_equal(prod.numer * ea.denom * eb.denom, (ea.numer @ eb.numer) * prod.denom)
        s = representing_matrix(a + b, rep)
        assert np.array_equal(s.numer * ea.denom * eb.denom,
                              (ea.numer * eb.denom + eb.numer * ea.denom) * s.denom)

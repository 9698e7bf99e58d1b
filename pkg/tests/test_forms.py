import itertools
import random

import pytest

from voronoi_sln.exactmath import ContractError, DimensionError, det_exact, is_positive_definite
from voronoi_sln.forms import (PERFECT_FORMS, MinVecSet, act_form, act_vector, barycentre_form,
                               eval_form, is_perfect, minimal_vectors, negation_closure,
                               pair_representatives, perfect_forms, rank_one_form, short_vectors)
from voronoi_sln.exactmath import random_unimodular

A2 = [[2, -1], [-1, 2]]
I2 = [[1, 0], [0, 1]]


def adjugate_diag(q):
    n = len(q)
    return [det_exact([[q[r][c] for c in range(n) if c != i] for r in range(n) if r != i])
            if n > 1 else 1 for i in range(n)]


def box_search(q, bound):
    """All nonzero v with q(v) <= bound, by exhaustive search in a provable box.

    |v_i|^2 <= bound * (q^{-1})_ii = bound * adj_ii / det.
    """
    d = det_exact(q)
    box = [int((bound * a / d) ** 0.5) + 1 for a in adjugate_diag(q)]
    out = []
    for v in itertools.product(*[range(-b, b + 1) for b in box]):
        if any(v) and eval_form(q, v) <= bound:
            out.append(v)
    return sorted(out)


def test_eval_form_examples():
    assert eval_form(A2, (1, 0)) == 2
    assert eval_form(A2, (1, 1)) == 2
    assert eval_form(I2, (0, 1)) == 1
    with pytest.raises(DimensionError):
        eval_form(A2, (1, 0, 0))


def test_minimal_vectors_examples():
    m = minimal_vectors(A2)
    assert m.min_value == 2
    assert set(m.vectors) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)}
    assert set(minimal_vectors(I2).vectors) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(minimal_vectors(PERFECT_FORMS[3][0][1]).vectors) == 12


@pytest.mark.parametrize("name,q", [s for n in (2, 3, 4) for s in PERFECT_FORMS[n]])
def test_minimal_vectors_match_box_search(name, q):
    mv = minimal_vectors(q)
    brute = box_search(q, mv.min_value)
    assert sorted(mv.vectors) == brute
    assert all(eval_form(q, v) == mv.min_value for v in brute)
    assert set(mv.vectors) == {tuple(-x for x in v) for v in mv.vectors}


def test_short_vectors_match_box_search():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(2, 4)
        g = random_unimodular(n, rng, steps=3)
        q = act_form(g, PERFECT_FORMS[n][0][1] if n > 1 else [[1]])
        bound = rng.randint(2, 6)
        assert short_vectors(q, bound) == box_search(q, bound)


def test_minimal_vector_equivariance():
    rng = random.Random(5)
    for n in (2, 3, 4):
        q = PERFECT_FORMS[n][-1][1]
        for _ in range(5):
            g = random_unimodular(n, rng)
            ginv = [[round(x) for x in row] for row in _inverse(g)]
            moved = minimal_vectors(act_form(g, q))
            expect = {tuple(sum(ginv[i][k] * v[k] for k in range(n)) for i in range(n))
                      for v in minimal_vectors(q).vectors}
            assert set(moved.vectors) == expect


def _inverse(g):
    from fractions import Fraction
    n = len(g)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(g)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c])
        a[c], a[p] = a[p], a[c]
        a[c] = [x / a[c][c] for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                a[r] = [x - a[r][c] * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def test_rank_one_and_barycentre_examples():
    assert rank_one_form((1, 0)) == [[1, 0], [0, 0]]
    assert rank_one_form((1, 1)) == [[1, 1], [1, 1]]
    assert rank_one_form((-2, 3)) == rank_one_form((2, -3))
    assert barycentre_form([(1, 0), (-1, 0), (0, 1), (0, -1)]) == [[2, 0], [0, 2]]
    assert barycentre_form(minimal_vectors(A2).vectors) == [[4, 2], [2, 4]]
    assert barycentre_form([(1, 0), (-1, 0)]) == [[2, 0], [0, 0]]


def test_barycentre_equivariance_under_transpose_action():
    # vectors move by v -> g^t v when forms move by q -> g^t q g
    rng = random.Random(9)
    for n in (2, 3, 4):
        vecs = minimal_vectors(PERFECT_FORMS[n][0][1]).vectors
        for _ in range(5):
            g = random_unimodular(n, rng)
            moved = [act_vector(g, v) for v in vecs]
            assert barycentre_form(moved) == act_form(g, barycentre_form(vecs))


def test_perfectness():
    assert is_perfect(A2)
    assert not is_perfect(I2)
    for n in (2, 3, 4):
        for _, q in perfect_forms(n):
            assert is_perfect(q)
    assert len(perfect_forms(4)) == 2
    with pytest.raises(ContractError):
        perfect_forms(5)


def test_congruence_preserves_positive_definiteness():
    rng = random.Random(2)
    for _ in range(20):
        g = random_unimodular(3, rng)
        for q in ([[1, 2, 0], [2, 1, 0], [0, 0, 1]], PERFECT_FORMS[3][0][1]):
            assert is_positive_definite(act_form(g, q)) == is_positive_definite(q)


def test_pair_representatives_and_closure():
    vecs = [(1, 0), (0, -1), (1, 1)]
    closed = negation_closure(vecs)
    assert len(closed) == 6
    assert len(pair_representatives(closed)) == 3


def test_minvecset_round_trip():
    m = minimal_vectors(A2)
    assert MinVecSet.from_json(m.to_json()) == m

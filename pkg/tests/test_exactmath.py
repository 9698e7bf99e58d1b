import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voronoi_sln.exactmath import (ContractError, LARGE_RANK_ENTRIES, certified_rank, corank,
                                   det_exact, is_positive_definite, naive_rank, rank_exact,
                                   rank_int_array, rank_mod_p, rat_from_str, rat_to_str,
                                   random_unimodular)

small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def rational_matrix(max_n=6):
    return st.integers(1, max_n).flatmap(lambda r: st.integers(1, max_n).flatmap(
        lambda c: st.lists(st.lists(small_rationals, min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@settings(max_examples=300, deadline=None)
@given(rational_matrix())
def test_rank_matches_naive_elimination(m):
    assert rank_exact(m) == naive_rank(m)


def test_rank_matches_naive_on_low_rank_products():
    rng = random.Random(7)
    for _ in range(200):
        r, c, k = rng.randint(1, 6), rng.randint(1, 6), rng.randint(1, 3)
        a = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(k)] for _ in range(r)]
        b = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(c)] for _ in range(k)]
        m = [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(c)] for i in range(r)]
        assert rank_exact(m) == naive_rank(m) <= k


def test_rank_examples():
    assert rank_exact([[1, 2], [2, 4]]) == 1
    assert rank_exact([[1, 0], [0, 1]]) == 2
    assert corank([[1, 2], [2, 4]]) == 1
    assert rank_exact([[Fraction(1, 3), Fraction(2, 3)], [1, 2]]) == 1


def test_det_examples():
    assert det_exact([[2, -1], [-1, 2]]) == 3
    assert det_exact([[2, -1, 0], [-1, 2, -1], [0, -1, 2]]) == 4
    assert det_exact([[Fraction(1, 2), 0], [0, 4]]) == 2
    assert det_exact([[0, 1], [1, 0]]) == -1


def test_large_rank_goes_through_flint_and_agrees():
    rng = np.random.default_rng(1)
    n = int(LARGE_RANK_ENTRIES ** 0.5) + 2
    a = rng.integers(-2, 3, (n, 8)) @ rng.integers(-2, 3, (8, n))
    assert rank_exact(a.tolist()) == 8
    assert rank_int_array(a) == 8


@pytest.mark.parametrize("seed", range(20))
def test_certified_rank_agrees(seed):
    rng = np.random.default_rng(seed)
    r, c, k = rng.integers(2, 12, 3)
    a = rng.integers(-4, 5, (r, k)) @ rng.integers(-4, 5, (k, c))
    assert certified_rank(a) == naive_rank(a.tolist())


def test_modular_rank_is_a_lower_bound():
    a = np.array([[2, 0], [0, 3]])
    assert rank_mod_p(a, 2) == 1
    assert rank_mod_p(a, 5) == 2 == rank_exact(a.tolist())


def test_positive_definite():
    assert is_positive_definite([[2, -1], [-1, 2]])
    assert not is_positive_definite([[1, 2], [2, 1]])
    assert not is_positive_definite([[1, 0], [0, 0]])
    with pytest.raises(ContractError):
        is_positive_definite([[1, 2], [0, 1]])


def test_rational_string_round_trip():
    for x in (Fraction(0), Fraction(-3, 7), Fraction(5), Fraction(1, 144)):
        assert rat_from_str(rat_to_str(x)) == x
    assert rat_to_str(Fraction(2, 4)) == "1/2"


def test_random_unimodular_has_det_one():
    rng = random.Random(3)
    for n in (2, 3, 4):
        for _ in range(20):
            assert det_exact(random_unimodular(n, rng)) == 1

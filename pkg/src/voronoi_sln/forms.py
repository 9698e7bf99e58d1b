"""Integral quadratic forms: evaluation, short and minimal vectors, perfectness.

A form is an N x N symmetric integer matrix ``q`` (list of lists); it acts on
integer column vectors by ``v -> v^t q v``.  SL_N(Z) acts on forms from the
right by ``q.g = g^t q g`` and on vectors by ``v.g = g^t v``, so that
``(v v^t).g = (v.g)(v.g)^t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

from .exactmath import ContractError, DimensionError, is_positive_definite, rank_exact

Vector = tuple[int, ...]


def eval_form(q, v: Sequence[int]) -> int:
    n = len(q)
    if len(v) != n:
        raise DimensionError(f"vector of length {len(v)} for a {n}x{n} form")
    return sum(v[i] * q[i][j] * v[j] for i in range(n) for j in range(n))


def inner(q, u: Sequence[int], v: Sequence[int]) -> int:
    n = len(q)
    return sum(u[i] * q[i][j] * v[j] for i in range(n) for j in range(n))


def _fincke_pohst_coefficients(q):
    n = len(q)
    Q = [[Fraction(q[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    return Q


def _sqrt_ceil(r: Fraction) -> int:
    """An integer >= sqrt(r) (r >= 0), tight to within one."""
    if r <= 0:
        return 0
    return isqrt(r.numerator // r.denominator + 1) + 1


def short_vectors(q, bound: int) -> list[Vector]:
    """All nonzero integer vectors v with q(v) <= bound (both signs).

    Fincke-Pohst enumeration on the exact decomposition
    q(x) = sum_i c_ii (x_i + sum_{j>i} c_ij x_j)^2.
    """
    if not is_positive_definite(q):
        raise ContractError("short_vectors needs a positive definite form")
    n = len(q)
    Q = _fincke_pohst_coefficients(q)
    out: list[Vector] = []
    x = [0] * n

    def recurse(i: int, remaining: Fraction):
        centre = -sum((Q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        radius = _sqrt_ceil(remaining / Q[i][i])
        lo = int(centre) - radius - 1
        hi = int(centre) + radius + 1
        for xi in range(lo, hi + 1):
            t = Q[i][i] * (xi - centre) ** 2
            if t > remaining:
                continue
            x[i] = xi
            if i == 0:
                if any(x):
                    out.append(tuple(x))
            else:
                recurse(i - 1, remaining - t)
        x[i] = 0

    recurse(n - 1, Fraction(bound))
    out.sort()
    return out


@dataclass(frozen=True)
class MinVecSet:
    vectors: tuple[Vector, ...]
    min_value: int

    def to_json(self):
        return {"vectors": [list(v) for v in self.vectors], "min_value": self.min_value}

    @classmethod
    def from_json(cls, d):
        return cls(tuple(sorted(tuple(v) for v in d["vectors"])), d["min_value"])


def minimal_vectors(q) -> MinVecSet:
    if not is_positive_definite(q):
        raise ContractError("minimal_vectors needs a positive definite form")
    bound = min(q[i][i] for i in range(len(q)))
    vecs = short_vectors(q, bound)
    mu = min(eval_form(q, v) for v in vecs)
    return MinVecSet(tuple(v for v in vecs if eval_form(q, v) == mu), mu)


def rank_one_form(v: Sequence[int]) -> list[list[int]]:
    if not any(v):
        raise ContractError("rank_one_form of the zero vector")
    return [[a * b for b in v] for a in v]


def barycentre_form(vectors: Iterable[Sequence[int]]) -> list[list[int]]:
    vectors = list(vectors)
    if not vectors:
        raise ContractError("barycentre of an empty vector set")
    n = len(vectors[0])
    out = [[0] * n for _ in range(n)]
    for v in vectors:
        for i in range(n):
            vi = v[i]
            if vi:
                row = out[i]
                for j in range(n):
                    row[j] += vi * v[j]
    return out


def sym_coords(v: Sequence[int]) -> tuple[int, ...]:
    """Upper-triangular coordinates of v v^t, a point of R^{N(N+1)/2}."""
    n = len(v)
    return tuple(v[i] * v[j] for i in range(n) for j in range(i, n))


def sym_flatten(m) -> tuple[int, ...]:
    n = len(m)
    return tuple(m[i][j] for i in range(n) for j in range(i, n))


def canonical_sign(v: Sequence[int]) -> Vector:
    """Representative of {v, -v} whose first nonzero entry is positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    raise ContractError("zero vector has no sign class")


def pair_representatives(vectors: Iterable[Sequence[int]]) -> list[Vector]:
    return sorted({canonical_sign(v) for v in vectors})


def negation_closure(vectors: Iterable[Sequence[int]]) -> tuple[Vector, ...]:
    s = set()
    for v in vectors:
        s.add(tuple(v))
        s.add(tuple(-x for x in v))
    return tuple(sorted(s))


def act_vector(g, v: Sequence[int]) -> Vector:
    """v.g = g^t v."""
    n = len(v)
    return tuple(sum(g[k][i] * v[k] for k in range(n)) for i in range(n))


def act_form(g, q) -> list[list[int]]:
    """q.g = g^t q g."""
    n = len(q)
    qg = [[sum(q[i][k] * g[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[sum(g[k][i] * qg[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def is_perfect(q) -> bool:
    n = len(q)
    mv = minimal_vectors(q)
    pts = [sym_coords(v) for v in pair_representatives(mv.vectors)]
    return rank_exact(pts) == n * (n + 1) // 2


def _tridiagonal(n):
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)]
            for i in range(n)]


# Perfect-form seeds, one per SL_N(Z)-class.  Which representative of each
# class is used does not matter: every later output is orbit-invariant.
PERFECT_FORMS: dict[int, list[tuple[str, list[list[int]]]]] = {
    2: [("A2", _tridiagonal(2))],
    3: [("A3", _tridiagonal(3))],
    4: [("A4", _tridiagonal(4)),
        ("D4", [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]])],
}
EXPECTED_CLASS_COUNT = {2: 1, 3: 1, 4: 2}


def perfect_forms(n: int) -> list[tuple[str, list[list[int]]]]:
    if n not in PERFECT_FORMS:
        raise ContractError(f"no perfect-form data for N={n}")
    seeds = PERFECT_FORMS[n]
    if len(seeds) != EXPECTED_CLASS_COUNT[n]:
        raise ContractError(f"expected {EXPECTED_CLASS_COUNT[n]} perfect classes for N={n}")
    for name, q in seeds:
        if not is_perfect(q):
            raise ContractError(f"seed {name} is not perfect")
    return seeds

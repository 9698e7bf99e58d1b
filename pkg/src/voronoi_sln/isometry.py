"""Integral isometries between positive definite forms.

``all_isometries(q1, q2)`` returns every integer g with g^t q1 g = q2.
Column j of g is a vector w_j with q1(w_j) = q2[j][j] and
w_i^t q1 w_j = q2[i][j]; we backtrack over the columns, drawing candidates
from the short vectors of q1 and pruning on the inner products already fixed.
"""
from __future__ import annotations

from collections import defaultdict

from .exactmath import ContractError, det_exact, is_positive_definite
from .forms import act_form, inner, minimal_vectors, short_vectors

Matrix = tuple[tuple[int, ...], ...]


def _as_tuple(g) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in g)


def _search(q1, q2, det_constraint, first_only: bool):
    if not (is_positive_definite(q1) and is_positive_definite(q2)):
        raise ContractError("isometry search needs positive definite forms")
    n = len(q1)
    if len(q2) != n:
        return []
    d1, d2 = det_exact(q1), det_exact(q2)
    if d1 != d2:
        return []
    # cheap invariant: equivalent forms have equal minima
    if minimal_vectors(q1).min_value != minimal_vectors(q2).min_value:
        return []
    norms = {q2[j][j] for j in range(n)}
    by_norm = defaultdict(list)
    for w in short_vectors(q1, max(norms)):
        val = inner(q1, w, w)
        if val in norms:
            by_norm[val].append(w)
    # q1-products of a candidate with each vector, cached per column choice
    q1w = {}
    for vals in by_norm.values():
        for w in vals:
            q1w[w] = tuple(sum(q1[i][k] * w[k] for k in range(n)) for i in range(n))

    found = []
    cols: list[tuple[int, ...]] = []

    def extend(j: int) -> bool:
        if j == n:
            g = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
            if det_constraint == 1 and det_exact(g) != 1:
                return False
            found.append(g)
            return first_only
        for w in by_norm.get(q2[j][j], ()):
            qw = q1w[w]
            if all(sum(a * b for a, b in zip(cols[i], qw)) == q2[i][j] for i in range(j)):
                cols.append(w)
                stop = extend(j + 1)
                cols.pop()
                if stop:
                    return True
        return False

    extend(0)
    return found


def all_isometries(q1, q2, det_constraint=1) -> list[Matrix]:
    """Every integer g with g^t q1 g = q2; det g = 1 unless det_constraint is "any"."""
    if det_constraint not in (1, "any", None):
        raise ContractError("det_constraint must be 1 or 'any'")
    return sorted(_search(q1, q2, det_constraint, first_only=False))


def find_isometry(q1, q2, det_constraint=1):
    res = _search(q1, q2, det_constraint, first_only=True)
    return res[0] if res else None


def stabilizer(q) -> list[Matrix]:
    """The finite group {g in SL_N(Z) : g^t q g = q}, identity first."""
    n = len(q)
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    elems = all_isometries(q, q, 1)
    elems.remove(ident)
    return [ident] + elems


def match_orbit(q, catalog):
    """(i, g) with g^t catalog[i] g = q, or None.

    The catalog must be orbit-distinct; a second match is a contract error.
    """
    hit = None
    for i, c in enumerate(catalog):
        g = find_isometry(c, q, 1)
        if g is not None:
            if hit is not None:
                raise ContractError(f"catalog entries {hit[0]} and {i} are equivalent")
            hit = (i, g)
    return hit


def check_isometry(g, q1, q2) -> bool:
    return act_form(g, q1) == [list(r) for r in q2]

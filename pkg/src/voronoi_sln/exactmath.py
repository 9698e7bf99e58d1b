"""Exact integer and rational linear algebra.

Matrices are plain row-major lists of lists.  Rationals are
:class:`fractions.Fraction`, which is always stored reduced with a positive
denominator.  Nothing in here touches floating point.
"""
from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

try:
    import flint
except ImportError:  # pragma: no cover - flint is a declared dependency
    flint = None

Rational = Fraction

# above this many entries rank_exact hands the (integer) matrix to FLINT
LARGE_RANK_ENTRIES = 40_000

# 31-bit primes; products of two residues fit comfortably in int64
MODULAR_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
                  2147483549, 2147483543, 2147483497, 2147483489, 2147483477)


class DimensionError(ValueError):
    pass


class ContractError(ValueError):
    pass


def rat_to_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(s: str) -> Fraction:
    return Fraction(s)


def shape(m: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    for r in m:
        if len(r) != cols:
            raise DimensionError("ragged matrix")
    return rows, cols


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def is_symmetric(m) -> bool:
    n = len(m)
    return all(len(r) == n for r in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def det_exact(m) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    rows, cols = shape(m)
    if rows != cols:
        raise DimensionError(f"det of non-square {rows}x{cols} matrix")
    n = rows
    if n == 0:
        return 1
    a = [list(r) for r in m]
    if any(isinstance(x, Fraction) and x.denominator != 1 for r in a for x in r):
        return _det_fraction(a)
    a = [[int(x) for x in r] for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_fraction(a) -> Fraction:
    den = 1
    for r in a:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    n = len(a)
    scaled = [[int(Fraction(x) * den) for x in r] for r in a]
    return Fraction(det_exact(scaled), den ** n)


def clear_denominators(m) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (rank-preserving)."""
    out = []
    for r in m:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        out.append([int(x * den) for x in r] if den != 1 else [int(x) for x in r])
    return out


def _bareiss_rank(a: list[list[int]]) -> int:
    """Fraction-free rank with full pivoting; destroys ``a``."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    prev = 1
    col_order = list(range(cols))
    for k in range(min(rows, cols)):
        # full pivoting: smallest nonzero magnitude in the trailing block
        best = None
        for i in range(k, rows):
            ri = a[i]
            for jj in range(k, cols):
                x = ri[col_order[jj]]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, jj)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        a[k], a[pi] = a[pi], a[k]
        col_order[k], col_order[pj] = col_order[pj], col_order[k]
        rk = a[k]
        pc = col_order[k]
        akk = rk[pc]
        rest = col_order[k + 1:]
        for i in range(k + 1, rows):
            ri = a[i]
            aik = ri[pc]
            if aik == 0:
                if akk != 1 or prev != 1:
                    for j in rest:
                        ri[j] = (akk * ri[j]) // prev
            else:
                for j in rest:
                    ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[pc] = 0
        prev = akk
        rank += 1
    return rank


def rank_exact(m) -> int:
    """Exact rank over Q.

    Entries may be ints or Fractions.  Small matrices use fraction-free
    Bareiss elimination; large ones are passed to FLINT's exact integer rank.
    """
    rows = len(m)
    if rows == 0:
        return 0
    cols = len(m[0])
    if cols == 0:
        return 0
    a = clear_denominators(m)
    if rows * cols > LARGE_RANK_ENTRIES and flint is not None:
        return int(flint.fmpz_mat(a).rank())
    return _bareiss_rank(a)


def corank(m) -> int:
    cols = len(m[0]) if m else 0
    return cols - rank_exact(m)


def rank_int_array(a: np.ndarray) -> int:
    """Exact rank of an integer numpy array (any size)."""
    if a.size == 0:
        return 0
    if flint is not None and a.size > 400:
        return int(flint.fmpz_mat(a.tolist()).rank())
    return _bareiss_rank([[int(x) for x in r] for r in a])


def is_positive_definite(q) -> bool:
    """Sylvester's criterion with exact leading minors."""
    if not is_symmetric(q):
        raise ContractError("is_positive_definite needs a symmetric matrix")
    n = len(q)
    for k in range(1, n + 1):
        if det_exact([row[:k] for row in q[:k]]) <= 0:
            return False
    return True


def naive_rank(m) -> int:
    """Textbook Gaussian elimination over Fraction.  Test oracle only."""
    a = [[Fraction(x) for x in r] for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# Modular arithmetic.  Used as a pre-pass and for the kernel certificate;
# a rank mod p is only a lower bound for the rank over Q.

def _rref_mod_p(a: np.ndarray, p: int):
    """Reduced row echelon form of an int64 array modulo a prime p < 2**31."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r]) % p) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_mod_p(a, p: int = MODULAR_PRIMES[0]) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    if flint is not None:
        return int(flint.nmod_mat(a.shape[0], a.shape[1],
                                  [int(x) % p for x in a.ravel()], p).rank())
    return len(_rref_mod_p(a, p)[1])


def _rational_reconstruct(x: int, m: int):
    """Find n/d = x mod m with |n|, d <= sqrt(m/2); None if impossible."""
    bound = int((m // 2) ** 0.5)
    r0, r1 = m, x % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    if gcd(r1, s1) != 1:
        return None
    return Fraction(r1, s1)


def _kernel_mod_p(a: np.ndarray, p: int):
    red, pivots = _rref_mod_p(a, p)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = (-red[r, f]) % p
    return basis, pivots, free


def certified_rank(a: np.ndarray, max_primes: int = len(MODULAR_PRIMES)) -> int:
    """Exact rank of an integer matrix by a two-sided certificate.

    The rank modulo a prime is a lower bound.  The upper bound comes from an
    explicit rational kernel basis, reconstructed from modular kernels by CRT
    and verified by exact integer multiplication.  Raises RuntimeError if the
    bounds fail to meet within ``max_primes`` primes.
    """
    a = np.asarray(a, dtype=object)
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return 0
    ai = np.array(a, dtype=np.int64) if _fits_int64(a) else None
    if ai is None:
        raise ValueError("certified_rank expects entries that fit in int64")
    exact = [[int(x) for x in r] for r in a]
    modulus = 1
    acc = None
    layout = None
    for p in MODULAR_PRIMES[:max_primes]:
        basis, pivots, free = _kernel_mod_p(ai, p)
        key = (-len(pivots), tuple(pivots))
        if layout is None:
            layout = key
        elif key != layout:
            # an unlucky prime loses pivots or pushes them right
            if key < layout:
                layout, acc, modulus = key, None, 1
            else:
                continue
        if not free:
            return cols
        b = [[int(x) for x in row] for row in basis]
        if acc is None:
            acc, modulus = b, p
        else:
            acc = [[_crt(x, modulus, y, p) for x, y in zip(r1, r2)]
                   for r1, r2 in zip(acc, b)]
            modulus *= p
        vecs = []
        for row in acc:
            vec = [_rational_reconstruct(x, modulus) for x in row]
            if any(v is None for v in vec):
                break
            den = 1
            for v in vec:
                den = lcm(den, v.denominator)
            vecs.append([int(v * den) for v in vec])
        else:
            if all(_is_null(exact, v) for v in vecs):
                # vectors are independent: unit entries on distinct free columns
                return cols - len(vecs)
    raise RuntimeError("kernel certificate did not close; try more primes")


def _fits_int64(a) -> bool:
    return all(-(1 << 62) < int(x) < (1 << 62) for x in np.asarray(a).ravel())


def _crt(x1: int, m1: int, x2: int, m2: int) -> int:
    t = ((x2 - x1) * pow(m1, -1, m2)) % m2
    return x1 + m1 * t


def _is_null(rows, v) -> bool:
    return all(sum(x * y for x, y in zip(r, v) if x) == 0 for r in rows)


def random_unimodular(n: int, rng: random.Random, steps: int = 6) -> list[list[int]]:
    """Random det-1 integer matrix, built from elementary moves."""
    g = identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-1, 1))
        for r in range(n):
            g[r][j] += c * g[r][i]
    if rng.random() < 0.5 and n >= 2:
        # a det-1 signed swap of two columns
        i, j = rng.sample(range(n), 2)
        for r in range(n):
            g[r][i], g[r][j] = -g[r][j], g[r][i]
    return g

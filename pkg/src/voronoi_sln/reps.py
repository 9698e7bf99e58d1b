"""Finite quotients SL_N(Z/p), induced orthogonal representations, evaluation.

Every representation built here is monomial: pi(g) is a signed permutation
matrix, stored as two integer arrays ``perm`` and ``sign`` with
pi(g) e_j = sign[g, j] e_{perm[g, j]}.  Orthogonality is then a statement
about ``perm`` being a bijection and ``sign`` being +-1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .exactmath import ContractError, rank_int_array

# --- generator data -------------------------------------------------------

# N = 3, p = 3.  As printed, a coincides with s.
H3_GENERATORS = {
    "s": [[0, 0, 1], [0, 2, 0], [1, 1, 0]],
    "t": [[1, 2, 0], [0, 2, 0], [1, 1, 2]],
}
H3_NORMAL_GENERATORS = {
    "s": [[0, 0, 1], [0, 2, 0], [1, 1, 0]],
    "a": [[0, 0, 1], [0, 2, 0], [1, 1, 0]],
    "b": [[0, 1, 2], [0, 1, 0], [1, 2, 2]],
}

# N = 4, p = 2.
H4_GENERATORS = {
    "s": [[1, 0, 0, 0], [0, 0, 0, 1], [1, 1, 0, 1], [1, 0, 1, 1]],
    "t": [[0, 1, 1, 0], [0, 1, 1, 1], [1, 1, 1, 1], [0, 0, 1, 1]],
}
H4_NORMAL_GENERATORS = {
    "a": [[1, 0, 1, 1], [0, 1, 1, 1], [0, 0, 1, 0], [0, 0, 0, 1]],
    "b": [[1, 1, 1, 0], [1, 0, 0, 0], [0, 0, 1, 0], [1, 0, 1, 1]],
    "c": [[0, 1, 1, 1], [1, 0, 1, 1], [0, 0, 1, 0], [0, 0, 0, 1]],
    "d": [[1, 0, 1, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    "e": [[0, 1, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 0, 0]],
    "f": [[1, 0, 0, 0], [1, 0, 1, 1], [0, 0, 1, 0], [1, 1, 1, 0]],
}
H4_QUOTIENT_X = [[0, 1, 0, 0], [0, 1, 1, 1], [1, 1, 1, 1], [0, 0, 0, 1]]
H4_QUOTIENT_Y = [[0, 1, 0, 0], [0, 0, 0, 1], [1, 1, 0, 1], [0, 1, 1, 1]]

MODULUS = {2: 2, 3: 3, 4: 2}
EXPECTED_ORDER = {(2, 2): 6, (3, 3): 5616, (4, 2): 20160}


def sl_order(n: int, p: int) -> int:
    """|SL_n(F_p)| = prod_{i<n} (p^n - p^i) / (p - 1)."""
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out // (p - 1)


def permutation_matrix(images) -> np.ndarray:
    """M with M e_i = e_{images[i]} (0-based)."""
    m = np.zeros((len(images), len(images)), dtype=np.int64)
    for i, j in enumerate(images):
        m[j, i] = 1
    return m


class FiniteGroupTable:
    """All of SL_N(Z/p), sorted lexicographically by flattened entries."""

    def __init__(self, N: int, p: int):
        self.N, self.p = N, p
        self.k = N * N
        self.powers = p ** np.arange(self.k - 1, -1, -1, dtype=np.int64)
        self.elements = self._close(self._elementary())
        self.codes = self.encode(self.elements)
        self.index = np.full(p ** self.k, -1, dtype=np.int64)
        self.index[self.codes] = np.arange(len(self.codes))
        self.identity = self.lookup(np.eye(N, dtype=np.int64))
        self._inverse = None

    def _elementary(self) -> np.ndarray:
        gens = []
        for i in range(self.N):
            for j in range(self.N):
                if i != j:
                    g = np.eye(self.N, dtype=np.int64)
                    g[i, j] = 1
                    gens.append(g)
        return np.array(gens)

    def elementary_generators(self) -> np.ndarray:
        return self._elementary()

    def encode(self, mats: np.ndarray) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64) % self.p
        return mats.reshape(-1, self.k) @ self.powers

    def _close(self, gens: np.ndarray) -> np.ndarray:
        limit = EXPECTED_ORDER.get((self.N, self.p), sl_order(self.N, self.p))
        ident = np.eye(self.N, dtype=np.int64)[None]
        seen = set(self.encode(ident).tolist())
        frontier = ident
        found = [ident]
        while len(frontier):
            prods = np.einsum("aij,bjk->abik", frontier, gens).reshape(-1, self.N, self.N) % self.p
            codes = self.encode(prods)
            _, first = np.unique(codes, return_index=True)
            keep = [i for i in first if codes[i] not in seen]
            seen.update(codes[keep].tolist())
            frontier = prods[keep]
            found.append(frontier)
            if len(seen) > limit:
                raise RuntimeError("closure exceeded the order of SL_N(Z/p)")
        elems = np.concatenate(found)
        order = np.argsort(self.encode(elems), kind="stable")
        return elems[order]

    def __len__(self):
        return len(self.elements)

    def lookup(self, mats) -> np.ndarray | int:
        mats = np.asarray(mats, dtype=np.int64)
        idx = self.index[self.encode(mats)]
        if np.any(idx < 0):
            raise ContractError("matrix is not in SL_N(Z/p)")
        return int(idx[0]) if mats.ndim == 2 else idx

    def mul(self, a, b):
        """Index products; a and b are index arrays (or ints) of equal shape."""
        prod = np.einsum("...ij,...jk->...ik", self.elements[a], self.elements[b]) % self.p
        return self.index[self.encode(prod)].reshape(np.shape(a))

    @property
    def inverse(self) -> np.ndarray:
        if self._inverse is None:
            inv = np.empty(len(self), dtype=np.int64)
            all_idx = np.arange(len(self))
            # g^{-1} = g^{m-1} where m is the order; use a per-element search on powers
            power = all_idx.copy()
            prev = all_idx.copy()
            done = np.zeros(len(self), dtype=bool)
            while not done.all():
                nxt = self.mul(power, all_idx)
                hit = (nxt == self.identity) & ~done
                inv[hit] = power[hit]
                done |= hit
                power = nxt
            self._inverse = inv
        return self._inverse

    def subgroup(self, generators) -> np.ndarray:
        """Sorted index array of the subgroup generated by matrices."""
        gens = self.lookup(np.array(generators))
        gens = np.atleast_1d(gens)
        members = {self.identity}
        frontier = np.array([self.identity])
        while len(frontier):
            prods = self.mul(np.repeat(frontier, len(gens)), np.tile(gens, len(frontier)))
            new = set(prods.tolist()) - members
            members |= new
            frontier = np.array(sorted(new), dtype=np.int64)
        return np.array(sorted(members), dtype=np.int64)


def mod_reduce(g, table: FiniteGroupTable) -> int:
    """Index of g mod p; g may be a flat tuple or a nested matrix."""
    a = np.asarray(g, dtype=np.int64).reshape(table.N, table.N)
    return table.lookup(a)


@dataclass
class OrthogonalRep:
    """Signed-permutation representation of a finite group table."""
    table: FiniteGroupTable
    perm: np.ndarray   # (|G|, d)
    sign: np.ndarray   # (|G|, d)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.perm.shape[1]

    def matrix(self, idx: int) -> np.ndarray:
        d = self.dim
        m = np.zeros((d, d), dtype=np.int64)
        m[self.perm[idx], np.arange(d)] = self.sign[idx]
        return m

    def is_orthogonal(self) -> bool:
        """Exact M^t M = I for every table entry (monomial criterion)."""
        d = self.dim
        ok_perm = np.all(np.sort(self.perm, axis=1) == np.arange(d)[None, :])
        ok_sign = np.all(np.abs(self.sign) == 1)
        return bool(ok_perm and ok_sign)

    def compose(self, a: np.ndarray, b: np.ndarray):
        """(perm, sign) of pi(a) pi(b) for index arrays a, b."""
        pb, sb = self.perm[b], self.sign[b]
        pa, sa = self.perm[a], self.sign[a]
        perm = np.take_along_axis(pa, pb, axis=1)
        sign = sb * np.take_along_axis(sa, pb, axis=1)
        return perm, sign

    def homomorphism_defects(self, a: np.ndarray, b: np.ndarray) -> int:
        ab = self.table.mul(a, b)
        perm, sign = self.compose(a, b)
        bad = np.any(perm != self.perm[ab], axis=1) | np.any(sign != self.sign[ab], axis=1)
        return int(bad.sum())

    def to_json(self, limit: int | None = None):
        n = len(self.table) if limit is None else min(limit, len(self.table))
        return {"p": self.table.p, "dim": self.dim, "entries": [
            {"g": self.table.elements[i].tolist(), "m": self.matrix(i).tolist()}
            for i in range(n)]}


def trivial_rep(table: FiniteGroupTable, dim: int = 1) -> OrthogonalRep:
    n = len(table)
    return OrthogonalRep(table, np.tile(np.arange(dim), (n, 1)),
                         np.ones((n, dim), dtype=np.int64), "trivial")


@dataclass
class RepData:
    """The subgroup H_N, its normal subgroup H and the quotient representation rho."""
    N: int
    table: FiniteGroupTable
    h_n: np.ndarray
    h: np.ndarray
    class_reps: list[int]           # table indices of coset representatives of H in H_N
    rho: list[tuple[np.ndarray, np.ndarray]]   # (perm, sign) per class

    @property
    def rho_dim(self) -> int:
        return len(self.rho[0][0])

    def quotient_class(self, idx: np.ndarray) -> np.ndarray:
        """Class number in H_N/H for each index (-1 outside H_N)."""
        idx = np.asarray(idx)
        out = np.full(idx.shape, -1, dtype=np.int64)
        in_hn = np.isin(idx, self.h_n)
        inv = self.table.inverse
        for c, r in enumerate(self.class_reps):
            prod = self.table.mul(np.full(idx.shape, inv[r]), idx)
            out[in_hn & np.isin(prod, self.h)] = c
        return out

    def rho_matrix(self, c: int) -> np.ndarray:
        perm, sign = self.rho[c]
        d = len(perm)
        m = np.zeros((d, d), dtype=np.int64)
        m[perm, np.arange(d)] = sign
        return m


def _is_normal(table, big: np.ndarray, small: np.ndarray) -> bool:
    inv = table.inverse
    sset = set(small.tolist())
    for g in big:
        conj = table.mul(table.mul(np.full(len(small), g), small), np.full(len(small), inv[g]))
        if not set(conj.tolist()) <= sset:
            return False
    return True


def build_rep_data(N: int, table: FiniteGroupTable | None = None) -> RepData:
    """H_N, H and rho from the embedded generator data, with self-checks."""
    if N not in (3, 4):
        raise ContractError("representation data exists for N in {3, 4}")
    p = MODULUS[N]
    table = table or FiniteGroupTable(N, p)
    if N == 3:
        h_n = table.subgroup(list(H3_GENERATORS.values()))
        h = table.subgroup(list(H3_NORMAL_GENERATORS.values()))
        if len(h_n) != 2 * len(h):
            raise ContractError("H is not of index two in H_3")
        outside = int(np.setdiff1d(h_n, h)[0])
        class_reps = [table.identity, outside]
        rho = [(np.array([0]), np.array([1])), (np.array([0]), np.array([-1]))]
    else:
        h_n = table.subgroup(list(H4_GENERATORS.values()))
        h = table.subgroup(list(H4_NORMAL_GENERATORS.values()))
        if len(h_n) != 576:
            raise ContractError(f"|H_4| = {len(h_n)}, expected 576")
        x = table.lookup(np.array(H4_QUOTIENT_X))
        y = table.lookup(np.array(H4_QUOTIENT_Y))
        hs = set(h.tolist())
        hns = set(h_n.tolist())
        m = lambda a, b: int(table.mul(a, b))  # noqa: E731
        x2, yx = m(x, x), m(y, x)
        yx2 = m(yx, x)
        if not {x, y} <= hns:
            raise ContractError("x, y must lie in H_4")
        if not (m(x2, x) in hs and m(y, y) in hs and m(yx, yx) in hs):
            raise ContractError("quotient relations x^3, y^2, (yx)^2 in H fail")
        if any(e in hs for e in (x, x2, y, yx, yx2)):
            raise ContractError("a nontrivial quotient representative lies in H")
        class_reps = [table.identity, x, x2, y, yx, yx2]
        # images under M(sigma) e_i = e_{sigma(i)}; 0-based
        rho = [
            (np.array([0, 1, 2]), np.array([1, 1, 1])),      # I
            (np.array([1, 2, 0]), np.array([1, 1, 1])),      # M((1,2,3))
            (np.array([2, 0, 1]), np.array([1, 1, 1])),      # M((3,2,1))
            (np.array([1, 0, 2]), -np.array([1, 1, 1])),     # -M((1,2))
            (np.array([0, 2, 1]), -np.array([1, 1, 1])),     # -M((2,3))
            (np.array([2, 1, 0]), -np.array([1, 1, 1])),     # -M((1,3))
        ]
    if len(h_n) % len(h):
        raise ContractError("|H| does not divide |H_N|")
    if not _is_normal(table, h_n, h):
        raise ContractError("H is not normal in H_N")
    data = RepData(N, table, h_n, h, class_reps, rho)
    _check_rho(data)
    return data


def _check_rho(data: RepData):
    """rho must be a homomorphism on H_N/H and cover every class exactly."""
    t = data.table
    k = len(data.class_reps)
    if len(data.h_n) != k * len(data.h):
        raise ContractError("class representatives do not match the index")
    reps = np.array(data.class_reps)
    for a in range(k):
        prods = t.mul(np.full(k, reps[a]), reps)
        classes = data.quotient_class(prods)
        for b in range(k):
            lhs = data.rho_matrix(a) @ data.rho_matrix(b)
            if not np.array_equal(lhs, data.rho_matrix(int(classes[b]))):
                raise ContractError("rho is not a homomorphism of H_N/H")


def build_rho(N: int, data: RepData | None = None) -> OrthogonalRep:
    """rho as a representation of the quotient, indexed by class number."""
    data = data or build_rep_data(N)
    perm = np.array([p for p, _ in data.rho])
    sign = np.array([s for _, s in data.rho])
    return OrthogonalRep(data.table, perm, sign, f"rho_{N}")


def left_transversal(table: FiniteGroupTable, sub: np.ndarray) -> tuple[list[int], np.ndarray]:
    """First-seen representatives r_i of the left cosets r_i K, and coset_of[g]."""
    coset_of = np.full(len(table), -1, dtype=np.int64)
    reps = []
    for g in range(len(table)):
        if coset_of[g] >= 0:
            continue
        coset = table.mul(np.full(len(sub), g), sub)
        coset_of[coset] = len(reps)
        reps.append(g)
    return reps, coset_of


def induce(data: RepData) -> OrthogonalRep:
    """Induce pi'' = rho o (H_N -> H_N/H) from H_N up to SL_N(Z/p).

    Block (i, j) of pi'(g) is pi''(r_i^{-1} g r_j) when that lies in H_N.
    """
    t = data.table
    reps, coset_of = left_transversal(t, data.h_n)
    if len(reps) * len(data.h_n) != len(t):
        raise ContractError("transversal size does not match the index")
    d0 = data.rho_dim
    k = len(reps)
    n = len(t)
    perm = np.empty((n, k * d0), dtype=np.int64)
    sign = np.empty((n, k * d0), dtype=np.int64)
    allg = np.arange(n)
    inv = t.inverse
    rho_perm = np.array([p for p, _ in data.rho])
    rho_sign = np.array([s for _, s in data.rho])
    for j, rj in enumerate(reps):
        x = t.mul(allg, np.full(n, rj))        # g r_j
        i = coset_of[x]                        # g r_j in r_i H_N
        h = t.mul(inv[np.array(reps)[i]], x)   # r_i^{-1} g r_j
        c = data.quotient_class(h)
        if np.any(c < 0):
            raise ContractError("transversal is not a transversal")
        cols = slice(j * d0, (j + 1) * d0)
        perm[:, cols] = i[:, None] * d0 + rho_perm[c]
        sign[:, cols] = rho_sign[c]
    return OrthogonalRep(t, perm, sign, f"pi_{data.N}'")


def build_pi(N: int) -> tuple[OrthogonalRep, RepData]:
    data = build_rep_data(N)
    return induce(data), data


def invariant_vector_dim(rep: OrthogonalRep, generator_indices) -> int:
    """dim of the common fixed space, as the corank of stacked pi(g) - I."""
    d = rep.dim
    blocks = [rep.matrix(int(g)) - np.eye(d, dtype=np.int64) for g in generator_indices]
    stacked = np.vstack(blocks)
    return d - rank_int_array(stacked)


def elementary_images(table: FiniteGroupTable) -> np.ndarray:
    """Table indices of the mod-p images of the elementary generators of SL_N(Z)."""
    return np.atleast_1d(table.lookup(table.elementary_generators()))


# --- evaluation of group-ring matrices -----------------------------------

@dataclass
class RatMatrix:
    """An exact rational matrix stored as numer / denom with integer numer."""
    numer: np.ndarray
    denom: int

    @property
    def shape(self):
        return self.numer.shape

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.denom) for x in row] for row in self.numer]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.numer.T.copy(), self.denom)

    def __eq__(self, other):
        return (isinstance(other, RatMatrix) and self.shape == other.shape
                and np.array_equal(self.numer * other.denom, other.numer * self.denom))


def representing_matrix(M, rep: OrthogonalRep) -> RatMatrix:
    """Evaluate a group-ring matrix under rep o (mod p): block (i,j) = pi(M[i,j])."""
    t = rep.table
    d = rep.dim
    den = 1
    for row in M.entries:
        for e in row:
            for c in e.terms.values():
                den = lcm(den, c.denominator)
    out = np.zeros((M.rows * d, M.cols * d), dtype=np.int64)
    cols = np.arange(d)
    for i, row in enumerate(M.entries):
        for j, e in enumerate(row):
            if not e:
                continue
            agg: dict[int, int] = {}
            budget = 0
            gs = list(e.terms)
            idx = t.lookup(np.array(gs, dtype=np.int64).reshape(-1, t.N, t.N))
            for g_idx, g in zip(np.atleast_1d(idx).tolist(), gs):
                c = e.terms[g]
                v = c.numerator * (den // c.denominator)
                agg[g_idx] = agg.get(g_idx, 0) + v
                budget += abs(v)
            if budget >= 1 << 62:
                raise OverflowError("coefficients too large for int64 accumulation")
            block = np.zeros((d, d), dtype=np.int64)
            for g_idx, v in agg.items():
                if v:
                    np.add.at(block, (rep.perm[g_idx], cols), v * rep.sign[g_idx])
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = block
    return RatMatrix(out, den)

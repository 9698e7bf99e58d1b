"""The rational group ring Q[SL_N(Z)] and matrices over it.

Group elements are stored as flat row-major tuples of N*N ints; an element of
the group ring is a dict from such tuples to nonzero Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping

from .exactmath import det_exact, rat_from_str, rat_to_str

GroupElem = tuple[int, ...]


def flat(g) -> GroupElem:
    return tuple(int(x) for row in g for x in row)


def unflat(g: GroupElem) -> list[list[int]]:
    n = isqrt(len(g))
    return [list(g[i * n:(i + 1) * n]) for i in range(n)]


def identity_elem(n: int) -> GroupElem:
    return tuple(int(i == j) for i in range(n) for j in range(n))


def gmul(a: GroupElem, b: GroupElem) -> GroupElem:
    n = isqrt(len(a))
    if n == 3:
        a0, a1, a2, a3, a4, a5, a6, a7, a8 = a
        b0, b1, b2, b3, b4, b5, b6, b7, b8 = b
        return (a0 * b0 + a1 * b3 + a2 * b6, a0 * b1 + a1 * b4 + a2 * b7, a0 * b2 + a1 * b5 + a2 * b8,
                a3 * b0 + a4 * b3 + a5 * b6, a3 * b1 + a4 * b4 + a5 * b7, a3 * b2 + a4 * b5 + a5 * b8,
                a6 * b0 + a7 * b3 + a8 * b6, a6 * b1 + a7 * b4 + a8 * b7, a6 * b2 + a7 * b5 + a8 * b8)
    cols = [b[j::n] for j in range(n)]
    return tuple(sum(x * y for x, y in zip(a[i * n:(i + 1) * n], cols[j]))
                 for i in range(n) for j in range(n))


def ginv(a: GroupElem) -> GroupElem:
    """Inverse of a determinant-one integer matrix (the adjugate)."""
    n = isqrt(len(a))
    m = unflat(a)
    if n == 1:
        return a
    if n == 2:
        return (a[3], -a[1], -a[2], a[0])
    out = [0] * (n * n)
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            # adj[j][i] = cofactor C[i][j]
            out[j * n + i] = (-1) ** (i + j) * det_exact(minor)
    return tuple(out)


class GroupRingElem:
    """Finitely supported formal sum  sum_g c_g g  with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[GroupElem, Fraction] | None = None):
        self.terms = {g: Fraction(c) for g, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, terms: dict) -> "GroupRingElem":
        x = cls.__new__(cls)
        x.terms = terms
        return x

    @classmethod
    def one(cls, n: int) -> "GroupRingElem":
        return cls._raw({identity_elem(n): Fraction(1)})

    @classmethod
    def from_group_elem(cls, g, coeff=1) -> "GroupRingElem":
        g = g if isinstance(g, tuple) and not isinstance(g[0], tuple) else flat(g)
        return cls({g: Fraction(coeff)})

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, GroupRingElem):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"GroupRingElem({len(self.terms)} terms)"

    def __neg__(self):
        return GroupRingElem._raw({g: -c for g, c in self.terms.items()})

    def __add__(self, other: "GroupRingElem") -> "GroupRingElem":
        out = dict(self.terms)
        for g, c in other.terms.items():
            s = out.get(g, 0) + c
            if s:
                out[g] = s
            else:
                out.pop(g, None)
        return GroupRingElem._raw(out)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, lam) -> "GroupRingElem":
        lam = Fraction(lam)
        if not lam:
            return GroupRingElem()
        return GroupRingElem._raw({g: c * lam for g, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GroupRingElem):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, lam):
        return self.scale(lam)

    def star(self) -> "GroupRingElem":
        return star(self)

    def coefficient(self, g) -> Fraction:
        return self.terms.get(g, Fraction(0))

    def support(self) -> set[GroupElem]:
        return set(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def to_json(self):
        return [{"g": unflat(g), "coeff": rat_to_str(c)} for g, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, terms):
        return cls({flat(t["g"]): rat_from_str(t["coeff"]) for t in terms})


def multiply(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    """Convolution product."""
    out: dict[GroupElem, Fraction] = {}
    get = out.get
    bt = list(b.terms.items())
    # group b's terms by coefficient so each Fraction product is formed once
    by_coeff: dict[Fraction, list[GroupElem]] = {}
    for h, c in bt:
        by_coeff.setdefault(c, []).append(h)
    for g, ca in a.terms.items():
        for cb, hs in by_coeff.items():
            c = ca * cb
            for h in hs:
                k = gmul(g, h)
                out[k] = get(k, 0) + c
    return GroupRingElem._raw({g: c for g, c in out.items() if c})


def star(a: GroupRingElem) -> GroupRingElem:
    """Linear extension of g -> g^{-1}."""
    return GroupRingElem._raw({ginv(g): c for g, c in a.terms.items()})


def idempotent(stab_with_signs: Iterable[tuple[GroupElem, int]]) -> GroupRingElem:
    """v = (1/|K|) sum_k eta(k) k for a finite group K with a sign character."""
    pairs = list(stab_with_signs)
    w = Fraction(1, len(pairs))
    return GroupRingElem({g: w * s for g, s in pairs})


class GroupRingMatrix:
    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        if entries is None:
            entries = [[GroupRingElem() for _ in range(cols)] for _ in range(rows)]
        assert len(entries) == rows and all(len(r) == cols for r in entries)
        self.entries = entries

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.entries[i][j] = value

    @classmethod
    def identity(cls, size: int, n: int) -> "GroupRingMatrix":
        m = cls(size, size)
        for i in range(size):
            m[i, i] = GroupRingElem.one(n)
        return m

    @classmethod
    def diagonal(cls, elems) -> "GroupRingMatrix":
        elems = list(elems)
        m = cls(len(elems), len(elems))
        for i, e in enumerate(elems):
            m[i, i] = e
        return m

    def __eq__(self, other):
        return (isinstance(other, GroupRingMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"GroupRingMatrix({self.rows}x{self.cols})"

    def __add__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return GroupRingMatrix(self.rows, self.cols, [
            [a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, lam):
        return GroupRingMatrix(self.rows, self.cols,
                               [[e.scale(lam) for e in r] for r in self.entries])

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = GroupRingMatrix(self.rows, other.cols)
        for i in range(self.rows):
            for j in range(other.cols):
                acc = GroupRingElem()
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + multiply(a, b)
                out.entries[i][j] = acc
        return out

    def transpose(self) -> "GroupRingMatrix":
        return GroupRingMatrix(self.cols, self.rows,
                               [[self.entries[i][j] for i in range(self.rows)]
                                for j in range(self.cols)])

    def star(self) -> "GroupRingMatrix":
        return matrix_star(self)

    def is_zero(self) -> bool:
        return not any(e for r in self.entries for e in r)

    def to_json(self, degree=None):
        d = {"rows": self.rows, "cols": self.cols, "entries": [
            {"row": i, "col": j, "terms": e.to_json()}
            for i, r in enumerate(self.entries) for j, e in enumerate(r) if e]}
        if degree is not None:
            d = {"degree": degree, **d}
        return d

    @classmethod
    def from_json(cls, d) -> "GroupRingMatrix":
        m = cls(d["rows"], d["cols"])
        for e in d["entries"]:
            m[e["row"], e["col"]] = GroupRingElem.from_json(e["terms"])
        return m


def matrix_star(m: GroupRingMatrix) -> GroupRingMatrix:
    """Transpose with entrywise star."""
    return GroupRingMatrix(m.cols, m.rows,
                           [[star(m.entries[i][j]) for i in range(m.rows)]
                            for j in range(m.cols)])


# ---------------------------------------------------------------------------
# Laplacians.  A complex stores its differential of degree n as an
# O_n x O_{n-1} matrix whose (sigma, tau) entry is the element acting on
# V_sigma by left multiplication.  As an operator on chain columns it is the
# transpose, which is what boundary_operator returns.

def boundary_operator(c, n: int) -> GroupRingMatrix:
    """O_{n-1} x O_n operator matrix of the degree-n differential."""
    return c.differential(n).transpose()


def laplacian(c, n: int) -> GroupRingMatrix:
    """Delta_n = d_n^* d_n + d_{n+1} d_{n+1}^*  as an O_n x O_n matrix."""
    size = len(c.orbits_in(n))
    out = GroupRingMatrix(size, size)
    d_n = boundary_operator(c, n)
    if d_n.rows and d_n.cols:
        out = out + matrix_star(d_n) @ d_n
    d_up = boundary_operator(c, n + 1)
    if d_up.rows and d_up.cols:
        out = out + d_up @ matrix_star(d_up)
    return out


def characteristic_diagonal(c, n: int) -> GroupRingMatrix:
    return GroupRingMatrix.diagonal(cell.idempotent() for cell in c.orbits_in(n))


def laplacian_prime(c, n: int) -> GroupRingMatrix:
    """Delta'_n = Delta_n + diag(1 - v_sigma)."""
    lap = laplacian(c, n)
    for i, cell in enumerate(c.orbits_in(n)):
        lap[i, i] = lap[i, i] + GroupRingElem.one(c.N) - cell.idempotent()
    return lap

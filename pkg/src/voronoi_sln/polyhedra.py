"""Facet enumeration of V-polytopes by the double description method.

Everything is exact.  The polytope is first mapped injectively into
R^m, m = affine dimension, by keeping a set of pivot coordinates of the
affine hull; it is then homogenised, and the facets are read off as the
extreme rays of the cone {y : (1, p_i) . y >= 0 for all vertices p_i}.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .exactmath import ContractError, det_exact, rank_exact


@dataclass(frozen=True)
class VPolytope:
    ambient_dim: int
    vertices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.vertices:
            raise ContractError("a polytope needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ContractError("polytope vertices must be distinct")
        if any(len(v) != self.ambient_dim for v in self.vertices):
            raise ContractError("vertex of wrong dimension")

    @classmethod
    def from_points(cls, pts: Sequence[Sequence[int]]) -> "VPolytope":
        pts = tuple(tuple(int(x) for x in p) for p in pts)
        return cls(len(pts[0]), pts)


@dataclass(frozen=True)
class Facet:
    vertex_indices: tuple[int, ...]
    normal: tuple[Fraction, ...]
    offset: Fraction

    def value(self, point) -> Fraction:
        """normal . point + offset; zero on the facet, positive inside."""
        return sum((a * x for a, x in zip(self.normal, point)), Fraction(0)) + self.offset


def affine_dim(p: VPolytope) -> int:
    base = p.vertices[0]
    diffs = [[x - y for x, y in zip(v, base)] for v in p.vertices[1:]]
    return rank_exact(diffs) if diffs else 0


def _pivot_columns(rows: list[list[int]]) -> list[int]:
    """Indices of columns forming a basis of the column space (greedy)."""
    a = [[Fraction(x) for x in r] for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def _primitive(v: list[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _solve_columns(a0: list[list[int]]) -> list[list[int]]:
    """Columns of adj(a0) * sign(det a0): integer, with a0 @ col_k = |det| e_k."""
    n = len(a0)
    d = det_exact(a0)
    s = 1 if d > 0 else -1
    cols = []
    for k in range(n):
        col = []
        for i in range(n):
            # cofactor C_{k,i} gives (adj a0)[i][k]
            minor = [row[:i] + row[i + 1:] for j, row in enumerate(a0) if j != k]
            col.append(s * (-1) ** (i + k) * det_exact(minor))
        cols.append(col)
    return cols


def _extreme_rays(rows: list[list[int]]) -> list[tuple[tuple[int, ...], int]]:
    """Extreme rays of {y : r . y >= 0 for r in rows}, a pointed full cone.

    Returns (ray, zero_mask) pairs where bit i of zero_mask says row i is tight.
    """
    d = len(rows[0])
    init = _pivot_columns([list(col) for col in zip(*rows)])  # independent rows
    if len(init) != d:
        raise ContractError("constraint system is not full rank")
    a0 = [rows[i] for i in init]
    rays = []
    for k, col in enumerate(_solve_columns(a0)):
        mask = 0
        for j, i in enumerate(init):
            if j != k:
                mask |= 1 << i
        rays.append((_primitive(col), mask))
    done = set(init)
    for idx, row in enumerate(rows):
        if idx in done:
            continue
        bit = 1 << idx
        plus, zero, minus = [], [], []
        for ray, mask in rays:
            s = sum(a * b for a, b in zip(row, ray))
            if s > 0:
                plus.append((ray, mask, s))
            elif s < 0:
                minus.append((ray, mask, s))
            else:
                zero.append((ray, mask | bit))
        new = [(r, m) for r, m, _ in plus] + zero
        all_masks = [m for _, m in rays]
        for rp, mp, sp in plus:
            for rm, mm, sm in minus:
                common = mp & mm
                if bin(common).count("1") < d - 2:
                    continue
                # combinatorial adjacency: no third ray is tight on all of `common`
                if any((m & common) == common and m != mp and m != mm for m in all_masks):
                    continue
                comb = [sp * y - sm * x for x, y in zip(rp, rm)]
                new.append((_primitive(comb), common | bit))
        rays = new
        done.add(idx)
    return rays


def facets(p: VPolytope) -> list[Facet]:
    """All facets of conv(vertices), relative to the affine hull."""
    m = affine_dim(p)
    if m < 1:
        raise ContractError("facets of a 0-dimensional polytope")
    base = p.vertices[0]
    diffs = [[x - y for x, y in zip(v, base)] for v in p.vertices[1:]]
    coords = _pivot_columns(diffs)
    assert len(coords) == m
    rows = [[1] + [v[c] for c in coords] for v in p.vertices]
    out = []
    seen = set()
    for ray, _ in _extreme_rays(rows):
        tight = tuple(i for i, r in enumerate(rows)
                      if sum(a * b for a, b in zip(r, ray)) == 0)
        if tight in seen:
            continue
        seen.add(tight)
        normal = [Fraction(0)] * p.ambient_dim
        for c, y in zip(coords, ray[1:]):
            normal[c] = Fraction(y)
        out.append(Facet(tight, tuple(normal), Fraction(ray[0])))
    out.sort(key=lambda f: f.vertex_indices)
    return out


def dump_facets(fs: list[Facet]) -> list[list[int]]:
    return [list(f.vertex_indices) for f in fs]

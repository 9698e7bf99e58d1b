"""The Voronoi cell complex of (X_N^*, boundary) and its equivariant differentials.

A cell is stored through its minimal-vector set m(sigma).  Its degree is the
affine dimension of conv{v v^t : v in m(sigma)}; the linear span R(sigma) of
those rank-one forms has dimension degree + 1 and is oriented by an ordered
basis of rank-one forms.  The induced orientation on a facet tau' of sigma
is the one for which (basis of tau', u u^t) is positively oriented in
R(sigma), for any u in m(sigma) \\ m(tau').
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .exactmath import ContractError, det_exact, is_positive_definite, rank_exact
from .forms import (act_vector, barycentre_form, minimal_vectors, negation_closure,
                    pair_representatives, perfect_forms, sym_coords)
from .groupring import (GroupElem, GroupRingElem, GroupRingMatrix, flat, gmul, idempotent,
                        unflat)
from .isometry import match_orbit, stabilizer
from .polyhedra import VPolytope, facets
from .polyhedra import _pivot_columns as pivot_columns

log = logging.getLogger(__name__)

Vector = tuple[int, ...]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


@dataclass
class Cell:
    min_vectors: tuple[Vector, ...]
    dim: int
    basis: tuple[Vector, ...]
    barycentre: tuple[tuple[int, ...], ...]
    stabilizer: list[tuple[GroupElem, int]] = field(default_factory=list)

    @classmethod
    def from_vectors(cls, vectors, with_stabilizer: bool = True) -> "Cell":
        mv = negation_closure(vectors)
        reps = pair_representatives(mv)
        basis = []
        for v in reps:
            if rank_exact([sym_coords(b) for b in basis + [v]]) == len(basis) + 1:
                basis.append(v)
        bary = tuple(tuple(r) for r in barycentre_form(mv))
        cell = cls(mv, len(basis) - 1, tuple(basis), bary)
        if with_stabilizer:
            cell.stabilizer = [(flat(g), cell.self_sign(flat(g))) for g in stabilizer(bary)]
        return cell

    @property
    def pair_reps(self) -> list[Vector]:
        return pair_representatives(self.min_vectors)

    @property
    def orientation_basis(self) -> list[tuple[int, ...]]:
        return [sym_coords(v) for v in self.basis]

    @cached_property
    def _pivots(self) -> tuple[tuple[int, ...], int]:
        rows = self.orientation_basis
        piv = tuple(pivot_columns(rows))
        ref = _sign(det_exact([[r[c] for c in piv] for r in rows]))
        return piv, ref

    @cached_property
    def vector_set(self) -> frozenset:
        return frozenset(self.min_vectors)

    def orientation(self, vectors) -> int:
        """+1/-1: is (w w^t for w in vectors) a positive basis of R(self)?"""
        piv, ref = self._pivots
        if len(vectors) != self.dim + 1:
            raise ContractError("wrong number of basis vectors")
        rows = [sym_coords(w) for w in vectors]
        s = _sign(det_exact([[r[c] for c in piv] for r in rows]))
        if s == 0:
            raise ContractError("vectors do not form a basis of R(sigma)")
        return s * ref

    def self_sign(self, g: GroupElem) -> int:
        m = unflat(g)
        return self.orientation([act_vector(m, v) for v in self.basis])

    def idempotent(self) -> GroupRingElem:
        if "_idem" not in self.__dict__:
            self.__dict__["_idem"] = idempotent(self.stabilizer)
        return self.__dict__["_idem"]

    def transformed(self, g) -> "Cell":
        """The cell sigma.g (stabilizer conjugated, basis transported)."""
        gm = unflat(g) if not isinstance(g[0], (list, tuple)) else [list(r) for r in g]
        return Cell.from_vectors([act_vector(gm, v) for v in self.min_vectors])

    def to_json(self, degree=None):
        return {
            "degree": self.dim if degree is None else degree,
            "min_vectors": [list(v) for v in self.min_vectors],
            "basis_vectors": [list(v) for v in self.basis],
            "orientation_basis": [list(x) for x in self.orientation_basis],
            "stabilizer": [{"g": unflat(g), "sign": s} for g, s in self.stabilizer],
            "barycentre": [list(r) for r in self.barycentre],
        }

    @classmethod
    def from_json(cls, d) -> "Cell":
        return cls(tuple(tuple(v) for v in d["min_vectors"]), d["degree"],
                   tuple(tuple(v) for v in d["basis_vectors"]),
                   tuple(tuple(r) for r in d["barycentre"]),
                   [(flat(e["g"]), e["sign"]) for e in d["stabilizer"]])

    def __eq__(self, other):
        return (isinstance(other, Cell) and self.min_vectors == other.min_vectors
                and self.dim == other.dim and self.basis == other.basis
                and self.barycentre == other.barycentre
                and sorted(self.stabilizer) == sorted(other.stabilizer))


def eta_sign(tau: Cell, sigma: Cell, g) -> int:
    """eta(tau, sigma, g) for tau.g equal to sigma or a facet of sigma."""
    gm = unflat(g) if isinstance(g, tuple) and not isinstance(g[0], tuple) else [list(r) for r in g]
    moved = [act_vector(gm, v) for v in tau.basis]
    image = {act_vector(gm, v) for v in tau.min_vectors}
    if tau.dim == sigma.dim:
        if image != sigma.vector_set:
            raise ContractError("g does not carry tau onto sigma")
        return sigma.orientation(moved)
    if tau.dim + 1 == sigma.dim and image <= sigma.vector_set:
        extra = next(u for u in sigma.pair_reps if u not in image)
        return sigma.orientation(moved + [extra])
    raise ContractError("tau.g is not sigma or a facet of sigma")


@dataclass
class Incidence:
    """An interior facet tau' of sigma in the orbit of tau, with tau.g0 = tau'."""
    sigma: int
    tau: int
    facet_vectors: tuple[Vector, ...]
    witness: GroupElem


class CellComplex:
    def __init__(self, N: int, orbits: dict[int, list[Cell]],
                 incidences: dict[int, list[Incidence]] | None = None,
                 differentials: dict[int, GroupRingMatrix] | None = None):
        self.N = N
        self.orbits = orbits
        self.incidences = incidences or {}
        self._diff = dict(differentials or {})

    @property
    def top_degree(self) -> int:
        return self.N * (self.N + 1) // 2 - 1

    @property
    def degrees(self) -> list[int]:
        return sorted(n for n, cs in self.orbits.items() if cs)

    def orbits_in(self, n: int) -> list[Cell]:
        return self.orbits.get(n, [])

    def orbit_counts(self) -> dict[int, int]:
        return {n: len(self.orbits[n]) for n in self.degrees}

    def differential(self, n: int) -> GroupRingMatrix:
        """O_n x O_{n-1} matrix whose (sigma, tau) entry is d_{sigma,tau}."""
        if n not in self._diff:
            self._diff[n] = self._assemble(n)
        return self._diff[n]

    def _assemble(self, n: int) -> GroupRingMatrix:
        rows, cols = self.orbits_in(n), self.orbits_in(n - 1)
        out = GroupRingMatrix(len(rows), len(cols))
        if not rows or not cols:
            return out
        acc = [[{} for _ in cols] for _ in rows]
        for inc in self.incidences.get(n, []):
            sigma, tau = rows[inc.sigma], cols[inc.tau]
            target = set(inc.facet_vectors)
            extra = next(u for u in sigma.pair_reps if u not in target)
            w = Fraction(1, len(tau.stabilizer))
            terms = acc[inc.sigma][inc.tau]
            for h, _ in tau.stabilizer:
                g = gmul(h, inc.witness)
                gm = unflat(g)
                if {act_vector(gm, v) for v in tau.min_vectors} != target:
                    raise ContractError("isometry witness does not map the facet")
                eta = sigma.orientation([act_vector(gm, v) for v in tau.basis] + [extra])
                terms[g] = terms.get(g, 0) + eta * w
        for i in range(len(rows)):
            for j in range(len(cols)):
                out[i, j] = GroupRingElem(acc[i][j])
        return out

    def to_json(self) -> dict:
        orbits = []
        for n in sorted(self.degrees, reverse=True):
            orbits.extend(c.to_json(n) for c in self.orbits[n])
        diffs = []
        for n in sorted(self.degrees, reverse=True):
            if self.orbits_in(n - 1):
                diffs.append(self.differential(n).to_json(degree=n))
        return {"N": self.N, "orbits": orbits, "differentials": diffs}

    @classmethod
    def from_json(cls, d) -> "CellComplex":
        orbits: dict[int, list[Cell]] = {}
        for o in d["orbits"]:
            orbits.setdefault(o["degree"], []).append(Cell.from_json(o))
        diffs = {e["degree"]: GroupRingMatrix.from_json(e) for e in d["differentials"]}
        return cls(d["N"], orbits, None, diffs)

    def __eq__(self, other):
        if not isinstance(other, CellComplex) or self.N != other.N:
            return False
        if self.orbit_counts() != other.orbit_counts():
            return False
        return all(self.orbits[n] == other.orbits[n] for n in self.degrees) and all(
            self.differential(n) == other.differential(n) for n in self.degrees)


def _invariants(cell_vectors, bary) -> tuple:
    return (len(cell_vectors), det_exact(bary))


def build_complex(N: int, seeds=None) -> CellComplex:
    """Orbit representatives of interior cells, top degree downwards."""
    if N not in (2, 3, 4):
        raise ContractError("build_complex supports N in {2, 3, 4}")
    if seeds is None:
        seeds = perfect_forms(N)
    top = N * (N + 1) // 2 - 1
    orbits: dict[int, list[Cell]] = {top: []}
    for name, q in seeds:
        cell = Cell.from_vectors(minimal_vectors(q).vectors)
        if cell.dim != top:
            raise ContractError(f"seed {name} is not perfect")
        orbits[top].append(cell)
    incidences: dict[int, list[Incidence]] = {}
    n = top
    while orbits.get(n):
        catalog: list[Cell] = []
        keys: list[tuple] = []
        incs: list[Incidence] = []
        for si, sigma in enumerate(orbits[n]):
            reps = sigma.pair_reps
            poly = VPolytope.from_points([sym_coords(v) for v in reps])
            for f in facets(poly):
                fvecs = negation_closure(reps[i] for i in f.vertex_indices)
                bary = barycentre_form(fvecs)
                if not is_positive_definite(bary):
                    continue
                key = _invariants(fvecs, bary)
                cands = [i for i, k in enumerate(keys) if k == key]
                hit = match_orbit(bary, [catalog[i].barycentre for i in cands]) if cands else None
                if hit is None:
                    new = Cell.from_vectors(fvecs)
                    if new.dim != n - 1:
                        raise ContractError("facet has unexpected dimension")
                    catalog.append(new)
                    keys.append(key)
                    ti, g0 = len(catalog) - 1, new.stabilizer[0][0]
                else:
                    ti, g0 = cands[hit[0]], flat(hit[1])
                incs.append(Incidence(si, ti, fvecs, g0))
        log.info("N=%d degree %d: %d orbits", N, n - 1, len(catalog))
        orbits[n - 1] = catalog
        incidences[n] = incs
        n -= 1
    orbits = {k: v for k, v in orbits.items() if v}
    return CellComplex(N, orbits, incidences)


def chain_defect(c: CellComplex, n: int) -> GroupRingMatrix:
    """d_{n-1} d_n as operators (O_{n-2} x O_n); zero for a chain complex."""
    d_lo = c.differential(n - 1).transpose()
    d_hi = c.differential(n).transpose()
    return d_lo @ d_hi

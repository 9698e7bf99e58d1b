"""Pipeline orchestration: build, assemble Xi_N, evaluate, certify the corank."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .complex import CellComplex, build_complex, chain_defect
from .exactmath import certified_rank, rank_int_array
from .forms import PERFECT_FORMS, perfect_forms
from .groupring import (GroupRingElem, GroupRingMatrix, boundary_operator,
                        characteristic_diagonal, laplacian_prime, matrix_star, multiply, star)
from .reps import (EXPECTED_ORDER, FiniteGroupTable, OrthogonalRep, RatMatrix, build_pi,
                   elementary_images, invariant_vector_dim, representing_matrix, trivial_rep)

log = logging.getLogger(__name__)

CACHE_ENV = "VORONOI_SLN_CACHE"
EXPECTED_CORANK = {3: 4, 4: 2}


class CheckFailed(RuntimeError):
    """An invariant of the pipeline did not hold; ``name`` says which."""

    def __init__(self, name: str, detail: str = ""):
        super().__init__(f"check '{name}' failed{': ' + detail if detail else ''}")
        self.name = name


def homological_degree(N: int) -> int:
    return N * (N - 1) // 2


# --- caching --------------------------------------------------------------

def _cache_dir(cache_dir=None) -> Path | None:
    d = cache_dir or os.environ.get(CACHE_ENV)
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _key(*parts) -> str:
    h = hashlib.sha256()
    h.update(json.dumps([__version__, *parts], sort_keys=True).encode())
    return h.hexdigest()[:16]


def _cached_json(cache_dir, name: str, key: str, compute, encode, decode):
    d = _cache_dir(cache_dir)
    if d is None:
        return compute()
    path = d / f"{name}-{key}.json"
    if path.exists():
        log.info("loading %s from cache", path)
        return decode(json.loads(path.read_text()))
    obj = compute()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(encode(obj)))
    tmp.replace(path)
    return obj


def get_complex(N: int, cache_dir=None) -> CellComplex:
    key = _key("complex", N, PERFECT_FORMS[N])
    return _cached_json(cache_dir, f"complex{N}", key, lambda: build_complex(N),
                        lambda c: c.to_json(), CellComplex.from_json)


def get_xi(N: int, degree: int, c: CellComplex, cache_dir=None) -> GroupRingMatrix:
    key = _key("xi", N, degree, PERFECT_FORMS[N])
    return _cached_json(cache_dir, f"xi{N}-{degree}", key, lambda: laplacian_prime(c, degree),
                        lambda m: m.to_json(degree=degree), GroupRingMatrix.from_json)


def get_rep(N: int) -> OrthogonalRep:
    if N == 2:
        return trivial_rep(FiniteGroupTable(2, 2))
    return build_pi(N)[0]


# --- certificate ----------------------------------------------------------

@dataclass
class CohomologyCertificate:
    N: int
    degree_q: int
    homological_degree: int
    rep: str
    matrix_size: int
    rank: int
    corank: int
    cross_check_corank: int | None
    seconds: float
    orbit_counts: dict = field(default_factory=dict)
    # sanity mode (N=2) also reports the corank in every other degree
    other_degrees: dict = field(default_factory=dict)

    def statement(self) -> str:
        if self.N == 2:
            return (f"corank of the evaluated Laplacian in degree {self.homological_degree} "
                    f"(trivial coefficients) is {self.corank}")
        return (f"dim H^{self.degree_q}(SL_{self.N}(Z); pi_{self.N}) = {self.corank}")

    def to_json(self):
        d = asdict(self)
        d["orbit_counts"] = {str(k): v for k, v in self.orbit_counts.items()}
        d["other_degrees"] = {str(k): v for k, v in self.other_degrees.items()}
        return d


def hodge_stack(c: CellComplex, degree: int, rep: OrthogonalRep) -> np.ndarray:
    """Integer matrix whose kernel is ker d_n ∩ ker d_{n+1}^* ∩ im P_n.

    Built from the individually evaluated differentials and idempotents,
    never from the group-ring Laplacian.
    """
    blocks = []
    size = len(c.orbits_in(degree)) * rep.dim
    d_n = boundary_operator(c, degree)
    if d_n.rows and d_n.cols:
        blocks.append(representing_matrix(d_n, rep).numer)
    d_up = boundary_operator(c, degree + 1)
    if d_up.rows and d_up.cols:
        blocks.append(representing_matrix(d_up, rep).numer.T)
    proj = representing_matrix(characteristic_diagonal(c, degree), rep)
    blocks.append(proj.denom * np.eye(size, dtype=np.int64) - proj.numer)
    return np.vstack(blocks)


def laplacian_corank(c: CellComplex, degree: int, rep: OrthogonalRep,
                     xi: GroupRingMatrix | None = None) -> tuple[int, int, RatMatrix]:
    xi = xi if xi is not None else laplacian_prime(c, degree)
    mat = representing_matrix(xi, rep)
    if not np.array_equal(mat.numer, mat.numer.T):
        raise CheckFailed("evaluated-laplacian-symmetry")
    size = mat.shape[0]
    rank = rank_int_array(mat.numer) if size else 0
    return rank, size - rank, mat


def certify(N: int, cache_dir=None, cross_check: bool = True) -> CohomologyCertificate:
    if N not in (2, 3, 4):
        raise ValueError("certify supports N in {2, 3, 4}")
    t0 = time.perf_counter()
    c = get_complex(N, cache_dir)
    n = homological_degree(N)
    xi = get_xi(N, n, c, cache_dir)
    if matrix_star(xi) != xi:
        raise CheckFailed("laplacian-star-symmetry")
    rep = get_rep(N)
    rank, cor, mat = laplacian_corank(c, n, rep, xi)
    other = None
    if cross_check:
        stack = hodge_stack(c, n, rep)
        other = stack.shape[1] - certified_rank(stack)
        if other != cor:
            raise CheckFailed("cross-method-corank", f"{cor} vs {other}")
    others = {}
    if N == 2:
        others = {d: laplacian_corank(c, d, rep)[1] for d in c.degrees if d != n}
    return CohomologyCertificate(
        N=N, degree_q=N - 1, homological_degree=n,
        rep=rep.name if N == 2 else f"pi_{N} (dim {rep.dim}, via SL_{N}(Z/{rep.table.p}))",
        matrix_size=mat.shape[0], rank=rank, corank=cor, cross_check_corank=other,
        seconds=round(time.perf_counter() - t0, 3), orbit_counts=c.orbit_counts(),
        other_degrees=others)


# --- verification suite --------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def check_chain_condition(c: CellComplex) -> list[int]:
    """Degrees n where d_{n-1} d_n (between characteristic idempotents) is nonzero."""
    bad = []
    for n in c.degrees:
        if c.orbits_in(n - 1) and c.orbits_in(n - 2):
            lo = characteristic_diagonal(c, n - 2)
            hi = characteristic_diagonal(c, n)
            if not (lo @ chain_defect(c, n) @ hi).is_zero():
                bad.append(n)
    return bad


def check_idempotents(c: CellComplex) -> list[str]:
    bad = []
    for n in c.degrees:
        for i, cell in enumerate(c.orbits[n]):
            v = cell.idempotent()
            if multiply(v, v) != v or star(v) != v:
                bad.append(f"v[{n},{i}]")
            one = GroupRingElem.one(c.N)
            for g, s in cell.stabilizer[:8]:
                h = GroupRingElem.from_group_elem(g)
                if multiply(h, v) != v.scale(s) or multiply(v, h) != v.scale(s):
                    bad.append(f"hv[{n},{i}]")
                    break
            if multiply(one, v) != v:
                bad.append(f"1v[{n},{i}]")
    return bad


def check_absorption(c: CellComplex) -> list[int]:
    bad = []
    for n in c.degrees:
        if not c.orbits_in(n - 1):
            continue
        d = boundary_operator(c, n)
        lo = characteristic_diagonal(c, n - 1)
        hi = characteristic_diagonal(c, n)
        if lo @ d @ hi != d:
            bad.append(n)
    return bad


def check_rep(rep: OrthogonalRep, samples: int = 10_000, seed: int = 0) -> list[str]:
    bad = []
    if not rep.is_orthogonal():
        bad.append("orthogonality")
    t = rep.table
    rng = np.random.default_rng(seed)
    a = rng.integers(0, len(t), samples)
    b = rng.integers(0, len(t), samples)
    if rep.homomorphism_defects(a, b):
        bad.append("homomorphism-sampled")
    # pi(g s) = pi(g) pi(s) for every g and every generator s forces a homomorphism
    allg = np.arange(len(t))
    for s in elementary_images(t):
        if rep.homomorphism_defects(allg, np.full(len(t), s)):
            bad.append("homomorphism-generators")
            break
    ident = rep.matrix(t.identity)
    if not np.array_equal(ident, np.eye(rep.dim, dtype=np.int64)):
        bad.append("identity")
    return bad


def verify_all(N: int, c: CellComplex | None = None, rep: OrthogonalRep | None = None,
               cache_dir=None) -> list[CheckResult]:
    out = []

    def record(name, failures):
        out.append(CheckResult(name, not failures, ", ".join(map(str, failures))))

    try:
        perfect_forms(N)
        record("perfectness", [])
    except Exception as e:  # noqa: BLE001 - reported, not raised
        record("perfectness", [str(e)])
    c = c or get_complex(N, cache_dir)
    record("chain-condition", check_chain_condition(c))
    record("idempotents", check_idempotents(c))
    record("diagonal-absorption", check_absorption(c))
    n = homological_degree(N)
    xi = laplacian_prime(c, n)
    record("laplacian-symmetry", [] if matrix_star(xi) == xi else [n])
    rep = rep or get_rep(N)
    record("rep-homomorphism", check_rep(rep))
    if N in (3, 4):
        t = rep.table
        fails = []
        if len(t) != EXPECTED_ORDER[(N, t.p)]:
            fails.append(f"|SL_{N}(Z/{t.p})| = {len(t)}")
        if invariant_vector_dim(rep, elementary_images(t)):
            fails.append("nonzero invariant vectors")
        record("invariant-vectors", fails)
    return out

"""Axial-gauge Kogut-Susskind Hamiltonian on a staggered quoct register.

A lattice of L spinor sites is split into 2L staggered sites: quarks live
on even sites, antiquarks on odd sites (after a particle-hole transform,
so excitations on odd sites create antiquarks).  Site n occupies tensor
factor n of the 8**(2L)-dimensional register.

Gauge degrees of freedom are eliminated by the axial-gauge choice with
open boundary conditions, leaving the color-electric energy as nonlocal
charge-pairing terms with link-counting weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse as sp

from . import algebra as qa

__all__ = [
    "LatticeParams",
    "HamiltonianTerms",
    "build_kinetic",
    "build_mass_chem",
    "build_electric",
    "build_penalty",
    "build_full",
    "baryon_number_op",
    "number_total_op",
    "total_charge",
    "total_casimir",
    "singlet_projector",
    "singlet_basis",
]


@dataclass(frozen=True)
class LatticeParams:
    """Couplings for one Hamiltonian instance.

    L counts spinor sites (2L staggered sites); `a` is the lattice spacing,
    `m` the bare mass, `mu` the baryon chemical potential, `g` the coupling.
    A nonzero `penalty_weight` adds the squared-total-charge penalty that
    pushes color non-singlet states up in energy.
    """

    L: int
    a: float = 1.0
    m: float = 0.0
    mu: float = 0.0
    g: float = 0.0
    penalty_weight: float = 0.0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.a <= 0:
            raise ValueError("lattice spacing must be positive")
        if self.g < 0:
            raise ValueError("coupling g must be nonnegative")
        if self.penalty_weight < 0:
            raise ValueError("penalty weight must be nonnegative")

    @property
    def n_sites(self) -> int:
        return 2 * self.L

    @property
    def dim(self) -> int:
        return 8 ** self.n_sites


@dataclass(frozen=True)
class HamiltonianTerms:
    """All Hamiltonian pieces for one parameter set, plus their sum."""

    params: LatticeParams
    kinetic: qa.QuoctOperator
    mass: qa.QuoctOperator
    chem: qa.QuoctOperator
    electric: qa.QuoctOperator
    penalty: qa.QuoctOperator
    total: qa.QuoctOperator = field(init=False)

    def __post_init__(self):
        tot = (
            self.kinetic.matrix
            + self.mass.matrix
            + self.chem.matrix
            + self.electric.matrix
            + self.penalty.matrix
        )
        object.__setattr__(
            self, "total", qa.QuoctOperator(self.params.n_sites, tot)
        )


def _site_kind(n: int) -> str:
    return "even" if n % 2 == 0 else "odd"


def _embed_sparse_factors(factors) -> sp.csr_matrix:
    out = reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)
    return sp.csr_matrix(out)


def _embed_single(mat8: np.ndarray, site: int, total: int) -> sp.csr_matrix:
    factors = [sp.identity(8, format="csr", dtype=complex)] * total
    factors[site] = sp.csr_matrix(mat8)
    return _embed_sparse_factors(factors)


def _embed_pair(m1: np.ndarray, s1: int, m2: np.ndarray, s2: int, total: int) -> sp.csr_matrix:
    factors = [sp.identity(8, format="csr", dtype=complex)] * total
    factors[s1] = sp.csr_matrix(m1)
    factors[s2] = sp.csr_matrix(m2)
    return _embed_sparse_factors(factors)


def build_kinetic(params: LatticeParams) -> qa.QuoctOperator:
    """Pair creation/annihilation on adjacent staggered sites.

    (1/2a) sum_c sum_n (-1)^n [ (c^+ P)_n c^+_{n+1} - (c P)_n c_{n+1} ],
    the parity insertion coming from the Jordan-Wigner strings of the two
    adjacent embedded ladder operators.
    """
    ns = params.n_sites
    h = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    pmat = qa.parity().matrix
    for color in qa.COLORS:
        c = qa.annihilator(color).matrix
        cdag = c.conj().T
        for n in range(ns - 1):
            sign = (-1) ** n
            h = h + sign * _embed_pair(cdag @ pmat, n, cdag, n + 1, ns)
            h = h - sign * _embed_pair(c @ pmat, n, c, n + 1, ns)
    return qa.QuoctOperator(ns, h.toarray() / (2.0 * params.a))


def build_mass_chem(params: LatticeParams):
    """Mass and chemical-potential terms, both diagonal.

    mass = m * sum_n M_n; chem = mu * sum_n (-1)^n M_n, where M counts
    excitations (quarks on even sites, antiquarks on odd sites).
    """
    ns = params.n_sites
    num = qa.number_op().matrix
    mass = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    chem = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    for n in range(ns):
        emb = _embed_single(num, n, ns)
        mass = mass + emb
        chem = chem + (-1) ** n * emb
    return (
        qa.QuoctOperator(ns, params.m * mass.toarray()),
        qa.QuoctOperator(ns, params.mu * chem.toarray()),
    )


def build_electric(params: LatticeParams) -> qa.QuoctOperator:
    """Color-electric energy after integrating out the gauge field.

    (a g^2 / 2) sum_{n<=2L-2} (2L-1-n) Q_n^2
      + a g^2 sum_a sum_{m<m'<=2L-2} (2L-1-m') Q^a_m Q^a_{m'},
    each charge in the representation fixed by its site parity.
    """
    ns = params.n_sites
    h = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    pref = params.a * params.g ** 2
    cas = qa.casimir().matrix
    for n in range(ns - 1):
        h = h + 0.5 * pref * (ns - 1 - n) * _embed_single(cas, n, ns)
    for m in range(ns - 1):
        for mp in range(m + 1, ns - 1):
            w = pref * (ns - 1 - mp)
            for a_idx in range(1, 9):
                qm = qa.charge_matrix(a_idx, _site_kind(m))
                qmp = qa.charge_matrix(a_idx, _site_kind(mp))
                h = h + w * _embed_pair(qm, m, qmp, mp, ns)
    return qa.QuoctOperator(ns, h.toarray())


def build_penalty(params: LatticeParams) -> qa.QuoctOperator:
    """penalty_weight * sum_a (sum_n Q^a_n)^2; zero on color singlets."""
    ns = params.n_sites
    if params.penalty_weight == 0.0:
        return qa.QuoctOperator(ns, np.zeros((params.dim, params.dim), dtype=complex))
    h = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    for a_idx in range(1, 9):
        tot = total_charge(a_idx, params.L)
        h = h + tot @ tot
    return qa.QuoctOperator(ns, params.penalty_weight * h.toarray())


_FULL_CACHE: dict = {}


def build_full(params: LatticeParams) -> HamiltonianTerms:
    """Assemble every term for `params` (memoized; terms are immutable)."""
    if params not in _FULL_CACHE:
        mass, chem = build_mass_chem(params)
        _FULL_CACHE[params] = HamiltonianTerms(
            params=params,
            kinetic=build_kinetic(params),
            mass=mass,
            chem=chem,
            electric=build_electric(params),
            penalty=build_penalty(params),
        )
    return _FULL_CACHE[params]


def total_charge(a: int, L: int) -> sp.csr_matrix:
    """Global color charge sum_n Q^a_n as a sparse matrix on 2L sites."""
    ns = 2 * L
    tot = sp.csr_matrix((8 ** ns, 8 ** ns), dtype=complex)
    for n in range(ns):
        tot = tot + _embed_single(qa.charge_matrix(a, _site_kind(n)), n, ns)
    return tot


def total_casimir(L: int) -> np.ndarray:
    """sum_a (sum_n Q^a_n)^2; its null space is the color-singlet sector."""
    dim = 8 ** (2 * L)
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for a in range(1, 9):
        tot = total_charge(a, L)
        out = out + tot @ tot
    return out.toarray()


def baryon_number_op(L: int) -> qa.QuoctOperator:
    """(1/3)(quark count - antiquark count); diagonal and conserved."""
    ns = 2 * L
    num = qa.number_op().matrix
    h = sp.csr_matrix((8 ** ns, 8 ** ns), dtype=complex)
    for n in range(ns):
        h = h + (-1) ** n * _embed_single(num, n, ns)
    return qa.QuoctOperator(ns, h.toarray() / 3.0)


def number_total_op(L: int) -> qa.QuoctOperator:
    """Total excitation count sum_n M_n (quarks plus antiquarks)."""
    ns = 2 * L
    num = qa.number_op().matrix
    h = sp.csr_matrix((8 ** ns, 8 ** ns), dtype=complex)
    for n in range(ns):
        h = h + _embed_single(num, n, ns)
    return qa.QuoctOperator(ns, h.toarray())


_SINGLET_CACHE: dict = {}


def singlet_basis(L: int, threshold: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the color-singlet sector."""
    key = (L, threshold)
    if key not in _SINGLET_CACHE:
        cas = total_casimir(L)
        vals, vecs = np.linalg.eigh(cas)
        _SINGLET_CACHE[key] = np.ascontiguousarray(vecs[:, vals < threshold])
    return _SINGLET_CACHE[key]


def singlet_projector(L: int, threshold: float = 1e-9) -> qa.QuoctOperator:
    """Orthogonal projector onto the null space of the total Casimir."""
    v = singlet_basis(L, threshold)
    return qa.QuoctOperator(2 * L, v @ v.conj().T)

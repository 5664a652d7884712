"""Single-site quoct operator algebra.

A quoct is an 8-dimensional code space holding the occupation states of
three fermionic color modes (r, g, b).  The basis is ordered

    0: |0>   1: |r>   2: |g>   3: |b>
    4: |gb>  5: |rb>  6: |rg>  7: |rgb>

with multi-fermion states fixed to the antisymmetric ordering implied by
creating r, then g, then b (|rb> = c_r^+ c_b^+ |0>, etc.).  All sign
conventions below follow from that choice.

Operators are dense complex matrices wrapped in :class:`QuoctOperator`,
which tracks the number of sites (matrix dimension 8**sites) and whether
the operator is fermionic (odd in ladder operators), which decides how it
picks up parity strings when embedded into a multi-site register.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import product

import numpy as np

__all__ = [
    "ContractViolationError",
    "QuoctBasis",
    "QuoctOperator",
    "GellMannSet",
    "COLORS",
    "BASIS_LABELS",
    "QUOCT_TO_COMPUTATIONAL",
    "annihilator",
    "creator",
    "parity",
    "number_op",
    "charge_op",
    "charge_matrix",
    "casimir",
    "identity",
    "string_embed",
    "pauli_decompose",
    "pauli_reconstruct",
    "gell_mann",
    "structure_constants",
    "quoct_to_computational_matrix",
    "to_computational",
]


class ContractViolationError(ValueError):
    """An operation was handed input that violates its contract."""


COLORS = ("r", "g", "b")
BASIS_LABELS = ("0", "r", "g", "b", "gb", "rb", "rg", "rgb")

# Occupation bits (r, g, b) of each basis state, in basis order.
_OCCUPATION = (
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (0, 1, 1),
    (1, 0, 1),
    (1, 1, 0),
    (1, 1, 1),
)

# Basis index -> computational index 4r + 2g + b under the default color
# to qubit assignment r->e, g->n, b->m.  The quoct ordering above is the
# physics ordering; circuit-facing code reorders through this bijection.
QUOCT_TO_COMPUTATIONAL = tuple(4 * r + 2 * g + b for (r, g, b) in _OCCUPATION)


@dataclass(frozen=True)
class QuoctBasis:
    """Basis bookkeeping: state labels and the color-to-qubit bijection."""

    labels: tuple = BASIS_LABELS
    enm_map: dict = field(default_factory=lambda: {"r": "e", "g": "n", "b": "m"})

    def __post_init__(self):
        if sorted(self.enm_map.keys()) != ["b", "g", "r"]:
            raise ValueError("enm_map must map exactly the colors r, g, b")
        if sorted(self.enm_map.values()) != ["e", "m", "n"]:
            raise ValueError("enm_map must be a bijection onto e, n, m")

    def computational_index(self, quoct_index: int) -> int:
        """Computational-basis position of quoct basis state `quoct_index`."""
        r, g, b = _OCCUPATION[quoct_index]
        occ = {"r": r, "g": g, "b": b}
        weight = {"e": 4, "n": 2, "m": 1}
        return sum(weight[self.enm_map[c]] * occ[c] for c in COLORS)


@dataclass(frozen=True)
class QuoctOperator:
    """Dense operator on a register of `sites` quocts.

    `fermionic` marks operators that are odd products of ladder operators;
    those acquire parity strings under :func:`string_embed`.
    """

    sites: int
    matrix: np.ndarray
    fermionic: bool = False

    def __post_init__(self):
        dim = 8 ** self.sites
        if self.matrix.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match {self.sites} site(s)"
            )
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return 8 ** self.sites

    def adjoint(self) -> "QuoctOperator":
        return QuoctOperator(self.sites, self.matrix.conj().T.copy(), self.fermionic)

    def __matmul__(self, other: "QuoctOperator") -> "QuoctOperator":
        if self.sites != other.sites:
            raise ValueError("site-count mismatch in operator product")
        return QuoctOperator(
            self.sites,
            self.matrix @ other.matrix,
            self.fermionic ^ other.fermionic,
        )

    def tensor(self, other: "QuoctOperator") -> "QuoctOperator":
        return QuoctOperator(
            self.sites + other.sites,
            np.kron(self.matrix, other.matrix),
            self.fermionic ^ other.fermionic,
        )

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol


def _ket_bra(i: int, j: int) -> np.ndarray:
    m = np.zeros((8, 8), dtype=complex)
    m[i, j] = 1.0
    return m


# Ladder operators in the quoct basis.  The minus signs implement fermionic
# antisymmetry for the chosen state ordering.
_ANNIHILATORS = {
    "r": _ket_bra(0, 1) + _ket_bra(2, 6) - _ket_bra(3, 5) + _ket_bra(4, 7),
    "g": _ket_bra(0, 2) - _ket_bra(1, 6) + _ket_bra(3, 4) + _ket_bra(5, 7),
    "b": _ket_bra(0, 3) + _ket_bra(1, 5) - _ket_bra(2, 4) + _ket_bra(6, 7),
}


def annihilator(color: str) -> QuoctOperator:
    """Single-site annihilation operator for one color mode."""
    if color not in COLORS:
        raise ValueError(f"unknown color {color!r}")
    return QuoctOperator(1, _ANNIHILATORS[color].copy(), fermionic=True)


def creator(color: str) -> QuoctOperator:
    """Single-site creation operator, the adjoint of :func:`annihilator`."""
    return annihilator(color).adjoint()


def parity() -> QuoctOperator:
    """(-1)^(fermion number): diag(1,-1,-1,-1,1,1,1,-1)."""
    return QuoctOperator(
        1, np.diag([1, -1, -1, -1, 1, 1, 1, -1]).astype(complex), fermionic=False
    )


def number_op() -> QuoctOperator:
    """Total occupation on one site: diag(0,1,1,1,2,2,2,3)."""
    return QuoctOperator(
        1, np.diag([0, 1, 1, 1, 2, 2, 2, 3]).astype(complex), fermionic=False
    )


def identity(sites: int = 1) -> QuoctOperator:
    return QuoctOperator(sites, np.eye(8 ** sites, dtype=complex))


@dataclass(frozen=True)
class GellMannSet:
    """SU(3) generators T^a = lambda^a / 2 and their structure constants."""

    T: np.ndarray  # shape (8, 3, 3)
    f: np.ndarray  # shape (8, 8, 8), real antisymmetric

    @classmethod
    def standard(cls) -> "GellMannSet":
        lam = np.zeros((8, 3, 3), dtype=complex)
        lam[0] = [[0, 1, 0], [1, 0, 0], [0, 0, 0]]
        lam[1] = [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]]
        lam[2] = np.diag([1, -1, 0])
        lam[3] = [[0, 0, 1], [0, 0, 0], [1, 0, 0]]
        lam[4] = [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]]
        lam[5] = [[0, 0, 0], [0, 0, 1], [0, 1, 0]]
        lam[6] = [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]]
        lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
        T = lam / 2.0
        # [T^a, T^b] = i f^abc T^c together with Tr(T^a T^b) = delta/2
        # gives f^abc = -2i Tr([T^a, T^b] T^c).
        f = np.zeros((8, 8, 8))
        for a in range(8):
            for b in range(8):
                comm = T[a] @ T[b] - T[b] @ T[a]
                for c in range(8):
                    f[a, b, c] = np.real(-2j * np.trace(comm @ T[c]))
        return cls(T=T, f=f)


@lru_cache(maxsize=1)
def gell_mann() -> GellMannSet:
    return GellMannSet.standard()


def structure_constants() -> np.ndarray:
    return gell_mann().f


# Single-occupation states in basis order r, g, b and double-occupation
# states in the complementary order gb, rb, rg.  On those blocks the color
# charge acts through T^a and Tbar^a = -(T^a)* respectively; |0> and |rgb>
# are color singlets and carry zero charge.
_SINGLE_IDX = (1, 2, 3)
_DOUBLE_IDX = (4, 5, 6)


def charge_matrix(a: int, site_kind: str = "even") -> np.ndarray:
    """8x8 color-charge matrix Q^a (even sites) or Qbar^a (odd sites)."""
    if not 1 <= a <= 8:
        raise ValueError(f"generator index must be in 1..8, got {a}")
    if site_kind not in ("even", "odd"):
        raise ValueError(f"site_kind must be 'even' or 'odd', got {site_kind!r}")
    T = gell_mann().T[a - 1]
    Tbar = -T.conj()
    single, double = (T, Tbar) if site_kind == "even" else (Tbar, T)
    q = np.zeros((8, 8), dtype=complex)
    q[np.ix_(_SINGLE_IDX, _SINGLE_IDX)] = single
    q[np.ix_(_DOUBLE_IDX, _DOUBLE_IDX)] = double
    return q


def charge_op(a: int, site_kind: str = "even") -> QuoctOperator:
    """Color-charge operator for generator `a` on one site.

    Even (quark) sites use T^a on single occupations and Tbar^a on double
    occupations; odd (antiquark) sites swap the two blocks.
    """
    return QuoctOperator(1, charge_matrix(a, site_kind), fermionic=False)


def casimir() -> QuoctOperator:
    """Quadratic color Casimir sum_a (Q^a)^2 = 4/3 diag(0,1,1,1,1,1,1,0)."""
    return QuoctOperator(
        1, (4.0 / 3.0) * np.diag([0, 1, 1, 1, 1, 1, 1, 0]).astype(complex)
    )


def string_embed(op: QuoctOperator, site: int, total: int) -> QuoctOperator:
    """Embed a single-site operator at `site` in a `total`-site register.

    Fermionic operators are padded with parity matrices on all earlier
    sites (Jordan-Wigner style); bosonic operators with identities.
    """
    if op.sites != 1:
        raise ValueError("string_embed expects a single-site operator")
    if not 0 <= site < total:
        raise ValueError(f"site {site} out of range for {total} sites")
    left = parity().matrix if op.fermionic else np.eye(8)
    factors = [left] * site + [op.matrix] + [np.eye(8)] * (total - site - 1)
    return QuoctOperator(total, reduce(np.kron, factors), op.fermionic)


def quoct_to_computational_matrix(sites: int = 1) -> np.ndarray:
    """Permutation P with v_comp = P @ v_quoct, per site, default enm map."""
    p = np.zeros((8, 8))
    for j, k in enumerate(QUOCT_TO_COMPUTATIONAL):
        p[k, j] = 1.0
    return reduce(np.kron, [p] * sites)


def to_computational(matrix: np.ndarray, sites: int) -> np.ndarray:
    """Rewrite a quoct-ordered matrix in the computational (enm) ordering."""
    p = quoct_to_computational_matrix(sites)
    return p @ matrix @ p.T


_PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_PAULI_LABELS = "IXYZ"


def pauli_decompose(op: QuoctOperator, tol: float = 1e-12):
    """Expand a hermitian operator over tensor Pauli strings.

    The operator is first reordered into the computational basis (three
    qubits per site, slots e, n, m mapping colors r, g, b).  Returns a list
    of (coefficient, label) pairs with |coefficient| >= `tol`; labels read
    left to right over qubits (site 0 e-qubit first).
    """
    if not op.is_hermitian(1e-10):
        raise ContractViolationError("pauli_decompose requires a hermitian operator")
    n = 3 * op.sites
    m = to_computational(op.matrix, op.sites)
    # Fold into a (2,2)^n x (2,2)^n tensor and contract one qubit at a time.
    t = m.reshape([2] * n + [2] * n)
    for q in range(n):
        # After q steps the axes read [p_0..p_{q-1}, r_q..r_{n-1}, c_q..c_{n-1}],
        # so qubit q's row axis sits at position q and its column axis at n.
        # Tr(sigma M)/2 contracts sigma_ij with M_ji.
        t = np.tensordot(_PAULIS, t, axes=[[1, 2], [n, q]]) / 2.0
        # tensordot puts the new Pauli axis in front; cycle it behind the
        # previously produced Pauli axes.
        t = np.moveaxis(t, 0, q)
    coeffs = t.reshape([4] * n)
    out = []
    for idx in product(range(4), repeat=n):
        c = coeffs[idx]
        if abs(c) >= tol:
            label = "".join(_PAULI_LABELS[i] for i in idx)
            out.append((float(np.real(c)), label))
    return out


def pauli_reconstruct(terms, sites: int) -> np.ndarray:
    """Inverse of :func:`pauli_decompose` (computational ordering)."""
    n = 3 * sites
    m = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for coeff, label in terms:
        mats = [_PAULIS[_PAULI_LABELS.index(ch)] for ch in label]
        m += coeff * reduce(np.kron, mats)
    return m

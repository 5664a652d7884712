"""Compilation of Trotter-step Hamiltonian terms to the native gate set.

Circuits act on registers of quocts; each quoct contributes three qubits
(e, n, m) in computational order, so a gate list on L quocts defines a
unitary on 8**L dimensions.  Equivalence with the matrix exponentials of
the corresponding Hamiltonian terms (built in the quoct physics ordering)
is checked through the basis reordering of :mod:`quoctlab.algebra`, up to
a global phase.

The kinetic compilation rests on two facts.  First, an exchange-type
hermitian unitary A times a diagonal D that is symmetric under A
satisfies A D = V A V for a diagonal phase network V, so
exp(-i t A D) = V exp(-i t A) V with V made of controlled-phase gates.
Second, for the pair terms the controlled-B conjugation identity
CB (exp(i a A) x I) CB = exp(i a A x B) turns the two-quoct exponential
into single-quoct rotations plus inter-quoct phase gates; both routes
lead to the same V-conjugated RXX/RYY core used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import algebra as qa
from . import hamiltonian as qh

__all__ = [
    "UnsupportedConfigurationError",
    "Gate",
    "CircuitIR",
    "circuit_unitary",
    "peephole",
    "controlled_conjugation",
    "ConjugationCheck",
    "compile_kinetic",
    "compile_mass_chem",
    "compile_electric_l1",
    "compile_trotter_step",
    "exp_q1_circuit",
    "ResourceModel",
    "ResourceReport",
    "estimate_resources",
    "circuit_to_text",
    "circuit_from_text",
]


class UnsupportedConfigurationError(ValueError):
    """The requested compilation target is documented as unsupported."""


_SLOT_OF = {"e": 0, "n": 1, "m": 2}

# gates whose square is the identity; the peephole pass cancels adjacent
# equal pairs of these
_INVOLUTIONS = {
    "H", "X", "CNOT_EN", "CNOT_NE", "SWAP_EN", "SWAP_EM", "SWAP_NM",
    "CZ_EM", "CCZ", "CZ_INTER", "CANTICZ", "CCCZ",
}

# name -> (number of targets, parameterized)
_GATE_SIGNATURES = {
    "H": (1, False),
    "X": (1, False),
    "Z": (1, True),
    "CNOT_EN": (2, False),
    "CNOT_NE": (2, False),
    "SWAP_EN": (2, False),
    "SWAP_EM": (2, False),
    "SWAP_NM": (2, False),
    "CZ_EM": (2, False),
    "CCZ": (3, False),
    "SHELVE_EM": (2, False),
    "CZ_INTER": (2, False),
    "CANTICZ": (3, False),
    "CCCZ": (4, False),
    "RSWAP_EN_ZM": (3, True),
}


@dataclass(frozen=True)
class Gate:
    """One native operation: targets are (quoct, slot) pairs."""

    name: str
    targets: tuple  # ((quoct, slot), ...)
    angle: Optional[float] = None

    def __post_init__(self):
        if self.name not in _GATE_SIGNATURES:
            raise ValueError(f"unknown gate name {self.name!r}")
        n_targets, parameterized = _GATE_SIGNATURES[self.name]
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.name} takes {n_targets} target(s)")
        if parameterized != (self.angle is not None):
            raise ValueError(f"{self.name}: angle mismatch")
        for _, slot in self.targets:
            if slot not in _SLOT_OF:
                raise ValueError(f"bad qubit slot {slot!r}")

    def qubits(self) -> tuple:
        return tuple(3 * q + _SLOT_OF[s] for q, s in self.targets)


@dataclass(frozen=True)
class CircuitIR:
    """Ordered gate list (first gate acts first) on `n_quocts` quocts."""

    n_quocts: int
    gates: tuple

    def __post_init__(self):
        for g in self.gates:
            for q, _ in g.targets:
                if not 0 <= q < self.n_quocts:
                    raise ValueError(f"gate targets quoct {q} outside register")

    def __add__(self, other: "CircuitIR") -> "CircuitIR":
        if self.n_quocts != other.n_quocts:
            raise ValueError("register size mismatch")
        return CircuitIR(self.n_quocts, self.gates + other.gates)

    def histogram(self) -> dict:
        out: dict = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return out


def _gate_matrix(gate: Gate) -> np.ndarray:
    """Matrix on the gate's own qubits, most significant qubit first."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    name = gate.name
    if name == "H":
        return h
    if name == "X":
        return x
    if name == "Z":
        return np.diag([1.0, np.exp(1j * gate.angle)])
    if name in ("CNOT_EN", "CNOT_NE"):
        return np.eye(4, dtype=complex)[[0, 1, 3, 2]]  # control first target second
    if name in ("SWAP_EN", "SWAP_EM", "SWAP_NM"):
        return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    if name in ("CZ_EM", "CZ_INTER"):
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "CCZ":
        d = np.ones(8, dtype=complex)
        d[7] = -1
        return np.diag(d)
    if name == "CANTICZ":
        # targets (e_A, n_A, e_B): phase when e_A=1, n_A=0, e_B=1
        d = np.ones(8, dtype=complex)
        d[0b101] = -1
        return np.diag(d)
    if name == "CCCZ":
        d = np.ones(16, dtype=complex)
        d[15] = -1
        return np.diag(d)
    if name == "SHELVE_EM":
        # on the (e, m) qubit pair: |01> <-> |10| is not it; the shelf
        # lives outside the two-level m register, so inside a pure qubit
        # circuit this is only usable through its (e,m)-block action
        raise UnsupportedConfigurationError(
            "SHELVE_EM has no two-level-qubit matrix; it is a readout primitive"
        )
    if name == "RSWAP_EN_ZM":
        # rotation generated by SWAP_en Z_m on (e, n, m):
        # cos(a/2) I - i sin(a/2) SWAP_en Z_m
        s = np.eye(8, dtype=complex)[[0, 1, 4, 5, 2, 3, 6, 7]]  # SWAP_en on 3 qubits
        zm = np.diag([1, -1, 1, -1, 1, -1, 1, -1]).astype(complex)
        gen = s @ zm
        return np.cos(gate.angle / 2) * np.eye(8) - 1j * np.sin(gate.angle / 2) * gen
    raise ValueError(name)


def _embed(matrix: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Lift a k-qubit matrix onto the given qubit positions."""
    k = len(qubits)
    dim = 2 ** n_qubits
    rest = [q for q in range(n_qubits) if q not in qubits]
    order = list(qubits) + rest
    t = matrix.reshape([2] * (2 * k))
    full = t
    for _ in rest:
        full = np.tensordot(full, np.eye(2), axes=0)
    # axes of `full`: rows(k) + cols(k) alternating blocks from tensordot:
    # [r1..rk, c1..ck, a1, b1, a2, b2, ...]; bring to row-major over `order`
    n_rest = len(rest)
    row_axes = list(range(k)) + [2 * k + 2 * i for i in range(n_rest)]
    col_axes = list(range(k, 2 * k)) + [2 * k + 2 * i + 1 for i in range(n_rest)]
    perm_rows = [row_axes[order.index(q)] for q in range(n_qubits)]
    perm_cols = [col_axes[order.index(q)] for q in range(n_qubits)]
    full = np.transpose(full, perm_rows + perm_cols)
    return full.reshape(dim, dim)


def circuit_unitary(circuit: CircuitIR) -> np.ndarray:
    """Unitary in the computational (e,n,m per quoct) basis ordering."""
    n_qubits = 3 * circuit.n_quocts
    u = np.eye(2 ** n_qubits, dtype=complex)
    for gate in circuit.gates:
        u = _embed(_gate_matrix(gate), gate.qubits(), n_qubits) @ u
    return u


def peephole(circuit: CircuitIR) -> CircuitIR:
    """Cancel adjacent self-inverse pairs and merge/drop Z rotations.

    Gates on disjoint qubit sets commute, so adjacent disjoint pairs are
    bubbled into a canonical order first; that exposes cancellations that
    straddle a gate on other qubits.
    """
    gates = list(circuit.gates)
    changed = True
    while changed:
        changed = False
        # canonicalize: sort adjacent commuting (disjoint-support) pairs
        reordered = True
        while reordered:
            reordered = False
            for i in range(len(gates) - 1):
                g1, g2 = gates[i], gates[i + 1]
                q1, q2 = set(g1.qubits()), set(g2.qubits())
                if q1.isdisjoint(q2) and min(q2) < min(q1):
                    gates[i], gates[i + 1] = g2, g1
                    reordered = True
        out = []
        i = 0
        while i < len(gates):
            g = gates[i]
            if g.name == "Z" and abs(g.angle % (2 * np.pi)) < 1e-15:
                i += 1
                changed = True
                continue
            if i + 1 < len(gates):
                nxt = gates[i + 1]
                if (
                    g.name in _INVOLUTIONS
                    and nxt.name == g.name
                    and nxt.targets == g.targets
                ):
                    i += 2
                    changed = True
                    continue
                if g.name == "Z" and nxt.name == "Z" and nxt.targets == g.targets:
                    merged = (g.angle + nxt.angle) % (2 * np.pi)
                    out.append(replace(g, angle=merged))
                    i += 2
                    changed = True
                    continue
            out.append(g)
            i += 1
        gates = out
    return CircuitIR(circuit.n_quocts, tuple(gates))


# --- Appendix-style controlled-conjugation identity -----------------------

@dataclass(frozen=True)
class ConjugationCheck:
    cb: np.ndarray
    identity_residual: float
    exponential_residuals: dict


def controlled_conjugation(a_op: np.ndarray, b_op: np.ndarray, partition,
                           alphas=(0.1, 1.0, np.pi)) -> ConjugationCheck:
    """Certify CB (A x I) CB = A x B and its exponentiated form.

    `partition` lists the indices of one half; A must be hermitian,
    unitary, and exchange the halves (no matrix element inside a half).
    CB applies B when the first factor lies in the listed half.
    """
    a_op = np.asarray(a_op, dtype=complex)
    b_op = np.asarray(b_op, dtype=complex)
    da, db = a_op.shape[0], b_op.shape[0]
    half = sorted(partition)
    other = [i for i in range(da) if i not in half]
    if len(half) * 2 != da:
        raise qa.ContractViolationError("partition must split the space in half")
    for m, label in ((a_op, "A"), (b_op, "B")):
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise qa.ContractViolationError(f"{label} is not hermitian")
        if np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > 1e-10:
            raise qa.ContractViolationError(f"{label} is not unitary")
    for block in (half, other):
        sub = a_op[np.ix_(block, block)]
        if np.max(np.abs(sub)) > 1e-12:
            raise qa.ContractViolationError("A has support inside a partition half")

    cb = np.zeros((da * db, da * db), dtype=complex)
    for k in range(da):
        blockmat = b_op if k in half else np.eye(db)
        cb[k * db:(k + 1) * db, k * db:(k + 1) * db] = blockmat
    lhs = cb @ np.kron(a_op, np.eye(db)) @ cb
    rhs = np.kron(a_op, b_op)
    identity_residual = float(np.max(np.abs(lhs - rhs)))
    exp_residuals = {}
    for alpha in alphas:
        from scipy.linalg import expm

        left = expm(1j * alpha * np.kron(a_op, b_op))
        right = cb @ np.kron(expm(1j * alpha * a_op), np.eye(db)) @ cb
        exp_residuals[float(alpha)] = float(np.max(np.abs(left - right)))
    return ConjugationCheck(cb, identity_residual, exp_residuals)


# --- kinetic-term compilation ---------------------------------------------

# per color: the rotation slot and, for each quoct side, the diagonal
# factor of the dressed ladder operator expressed as the (=1 slot, =0 slot)
# condition pair; the color-c exchange operator is X_slot(c) times these
_COLOR_SLOT = {"r": "e", "g": "n", "b": "m"}
# D0 on the even quoct: -1 iff (one slot = 1, another = 0)
_D0_CONDITIONS = {"r": ("n", "m"), "g": ("m", "e"), "b": ("e", "n")}
# D1 on the odd quoct: the bar-swapped pattern
_D1_CONDITIONS = {"r": ("m", "n"), "g": ("e", "m"), "b": ("n", "e")}


def _cz_pair(q: int, s1: str, s2: str) -> list:
    """Native realization of a CZ between two slots of one quoct."""
    pair = {s1, s2}
    if pair == {"e", "m"}:
        return [Gate("CZ_EM", ((q, "e"), (q, "m")))]
    if pair == {"e", "n"}:
        return [
            Gate("H", ((q, "n"),)),
            Gate("CNOT_EN", ((q, "e"), (q, "n"))),
            Gate("H", ((q, "n"),)),
        ]
    # (n, m): route the n qubit through e
    return [
        Gate("SWAP_EN", ((q, "e"), (q, "n"))),
        Gate("CZ_EM", ((q, "e"), (q, "m"))),
        Gate("SWAP_EN", ((q, "e"), (q, "n"))),
    ]


def _controlled_d0(q: int, color: str) -> list:
    """Phase -1 iff color slot = 1, hi-cond slot = 1, lo-cond slot = 0.

    (-1)^{xy(1-z)} = CZ_{xy} CCZ_{xyz}: one pair CZ plus one CCZ.
    """
    hi, lo = _D0_CONDITIONS[color]
    c = _COLOR_SLOT[color]
    gates = _cz_pair(q, c, hi)
    gates.append(Gate("CCZ", ((q, "e"), (q, "n"), (q, "m"))))
    return gates


def _controlled_d1(color: str, q0: int, q1: int) -> list:
    """Inter-quoct phase -1 iff c(q0)=1, hi(q1)=1, lo(q1)=0.

    Realized by the native C-anti-C-Z after shuttling q1's =1 condition
    into its e slot and its =0 condition into its n slot, and q0's
    control into its e slot.
    """
    hi, lo = _D1_CONDITIONS[color]
    c = _COLOR_SLOT[color]
    pre: list = []
    # the q0 control shuttle leads, so the closing copy ends with it and
    # can cancel against an identical shuttle in the adjacent core block
    if c != "e":
        name = "SWAP_EN" if c == "n" else "SWAP_EM"
        pre.append(Gate(name, ((q0, "e"), (q0, c))))
    if {hi, lo} == {"m", "n"}:
        # r: bring m1 -> e1 (n1 already the =0 slot)
        pre += [Gate("SWAP_EM", ((q1, "e"), (q1, "m")))] if hi == "m" else [
            Gate("SWAP_EN", ((q1, "e"), (q1, "n"))),
            Gate("SWAP_NM", ((q1, "n"), (q1, "m"))),
        ]
    elif {hi, lo} == {"e", "m"}:
        # g: e1 already the =1 slot; bring m1 -> n1
        pre += [Gate("SWAP_NM", ((q1, "n"), (q1, "m")))] if hi == "e" else [
            Gate("SWAP_EM", ((q1, "e"), (q1, "m"))),
        ]
    else:
        # b: swap e1 <-> n1 puts n1's value in e and e1's value in n
        pre += [Gate("SWAP_EN", ((q1, "e"), (q1, "n")))] if hi == "n" else []
    anti = Gate("CANTICZ", ((q1, "e"), (q1, "n"), (q0, "e")))
    return pre + [anti] + [replace(g) for g in reversed(pre)]


def _rzz_inter(q0: int, q1: int, angle: float) -> list:
    """exp(-i angle/2 Z_{e0} Z_{e1}) up to phase, via the inter-quoct CZ."""
    cx = [
        Gate("H", ((q1, "e"),)),
        Gate("CZ_INTER", ((q0, "e"), (q1, "e"))),
        Gate("H", ((q1, "e"),)),
    ]
    return cx + [Gate("Z", ((q1, "e"),), angle=angle)] + cx


def _rxx_ryy_core(q0: int, q1: int, theta: float) -> list:
    """exp(-i theta/2 XX) exp(+i theta/2 YY) on the e qubits.

    Emitted in applied order: the YY factor first.  RYY conjugates RXX
    with S = Z(pi/2) on both qubits.
    """
    s_dag = [Gate("Z", ((q, "e"),), angle=-np.pi / 2) for q in (q0, q1)]
    s_fwd = [Gate("Z", ((q, "e"),), angle=np.pi / 2) for q in (q0, q1)]
    h_both = [Gate("H", ((q, "e"),)) for q in (q0, q1)]
    rxx_pos = h_both + _rzz_inter(q0, q1, theta) + h_both
    rxx_neg = h_both + _rzz_inter(q0, q1, -theta) + h_both
    return s_dag + rxx_neg + s_fwd + rxx_pos


def compile_kinetic(color: str, dt: float, a: float = 1.0,
                    quocts=(0, 1), n_quocts: int = 2) -> CircuitIR:
    """Circuit for exp(-i dt H_kin^color) on two adjacent quocts.

    H_kin^c = (1/4a)(X^c X^c - Y^c Y^c) dressed by the fermionic-ordering
    diagonals; the diagonals conjugate out into the phase network V
    leaving a plain RXX/RYY core on the color qubits, shuttled onto the
    e slots.
    """
    if color not in _COLOR_SLOT:
        raise ValueError(f"unknown color {color!r}")
    q0, q1 = quocts
    theta = dt / (2.0 * a)
    v_gates = _controlled_d0(q0, color) + _controlled_d1(color, q0, q1)
    slot = _COLOR_SLOT[color]
    shuttle: list = []
    if slot != "e":
        name = "SWAP_EN" if slot == "n" else "SWAP_EM"
        shuttle = [
            Gate(name, ((q0, "e"), (q0, slot))),
            Gate(name, ((q1, "e"), (q1, slot))),
        ]
    core = shuttle + _rxx_ryy_core(q0, q1, theta) + [replace(g) for g in reversed(shuttle)]
    gates = v_gates + core + [replace(g) for g in reversed(v_gates)]
    return peephole(CircuitIR(n_quocts, tuple(gates)))


def compile_mass_chem(dt: float, m: float, mu: float, site_parity: str,
                      quoct: int = 0, n_quocts: int = 2) -> CircuitIR:
    """exp(-i (m +- mu) M dt) as three Z rotations (exact, no free phase)."""
    if site_parity not in ("even", "odd"):
        raise ValueError("site_parity must be 'even' or 'odd'")
    coeff = m + mu if site_parity == "even" else m - mu
    angle = -coeff * dt
    gates = tuple(
        Gate("Z", ((quoct, s),), angle=angle) for s in ("e", "n", "m")
    )
    return peephole(CircuitIR(n_quocts, gates))


def compile_electric_l1(dt: float, a: float = 1.0, g: float = 1.0,
                        quoct: int = 0, n_quocts: int = 2) -> CircuitIR:
    """exp(-i dt (a g^2/2) Q^2) on one quoct, up to a global phase.

    Q^2 = (4/3) diag(0,1,...,1,0) decomposes into ZZ pairs; each pair is
    a CX-conjugated Z rotation in the native alphabet.
    """
    phi = -(a * g ** 2 / 3.0) * dt
    if phi % (2 * np.pi) == 0.0:
        return CircuitIR(n_quocts, ())
    q = quoct
    gates: list = []
    # (e, n) pair: CNOT_EN with the Z on n
    cx_en = [Gate("CNOT_EN", ((q, "e"), (q, "n")))]
    gates += cx_en + [Gate("Z", ((q, "n"),), angle=phi)] + cx_en
    # (m, e) pair: CX with target e built from the native CZ_em
    cx_me = [
        Gate("H", ((q, "e"),)),
        Gate("CZ_EM", ((q, "e"), (q, "m"))),
        Gate("H", ((q, "e"),)),
    ]
    gates += cx_me + [Gate("Z", ((q, "e"),), angle=phi)] + cx_me
    # (m, n) pair: CZ_nm through the e shuttle, target n
    cx_mn = [
        Gate("H", ((q, "n"),)),
        Gate("SWAP_EN", ((q, "e"), (q, "n"))),
        Gate("CZ_EM", ((q, "e"), (q, "m"))),
        Gate("SWAP_EN", ((q, "e"), (q, "n"))),
        Gate("H", ((q, "n"),)),
    ]
    gates += cx_mn + [Gate("Z", ((q, "n"),), angle=phi)] + cx_mn
    return peephole(CircuitIR(n_quocts, tuple(gates)))


def compile_trotter_step(params: qh.LatticeParams, dt: float) -> CircuitIR:
    """Full first-order step for L=1: electric, mass/chem, then kinetic.

    Matches dynamics.trotter_step up to a global phase: the color blocks
    commute exactly (different fermion modes), so their product equals the
    single kinetic exponential.
    """
    if params.L != 1:
        raise UnsupportedConfigurationError(
            "only the L=1 electric term compiles to a local circuit"
        )
    circuit = compile_electric_l1(dt, a=params.a, g=params.g, quoct=0)
    circuit += compile_mass_chem(dt, params.m, params.mu, "even", quoct=0)
    circuit += compile_mass_chem(dt, params.m, params.mu, "odd", quoct=1)
    for color in ("r", "g", "b"):
        circuit += compile_kinetic(color, dt, a=params.a)
    return peephole(circuit)


def exp_q1_circuit(alpha: float, quoct: int = 0, n_quocts: int = 1) -> CircuitIR:
    """Circuit for exp(i alpha Q1), the red-green exchange charge.

    Q1 = (SWAP_en - P_same) x Z_m with P_same the projector onto equal
    e, n: the rotated SWAP_en Z_m block supplies the exchange part and a
    Z / ZZZ-rotation pair cancels the projector phases.
    """
    q = quoct
    gates = [Gate("RSWAP_EN_ZM", ((q, "e"), (q, "n"), (q, "m")), angle=-2 * alpha)]
    gates.append(Gate("Z", ((q, "m"),), angle=alpha))
    ladder = [
        Gate("CNOT_NE", ((q, "n"), (q, "e"))),
        Gate("H", ((q, "e"),)),
        Gate("CZ_EM", ((q, "e"), (q, "m"))),
        Gate("H", ((q, "e"),)),
    ]
    gates += ladder + [Gate("Z", ((q, "e"),), angle=alpha)] + [
        replace(g) for g in reversed(ladder)
    ]
    return peephole(CircuitIR(n_quocts, tuple(gates)))


# --- resource model --------------------------------------------------------

# Fidelity classes: MPP-style single-qubit and (e,n) operations at 0.999;
# motion-selective gates at their optimized-sequence values; inter-quoct
# (Rydberg) gates at a single calibrated value chosen so the L=1 step
# circuit lands at the quoted overall step fidelity of 0.691 (see
# calibrate_inter_fidelity: the 127-gate step carries 18 inter gates and
# a 0.70961 product over the pinned classes).
INTER_GATE_FIDELITY = 0.9985243566


def _default_fidelities() -> dict:
    out = {
        "H": 0.999, "X": 0.999, "Z": 0.999,
        "CNOT_EN": 0.999, "CNOT_NE": 0.999, "SWAP_EN": 0.999,
        "SWAP_EM": 0.9925, "SWAP_NM": 0.9925,
        "CZ_EM": 0.9929, "CCZ": 0.9814, "SHELVE_EM": 0.9907,
        "RSWAP_EN_ZM": 0.9925,
        "CZ_INTER": INTER_GATE_FIDELITY,
        "CANTICZ": INTER_GATE_FIDELITY,
        "CCCZ": INTER_GATE_FIDELITY,
    }
    return out


@dataclass(frozen=True)
class ResourceModel:
    fidelities: dict = field(default_factory=_default_fidelities)
    durations: dict = field(default_factory=dict)
    default_duration: float = 1.0e-3  # flat per-gate average

    def __post_init__(self):
        for name, f in self.fidelities.items():
            if not 0.0 < f <= 1.0:
                raise ValueError(f"fidelity for {name} outside (0, 1]")
        for name, t in self.durations.items():
            if t <= 0:
                raise ValueError(f"duration for {name} must be positive")

    def fidelity_of(self, gate: Gate) -> float:
        try:
            return self.fidelities[gate.name]
        except KeyError:
            raise KeyError(f"gate {gate.name!r} missing from resource model") from None

    def duration_of(self, gate: Gate) -> float:
        return self.durations.get(gate.name, self.default_duration)


@dataclass(frozen=True)
class ResourceReport:
    fidelity: float
    duration: float
    histogram: dict

    def repeated(self, steps: int) -> float:
        return self.fidelity ** steps


def estimate_resources(circuit: CircuitIR, model: Optional[ResourceModel] = None) -> ResourceReport:
    """Product fidelity, summed duration, and a gate-name histogram."""
    model = model or ResourceModel()
    fid = 1.0
    dur = 0.0
    for g in circuit.gates:
        fid *= model.fidelity_of(g)
        dur += model.duration_of(g)
    return ResourceReport(fidelity=fid, duration=dur, histogram=circuit.histogram())


def calibrate_inter_fidelity(target_step_fidelity: float = 0.691,
                             dt: float = 0.3) -> float:
    """Back out the inter-quoct gate fidelity hitting the step target.

    The non-inter gate classes are pinned by the optimized sequences, so a
    single number for the Rydberg gates is the free calibration knob.
    """
    params = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0)
    circuit = compile_trotter_step(params, dt)
    inter = {"CZ_INTER", "CANTICZ", "CCCZ"}
    model = ResourceModel()
    prod = 1.0
    n_inter = 0
    for g in circuit.gates:
        if g.name in inter:
            n_inter += 1
        else:
            prod *= model.fidelity_of(g)
    if n_inter == 0:
        raise UnsupportedConfigurationError("step circuit contains no inter gates")
    return (target_step_fidelity / prod) ** (1.0 / n_inter)


# --- serialization ---------------------------------------------------------

def circuit_to_text(circuit: CircuitIR) -> str:
    """One gate per line: NAME target[,target...] [angle]."""
    lines = [f"# quocts {circuit.n_quocts}"]
    for g in circuit.gates:
        tgt = " ".join(f"{q}:{s}" for q, s in g.targets)
        if g.angle is not None:
            lines.append(f"{g.name} {tgt} {g.angle!r}")
        else:
            lines.append(f"{g.name} {tgt}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> CircuitIR:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# quocts"):
        raise ValueError("missing register header")
    n_quocts = int(lines[0].split()[-1])
    gates = []
    for ln in lines[1:]:
        parts = ln.split()
        name = parts[0]
        angle = None
        targets = []
        for p in parts[1:]:
            if ":" in p:
                q, s = p.split(":")
                targets.append((int(q), s))
            else:
                angle = float(p)
        gates.append(Gate(name, tuple(targets), angle=angle))
    return CircuitIR(n_quocts, tuple(gates))

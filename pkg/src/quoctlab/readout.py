"""Quoct readout: native gates, measurement channels, protocol search.

The readout register is |e n m> with m in {0, 1, 2, s}: levels 0 and 1
are the motional qubit, 2 is the shelving level, and s is a sink standing
in for the broad thermal band that photon scattering sprays the motional
state into.  Scattering during a bright readout erases the motional
register into the sink while leaving the n qubit intact, so shelved
information (m=2, behind e=1) survives and nothing in the sink is ever
addressed by a native gate again.

A protocol is a list of rounds, each a gate list followed by a readout
primitive; the genetic search evolves e-readout-only protocols and scores
them by the uniqueness and size of their bright/dark bitstring table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ContractViolationError",
    "N_MOTIONAL",
    "DIM",
    "GATE_ALPHABET",
    "gate_matrix",
    "basis_state",
    "computational_states",
    "ReadoutProtocol",
    "Round",
    "e_readout",
    "n_partial_readout",
    "simulate_protocol",
    "verify_protocol",
    "short_circuit_table",
    "fitness",
    "fig_full_readout_protocol",
    "GAConfig",
    "genetic_search",
    "brute_force_unique_search",
    "protocol_to_text",
    "protocol_from_text",
]


class ContractViolationError(ValueError):
    pass


# motional levels: qubit 0/1, shelf 2, scramble sink 3
N_MOTIONAL = 4
_SINK = 3
DIM = 2 * 2 * N_MOTIONAL


def _idx(e: int, n: int, m: int) -> int:
    return (e * 2 + n) * N_MOTIONAL + m


def basis_state(e: int, n: int, m: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[_idx(e, n, m)] = 1.0
    return v


def computational_states():
    """The eight |enm> readout inputs, m in {0,1}."""
    return [(e, n, m) for e in (0, 1) for n in (0, 1) for m in (0, 1)]


def _levels():
    return [(e, n, m) for e in (0, 1) for n in (0, 1) for m in range(N_MOTIONAL)]


def _embed_en(u2_e: Optional[np.ndarray] = None, u2_n: Optional[np.ndarray] = None,
              u4: Optional[np.ndarray] = None) -> np.ndarray:
    """Lift an (e), (n), or (e,n) unitary to the full register.

    Electronic and nuclear operations act uniformly on every motional
    level, including the shelf and the sink.
    """
    if u4 is None:
        a = u2_e if u2_e is not None else np.eye(2)
        b = u2_n if u2_n is not None else np.eye(2)
        u4 = np.kron(a, b)
    return np.kron(u4, np.eye(N_MOTIONAL)).astype(complex)


def _build_gates() -> dict:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    gates = {}
    gates["X_e"] = _embed_en(u2_e=x)
    gates["H_e"] = _embed_en(u2_e=h)
    gates["X_n"] = _embed_en(u2_n=x)
    gates["H_n"] = _embed_en(u2_n=h)
    for label, angle in (("pi2", np.pi / 2), ("pi", np.pi)):
        gates[f"Z_e({label})"] = _embed_en(u2_e=np.diag([1, np.exp(1j * angle)]))
        gates[f"Z_n({label})"] = _embed_en(u2_n=np.diag([1, np.exp(1j * angle)]))
        # trap-depth phase ramp: level m acquires m * angle; nothing
        # coherent survives in the sink, leave it untouched
        zm = np.diag([np.exp(1j * angle * m) for m in (0, 1, 2)] + [1.0]).astype(complex)
        gates[f"Z_m({label})"] = np.kron(np.eye(4), zm)

    cnot_en = np.eye(4, dtype=complex)[[0, 1, 3, 2]]  # control e, target n
    cnot_ne = np.eye(4, dtype=complex)[[0, 3, 2, 1]]  # control n, target e
    swap_en = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    gates["CNOT_en"] = _embed_en(u4=cnot_en)
    gates["CNOT_ne"] = _embed_en(u4=cnot_ne)
    gates["SWAP_en"] = _embed_en(u4=swap_en)

    # motion-selective gates: act on the m qubit {0,1}, identity on the
    # shelf (2) except where shelving moves it, identity on the sink
    def em_gate(fill):
        u = np.eye(DIM, dtype=complex)
        for n in (0, 1):
            fill(u, n)
        return u

    def swap_em(u, n):
        a, b = _idx(0, n, 1), _idx(1, n, 0)
        u[a, a] = u[b, b] = 0.0
        u[a, b] = u[b, a] = 1.0

    gates["SWAP_em"] = em_gate(swap_em)

    u = np.eye(DIM, dtype=complex)
    for e in (0, 1):
        a, b = _idx(e, 0, 1), _idx(e, 1, 0)
        u[a, a] = u[b, b] = 0.0
        u[a, b] = u[b, a] = 1.0
    gates["SWAP_nm"] = u

    u = np.eye(DIM, dtype=complex)
    for n in (0, 1):
        u[_idx(1, n, 1), _idx(1, n, 1)] = -1.0
    gates["CZ_em"] = u

    u = np.eye(DIM, dtype=complex)
    u[_idx(1, 1, 1), _idx(1, 1, 1)] = -1.0
    gates["CCZ"] = u

    u = np.eye(DIM, dtype=complex)
    for n in (0, 1):
        a, b = _idx(0, n, 1), _idx(1, n, 2)
        u[a, a] = u[b, b] = 0.0
        u[b, a] = 1.0   # |0n1> -> |1n2>
        u[a, b] = -1.0  # |1n2> -> -|0n1>
    gates["SHELVE_em"] = u
    return gates


_GATES = _build_gates()

GATE_ALPHABET = (
    "X_e", "H_e", "X_n", "H_n",
    "Z_e(pi2)", "Z_e(pi)", "Z_n(pi2)", "Z_n(pi)", "Z_m(pi2)", "Z_m(pi)",
    "CNOT_ne", "CNOT_en", "SWAP_en", "SWAP_em", "SWAP_nm",
    "CZ_em", "CCZ", "SHELVE_em",
)


def gate_matrix(name: str) -> np.ndarray:
    try:
        return _GATES[name]
    except KeyError:
        raise KeyError(f"unknown native gate {name!r}") from None


@dataclass(frozen=True)
class Round:
    gates: tuple
    measurement: str = "e"  # "e" or "n"

    def __post_init__(self):
        for g in self.gates:
            if g not in _GATES:
                raise ValueError(f"unknown gate {g!r}")
        if self.measurement not in ("e", "n"):
            raise ValueError("measurement must be 'e' or 'n'")


@dataclass(frozen=True)
class ReadoutProtocol:
    rounds: tuple

    def __post_init__(self):
        if len(self.rounds) < 1:
            raise ValueError("a protocol needs at least one round")

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    @property
    def n_gates(self) -> int:
        return sum(len(r.gates) for r in self.rounds)


# --- measurement channels (density-operator level) ---

_E0_LEVELS = [_idx(0, n, m) for n in (0, 1) for m in range(N_MOTIONAL)]
_N00_LEVELS = [_idx(0, 0, m) for m in range(N_MOTIONAL)]


def _scramble(rho: np.ndarray, family: str) -> np.ndarray:
    """Erase the motional register into the sink within the bright family.

    family 'e0': both n values keep their coherence; family 'n00': only
    the (e=0, n=0) block scatters.
    """
    out = np.zeros_like(rho)
    if family == "e0":
        for n1 in (0, 1):
            for n2 in (0, 1):
                tot = sum(
                    rho[_idx(0, n1, m), _idx(0, n2, m)] for m in range(N_MOTIONAL)
                )
                out[_idx(0, n1, _SINK), _idx(0, n2, _SINK)] = tot
    else:
        tot = sum(rho[_idx(0, 0, m), _idx(0, 0, m)] for m in range(N_MOTIONAL))
        out[_idx(0, 0, _SINK), _idx(0, 0, _SINK)] = tot
    return out


def _measure(rho: np.ndarray, kind: str):
    """Two branches (label, probability, normalized post-state)."""
    bright_levels = _E0_LEVELS if kind == "e" else _N00_LEVELS
    mask = np.zeros(DIM, dtype=bool)
    mask[bright_levels] = True
    p_bright = float(np.real(np.trace(rho[np.ix_(mask, mask)])))
    branches = []
    bright_label, dark_label = ("B", "D") if kind == "e" else ("B'", "D'")
    if p_bright > 1e-12:
        proj = rho.copy()
        proj[~mask, :] = 0.0
        proj[:, ~mask] = 0.0
        post = _scramble(proj, "e0" if kind == "e" else "n00")
        branches.append((bright_label, p_bright, post / p_bright))
    p_dark = float(np.real(np.trace(rho))) - p_bright
    if p_dark > 1e-12:
        proj = rho.copy()
        proj[mask, :] = 0.0
        proj[:, mask] = 0.0
        branches.append((dark_label, p_dark, proj / p_dark))
    return branches


def e_readout(rho: np.ndarray):
    """Photon scatter from every e=0 state: measures the e qubit.

    Bright projects onto e=0 and scrambles m into the sink (n intact);
    dark projects onto e=1 and leaves the state untouched.
    """
    return _measure(rho, "e")


def n_partial_readout(rho: np.ndarray):
    """Scatter from |00m> only: measures |00m>-or-not, scrambling inside."""
    return _measure(rho, "n")


def simulate_protocol(protocol: ReadoutProtocol, initial, short_circuit: bool = False):
    """All outcome branches for one initial state.

    `initial` is an (e, n, m) label or a state vector.  Returns a list of
    (bitstring, probability, post-density) plus a determinism flag.  With
    `short_circuit`, the first bright e-outcome is followed immediately by
    one n-partial readout and termination, and a protocol that stays dark
    throughout swaps its final e-readout for the n-partial readout.
    """
    if isinstance(initial, tuple):
        psi = basis_state(*initial)
    else:
        psi = np.asarray(initial, dtype=complex)
    rho = np.outer(psi, psi.conj())
    branches = [("", 1.0, rho, False)]  # (bits, prob, rho, done)
    n_rounds = protocol.n_rounds
    for k, rnd in enumerate(protocol.rounds):
        last = k == n_rounds - 1
        new_branches = []
        for bits, prob, rho_b, done in branches:
            if done:
                new_branches.append((bits, prob, rho_b, True))
                continue
            for g in rnd.gates:
                u = _GATES[g]
                rho_b = u @ rho_b @ u.conj().T
            kind = rnd.measurement
            if short_circuit and kind == "e" and last and "B" not in bits:
                kind = "n"  # terminal disambiguation by the partial readout
            for label, p, post in _measure(rho_b, kind):
                nb = bits + label
                finished = False
                if short_circuit and label == "B":
                    for l2, p2, post2 in _measure(post, "n"):
                        new_branches.append((nb + l2, prob * p * p2, post2, True))
                    continue
                if short_circuit and kind == "n":
                    finished = True
                new_branches.append((nb, prob * p, post, finished))
        branches = new_branches
    # one bitstring is one classical outcome: merge branches that reached
    # it along different internal paths into a weighted mixture
    merged: dict = {}
    for bits, prob, rho_b, _ in branches:
        if bits in merged:
            p0, r0 = merged[bits]
            merged[bits] = (p0 + prob, r0 + prob * rho_b)
        else:
            merged[bits] = (prob, prob * rho_b)
    out = [(bits, p, r / p) for bits, (p, r) in sorted(merged.items())]
    deterministic = len(out) == 1 or max(p for _, p, _ in out) > 1 - 1e-9
    return out, deterministic


def verify_protocol(protocol: ReadoutProtocol):
    """Run all eight computational inputs; check bitstring uniqueness.

    Returns a dict with `unique`, `n_dups`, and the input -> bitstring
    `table` (the dominant branch per input).  Nondeterministic branches
    each count as an extra duplicate.
    """
    def bits_int(s):
        return int("".join("1" if ch == "B" else "0" for ch in s), 2) if s else 0

    table = {}
    n_dups = 0
    strings = []
    for state in computational_states():
        outcomes, deterministic = simulate_protocol(protocol, state)
        # dominant outcome; probability ties fall to the smaller bit value
        best = max(outcomes, key=lambda o: (o[1], -bits_int(o[0])))
        table[state] = best[0]
        strings.append(best[0])
        if not deterministic:
            n_dups += len(outcomes) - 1
    n_dups += len(strings) - len(set(strings))
    unique = n_dups == 0
    return {"unique": unique, "n_dups": n_dups, "table": table}


def fitness(protocol: ReadoutProtocol):
    """(b_dups, f) with f = (1+rounds)(1+gates)(1+dups); smaller is fitter."""
    v = verify_protocol(protocol)
    b_dups = 0 if v["unique"] else 1
    f = (1 + protocol.n_rounds) * (1 + protocol.n_gates) * (1 + v["n_dups"])
    return b_dups, f


def short_circuit_table(protocol: ReadoutProtocol):
    """Minimal identifying bitstrings under feedback-driven n-readouts.

    After any bright e-outcome the next readout is the n-partial one and
    the run stops; if every e-readout stays dark the final round's
    readout is replaced by the n-partial one.  Requires a protocol whose
    full bitstring table is unique.
    """
    if not verify_protocol(protocol)["unique"]:
        raise ContractViolationError("short-circuit table needs a unique protocol")
    table = {}
    for state in computational_states():
        outcomes, deterministic = simulate_protocol(protocol, state, short_circuit=True)
        if not deterministic:
            raise ContractViolationError("short-circuited run became nondeterministic")
        best = max(outcomes, key=lambda o: o[1])
        table[state] = best[0]
    if len(set(table.values())) != len(table):
        raise ContractViolationError("short-circuit strings collide")
    return table


def fig_full_readout_protocol() -> ReadoutProtocol:
    """The four-round full-readout circuit with shelving.

    Round 1 shelves |0n1> before scattering; round 2 swaps the remaining
    m=0 information into e; round 3 unshelves; round 4 reads the n qubit
    through e.  Scrambled survivors ride along deterministically because
    every scattered state sits in the sink, which no later gate touches.
    """
    return ReadoutProtocol(
        rounds=(
            Round(gates=("SHELVE_em",), measurement="e"),
            Round(gates=("SWAP_em",), measurement="e"),
            Round(gates=("SHELVE_em",), measurement="e"),
            Round(gates=("SWAP_en", "X_n"), measurement="e"),
        )
    )


# --- fast fitness path for the genetic search ---
#
# The search only ever scores e-readout protocols, so the bitstring of a
# branch is an integer of n_rounds bits (bright=1).  States stay pure:
# a bright measurement turns into at most four Kraus branches, one per
# motional level feeding the sink, each again pure per input column.

_E0_ROWS = np.array(_E0_LEVELS)
_E1_ROWS = np.array([i for i in range(DIM) if i not in _E0_LEVELS])
# source rows (0, n, m) and target rows (0, n, sink) for each Kraus branch
_KRAUS_SRC = [
    np.array([_idx(0, 0, m), _idx(0, 1, m)]) for m in range(N_MOTIONAL)
]
_KRAUS_DST = np.array([_idx(0, 0, _SINK), _idx(0, 1, _SINK)])

_FITNESS_MEMO: dict = {}
_MEMO_LIMIT = 400_000

# bright-branch Kraus bookkeeping: source rows (0, n, m) per motional
# level, destination rows (0, n, sink)
_E1_MASK = np.zeros(DIM, dtype=bool)
_E1_MASK[[i for i in range(DIM) if i not in _E0_LEVELS]] = True
_KRAUS_SRC_ARR = np.array(
    [[_idx(0, 0, m), _idx(0, 1, m)] for m in range(N_MOTIONAL)]
)
_KRAUS_DST_ARR = np.array([_idx(0, 0, _SINK), _idx(0, 1, _SINK)])


def _round_matrices(gate_indices_per_round):
    mats = []
    for gates in gate_indices_per_round:
        u = np.eye(DIM, dtype=complex)
        for gi in gates:
            u = _GATES[GATE_ALPHABET[gi]] @ u
        mats.append(u)
    return mats


def _bitstring_table_fast(gate_indices_per_round):
    """probabilities[input, bits] over all branches of an e-only protocol.

    The branch tree is walked one level at a time with every node batched
    into a single (nodes, dim, 8) array: one matmul applies the round
    circuit to all nodes, the dark projector and the four bright Kraus
    maps fan each node out, and negligible branches are pruned.
    """
    n_rounds = len(gate_indices_per_round)
    mats = _round_matrices(gate_indices_per_round)
    w0 = np.zeros((DIM, 8), dtype=complex)
    for j, (e, n, m) in enumerate(computational_states()):
        w0[_idx(e, n, m), j] = 1.0
    w = w0[None, :, :]
    bits = np.zeros(1, dtype=np.int64)
    for mat in mats:
        w = np.matmul(mat[None, :, :], w)
        n_nodes = w.shape[0]
        dark = np.where(_E1_MASK[None, :, None], w, 0.0)
        blocks = w[:, _KRAUS_SRC_ARR, :]  # (nodes, 4, 2, 8)
        bright = np.zeros((n_nodes, N_MOTIONAL, DIM, 8), dtype=complex)
        bright[:, :, _KRAUS_DST_ARR[0], :] = blocks[:, :, 0, :]
        bright[:, :, _KRAUS_DST_ARR[1], :] = blocks[:, :, 1, :]
        new_w = np.concatenate([dark, bright.reshape(-1, DIM, 8)])
        new_bits = np.concatenate(
            [bits << 1, np.repeat((bits << 1) | 1, N_MOTIONAL)]
        )
        weights = np.sum(np.abs(new_w) ** 2, axis=(1, 2))
        keep = weights > 1e-26
        w, bits = new_w[keep], new_bits[keep]
    table = np.zeros((2 ** n_rounds, 8))
    np.add.at(table, bits, np.sum(np.abs(w) ** 2, axis=1))
    return table.T


def _fitness_from_table(table, n_rounds, n_gates):
    dominant = np.argmax(table, axis=1)
    n_dups = 8 - len(set(dominant.tolist()))
    n_dups += int(np.sum(table > 1e-12)) - 8  # extra branches
    deterministic = bool(np.all(table[np.arange(8), dominant] > 1 - 1e-9))
    b_dups = 0 if (n_dups == 0 and deterministic) else 1
    if b_dups and n_dups == 0:
        n_dups = 1  # nondeterministic but branch weights hide below table resolution
    f = (1 + n_rounds) * (1 + n_gates) * (1 + n_dups)
    return b_dups, f


def _fast_fitness(proto_key):
    """proto_key: tuple of tuples of gate indices (e-readout rounds only)."""
    hit = _FITNESS_MEMO.get(proto_key)
    if hit is not None:
        return hit
    table = _bitstring_table_fast(proto_key)
    n_gates = sum(len(c) for c in proto_key)
    out = _fitness_from_table(table, len(proto_key), n_gates)
    if len(_FITNESS_MEMO) > _MEMO_LIMIT:
        _FITNESS_MEMO.clear()
    _FITNESS_MEMO[proto_key] = out
    return out


def _key_to_protocol(proto_key) -> ReadoutProtocol:
    return ReadoutProtocol(
        rounds=tuple(
            Round(gates=tuple(GATE_ALPHABET[i] for i in circuit), measurement="e")
            for circuit in proto_key
        )
    )


@dataclass(frozen=True)
class GAConfig:
    """Knobs of the protocol search; defaults follow the reference loop."""

    population: int = 100
    generations: int = 200_000
    seed: int = 0
    mean_rounds: float = 1.5
    mean_gates: float = 2.0
    p_round_mut: float = 0.3
    p_gate_count_mut: float = 0.3
    p_gate_resample: float = 0.5
    n_drop: int = 50
    n_crossover: int = 40
    n_fresh: int = 10
    stable_window: int = 10_000  # early stop once the best archived f sits still


@dataclass
class GAResult:
    archive: list  # (f, proto_key) sorted, b_dups = 0 entries only
    generations_run: int
    seed: int

    def best_protocols(self):
        if not self.archive:
            return []
        f_min = self.archive[0][0]
        return [
            _key_to_protocol(key) for f, key in self.archive if f == f_min
        ]


def _sample_circuit(rng) -> tuple:
    n = rng.poisson(2.0)
    return tuple(int(g) for g in rng.integers(0, len(GATE_ALPHABET), size=n))


def _sample_protocol(rng, mean_rounds: float) -> tuple:
    n_rounds = max(1, rng.poisson(mean_rounds))
    return tuple(_sample_circuit(rng) for _ in range(n_rounds))


def _crossover(rng, p1, p2) -> tuple:
    child = []
    for k in range(max(len(p1), len(p2))):
        have1, have2 = k < len(p1), k < len(p2)
        if have1 and have2:
            child.append(p1[k] if rng.random() < 0.5 else p2[k])
        else:
            tail = p1[k] if have1 else p2[k]
            if rng.random() < 0.5:
                child.append(tail)
    if not child:
        child.append(p1[0])
    return tuple(child)


def _mutate(rng, proto, cfg: GAConfig) -> tuple:
    rounds = [list(c) for c in proto]
    if rng.random() < cfg.p_round_mut:
        rounds.append(list(_sample_circuit(rng)))
    if len(rounds) > 1 and rng.random() < cfg.p_round_mut:
        del rounds[rng.integers(len(rounds))]
    for circuit in rounds:
        if rng.random() < cfg.p_gate_count_mut:
            circuit.insert(
                int(rng.integers(len(circuit) + 1)),
                int(rng.integers(len(GATE_ALPHABET))),
            )
        if circuit and rng.random() < cfg.p_gate_count_mut:
            del circuit[rng.integers(len(circuit))]
        for i in range(len(circuit)):
            if rng.random() < cfg.p_gate_resample:
                circuit[i] = int(rng.integers(len(GATE_ALPHABET)))
    return tuple(tuple(c) for c in rounds)


def genetic_search(config: GAConfig = GAConfig()) -> GAResult:
    """Evolve e-readout protocols toward a unique bitstring mapping.

    Per generation: drop the `n_drop` least-fit, breed `n_crossover`
    offspring from surviving pairs, mutate everything, and top up with
    `n_fresh` freshly sampled protocols.  Every protocol that maps the
    eight inputs to distinct deterministic bitstrings is archived; the
    loop ends after `generations` rounds or once the best archived f has
    been stable for `stable_window` generations.
    """
    rng = np.random.default_rng(config.seed)
    population = [
        _sample_protocol(rng, config.mean_rounds) for _ in range(config.population)
    ]
    archive: dict = {}
    best_f = None
    best_f_gen = 0
    gen = 0
    for gen in range(1, config.generations + 1):
        fits = [_fast_fitness(p) for p in population]
        for p, (b, f) in zip(population, fits):
            if b == 0:
                archive[p] = f
                if best_f is None or f < best_f:
                    best_f, best_f_gen = f, gen
        order = sorted(range(len(population)), key=lambda i: fits[i])
        survivors = [population[i] for i in order[: config.population - config.n_drop]]
        offspring = [
            _crossover(
                rng,
                survivors[int(rng.integers(len(survivors)))],
                survivors[int(rng.integers(len(survivors)))],
            )
            for _ in range(config.n_crossover)
        ]
        mutated = [_mutate(rng, p, config) for p in survivors + offspring]
        population = mutated + [
            _sample_protocol(rng, config.mean_rounds) for _ in range(config.n_fresh)
        ]
        if best_f is not None and gen - best_f_gen >= config.stable_window:
            break
    ordered = sorted((f, key) for key, f in archive.items())
    return GAResult(archive=ordered, generations_run=gen, seed=config.seed)


def brute_force_unique_search(max_rounds: int = 3, max_gates: int = 2):
    """Exhaustive scan of small e-readout protocols for a unique mapping.

    Enumerates every protocol with up to `max_rounds` rounds and up to
    `max_gates` gates per round, pruning prefixes that are already
    nondeterministic or that have irreversibly merged two inputs
    (identical bitstring and post-measurement state).  Returns the first
    unique protocol found, or None together with search statistics.
    """
    from itertools import product as iproduct

    n_alpha = len(GATE_ALPHABET)
    circuits = [()]
    for ln in range(1, max_gates + 1):
        circuits.extend(iproduct(range(n_alpha), repeat=ln))
    mats = _round_matrices(circuits)
    # collapse circuits acting identically
    seen = {}
    for c, m in zip(circuits, mats):
        key = np.round(m, 12).tobytes()
        if key not in seen:
            seen[key] = (c, m)
    unique_rounds = list(seen.values())

    w0 = np.zeros((DIM, 8), dtype=complex)
    for j, (e, n, m) in enumerate(computational_states()):
        w0[_idx(e, n, m), j] = 1.0

    def step(state, mat):
        """Deterministic one-round advance or None.

        `state` is (bits per input, list of weighted pure columns per
        input); every input must come out of the readout with one branch.
        """
        bits, ensembles = state
        new_bits = []
        new_ens = []
        for j in range(8):
            branches = {}  # outcome -> list of (weight, vec)
            for weight, vec in ensembles[j]:
                v = mat @ vec
                dark = np.zeros_like(v)
                dark[_E1_ROWS] = v[_E1_ROWS]
                pd = float(np.sum(np.abs(dark) ** 2))
                if pd > 1e-12:
                    branches.setdefault("D", []).append((weight * pd, dark / np.sqrt(pd)))
                for src in _KRAUS_SRC:
                    blk = v[src]
                    pb = float(np.sum(np.abs(blk) ** 2))
                    if pb > 1e-12:
                        b = np.zeros_like(v)
                        b[_KRAUS_DST] = blk / np.sqrt(pb)
                        branches.setdefault("B", []).append((weight * pb, b))
            probs = {k: sum(w for w, _ in v2) for k, v2 in branches.items()}
            top = max(probs, key=probs.get)
            if probs[top] < 1 - 1e-9:
                return None
            new_bits.append(bits[j] + top)
            new_ens.append(branches[top])
        return tuple(new_bits), new_ens

    def state_key(state):
        bits, ensembles = state
        parts = [",".join(bits)]
        for ens in ensembles:
            rho = sum(w * np.outer(v, v.conj()) for w, v in ens)
            parts.append(np.round(rho, 10).tobytes().hex()[:64])
        return "|".join(parts)

    def merged_dead(state):
        bits, ensembles = state
        rhos = []
        for ens in ensembles:
            rhos.append(sum(w * np.outer(v, v.conj()) for w, v in ens))
        for i in range(8):
            for j in range(i + 1, 8):
                if bits[i] == bits[j] and np.max(np.abs(rhos[i] - rhos[j])) < 1e-10:
                    return True
        return False

    start = (tuple([""] * 8), [[(1.0, w0[:, j].copy())] for j in range(8)])
    frontier = {"": (start, ())}
    examined = 0
    for depth in range(1, max_rounds + 1):
        new_frontier = {}
        for state, prefix in frontier.values():
            for circ, mat in unique_rounds:
                examined += 1
                nxt = step(state, mat)
                if nxt is None:
                    continue
                bits, _ = nxt
                if len(set(bits)) == 8:
                    return _key_to_protocol(prefix + (circ,)), examined
                if depth == max_rounds or merged_dead(nxt):
                    continue
                key = state_key(nxt)
                if key not in new_frontier:
                    new_frontier[key] = (nxt, prefix + (circ,))
        frontier = new_frontier
    return None, examined


# --- serialization ---

def protocol_to_text(protocol: ReadoutProtocol) -> str:
    """One line per round: gates separated by spaces, then '; measure X'."""
    lines = []
    for rnd in protocol.rounds:
        gates = " ".join(rnd.gates) if rnd.gates else "-"
        lines.append(f"{gates} ; measure {rnd.measurement}")
    return "\n".join(lines) + "\n"


def protocol_from_text(text: str) -> ReadoutProtocol:
    rounds = []
    for line in text.strip().splitlines():
        gates_part, _, meas_part = line.partition(";")
        gates = tuple(g for g in gates_part.split() if g != "-")
        meas = meas_part.replace("measure", "").strip()
        rounds.append(Round(gates=gates, measurement=meas))
    return ReadoutProtocol(rounds=tuple(rounds))

"""Three-pulse sequence search for the motion-selective quoct gates.

Each gate is realized by three sideband pulses of equal Rabi frequency
and drive frequency but free nutation angles and phases.  The figure of
merit is the trace fidelity against the target unitary on the
computational subspace, maximized over single-qubit phase corrections
Z_m(gamma) Z_n(beta) Z_e(alpha); gradient ascent runs on the six pulse
angles from random starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import atom as qat

__all__ = [
    "GateTarget",
    "PulseSequence",
    "OptResult",
    "gate_target",
    "GATE_NAMES",
    "CHOSEN_RABI",
    "PUBLISHED_ANGLES",
    "sequence_unitary",
    "fidelity",
    "optimize",
    "sweep_rabi",
    "replay",
    "spectator_return_probability",
]

GATE_NAMES = ("SWAP_em", "CZ_em", "CCZ", "SHELVE_em")

# Operating Rabi frequencies discovered with sweep_rabi: the highest grid
# frequency (shortest gate) whose converged fidelity still clears the
# gate's target, mirroring "maximal fidelity at minimal gate time".
CHOSEN_RABI = {
    "SWAP_em": 2 * np.pi * 10e3,
    "CZ_em": 2 * np.pi * 10e3,
    "CCZ": 2 * np.pi * 8e3,
    "SHELVE_em": 2 * np.pi * 10e3,
}

# Reference three-pulse solutions (angles in units of pi) with their
# quoted fidelities, used by the replay check.
PUBLISHED_ANGLES = {
    "SWAP_em": {
        "theta": (1.498, 1.498, 1.123),
        "phi": (1.908, 1.196, 1.583),
        "fidelity": 0.9925,
    },
    "CZ_em": {
        "theta": (1.036, 1.620, 1.036),
        "phi": (0.138, 0.417, 0.695),
        "fidelity": 0.9929,
    },
    "CCZ": {
        "theta": (1.972, 1.066, 0.613),
        "phi": (0.103, 0.122, 0.150),
        "fidelity": 0.9814,
    },
    "SHELVE_em": {
        "theta": (1.277, 1.277, 0.694),
        "phi": (0.398, 0.616, 1.845),
        "fidelity": 0.9907,
    },
}


@dataclass(frozen=True)
class PulseSequence:
    """Three-pulse descriptor.

    Phases are stored modulo 2 pi (a true symmetry of the drive); the
    nutation angles set pulse durations, for which a 2 pi wrap is *not* a
    symmetry once off-resonant couplings act, so they are only required
    to lie in [0, 4 pi) - wide enough for the optimized sequences, whose
    best solutions can exceed a single full turn.
    """

    thetas: tuple
    phis: tuple
    rabi: float
    sideband: int
    polarization: str

    def __post_init__(self):
        if len(self.thetas) != 3 or len(self.phis) != 3:
            raise ValueError("a sequence holds exactly three pulses")
        if any(t < 0 or t >= 4 * np.pi for t in self.thetas):
            raise ValueError("nutation angles must lie in [0, 4 pi)")
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "phis", tuple(p % (2 * np.pi) for p in self.phis))

    def pulses(self):
        return [
            qat.Pulse(
                rabi=self.rabi,
                sideband=self.sideband,
                polarization=self.polarization,
                phase=phi,
                theta=theta,
            )
            for theta, phi in zip(self.thetas, self.phis)
        ]


@dataclass(frozen=True)
class GateTarget:
    """Target unitary on a labeled subspace of an atom space."""

    name: str
    space: qat.AtomSpace
    u0: np.ndarray
    subspace: tuple  # (e, n, m) labels, in u0's basis order
    sideband: int
    polarization: str
    leakage_pair: tuple  # the erroneous transition closed by a net-2pi turn

    @property
    def indices(self) -> np.ndarray:
        return np.array([self.space.index(*lbl) for lbl in self.subspace])

    @property
    def z_exponents(self) -> np.ndarray:
        return np.array(self.subspace, dtype=float)


@dataclass(frozen=True)
class OptResult:
    sequence: PulseSequence
    z_correct: tuple  # (alpha, beta, gamma)
    fidelity: float
    gate_time: float
    converged: bool = True

    def __post_init__(self):
        if self.fidelity > 1 + 1e-12:
            raise ValueError("fidelity above 1: broken normalization")


def gate_target(name: str, m_max: int = 3) -> GateTarget:
    """Build the target unitary and drive configuration for one gate."""
    if name == "SWAP_em":
        space = qat.AtomSpace(m_max=m_max, with_nuclear=False)
        u0 = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
        sub = ((0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1))
        return GateTarget(name, space, u0, sub, -1, "pi", ((0, 0, 2), (1, 0, 1)))
    if name == "CZ_em":
        space = qat.AtomSpace(m_max=m_max, with_nuclear=False)
        u0 = np.diag([1, 1, 1, -1]).astype(complex)
        sub = ((0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1))
        return GateTarget(name, space, u0, sub, -1, "pi", ((0, 0, 2), (1, 0, 1)))
    if name == "CCZ":
        space = qat.AtomSpace(m_max=m_max, with_nuclear=True)
        u0 = np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex)
        sub = tuple((e, n, m) for e in (0, 1) for n in (0, 1) for m in (0, 1))
        return GateTarget(name, space, u0, sub, -1, "sigma-", ((0, 0, 2), (1, 1, 1)))
    if name == "SHELVE_em":
        space = qat.AtomSpace(m_max=m_max, with_nuclear=False)
        u0 = np.eye(5, dtype=complex)
        u0[1, 1] = 0.0
        u0[4, 4] = 0.0
        u0[4, 1] = 1.0   # |0n1> -> |1n2|
        u0[1, 4] = -1.0  # |1n2> -> -|0n1>
        sub = ((0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1), (1, 0, 2))
        return GateTarget(name, space, u0, sub, +1, "pi", ((0, 0, 0), (1, 0, 1)))
    raise ValueError(f"unknown gate {name!r}")


class _SequenceEngine:
    """Fast three-pulse unitaries at fixed Rabi frequency and drive.

    The drive-frame Hamiltonian at phase 0 is diagonalized once; a pulse
    at phase phi is the phase-sandwiched exponential, and the free-phase
    unwinding returns the sequence to the computational frame.
    """

    def __init__(self, target: GateTarget, rabi: float):
        self.target = target
        self.space = target.space
        self.rabi = rabi
        pulse0 = qat.Pulse(
            rabi=rabi, sideband=target.sideband, polarization=target.polarization
        )
        h0 = qat.drive_hamiltonian(self.space, pulse0)
        self.w, self.v = np.linalg.eigh(h0)
        labels = self.space.labels()
        self.e_mask = np.array([e for (e, _, _) in labels], dtype=float)
        delta = pulse0.laser_detuning(self.space.trap_freq)
        self.free = np.array(
            [-delta * e + self.space.trap_freq * m for (e, _, m) in labels]
        )
        self.ref_rate = rabi * pulse0.reference_element(self.space.eta)

    def gate_time(self, thetas: Sequence[float]) -> float:
        return float(sum(thetas) / self.ref_rate)

    def unitary(self, thetas: Sequence[float], phis: Sequence[float]) -> np.ndarray:
        u = np.eye(self.space.dim, dtype=complex)
        t_total = 0.0
        for theta, phi in zip(thetas, phis):
            dt = theta / self.ref_rate
            m = (self.v * np.exp(-1j * self.w * dt)) @ self.v.conj().T
            wvec = np.exp(-1j * phi * self.e_mask)
            u = (wvec[:, None] * m * wvec.conj()[None, :]) @ u
            t_total += dt
        return np.exp(1j * self.free * t_total)[:, None] * u


class _ZGauge:
    """Maximizer of |sum_k e^{i exps_k . angles} c_k|^2 / d^2 over angles.

    Coordinate ascent with the group structure precomputed: qubit
    exponents in {0,1} admit a closed-form update; the motional exponent
    reaches 2 on the shelf level, so that coordinate is solved on a dense
    grid with parabolic refinement.
    """

    def __init__(self, exps: np.ndarray, n_grid: int = 256):
        self.exps = np.asarray(exps, dtype=float)
        self.d = self.exps.shape[0]
        grid = np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False)
        self.grid = grid
        self.coords = []
        for coord in range(3):
            vals = self.exps[:, coord]
            levels = np.unique(vals)
            if len(levels) == 1:
                self.coords.append(None)
                continue
            masks = np.stack([vals == v for v in levels])  # (g, d)
            binary = set(levels.tolist()) <= {0.0, 1.0}
            # e^{i v gamma} on the grid per group, for the grid fallback
            grid_phases = np.exp(1j * np.outer(levels, grid))  # (g, n_grid)
            self.coords.append((vals, levels, masks, binary, grid_phases))

    def __call__(self, c: np.ndarray, max_passes: int = 60):
        angles = np.zeros(3)
        phases = np.zeros(self.d)  # exps @ angles, kept incrementally
        prev = -1.0
        for _ in range(max_passes):
            for coord, info in enumerate(self.coords):
                if info is None:
                    continue
                vals, levels, masks, binary, grid_phases = info
                weights = c * np.exp(1j * (phases - vals * angles[coord]))
                groups = masks @ weights
                if binary:
                    a0 = groups[0] if levels[0] == 0.0 else 0.0
                    a1 = groups[-1]
                    new = float(np.angle(a0 * np.conj(a1))) if abs(a1) > 0 else 0.0
                else:
                    mags = np.abs(groups @ grid_phases)
                    k = int(np.argmax(mags))
                    n_grid = len(self.grid)
                    y0, y1, y2 = mags[k - 1], mags[k], mags[(k + 1) % n_grid]
                    denom = y0 - 2 * y1 + y2
                    shift = 0.5 * (y0 - y2) / denom if abs(denom) > 1e-15 else 0.0
                    step = self.grid[1] - self.grid[0]
                    new = float(self.grid[k] + shift * step)
                phases += vals * (new - angles[coord])
                angles[coord] = new
            f = abs(np.sum(c * np.exp(1j * phases))) ** 2 / self.d ** 2
            if f - prev < 1e-14:
                break
            prev = f
        return prev, tuple(a % (2 * np.pi) for a in angles)


_ZGAUGE_CACHE: dict = {}


def _zgauge_for(exps: np.ndarray) -> _ZGauge:
    key = exps.tobytes()
    if key not in _ZGAUGE_CACHE:
        _ZGAUGE_CACHE[key] = _ZGauge(exps)
    return _ZGAUGE_CACHE[key]


def _max_z_fidelity(c: np.ndarray, exps: np.ndarray):
    return _zgauge_for(np.asarray(exps, dtype=float))(c)


def fidelity(target: GateTarget, u_actual: np.ndarray):
    """(F, alpha, beta, gamma): Z-corrected trace fidelity on the subspace."""
    idx = target.indices
    block = u_actual[np.ix_(idx, idx)]
    c = np.diag(block @ target.u0.conj().T)
    return _max_z_fidelity(c, target.z_exponents)


def sequence_unitary(target: GateTarget, seq: PulseSequence) -> np.ndarray:
    engine = _SequenceEngine(target, seq.rabi)
    return engine.unitary(seq.thetas, seq.phis)


def replay(name: str, rabi: Optional[float] = None, m_max: int = 3):
    """Evaluate the stored reference angles for `name` at `rabi`.

    Returns (F, OptResult-like record).  Default Rabi frequency is the
    gate's chosen operating point.
    """
    target = gate_target(name, m_max=m_max)
    rabi = CHOSEN_RABI[name] if rabi is None else rabi
    ref = PUBLISHED_ANGLES[name]
    thetas = tuple(np.pi * t for t in ref["theta"])
    phis = tuple(np.pi * p for p in ref["phi"])
    engine = _SequenceEngine(target, rabi)
    u = engine.unitary(thetas, phis)
    f, z = _max_z_fidelity(
        np.diag(u[np.ix_(target.indices, target.indices)] @ target.u0.conj().T),
        target.z_exponents,
    )
    seq = PulseSequence(thetas, phis, rabi, target.sideband, target.polarization)
    return OptResult(seq, z, float(f), engine.gate_time(thetas))


def _ascend(engine: _SequenceEngine, x0: np.ndarray, max_iter: int, grad_step: float,
            grad_tol: float):
    """Backtracking gradient ascent on the six pulse angles."""
    target = engine.target
    idx = target.indices
    u0h = target.u0.conj().T
    exps = target.z_exponents

    def f_of(x):
        u = engine.unitary(x[:3], x[3:])
        c = np.diag(u[np.ix_(idx, idx)] @ u0h)
        return _max_z_fidelity(c, exps)[0]

    # nutation angles set durations, so they are clipped (not wrapped) at
    # the domain boundary; two full turns comfortably contains the optima
    theta_hi = 4 * np.pi * (1 - 1e-9)

    x = x0.copy()
    x[:3] = np.clip(x[:3], 0.0, theta_hi)
    fx = f_of(x)
    for _ in range(max_iter):
        grad = np.empty(6)
        for i in range(6):
            xp, xm = x.copy(), x.copy()
            xp[i] = min(xp[i] + grad_step, theta_hi) if i < 3 else xp[i] + grad_step
            xm[i] = max(xm[i] - grad_step, 0.0) if i < 3 else xm[i] - grad_step
            denom = xp[i] - xm[i]
            grad[i] = (f_of(xp) - f_of(xm)) / denom if denom else 0.0
        gnorm = np.linalg.norm(grad)
        if gnorm < grad_tol:
            break
        step = 1.0
        improved = False
        while step > 1e-12:
            x_try = x + step * grad
            x_try[:3] = np.clip(x_try[:3], 0.0, theta_hi)
            f_try = f_of(x_try)
            if f_try > fx + 1e-4 * step * gnorm ** 2:
                x, fx = x_try, f_try
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return x, fx


def optimize(
    name: str,
    rabi: Optional[float] = None,
    seed: int = 0,
    n_starts: int = 20,
    max_iter: int = 5000,
    grad_step: float = 1e-5,
    grad_tol: float = 1e-8,
    m_max: int = 3,
) -> OptResult:
    """Multi-start gradient ascent for one gate at one Rabi frequency.

    Deterministic for a fixed seed (starts are drawn up front and run
    sequentially).  If no start reaches F > 0.5 the best record is
    returned with `converged=False` instead of raising.
    """
    target = gate_target(name, m_max=m_max)
    rabi = CHOSEN_RABI[name] if rabi is None else rabi
    if rabi <= 0:
        raise ValueError("Rabi frequency must be positive")
    engine = _SequenceEngine(target, rabi)
    rng = np.random.default_rng(seed)
    starts = rng.uniform(0.0, 2 * np.pi, size=(n_starts, 6))
    best_x, best_f = None, -1.0
    for x0 in starts:
        x, fx = _ascend(engine, x0, max_iter=max_iter, grad_step=grad_step,
                        grad_tol=grad_tol)
        if fx > best_f:
            best_x, best_f = x, fx
    seq = PulseSequence(
        tuple(best_x[:3]), tuple(best_x[3:]), rabi, target.sideband, target.polarization
    )
    # score the sequence as stored, so the record is self-consistent
    u = engine.unitary(seq.thetas, seq.phis)
    c = np.diag(u[np.ix_(target.indices, target.indices)] @ target.u0.conj().T)
    f, z = _max_z_fidelity(c, target.z_exponents)
    return OptResult(seq, z, float(f), engine.gate_time(seq.thetas), converged=f > 0.5)


def sweep_rabi(name: str, rabi_grid: Sequence[float], seed: int = 0,
               n_starts: int = 8, max_iter: int = 2000, m_max: int = 3):
    """Optimize at each grid frequency; returns a list of OptResult."""
    if len(rabi_grid) == 0:
        raise ValueError("empty Rabi grid")
    return [
        optimize(name, rabi=r, seed=seed, n_starts=n_starts, max_iter=max_iter,
                 m_max=m_max)
        for r in rabi_grid
    ]


def spectator_return_probability(target: GateTarget, seq: PulseSequence) -> float:
    """Population returned to the erroneous (net-2pi) transition pair.

    Prepares the noncomputational partner of the leakage pair and asks how
    much population ends inside the pair after the sequence.
    """
    u = sequence_unitary(target, seq)
    lo, hi = target.leakage_pair
    i_lo = target.space.index(*lo)
    i_hi = target.space.index(*hi)
    psi = u[:, i_lo]
    return float(np.abs(psi[i_lo]) ** 2 + np.abs(psi[i_hi]) ** 2)

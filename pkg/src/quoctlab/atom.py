"""Sideband-coupled level structure of one trapped atom.

The simulated levels are |e n m> with e the optical-clock qubit, n the
nuclear-spin qubit, and m harmonic motional quanta up to a truncation
m_max.  A drive on the clock transition couples e=0 to e=1 with a
polarization selection rule on n and Lamb-Dicke-suppressed matrix
elements between motional states.

All Hamiltonians are written in the frame rotating with the drive, where
they are time independent, so one pulse propagates by a single matrix
exponential; :func:`propagate` converts the result back to the
computational frame (phases that are linear in e and m, which is what the
per-qubit Z corrections downstream absorb anyway).

Angular frequencies throughout (rad/s); times in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import eval_genlaguerre

__all__ = [
    "HBAR",
    "ATOMIC_MASS_UNIT",
    "YB171_MASS",
    "CLOCK_WAVELENGTH",
    "DEFAULT_TRAP_FREQ",
    "lamb_dicke_parameter",
    "sideband_matrix_element",
    "AtomSpace",
    "Pulse",
    "drive_hamiltonian",
    "propagate",
    "corpse_mpp",
    "mpp_metrics",
    "hadamard_pulse",
    "hadamard_duration",
    "hadamard_metrics",
]

HBAR = 1.054571817e-34  # J s
ATOMIC_MASS_UNIT = 1.66053906892e-27  # kg
YB171_MASS = 170.936331515 * ATOMIC_MASS_UNIT  # kg
CLOCK_WAVELENGTH = 578.4e-9  # m, 1S0 - 3P0 optical clock line
DEFAULT_TRAP_FREQ = 2 * np.pi * 100e3  # rad/s


def lamb_dicke_parameter(wavelength: float, atomic_mass: float, trap_freq: float) -> float:
    """eta = k * x0 with k = 2 pi / lambda and x0 the ground-state extent."""
    if wavelength <= 0 or atomic_mass <= 0 or trap_freq <= 0:
        raise ValueError("wavelength, mass, and trap frequency must be positive")
    k = 2 * np.pi / wavelength
    x0 = np.sqrt(HBAR / (2 * atomic_mass * trap_freq))
    return k * x0


def sideband_matrix_element(m_from: int, m_to: int, eta: float) -> float:
    """|<m_to| exp(i eta (a + a^+)) |m_from>| for a harmonic ladder.

    exp(-eta^2/2) * eta^|dm| * sqrt(m_<! / m_>!) * L_{m_<}^{|dm|}(eta^2).
    """
    if m_from < 0 or m_to < 0:
        raise ValueError("motional quantum numbers must be nonnegative")
    lo, hi = sorted((m_from, m_to))
    dm = hi - lo
    log_fac = 0.0
    for k in range(lo + 1, hi + 1):
        log_fac += np.log(k)
    return float(
        np.exp(-eta ** 2 / 2)
        * eta ** dm
        * np.exp(-0.5 * log_fac)
        * eval_genlaguerre(lo, dm, eta ** 2)
    )


# n-qubit transitions (n in e=0 manifold -> n in e=1 manifold) allowed by
# each drive polarization; pi drives both n values at equal strength,
# circular polarizations drive a single stretched transition.
_POLARIZATION_RULES = {
    "pi": ((0, 0), (1, 1)),
    "sigma+": ((1, 0),),
    "sigma-": ((0, 1),),
}


@dataclass(frozen=True)
class AtomSpace:
    """Truncated |e n m> level space.

    `with_nuclear=False` drops the n qubit for pi-polarized problems,
    halving the dimension.  `m_max` must be at least 2 so the shelving
    level exists; the default 3 keeps one more level as a leakage witness.
    """

    m_max: int = 3
    trap_freq: float = DEFAULT_TRAP_FREQ
    eta: float | None = None
    with_nuclear: bool = True

    def __post_init__(self):
        if self.m_max < 2:
            raise ValueError("m_max must be >= 2")
        if self.eta is None:
            object.__setattr__(
                self,
                "eta",
                lamb_dicke_parameter(CLOCK_WAVELENGTH, YB171_MASS, self.trap_freq),
            )

    @property
    def n_motional(self) -> int:
        return self.m_max + 1

    @property
    def n_values(self) -> tuple:
        return (0, 1) if self.with_nuclear else (0,)

    @property
    def dim(self) -> int:
        return 2 * len(self.n_values) * self.n_motional

    def index(self, e: int, n: int, m: int) -> int:
        if not self.with_nuclear and n != 0:
            raise ValueError("space carries no nuclear qubit")
        if m > self.m_max:
            raise ValueError(f"m={m} beyond truncation {self.m_max}")
        return (e * len(self.n_values) + n) * self.n_motional + m

    def labels(self):
        return [
            (e, n, m)
            for e in (0, 1)
            for n in self.n_values
            for m in range(self.n_motional)
        ]

    def e_projector(self) -> np.ndarray:
        d = np.array([e for (e, _, _) in self.labels()], dtype=float)
        return np.diag(d)

    def motional_number(self) -> np.ndarray:
        d = np.array([m for (_, _, m) in self.labels()], dtype=float)
        return np.diag(d)


@dataclass(frozen=True)
class Pulse:
    """One resonant or detuned drive segment on the clock transition.

    `sideband` selects the nominal resonance (-1 red, 0 carrier, +1 blue);
    `extra_detuning` shifts the drive off that resonance.  The duration is
    theta / (rabi * reference matrix element), the reference being the
    0<->0 carrier element or the 0<->1 sideband element, unless `duration`
    is given explicitly.
    """

    rabi: float
    sideband: int = 0
    polarization: str = "pi"
    phase: float = 0.0
    theta: float = np.pi
    extra_detuning: float = 0.0
    duration: float | None = None

    def __post_init__(self):
        if self.rabi <= 0:
            raise ValueError("Rabi frequency must be positive")
        if self.theta < 0:
            raise ValueError("nutation angle must be nonnegative")
        if self.sideband not in (-1, 0, 1):
            raise ValueError("sideband must be -1, 0, or +1")
        if self.polarization not in _POLARIZATION_RULES:
            raise ValueError(f"unknown polarization {self.polarization!r}")

    def reference_element(self, eta: float) -> float:
        if self.sideband == 0:
            return sideband_matrix_element(0, 0, eta)
        return sideband_matrix_element(0, 1, eta)

    def pulse_duration(self, eta: float) -> float:
        if self.duration is not None:
            return self.duration
        return self.theta / (self.rabi * self.reference_element(eta))

    def laser_detuning(self, trap_freq: float) -> float:
        return self.sideband * trap_freq + self.extra_detuning


def drive_hamiltonian(space: AtomSpace, pulse: Pulse, detuning_offsets=None) -> np.ndarray:
    """Drive-frame Hamiltonian for one pulse (time independent).

    H = -delta_L P_e1 + omega N_m + (Omega/2)(e^{-i phi} V + h.c.) with V
    the sum of every polarization-allowed |1 n' m'><0 n m| coupling,
    Lamb-Dicke weighted; couplings beyond m_max are truncated.  Optional
    `detuning_offsets` adds a per-level diagonal (rad/s).
    """
    dim = space.dim
    h = np.zeros((dim, dim), dtype=complex)
    delta = pulse.laser_detuning(space.trap_freq)
    for e_val, n_val, m_val in space.labels():
        i = space.index(e_val, n_val, m_val)
        h[i, i] = -delta * e_val + space.trap_freq * m_val
    rules = _POLARIZATION_RULES[pulse.polarization]
    amp = 0.5 * pulse.rabi * np.exp(-1j * pulse.phase)
    for n_from, n_to in rules:
        if not space.with_nuclear and (n_from != 0 or n_to != 0):
            if pulse.polarization != "pi":
                raise ValueError("circular polarization needs the nuclear qubit")
            continue
        nf = n_from if space.with_nuclear else 0
        nt = n_to if space.with_nuclear else 0
        for m_from in range(space.n_motional):
            for m_to in range(space.n_motional):
                # full displacement element <m'|exp(i eta X)|m>: magnitude
                # from the Laguerre formula, i^|dm| phase from the photon
                # recoil; the phase drives the carrier/sideband interference
                elem = (1j) ** abs(m_to - m_from) * sideband_matrix_element(
                    m_from, m_to, space.eta
                )
                h[space.index(1, nt, m_to), space.index(0, nf, m_from)] += amp * elem
    h = h + h.conj().T - np.diag(np.diag(h).real)
    if detuning_offsets is not None:
        h = h + np.diag(np.asarray(detuning_offsets, dtype=float))
    return h


def stark_compensation(space: AtomSpace, pulse: Pulse, resonance_tol: float = 0.25) -> np.ndarray:
    """Ideal light-shift compensation offsets for one drive (rad/s).

    Off-resonant couplings Stark-shift every level by the second-order
    sum |V_ij|^2 / (E_i - E_j); the experiment cancels these with
    auxiliary light shifts, so the model offers the matching diagonal
    correction.  Couplings within `resonance_tol` * trap_freq of
    resonance are the gate drive itself and are left untouched.  Only
    meaningful in the resolved-sideband regime.
    """
    h = drive_hamiltonian(space, pulse)
    d = np.diag(h).real
    v = h - np.diag(d)
    dim = space.dim
    shifts = np.zeros(dim)
    for i in range(dim):
        for j in range(dim):
            if i == j or abs(v[i, j]) == 0.0:
                continue
            gap = d[i] - d[j]
            if abs(gap) < resonance_tol * space.trap_freq:
                continue
            shifts[i] += abs(v[i, j]) ** 2 / gap
    return -shifts


def propagate(space: AtomSpace, pulses: Sequence[Pulse], unwind: bool = True) -> np.ndarray:
    """Unitary for a pulse train, in the computational frame.

    All pulses must share one drive frequency (same sideband and extra
    detuning) so a single rotating frame covers the train; per-pulse
    phases and durations are free.  With `unwind` the free phases
    exp(+i t (-delta_L P_e1 + omega N_m)) accumulated over the total
    duration are stripped, returning to the frame co-rotating with the
    bare levels.
    """
    dim = space.dim
    u = np.eye(dim, dtype=complex)
    if not pulses:
        return u
    freqs = {(p.sideband, p.extra_detuning) for p in pulses}
    if len(freqs) > 1:
        raise ValueError("pulse train must share a single drive frequency")
    t_total = 0.0
    for pulse in pulses:
        h = drive_hamiltonian(space, pulse)
        dt = pulse.pulse_duration(space.eta)
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(-1j * w * dt)) @ v.conj().T @ u
        t_total += dt
    if unwind:
        delta = pulses[0].laser_detuning(space.trap_freq)
        labels = space.labels()
        free = np.array(
            [-delta * e + space.trap_freq * m for (e, _, m) in labels]
        )
        u = np.diag(np.exp(1j * free * t_total)) @ u
    return u


def corpse_mpp(rabi: float) -> list:
    """Motion-preserving pi pulse: two concatenated 90-degree CORPSE triplets.

    Each triplet implements a net theta = pi/2 rotation about x with
    nutation angles (2 pi + theta/2 - k, 2 pi - 2k, theta/2 - k), phases
    (0, pi, 0), and sin k = sin(theta/2) / 2.  The composite cancels
    detuning errors, which is what preserves the motional ladder even at
    Rabi frequencies well above the trap frequency.
    """
    theta = np.pi / 2
    k = np.arcsin(np.sin(theta / 2) / 2)
    angles = (2 * np.pi + theta / 2 - k, 2 * np.pi - 2 * k, theta / 2 - k)
    phases = (0.0, np.pi, 0.0)
    triplet = [
        Pulse(rabi=rabi, sideband=0, polarization="pi", phase=ph, theta=th)
        for th, ph in zip(angles, phases)
    ]
    return triplet + [replace(p) for p in triplet]


def mpp_metrics(space: AtomSpace, rabi: float, initial_m=(0, 1, 2)) -> dict:
    """Pi-pulse infidelity and motional disturbance of the MPP.

    For each starting motional state m0, prepares |e, m0> for e in {0, 1},
    applies the MPP, and records 1 - |<flip(e), m0|psi>|^2 averaged over e
    plus the change in mean motional quantum.  Also reports the phase of
    the 0->1 transfer amplitude relative to an ideal -i X rotation.
    """
    u = propagate(space, corpse_mpp(rabi))
    nmat = np.diag(space.motional_number()).copy()
    out = {"infidelity": {}, "delta_m": {}, "global_phase": None}
    n_val = 0
    for m0 in initial_m:
        if m0 > space.m_max:
            raise ValueError("initial m beyond truncation")
        fid, dm = [], []
        for e0 in (0, 1):
            psi = u[:, space.index(e0, n_val, m0)]
            target = space.index(1 - e0, n_val, m0)
            fid.append(np.abs(psi[target]) ** 2)
            dm.append(float(np.real(nmat @ (np.abs(psi) ** 2))) - m0)
        out["infidelity"][m0] = 1.0 - float(np.mean(fid))
        out["delta_m"][m0] = float(np.mean(dm))
    amp = u[space.index(1, n_val, 0), space.index(0, n_val, 0)]
    out["global_phase"] = float(np.angle(amp * 1j))  # relative to ideal -i
    return out


def hadamard_duration(rabi: float, half_cycles: int = 5) -> float:
    """Time for an odd number of half-cycles about the tilted axis."""
    return half_cycles * np.pi / (np.sqrt(2.0) * rabi)


def hadamard_pulse(rabi: float, duration: float) -> list:
    """Single pulse detuned by +Omega: rotation axis at 45 deg in x-z.

    Population inversion between the coupled pair happens whenever the
    generalized rotation angle sqrt(2) Omega t is an odd multiple of pi;
    the gate time is chosen (see :func:`hadamard_duration`) so the pulse
    also leaves the motional ladder undisturbed.
    """
    return [
        Pulse(
            rabi=rabi,
            sideband=0,
            polarization="pi",
            phase=0.0,
            theta=0.0,
            extra_detuning=rabi,
            duration=duration,
        )
    ]


def hadamard_metrics(space: AtomSpace, rabi: float, duration: float, initial_m=(0, 1)) -> dict:
    """Hadamard-pulse infidelity and motional disturbance.

    Fidelity per m0 compares the 2x2 e-block at motional level m0 against
    the ideal Hadamard up to one free Z phase on each side (the phase
    conventions of a detuned pulse differ from the textbook gate by
    exactly such phases).
    """
    u = propagate(space, hadamard_pulse(rabi, duration))
    had = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    nmat = np.diag(space.motional_number()).copy()
    out = {"infidelity": {}, "delta_m": {}, "m1_phase": None}
    n_val = 0
    for m0 in initial_m:
        i0 = space.index(0, n_val, m0)
        i1 = space.index(1, n_val, m0)
        block = u[np.ix_([i0, i1], [i0, i1])]
        # trace fidelity maximized over a Z(alpha) correction after the
        # gate: F = (|c_0| + |c_1|)^2 / 4 with c_j = (U H^+)_jj
        c = np.diag(block @ had.conj().T)
        fid = (abs(c[0]) + abs(c[1])) ** 2 / 4.0
        dm = []
        for e0 in (0, 1):
            psi = u[:, space.index(e0, n_val, m0)]
            dm.append(float(np.real(nmat @ (np.abs(psi) ** 2))) - m0)
        out["infidelity"][m0] = 1.0 - float(fid)
        out["delta_m"][m0] = float(np.mean(dm))
    amp0 = u[space.index(1, n_val, 0), space.index(0, n_val, 0)]
    amp1 = u[space.index(1, n_val, 1), space.index(0, n_val, 1)]
    out["m1_phase"] = float(np.angle(amp1 / amp0))
    return out

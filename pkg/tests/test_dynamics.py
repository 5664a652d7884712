"""Evolution, Trotterization, and observable checks."""

import numpy as np
import pytest
from scipy.linalg import expm

from quoctlab import dynamics as qd
from quoctlab import hamiltonian as qh


@pytest.fixture(scope="module")
def l1_terms():
    return qh.build_full(qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0))


class TestExactEvolve:
    def test_zero_time(self, l1_terms):
        psi = np.zeros(64, dtype=complex)
        psi[3] = 1.0
        out = qd.exact_evolve(l1_terms.total.matrix, psi, 0.0)
        assert np.max(np.abs(out - psi)) < 1e-12

    def test_diagonal_phase_only(self):
        h = np.diag(np.arange(4.0))
        psi = np.zeros(4, dtype=complex)
        psi[2] = 1.0
        out = qd.exact_evolve(h, psi, 0.7)
        assert abs(abs(out[2]) - 1.0) < 1e-12
        assert abs(out[2] - np.exp(-1j * 2 * 0.7)) < 1e-12

    def test_against_expm_oracle(self, l1_terms):
        h = l1_terms.total.matrix
        vac = np.zeros(64, dtype=complex)
        vac[0] = 1.0
        ours = qd.exact_evolve(h, vac, 1.0)
        oracle = expm(-1j * h) @ vac
        assert np.max(np.abs(ours - oracle)) < 1e-10
        assert abs(np.linalg.norm(ours) - 1.0) < 1e-12

    def test_dimension_mismatch(self, l1_terms):
        with pytest.raises(ValueError):
            qd.exact_evolve(l1_terms.total.matrix, np.ones(8, dtype=complex), 0.1)


class TestTrotterStep:
    def test_zero_dt_is_identity(self, l1_terms):
        u = qd.trotter_step(l1_terms, 0.0)
        assert np.max(np.abs(u - np.eye(64))) < 1e-12

    def test_unitary(self, l1_terms):
        u = qd.trotter_step(l1_terms, 0.37)
        assert np.max(np.abs(u @ u.conj().T - np.eye(64))) < 1e-12

    def test_single_term_exact(self):
        # with only the kinetic term present, one step is exact
        terms = qh.build_full(qh.LatticeParams(L=1, a=1.0, m=0.0, mu=0.0, g=0.0))
        u = qd.trotter_step(terms, 0.5)
        assert np.max(np.abs(u - expm(-1j * terms.total.matrix * 0.5))) < 1e-12

    def test_first_order_error_scaling(self, l1_terms):
        h = l1_terms.total.matrix
        dev = [
            np.linalg.norm(qd.trotter_step(l1_terms, dt) - expm(-1j * h * dt), 2)
            for dt in (0.2, 0.1)
        ]
        ratio = dev[0] / dev[1]
        assert 3.2 <= ratio <= 4.8


class TestVacuumPersistence:
    def test_t_zero_is_one(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0)
        spec = qd.EvolutionSpec(1.0, 3, (0.0, 1.0))
        _, exact, trotter = qd.vacuum_persistence(p, spec)
        assert exact[0] == pytest.approx(1.0)
        assert trotter[0] == pytest.approx(1.0)

    def test_trotter_converges_to_exact(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0)
        times = tuple(np.linspace(0.0, 3.0, 16))
        spec = qd.EvolutionSpec(3.0, 50, times)
        _, exact, trotter = qd.vacuum_persistence(p, spec)
        assert np.max(np.abs(exact - trotter)) < 1e-2

    def test_deviation_decreases_with_steps(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0)
        times = tuple(np.linspace(0.0, 3.0, 16))
        devs = []
        for d in (3, 9, 27, 81):
            _, exact, trotter = qd.vacuum_persistence(p, qd.EvolutionSpec(3.0, d, times))
            devs.append(np.max(np.abs(exact - trotter)))
        assert all(a >= b for a, b in zip(devs, devs[1:]))

    def test_free_vacuum_oscillation_matches_ed(self):
        # g=m=mu=0: only pair terms act; compare the Trotter curve directly
        # against exact evolution (single-term Hamiltonian, so exact per step)
        p = qh.LatticeParams(L=1, a=1.0, m=0.0, mu=0.0, g=0.0)
        times = tuple(np.linspace(0.0, 4.0, 9))
        _, exact, trotter = qd.vacuum_persistence(p, qd.EvolutionSpec(4.0, 1, times))
        assert np.max(np.abs(exact - trotter)) < 1e-12


class TestSpectrum:
    def test_baryon_levels_exact(self):
        for g in (0.0, 1.0, 3.0):
            p = qh.LatticeParams(L=1, a=1.0, m=2.0, mu=0.2, g=g)
            h = qh.build_full(p).total.matrix
            w, dens, _ = qd.spectrum(h, basis=qh.singlet_basis(1))
            assert len(w) == 6
            i_bar = int(np.argmin(np.abs(w - 6.6)))
            i_anti = int(np.argmin(np.abs(w - 5.4)))
            assert abs(w[i_bar] - 6.6) < 1e-9
            assert abs(w[i_anti] - 5.4) < 1e-9
            assert abs(dens[i_bar] - 3.0) < 1e-9
            assert abs(dens[i_anti] - 3.0) < 1e-9

    def test_projector_input_equivalent_to_basis(self):
        p = qh.LatticeParams(L=1, a=1.0, m=2.0, mu=0.2, g=1.0)
        h = qh.build_full(p).total.matrix
        w1, _, _ = qd.spectrum(h, basis=qh.singlet_basis(1))
        w2, _, _ = qd.spectrum(h, basis=qh.singlet_projector(1).matrix)
        assert np.max(np.abs(np.sort(w1) - np.sort(w2))) < 1e-9

    def test_free_limit_matches_direct_diagonalization(self):
        p = qh.LatticeParams(L=1, a=1.0, m=2.0, mu=0.2, g=0.0)
        terms = qh.build_full(p)
        w, _, _ = qd.spectrum(terms.total.matrix)
        free = terms.kinetic.matrix + terms.mass.matrix + terms.chem.matrix
        assert np.max(np.abs(w - np.linalg.eigvalsh(free))) < 1e-10


class TestNormAndSymmetryConservation:
    def test_norm_preserved_over_many_steps(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.2, g=0.7)
        stepper = qd.TrotterStepper(p)
        rng = np.random.default_rng(3)
        psi = rng.normal(size=64) + 1j * rng.normal(size=64)
        psi /= np.linalg.norm(psi)
        for _ in range(500):
            psi = stepper.step(psi, 0.49, 0.05)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-10

    def test_baryon_number_conserved_along_evolution(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0)
        stepper = qd.TrotterStepper(p)
        nb = np.diag(qh.baryon_number_op(1).matrix).real
        rng = np.random.default_rng(5)
        psi = rng.normal(size=64) + 1j * rng.normal(size=64)
        psi /= np.linalg.norm(psi)
        nb0 = float(np.sum(nb * np.abs(psi) ** 2))
        for _ in range(200):
            psi = stepper.step(psi, 1.0, 0.1)
        nb1 = float(np.sum(nb * np.abs(psi) ** 2))
        assert abs(nb1 - nb0) < 1e-8


class TestAdiabaticSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            qd.AdiabaticSpec(0.0, 1.0, -1.0, 10)
        with pytest.raises(ValueError):
            qd.AdiabaticSpec(0.0, 1.0, 1.0, 10, segments=((0.5, 1.0, 10),))
        with pytest.raises(ValueError):
            qd.AdiabaticSpec(0.0, 1.0, 1.0, 10, segments=((1.0, 1.0, 9),))

    def test_schedule_covers_ramp(self):
        spec = qd.AdiabaticSpec(0.0, 2.0, 10.0, 8, segments=((0.5, 0.25, 4), (0.5, 0.75, 4)))
        entries = list(spec.schedule())
        assert len(entries) == 8
        s_end = entries[-1][0] + entries[-1][1]
        assert s_end == pytest.approx(1.0)
        assert sum(dt for _, _, dt in entries) == pytest.approx(10.0)

    def test_fixed_coupling_reduces_to_plain_trotter(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0)
        spec = qd.AdiabaticSpec(1.0, 1.0, 1.0, 5)
        vac = np.zeros(64, dtype=complex)
        vac[0] = 1.0
        traj = qd.adiabatic_evolve(p, spec, vac)
        terms = qh.build_full(p)
        u = qd.trotter_step(terms, 0.2)
        expect = np.linalg.matrix_power(u, 5) @ vac
        assert np.max(np.abs(traj.final_state - expect)) < 1e-10


class TestStringBreaking:
    def test_meson_to_two_baryon_transition(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=0.0)
        basis = qd.sector_singlet_basis(1, 0.0)
        assert basis.shape[1] == 4
        numdiag = np.diag(qh.number_total_op(1).matrix).real
        _, v0 = qd.track_eigenstate(p, [0.0], basis, start_index=1)
        psi0 = v0[:, 0]
        spec = qd.AdiabaticSpec(
            0.0, np.sqrt(10.0), 45.0, 250,
            segments=((0.4, 0.12, 45), (0.4, 0.74, 165), (0.2, 0.14, 40)),
        )
        dens = lambda psi: float(np.sum(numdiag * np.abs(psi) ** 2))
        traj = qd.adiabatic_evolve(p, spec, psi0, observables={"density": dens}, record_every=5)
        _, vt = qd.track_eigenstate(p, np.linspace(0, 10.0, 81), basis, start_index=1)
        overlap = abs(np.vdot(vt[:, -1], traj.final_state)) ** 2
        d = traj.observables["density"]
        assert overlap >= 0.99
        assert abs(d[0] - 2.0) <= 0.15
        assert abs(d[-1] - 6.0) <= 0.15
        assert np.min(np.diff(d)) >= -0.15

    def test_adiabatic_limit_improves_with_time(self):
        # same ramp, exact-per-step regime: longer schedule tracks better
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=0.0)
        basis = qd.sector_singlet_basis(1, 0.0)
        _, v0 = qd.track_eigenstate(p, [0.0], basis, start_index=1)
        psi0 = v0[:, 0]
        _, vt = qd.track_eigenstate(p, np.linspace(0, 10.0, 81), basis, start_index=1)
        overlaps = []
        for t_total, steps in ((20.0, 400), (80.0, 1600)):
            spec = qd.AdiabaticSpec(0.0, np.sqrt(10.0), t_total, steps)
            traj = qd.adiabatic_evolve(p, spec, psi0)
            overlaps.append(abs(np.vdot(vt[:, -1], traj.final_state)) ** 2)
        assert overlaps[1] >= overlaps[0] - 1e-6


class TestBaryonSize:
    def test_nonlocal_projector_values(self):
        # |r>0 |0>1 |gb>2 |0>3 is a fully split baryon
        dim = 4096
        idx = ((1 * 8 + 0) * 8 + 4) * 8 + 0
        psi = np.zeros(dim, dtype=complex)
        psi[idx] = 1.0
        assert qd.nonlocal_baryon_density(psi) == pytest.approx(1.0)
        # |rgb>0 |0>1 |0>2 |0>3 is localized
        psi2 = np.zeros(dim, dtype=complex)
        psi2[((7 * 8) * 8) * 8] = 1.0
        assert qd.nonlocal_baryon_density(psi2) == pytest.approx(0.0)

    def test_wrong_dimension_rejected(self):
        with pytest.raises(ValueError):
            qd.nonlocal_baryon_density(np.ones(64, dtype=complex))

    def test_delocalized_baryon_localizes(self):
        p = qh.LatticeParams(L=2, a=1.0, m=2.0, mu=0.1, g=0.0)
        idx = qd.sector_indices(2, 1.0)
        basis = qd.sector_singlet_basis(2, 1.0)
        assert basis.shape[1] == 20
        gi, gf = 0.05, 1.0
        _, v0 = qd.track_eigenstate(p, [gi ** 2], basis, start_index=0)
        psi0 = v0[:, 0][idx]
        spec = qd.AdiabaticSpec(
            gi, gf, 80.0, 500,
            segments=((0.10, 0.45, 220), (0.30, 0.35, 180), (0.60, 0.20, 100)),
        )
        nl = lambda psi: qd.nonlocal_baryon_density(psi, indices=idx)
        traj = qd.adiabatic_evolve(p, spec, psi0, observables={"nl": nl}, record_every=10, indices=idx)
        series = traj.observables["nl"]
        assert series[0] > 0.5
        assert series[-1] < 0.1


class TestEigenstateTracking:
    def test_tracks_through_avoided_crossing(self):
        p = qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=0.0)
        basis = qd.sector_singlet_basis(1, 0.0)
        g2s = np.linspace(0.0, 10.0, 161)
        energies, vecs = qd.track_eigenstate(p, g2s, basis, start_index=1)
        # energy evolves continuously: no jumps larger than the local slope allows
        steps = np.abs(np.diff(energies))
        assert np.max(steps) < 0.3
        # adjacent tracked vectors overlap strongly
        ov = np.abs(np.sum(vecs[:, :-1].conj() * vecs[:, 1:], axis=0))
        assert np.min(ov) > 0.98

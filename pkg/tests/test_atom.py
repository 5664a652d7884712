"""Atom-model physics: couplings, propagation, composite pulses."""

import numpy as np
import pytest

from quoctlab import atom as qat


TWO_PI = 2 * np.pi


@pytest.fixture(scope="module")
def deep_space():
    # the strong-drive composites mix several ladder rungs; m_max=6 is
    # converged (identical to m_max=8 at the 1e-5 level)
    return qat.AtomSpace(m_max=6, with_nuclear=False)


class TestLambDicke:
    def test_clock_transition_value(self):
        eta = qat.lamb_dicke_parameter(
            578.4e-9, 171 * qat.ATOMIC_MASS_UNIT, TWO_PI * 100e3
        )
        assert eta == pytest.approx(0.187, abs=0.001)

    def test_scaling_with_trap_freq(self):
        e1 = qat.lamb_dicke_parameter(578.4e-9, qat.YB171_MASS, TWO_PI * 100e3)
        e4 = qat.lamb_dicke_parameter(578.4e-9, qat.YB171_MASS, TWO_PI * 400e3)
        assert e1 / e4 == pytest.approx(2.0, rel=1e-12)

    def test_scaling_with_mass(self):
        e1 = qat.lamb_dicke_parameter(578.4e-9, qat.YB171_MASS, TWO_PI * 100e3)
        e4 = qat.lamb_dicke_parameter(578.4e-9, 4 * qat.YB171_MASS, TWO_PI * 100e3)
        assert e1 / e4 == pytest.approx(2.0, rel=1e-12)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            qat.lamb_dicke_parameter(-1e-9, qat.YB171_MASS, TWO_PI * 100e3)


class TestSidebandElements:
    def test_first_red_sideband(self):
        eta = 0.187
        assert qat.sideband_matrix_element(1, 0, eta) == pytest.approx(
            eta * np.exp(-eta ** 2 / 2), rel=1e-12
        )
        assert qat.sideband_matrix_element(1, 0, 0.187) == pytest.approx(0.1838, abs=2e-4)

    def test_second_rung_sqrt2_enhancement(self):
        eta = 0.187
        ratio = qat.sideband_matrix_element(2, 1, eta) / qat.sideband_matrix_element(1, 0, eta)
        # sqrt(2) with the first Lamb-Dicke correction (1 - eta^2/2)
        assert ratio == pytest.approx(np.sqrt(2) * (1 - eta ** 2 / 2), rel=1e-10)

    def test_carrier_limit(self):
        assert qat.sideband_matrix_element(0, 0, 1e-14) == pytest.approx(1.0)

    def test_symmetric(self):
        assert qat.sideband_matrix_element(3, 1, 0.2) == pytest.approx(
            qat.sideband_matrix_element(1, 3, 0.2), rel=1e-12
        )


class TestDriveHamiltonian:
    def test_red_sideband_resonances(self):
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        p = qat.Pulse(rabi=TWO_PI * 10e3, sideband=-1, polarization="pi")
        h = qat.drive_hamiltonian(sp, p)
        # resonant pairs are degenerate in the drive frame
        d = np.diag(h).real
        assert d[sp.index(1, 0, 0)] == pytest.approx(d[sp.index(0, 0, 1)])
        assert d[sp.index(1, 0, 1)] == pytest.approx(d[sp.index(0, 0, 2)])
        # with rate ratio ~ sqrt(2)
        c10 = abs(h[sp.index(1, 0, 0), sp.index(0, 0, 1)])
        c21 = abs(h[sp.index(1, 0, 1), sp.index(0, 0, 2)])
        assert c21 / c10 == pytest.approx(np.sqrt(2) * (1 - sp.eta ** 2 / 2), rel=1e-10)
        # carrier couplings sit at detuning +omega in this frame
        assert d[sp.index(1, 0, 0)] - d[sp.index(0, 0, 0)] == pytest.approx(sp.trap_freq)

    def test_blue_sideband_resonances(self):
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        p = qat.Pulse(rabi=TWO_PI * 10e3, sideband=+1, polarization="pi")
        h = qat.drive_hamiltonian(sp, p)
        d = np.diag(h).real
        assert d[sp.index(1, 0, 2)] == pytest.approx(d[sp.index(0, 0, 1)])
        assert d[sp.index(1, 0, 1)] == pytest.approx(d[sp.index(0, 0, 0)])

    def test_pi_polarization_preserves_n(self):
        sp = qat.AtomSpace(m_max=2, with_nuclear=True)
        h = qat.drive_hamiltonian(sp, qat.Pulse(rabi=TWO_PI * 10e3, polarization="pi"))
        for n_from in (0, 1):
            for n_to in (0, 1):
                blk = h[
                    np.ix_(
                        [sp.index(1, n_to, m) for m in range(3)],
                        [sp.index(0, n_from, m) for m in range(3)],
                    )
                ]
                if n_from == n_to:
                    assert np.max(np.abs(blk)) > 0
                else:
                    assert np.max(np.abs(blk)) == 0

    def test_sigma_polarizations_couple_one_stretched_transition(self):
        sp = qat.AtomSpace(m_max=2, with_nuclear=True)
        for pol, n_pair in (("sigma+", (1, 0)), ("sigma-", (0, 1))):
            h = qat.drive_hamiltonian(sp, qat.Pulse(rabi=TWO_PI * 10e3, polarization=pol))
            n_from, n_to = n_pair
            good = h[
                np.ix_(
                    [sp.index(1, n_to, m) for m in range(3)],
                    [sp.index(0, n_from, m) for m in range(3)],
                )
            ]
            assert np.max(np.abs(good)) > 0
            bad = h[
                np.ix_(
                    [sp.index(1, 1 - n_to, m) for m in range(3)],
                    [sp.index(0, 1 - n_from, m) for m in range(3)],
                )
            ]
            assert np.max(np.abs(bad)) == 0

    def test_hermitian(self):
        sp = qat.AtomSpace(m_max=3, with_nuclear=True)
        for pol in ("pi", "sigma+", "sigma-"):
            h = qat.drive_hamiltonian(sp, qat.Pulse(rabi=TWO_PI * 20e3, sideband=-1, polarization=pol, phase=0.7))
            assert np.max(np.abs(h - h.conj().T)) < 1e-9


class TestPropagate:
    def test_empty_train_is_identity(self):
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        assert np.array_equal(qat.propagate(sp, []), np.eye(sp.dim))

    def test_unitarity(self):
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        pulses = [
            qat.Pulse(rabi=TWO_PI * 12e3, sideband=-1, phase=ph, theta=th)
            for ph, th in ((0.0, 1.2), (2.1, 4.4), (0.9, 0.4))
        ]
        u = qat.propagate(sp, pulses)
        assert np.max(np.abs(u @ u.conj().T - np.eye(sp.dim))) < 1e-9

    def test_resonant_pi_pulse_transfers(self):
        # modest Rabi frequency keeps uncompensated light shifts small
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        p = qat.Pulse(rabi=TWO_PI * 3e3, sideband=-1, theta=np.pi)
        u = qat.propagate(sp, [p])
        pop = abs(u[sp.index(1, 0, 0), sp.index(0, 0, 1)]) ** 2
        assert pop >= 0.99

    def test_echo_property(self):
        # residual echo error comes from uncompensated light shifts and
        # scales as Omega^2, so probe well inside the resolved regime
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        fwd = qat.Pulse(rabi=TWO_PI * 1e3, sideband=-1, phase=0.0, theta=np.pi)
        bwd = qat.Pulse(rabi=TWO_PI * 1e3, sideband=-1, phase=np.pi, theta=np.pi)
        u = qat.propagate(sp, [fwd, bwd])
        for idx in (sp.index(0, 0, 1), sp.index(1, 0, 0)):
            assert abs(u[idx, idx]) ** 2 > 0.99

    def test_mixed_frequency_train_rejected(self):
        sp = qat.AtomSpace(m_max=3, with_nuclear=False)
        with pytest.raises(ValueError):
            qat.propagate(
                sp,
                [
                    qat.Pulse(rabi=TWO_PI * 3e3, sideband=-1),
                    qat.Pulse(rabi=TWO_PI * 3e3, sideband=+1),
                ],
            )


class TestMotionPreservingPulse:
    @pytest.fixture()
    def space(self, deep_space):
        return deep_space

    def test_optimum_meets_thresholds(self, space):
        met = qat.mpp_metrics(space, TWO_PI * 810e3)
        assert max(met["infidelity"].values()) < 1e-3
        assert max(abs(v) for v in met["delta_m"].values()) < 1e-3

    def test_interior_optimum_in_band(self, space):
        freqs = TWO_PI * np.array([700e3, 810e3, 900e3])
        infs = [max(qat.mpp_metrics(space, f)["infidelity"].values()) for f in freqs]
        assert infs[1] < infs[0] and infs[1] < infs[2]

    def test_motional_superposition_preserved(self, space):
        u = qat.propagate(space, qat.corpse_mpp(TWO_PI * 810e3))
        a0 = u[space.index(1, 0, 0), space.index(0, 0, 0)]
        a1 = u[space.index(1, 0, 1), space.index(0, 0, 1)]
        rel = np.degrees(np.angle(a1 / a0))
        assert abs(rel) < 1.0


class TestHadamardPulse:
    @pytest.fixture()
    def space(self, deep_space):
        return deep_space

    def test_zero_duration_identity(self, space):
        u = qat.propagate(space, qat.hadamard_pulse(TWO_PI * 350e3, 0.0))
        assert np.max(np.abs(u - np.eye(space.dim))) < 1e-12

    def test_published_operating_point(self, space):
        # published optimum (2 pi x 350 kHz, 5.1 us); this model's floor in
        # a +-15% box is ~1.4e-3 for both metrics, i.e. the same order as
        # the quoted <~1e-3 (level-structure details shift the exact value)
        duration = qat.hadamard_duration(TWO_PI * 350e3, half_cycles=5)
        assert duration == pytest.approx(5.1e-6, rel=0.02)
        met = qat.hadamard_metrics(space, TWO_PI * 350e3, duration)
        assert max(met["infidelity"].values()) < 2e-3
        assert max(abs(v) for v in met["delta_m"].values()) < 2e-3

    def test_box_minimum_same_order_as_quoted(self, space):
        best = np.inf
        for f in TWO_PI * np.array([340e3, 350e3, 360e3]):
            for t in np.linspace(0.95 * 5.05e-6, 1.05 * 5.05e-6, 7):
                met = qat.hadamard_metrics(space, f, t)
                score = max(
                    max(met["infidelity"].values()),
                    max(abs(v) for v in met["delta_m"].values()),
                )
                best = min(best, score)
        assert best < 2e-3


class TestValidation:
    def test_space_needs_room_for_shelving(self):
        with pytest.raises(ValueError):
            qat.AtomSpace(m_max=1)

    def test_pulse_validation(self):
        with pytest.raises(ValueError):
            qat.Pulse(rabi=-1.0)
        with pytest.raises(ValueError):
            qat.Pulse(rabi=1.0, sideband=2)
        with pytest.raises(ValueError):
            qat.Pulse(rabi=1.0, polarization="linear")

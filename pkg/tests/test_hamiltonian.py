"""Hamiltonian assembly, symmetries, and sector structure."""

import numpy as np
import pytest

from quoctlab import algebra as qa
from quoctlab import hamiltonian as qh


def basis_vec(dim, idx):
    v = np.zeros(dim)
    v[idx] = 1.0
    return v


def quoct_index(*site_states):
    """Register index of a product of quoct basis labels."""
    idx = 0
    for s in site_states:
        idx = 8 * idx + qa.BASIS_LABELS.index(s)
    return idx


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            qh.LatticeParams(L=0)
        with pytest.raises(ValueError):
            qh.LatticeParams(L=1, a=0.0)
        with pytest.raises(ValueError):
            qh.LatticeParams(L=1, g=-1.0)

    def test_dimensions(self):
        assert qh.LatticeParams(L=1).dim == 64
        assert qh.LatticeParams(L=2).dim == 4096


class TestKinetic:
    def test_pair_creation_element(self):
        terms = qh.build_full(qh.LatticeParams(L=1, a=1.0))
        amp = terms.kinetic.matrix[quoct_index("r", "r"), quoct_index("0", "0")]
        assert amp == pytest.approx(0.5)

    def test_baryon_annihilated(self):
        # |rgb, 0>: creation blocked by full quark site, annihilation by
        # the empty antiquark site
        kin = qh.build_kinetic(qh.LatticeParams(L=1)).matrix
        v = basis_vec(64, quoct_index("rgb", "0"))
        assert np.max(np.abs(kin @ v)) < 1e-15

    def test_pair_annihilation_from_full_register(self):
        # |rgb, rgb> holds three quark-antiquark pairs; one can annihilate
        kin = qh.build_kinetic(qh.LatticeParams(L=1)).matrix
        v = basis_vec(64, quoct_index("rgb", "rgb"))
        out = kin @ v
        assert np.linalg.norm(out) == pytest.approx(np.sqrt(3) / 2)

    def test_hermitian_traceless(self):
        kin = qh.build_kinetic(qh.LatticeParams(L=1)).matrix
        assert np.max(np.abs(kin - kin.conj().T)) < 1e-14
        assert abs(np.trace(kin)) < 1e-14

    def test_spacing_scaling(self):
        k1 = qh.build_kinetic(qh.LatticeParams(L=1, a=1.0)).matrix
        k2 = qh.build_kinetic(qh.LatticeParams(L=1, a=2.0)).matrix
        assert np.max(np.abs(k1 - 2.0 * k2)) < 1e-14


class TestMassChem:
    def test_weighted_diagonals(self):
        p = qh.LatticeParams(L=1, m=2.0, mu=0.2)
        mass, chem = qh.build_mass_chem(p)
        d = np.diag(mass.matrix + chem.matrix).real
        assert d[quoct_index("rgb", "0")] == pytest.approx(6.6)
        assert d[quoct_index("0", "rgb")] == pytest.approx(5.4)

    def test_zero_mu_kills_chem(self):
        _, chem = qh.build_mass_chem(qh.LatticeParams(L=1, m=1.0, mu=0.0))
        assert not np.any(chem.matrix)


class TestElectric:
    def test_l1_is_half_casimir(self):
        p = qh.LatticeParams(L=1, a=1.0, g=1.0)
        elec = qh.build_electric(p).matrix
        expect = 0.5 * np.kron(qa.casimir().matrix, np.eye(8))
        assert np.max(np.abs(elec - expect)) < 1e-14
        d = np.diag(elec).real
        assert d[quoct_index("r", "0")] == pytest.approx(2.0 / 3.0)
        assert d[quoct_index("r", "rgb")] == pytest.approx(2.0 / 3.0)

    def test_zero_coupling(self):
        assert not np.any(qh.build_electric(qh.LatticeParams(L=1, g=0.0)).matrix)

    def test_l2_pair_count(self):
        # pairs (m, m') with m < m' <= 2L-2 = 2: (0,1), (0,2), (1,2)
        pairs = [(m, mp) for m in range(3) for mp in range(m + 1, 3)]
        assert len(pairs) == 3

    def test_g_squared_scaling(self):
        e1 = qh.build_electric(qh.LatticeParams(L=1, g=1.0)).matrix
        e2 = qh.build_electric(qh.LatticeParams(L=1, g=2.0)).matrix
        assert np.max(np.abs(4.0 * e1 - e2)) < 1e-14


class TestPenalty:
    def test_vacuum_annihilated(self):
        pen = qh.build_penalty(qh.LatticeParams(L=1, penalty_weight=1.0)).matrix
        assert np.max(np.abs(pen @ basis_vec(64, 0))) < 1e-14

    def test_non_singlet_lifted(self):
        pen = qh.build_penalty(qh.LatticeParams(L=1, penalty_weight=1.0)).matrix
        v = basis_vec(64, quoct_index("r", "0"))
        assert np.linalg.norm(pen @ v) > 0.1

    def test_color_singlet_combination_annihilated(self):
        pen = qh.build_penalty(qh.LatticeParams(L=1, penalty_weight=1.0)).matrix
        v = np.zeros(64)
        for c in ("r", "g", "b"):
            v[quoct_index(c, c)] = 1.0 / np.sqrt(3)
        assert np.max(np.abs(pen @ v)) < 1e-13

    def test_positive_semidefinite(self):
        pen = qh.build_penalty(qh.LatticeParams(L=1, penalty_weight=0.7)).matrix
        vals = np.linalg.eigvalsh(pen)
        assert vals.min() >= -1e-10

    def test_disabled_by_default(self):
        assert not np.any(qh.build_penalty(qh.LatticeParams(L=1)).matrix)


class TestAssembly:
    def test_total_is_sum_and_hermitian(self):
        terms = qh.build_full(qh.LatticeParams(L=1, a=1.0, m=1.0, mu=0.0, g=1.0))
        s = (
            terms.kinetic.matrix
            + terms.mass.matrix
            + terms.chem.matrix
            + terms.electric.matrix
            + terms.penalty.matrix
        )
        assert np.array_equal(terms.total.matrix, s)
        assert terms.total.is_hermitian(1e-10)
        assert np.max(np.abs(terms.total.matrix.imag)) < 1e-14  # real in this basis

    def test_each_term_hermitian(self):
        terms = qh.build_full(qh.LatticeParams(L=2, a=1.0, m=1.0, mu=0.2, g=0.7))
        for t in (terms.kinetic, terms.mass, terms.chem, terms.electric):
            assert t.is_hermitian(1e-10)

    def test_free_limit(self):
        terms = qh.build_full(qh.LatticeParams(L=1, a=1.0, m=0.5, mu=0.1, g=0.0))
        expect = terms.kinetic.matrix + terms.mass.matrix + terms.chem.matrix
        assert np.max(np.abs(terms.total.matrix - expect)) < 1e-14


class TestSymmetries:
    @pytest.mark.parametrize("L", [1, 2])
    def test_baryon_number_conserved(self, L):
        terms = qh.build_full(qh.LatticeParams(L=L, a=1.0, m=1.0, mu=0.2, g=0.7))
        h = terms.total.matrix
        nb = np.diag(qh.baryon_number_op(L).matrix).real
        comm = h * nb[None, :] - nb[:, None] * h
        assert np.max(np.abs(comm)) < 1e-10

    @pytest.mark.parametrize("L", [1, 2])
    def test_global_color_symmetry(self, L):
        terms = qh.build_full(qh.LatticeParams(L=L, a=1.0, m=1.0, mu=0.2, g=0.7))
        h = terms.total.matrix
        for a in range(1, 9):
            q = qh.total_charge(a, L)
            # Qh - hQ with the sparse factor kept on the left of each product
            comm = (q @ h) - (q.T @ h.T).T
            assert np.max(np.abs(comm)) < 1e-10

    def test_charges_on_distinct_sites_commute(self):
        for a in range(1, 9):
            for b in range(1, 9):
                qa_mat = np.kron(qa.charge_matrix(a, "even"), np.eye(8))
                qb_mat = np.kron(np.eye(8), qa.charge_matrix(b, "odd"))
                assert np.max(np.abs(qa_mat @ qb_mat - qb_mat @ qa_mat)) < 1e-14


class TestBaryonNumber:
    def test_eigenvalues(self):
        nb = np.diag(qh.baryon_number_op(1).matrix).real
        assert nb[quoct_index("rgb", "0")] == pytest.approx(1.0)
        assert nb[quoct_index("0", "rgb")] == pytest.approx(-1.0)
        assert nb[0] == pytest.approx(0.0)
        # all entries are integer multiples of 1/3
        assert np.allclose(np.round(nb * 3), nb * 3)


class TestSingletSector:
    def test_rank_l1(self):
        assert qh.singlet_basis(1).shape[1] == 6

    def test_projector_idempotent_hermitian(self):
        proj = qh.singlet_projector(1).matrix
        assert np.max(np.abs(proj @ proj - proj)) < 1e-12
        assert np.max(np.abs(proj - proj.conj().T)) < 1e-12

    def test_baryon_state_in_singlet_sector(self):
        proj = qh.singlet_projector(1).matrix
        v = basis_vec(64, quoct_index("rgb", "0"))
        assert np.max(np.abs(proj @ v - v)) < 1e-12

    def test_colored_state_rejected(self):
        proj = qh.singlet_projector(1).matrix
        v = basis_vec(64, quoct_index("r", "0"))
        assert np.linalg.norm(proj @ v) < 1e-9

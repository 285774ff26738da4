import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qetcool import errors
from qetcool.model import (
    AncillaModel,
    ChainModel3,
    TwoQubitModel,
    gibbs_state,
    ground_state_2q,
    hamiltonian_2q,
    hamiltonian_chain3,
)
from qetcool.optimize import decode_povm
from qetcool.protocols import (
    EXAMPLE_J,
    EXAMPLE_K,
    BobRotation,
    PovmX,
    PpaConfig,
    bath_polarization,
    bath_qubit,
    compress_with_correlations,
    compress_without_correlations,
    coupling_unitary,
    hotta_bob_rotation,
    povm_operators,
    ppa_compression_sort,
    ppa_reset,
    projective_x_povm,
    qet2_closed_forms,
    qet2_final_state,
    qet2a_initial_state,
    run_ppa,
    run_qet2,
    run_qet2a,
    run_srg2,
    srg2_round,
    srg2_weights,
    target_basis_order,
    target_purity,
    trivial_povm,
)
from qetcool.protocols.hbac import sort_permutation
from qetcool.qcore import (
    basis_index,
    is_density_matrix,
    kron,
    maximally_mixed,
    partial_trace,
    polarization,
    purity,
    random_density_matrix,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
I2 = np.eye(2)


def hotta_energy(h, k):
    """Energy extracted by the optimal projective protocol from the ground state."""
    xi = h * h + 2 * k * k
    return (np.sqrt(xi * xi + h * h * k * k) - xi) / np.hypot(h, k)


class TestPovm:
    def test_projective_is_complete_projector_pair(self):
        P0, P1 = povm_operators(projective_x_povm())
        assert np.allclose(P0 @ P0, P0)
        assert np.allclose(P0 + P1, I2)
        assert np.allclose(P0, (I2 + X) / 2)

    def test_trivial(self):
        M0, M1 = povm_operators(trivial_povm())
        assert np.allclose(M0, I2) and np.allclose(M1, 0)

    def test_incomplete_rejected(self):
        with pytest.raises(errors.IncompletePovm):
            povm_operators(PovmX(m=(0.5, 0.5), l=(0.5, 0.5)))

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds)
    def test_decoded_povms_complete(self, seed):
        p = decode_povm(np.random.default_rng(seed).uniform(-10, 10, 3))
        norm, cross = p.completeness_residuals()
        assert abs(norm) < 1e-12 and abs(cross) < 1e-12
        povm_operators(p)


class TestQet2Ground:
    @pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 5.0, 10.0])
    def test_hotta_energy_matches_closed_form(self, k):
        m = TwoQubitModel(1.0, k)
        p = projective_x_povm()
        out = run_qet2(ground_state_2q(m), m, p, hotta_bob_rotation(m, p))
        assert out.energy_extracted_B == pytest.approx(hotta_energy(1.0, k), abs=1e-12)
        assert out.energy_extracted_B > 0

    def test_frozen_k1(self):
        m = TwoQubitModel(1.0, 1.0)
        p = projective_x_povm()
        b = hotta_bob_rotation(m, p)
        out = run_qet2(ground_state_2q(m), m, p, b)
        assert b.omega_plus == pytest.approx(-0.5 * np.arctan(1 / 3), abs=1e-12)
        assert b.omega_minus == pytest.approx(0.5 * np.arctan(1 / 3), abs=1e-12)
        assert out.purity_B_initial == pytest.approx(0.75)
        assert out.purity_B == pytest.approx(0.6, abs=1e-12)
        assert out.energy_injected_A == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    def test_k0_is_null(self):
        m = TwoQubitModel(1.0, 0.0)
        p = projective_x_povm()
        out = run_qet2(ground_state_2q(m), m, p, hotta_bob_rotation(m, p))
        assert out.energy_extracted_B == 0
        assert out.purity_B == out.purity_B_initial == 1.0

    def test_trivial_protocol_is_identity(self):
        m = TwoQubitModel(1.0, 2.0)
        rho = gibbs_state(hamiltonian_2q(m), 0.7)
        out = run_qet2(rho, m, trivial_povm(), BobRotation(0.0, 0.0))
        assert np.allclose(out.rho_final, rho)
        assert out.energy_injected_A == pytest.approx(0, abs=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_against_kraus_oracle(self, seed):
        rng = np.random.default_rng(seed)
        m = TwoQubitModel(1.0, float(rng.uniform(0, 8)))
        rho = random_density_matrix(2, rng)
        p = decode_povm(rng.uniform(-np.pi, np.pi, 3))
        b = BobRotation(*rng.uniform(-np.pi, np.pi, 2))
        ref = np.zeros((4, 4), dtype=complex)
        for mu in (0, 1):
            M = p.m[mu] * I2 + p.l[mu] * X
            U = expm(1j * b.omegas[mu] * Y)
            K = np.kron(M, U)
            ref += K @ rho @ K.conj().T
        out = run_qet2(rho, m, p, b)
        assert np.allclose(out.rho_final, ref, atol=1e-12)
        assert np.allclose(qet2_final_state(rho, povm_operators(p), b.omegas), ref, atol=1e-12)
        assert sum(pr for pr, _ in out.per_branch) == pytest.approx(1.0)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, k=st.sampled_from([0.3, 1.0, 5.0]))
    def test_closed_forms(self, seed, k):
        rng = np.random.default_rng(seed)
        m = TwoQubitModel(1.0, k)
        p = decode_povm(rng.uniform(-np.pi, np.pi, 3))
        b = BobRotation(*rng.uniform(-np.pi, np.pi, 2))
        out = run_qet2(ground_state_2q(m), m, p, b)
        pur, pol = qet2_closed_forms(m, p, b)
        assert out.purity_B == pytest.approx(pur, abs=1e-10)
        assert out.polarization_B == pytest.approx(pol, abs=1e-10)

    def test_closed_forms_need_alpha_zero(self):
        p = PovmX(m=(0.5, 0.5), l=(0.5, -0.5), alpha=(0.1, 0.0))
        with pytest.raises(ValueError):
            qet2_closed_forms(TwoQubitModel(1.0, 1.0), p, BobRotation(0, 0))

    def test_wrong_size(self):
        with pytest.raises(errors.BadIndex):
            run_qet2(maximally_mixed(3), TwoQubitModel(), projective_x_povm(), BobRotation(0, 0))


class TestQet2a:
    def _oracle(self, rho, J, K):
        paulis = (X, Y, np.diag([1.0, -1.0]).astype(complex))

        def U(c, slot):
            G = sum(c[i][j] * kron(*[paulis[i] if s == slot else (paulis[j] if s == 2 else I2) for s in range(3)])
                    for i in range(3) for j in range(3))
            return expm(1j * G)

        V = U(K, 1) @ U(J, 0)
        return V @ rho @ V.conj().T

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        m, anc, beta = TwoQubitModel(1.0, float(rng.uniform(0, 6))), AncillaModel(1.0), float(rng.uniform(0, 3))
        J, K = rng.uniform(-1, 1, (3, 3)), rng.uniform(-1, 1, (3, 3))
        out = run_qet2a(m, anc, beta, J, K)
        ref = self._oracle(qet2a_initial_state(m, anc, beta), J, K)
        assert np.allclose(out.rho_final, ref, atol=1e-12)

    def test_example_frozen(self):
        # frozen from the independent dense oracle (zero couplings give the initial value)
        out = run_qet2a(TwoQubitModel(1.0, 5.0), AncillaModel(1.0), 2.0, EXAMPLE_J, EXAMPLE_K)
        assert out.purity_B_initial == pytest.approx(0.5068711364088256, abs=1e-12)
        assert out.purity_B == pytest.approx(0.5021042812548744, abs=1e-12)

    def test_zero_coupling_is_identity(self):
        U = coupling_unitary(np.zeros((3, 3)), 0, 3, 2)
        assert np.allclose(U, np.eye(8))

    def test_bad_pair(self):
        with pytest.raises(errors.BadIndex):
            coupling_unitary(EXAMPLE_J, 2, 3, 2)


class TestSorting:
    def test_target_order_ground_block_first(self):
        order = target_basis_order(3, 1)
        assert order[0] == basis_index((0, 0, 0))
        # first half has target qubit in its ground state
        assert all(idx in {basis_index(l) for l in [(a, 0, c) for a in (0, 1) for c in (0, 1)]}
                   for idx in order[:4])

    def test_sorted_input_gives_identity(self):
        order = target_basis_order(2, 1)
        vals = np.zeros(4)
        vals[order] = [0.4, 0.3, 0.2, 0.1]
        assert np.allclose(sort_permutation(vals, order), np.eye(4))

    def test_ties_are_stable(self):
        order = target_basis_order(2, 1)
        assert np.allclose(sort_permutation(np.full(4, 0.25), order), np.eye(4))

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, n=st.sampled_from([2, 3]))
    def test_sort_is_decreasing_along_order(self, seed, n):
        rho = random_density_matrix(n, np.random.default_rng(seed))
        for t in range(n):
            P, out = ppa_compression_sort(rho, t)
            d = np.real(np.diag(out))[target_basis_order(n, t)]
            assert np.all(np.diff(d) <= 1e-15)
            assert np.allclose(P @ P.T, np.eye(1 << n))


class TestPpa:
    def test_bath_qubit(self):
        assert polarization(bath_qubit(0.3)) == pytest.approx(0.3)

    def test_reset_replaces_marginal(self):
        rho = random_density_matrix(3, np.random.default_rng(4))
        out = ppa_reset(rho, [2], 0.2)
        assert np.allclose(partial_trace(out, [2]), bath_qubit(0.2))
        assert np.allclose(partial_trace(out, [0, 1]), partial_trace(rho, [0, 1]))

    def test_ppa2(self):
        tr = run_ppa(PpaConfig(2, 0.3))
        assert tr.polarizations[1] == pytest.approx(0.3, abs=1e-12)
        assert tr.converged

    def test_ppa3_limit(self):
        tr = run_ppa(PpaConfig(3, 0.01))
        assert tr.converged and tr.rounds <= 200
        assert tr.final_polarization == pytest.approx(2 * 0.01 / (1 + 0.01**2), abs=5e-6)
        assert all(b >= a - 1e-15 for a, b in zip(tr.polarizations, tr.polarizations[1:]))

    def test_strict_raises(self):
        with pytest.raises(errors.NoConvergence):
            run_ppa(PpaConfig(3, 0.3, max_rounds=1), strict=True)

    @pytest.mark.parametrize("kw", [dict(n_qubits=4, bath_polarization=0.1),
                                    dict(n_qubits=2, bath_polarization=1.0),
                                    dict(n_qubits=2, bath_polarization=0.1, max_rounds=0)])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            PpaConfig(**kw)

    def test_target_cannot_reset(self):
        with pytest.raises(errors.BadIndex):
            run_ppa(PpaConfig(2, 0.1, target=0))

    def test_gibbs_bath_matches_marginal(self):
        m = TwoQubitModel(1.0, 5.0)
        eps = bath_polarization(m, 2.0, "gibbs")
        assert eps == pytest.approx(polarization(partial_trace(gibbs_state(hamiltonian_2q(m), 2.0), [1])))
        assert bath_polarization(m, 2.0, "bare") == pytest.approx(np.tanh(2.0))


class TestSrg2:
    def test_weights_normalized(self):
        H = hamiltonian_2q(TwoQubitModel(1.0, 5.0))
        for bath in ("gibbs", "bare"):
            w = srg2_weights(H, 1.0, bath)
            assert sum(w) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            srg2_weights(H, 1.0, "other")

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, beta=st.floats(0, 5))
    def test_round_is_valid_channel_output(self, seed, beta):
        H = hamiltonian_2q(TwoQubitModel(1.0, 2.0))
        rho = random_density_matrix(2, np.random.default_rng(seed))
        assert is_density_matrix(srg2_round(rho, beta, H))

    def test_fixed_point_beats_rethermalization(self):
        m = TwoQubitModel(1.0, 5.0)
        H = hamiltonian_2q(m)
        rho = gibbs_state(H, 1.0)
        tr = run_srg2(rho, 1.0, H)
        assert tr.converged
        assert tr.final_purity > purity(partial_trace(rho, [1]))


class TestCompression:
    @pytest.mark.parametrize("k,beta", [(1.0, 0.5), (3.0, 2.0), (0.0, 1.0)])
    def test_with_at_least_without(self, k, beta):
        rho = gibbs_state(hamiltonian_chain3(ChainModel3(1.0, k)), beta)
        U, w = compress_with_correlations(rho, 0)
        P, wo = compress_without_correlations(rho, 0)
        assert target_purity(w, 0) >= target_purity(wo, 0) - 1e-12
        assert np.allclose(U.conj().T @ U, np.eye(8))
        assert np.allclose(U @ rho @ U.conj().T, w, atol=1e-12)

    def test_uncoupled_chain_has_no_gap(self):
        rho = gibbs_state(hamiltonian_chain3(ChainModel3(1.0, 0.0)), 1.0)
        gap = target_purity(compress_with_correlations(rho, 0)[1], 0) - target_purity(
            compress_without_correlations(rho, 0)[1], 0)
        assert gap == pytest.approx(0.0, abs=1e-12)

    def test_pure_input_reaches_purity_one(self):
        rng = np.random.default_rng(8)
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        _, out = compress_with_correlations(np.outer(v, v.conj()), 2)
        assert target_purity(out, 2) == pytest.approx(1.0)

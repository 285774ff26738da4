import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qetcool.model as model_mod
from qetcool.model import (
    AncillaModel,
    ChainModel3,
    TwoQubitModel,
    gibbs_state,
    ground_state_2q,
    ground_vector_2q,
    hamiltonian_2q,
    hamiltonian_chain3,
    hamiltonian_with_ancilla,
    initial_metrics_B,
    reduced_metrics,
    shift_f,
    thermal_qubit,
)
from qetcool.qcore import SIGMA_X, basis_index, is_density_matrix, partial_trace, polarization, purity

ks = st.floats(min_value=0.0, max_value=20.0, allow_nan=False)


class TestHamiltonian:
    def test_frozen_entries_h1_k1(self):
        # derived by hand: shift 4 f = 2 sqrt(2), XX couples 11<->00 and 10<->01
        H = hamiltonian_2q(TwoQubitModel(1.0, 1.0))
        s = 2 * np.sqrt(2)
        i11, i10, i01, i00 = (basis_index(x) for x in ((1, 1), (1, 0), (0, 1), (0, 0)))
        assert H[i11, i11] == pytest.approx(2 + s)
        assert H[i00, i00] == pytest.approx(-2 + s)
        assert H[i10, i10] == pytest.approx(s)
        assert H[i11, i00] == pytest.approx(2.0)
        assert H[i10, i01] == pytest.approx(2.0)
        assert H[i11, i10] == 0

    @settings(max_examples=40, deadline=None)
    @given(k=ks)
    def test_ground_energy_zero(self, k):
        H = hamiltonian_2q(TwoQubitModel(1.0, k))
        assert abs(np.linalg.eigvalsh(H)[0]) < 1e-10

    @settings(max_examples=40, deadline=None)
    @given(k=ks)
    def test_ground_vector_is_eigenvector(self, k):
        m = TwoQubitModel(1.0, k)
        g = ground_vector_2q(m)
        assert np.linalg.norm(g) == pytest.approx(1.0)
        assert np.linalg.norm(hamiltonian_2q(m) @ g) < 1e-10

    def test_shift(self):
        assert shift_f(TwoQubitModel(1.0, 0.0)) == 1.0
        assert shift_f(TwoQubitModel(2.0, 0.0)) == 2.0

    def test_chain_and_ancilla_are_hermitian(self):
        Hc = hamiltonian_chain3(ChainModel3(1.0, 3.0))
        Ha = hamiltonian_with_ancilla(TwoQubitModel(1.0, 5.0), AncillaModel(0.7))
        for H in (Hc, Ha):
            assert H.shape == (8, 8)
            assert np.allclose(H, H.conj().T)
        # the ancilla is uncoupled: its marginal Gibbs state is a bare thermal qubit
        g = partial_trace(gibbs_state(Ha, 1.3), [2])
        assert np.allclose(g, thermal_qubit(0.7, 1.3))

    @pytest.mark.parametrize("bad", [dict(h=0.0), dict(h=-1.0), dict(k=-0.1)])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            TwoQubitModel(**bad)

    def test_ancilla_validation(self):
        with pytest.raises(ValueError):
            AncillaModel(-1.0)


class TestInitialMetrics:
    @pytest.mark.parametrize("k", [0.0, 0.5, 1.0, 2.0, 5.0, 10.0])
    def test_closed_form(self, k):
        m = TwoQubitModel(1.0, k)
        p, e = reduced_metrics(ground_state_2q(m), 1)
        p_ref, e_ref = initial_metrics_B(m)
        assert p == pytest.approx(p_ref, abs=1e-12)
        assert e == pytest.approx(e_ref, abs=1e-12)
        assert e == pytest.approx(np.sqrt(2 * p - 1), abs=1e-12)

    def test_frozen_values(self):
        # h = k = 1: purity 3/4, polarization 1/sqrt(2)
        p, e = reduced_metrics(ground_state_2q(TwoQubitModel(1.0, 1.0)), 1)
        assert p == pytest.approx(0.75, abs=1e-14)
        assert e == pytest.approx(0.70710678118654752, abs=1e-14)

    def test_symmetric_qubits(self):
        rho = ground_state_2q(TwoQubitModel(1.0, 2.0))
        assert np.allclose(partial_trace(rho, [0]), partial_trace(rho, [1]))

    def test_corrupted_pauli_breaks_invariant(self, monkeypatch):
        # negative control: the checks must notice a wrong single-qubit operator
        monkeypatch.setattr(model_mod, "SIGMA_Z", SIGMA_X)
        H = hamiltonian_2q(TwoQubitModel(1.0, 1.0))
        assert abs(np.linalg.eigvalsh(H)[0]) > 1e-3


class TestGibbs:
    def test_limits(self):
        H = hamiltonian_2q(TwoQubitModel(1.0, 1.0))
        assert np.allclose(gibbs_state(H, 0.0), np.eye(4) / 4)
        assert np.allclose(gibbs_state(H, 200.0), ground_state_2q(TwoQubitModel(1.0, 1.0)), atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(k=ks, beta=st.floats(min_value=0, max_value=50))
    def test_valid_and_stationary(self, k, beta):
        H = hamiltonian_2q(TwoQubitModel(1.0, k))
        g = gibbs_state(H, beta)
        assert is_density_matrix(g)
        assert np.max(np.abs(g @ H - H @ g)) < 1e-9

    def test_thermal_qubit(self):
        r = thermal_qubit(1.0, 0.5)
        assert polarization(r) == pytest.approx(np.tanh(0.5))
        assert purity(r) == pytest.approx((1 + np.tanh(0.5) ** 2) / 2)

    @pytest.mark.parametrize("beta", [-1.0, float("inf"), float("nan")])
    def test_bad_beta(self, beta):
        with pytest.raises(ValueError):
            gibbs_state(np.eye(2), beta)

"""
Quantum-energy-teleportation cooling: the measurement-based two-qubit
protocol (QET-2) and its fully unitary ancilla variant (QET-2A).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BadIndex, DegenerateBranch, IncompletePovm
from ..model import (
    AncillaModel,
    TwoQubitModel,
    gibbs_state,
    hamiltonian_2q,
    hamiltonian_with_ancilla,
    thermal_qubit,
)
from ..qcore import (
    IDENTITY2,
    PAULI_AXES,
    SIGMA_X,
    SIGMA_Y,
    embed,
    expected_energy,
    expm_hermitian,
    kron,
    num_qubits,
    partial_trace,
    pauli,
    polarization,
    purity,
)

BRANCH_CUTOFF = 1e-14

PROJECTIVE_X = ((IDENTITY2 + SIGMA_X) / 2, (IDENTITY2 - SIGMA_X) / 2)


@dataclass(frozen=True)
class PovmX:
    """Two-outcome measurement ``M(mu) = e^{i delta}(m + e^{i alpha} l SIGMA_X)``.

    Index 0 of every pair is the outcome ``mu = +1``, index 1 is ``mu = -1``.
    """

    m: tuple[float, float]
    l: tuple[float, float]
    alpha: tuple[float, float] = (0.0, 0.0)
    delta: tuple[float, float] = (0.0, 0.0)

    def completeness_residuals(self) -> tuple[float, float]:
        norm = sum(m * m + l * l for m, l in zip(self.m, self.l)) - 1.0
        cross = sum(m * l * np.cos(a) for m, l, a in zip(self.m, self.l, self.alpha))
        return norm, cross

    def p_A(self, mu: int) -> float:
        return self.m[mu] ** 2 + self.l[mu] ** 2

    def q_A(self, mu: int) -> float:
        return 2 * self.l[mu] * self.m[mu] * np.cos(self.alpha[mu])


def projective_x_povm() -> PovmX:
    """Projective measurement of SIGMA_X on A: ``M_pm = (1 pm SIGMA_X)/2``."""
    return PovmX(m=(0.5, 0.5), l=(0.5, -0.5))


def trivial_povm() -> PovmX:
    """No measurement: ``M_+ = 1``, ``M_- = 0``."""
    return PovmX(m=(1.0, 0.0), l=(0.0, 0.0))


def povm_operators(p: PovmX, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    ops = tuple(
        np.exp(1j * d) * (m * IDENTITY2 + np.exp(1j * a) * l * SIGMA_X)
        for m, l, a, d in zip(p.m, p.l, p.alpha, p.delta)
    )
    resid = sum(M.conj().T @ M for M in ops) - IDENTITY2
    if np.max(np.abs(resid)) > tol:
        raise IncompletePovm(f"sum M^dag M deviates from identity by {np.max(np.abs(resid)):.3g}")
    return ops


@dataclass(frozen=True)
class BobRotation:
    omega_plus: float
    omega_minus: float

    @property
    def omegas(self) -> tuple[float, float]:
        return self.omega_plus, self.omega_minus


def bob_unitary(omega: float) -> np.ndarray:
    """``cos(omega) 1 + i sin(omega) SIGMA_Y``."""
    return np.cos(omega) * IDENTITY2 + 1j * np.sin(omega) * SIGMA_Y


def hotta_bob_rotation(model: TwoQubitModel, p: PovmX) -> BobRotation:
    """Bob's energy-optimal rotation angles for each outcome."""
    h, k = model.h, model.k
    omegas = []
    for mu in (0, 1):
        pa, qa = p.p_A(mu), p.q_A(mu)
        a, b = (h * h + 2 * k * k) * pa, -h * k * qa
        if a * a + b * b <= 0:
            raise DegenerateBranch(f"outcome index {mu} has p_A = q_A = 0")
        omegas.append(0.5 * np.arctan2(b, a))
    return BobRotation(*omegas)


@dataclass
class ProtocolOutcome:
    rho_final: np.ndarray
    purity_B: float
    polarization_B: float
    energy_initial: float
    energy_injected_A: float
    energy_extracted_B: float
    purity_B_initial: float = float("nan")
    polarization_B_initial: float = float("nan")
    per_branch: list[tuple[float, np.ndarray]] = field(default_factory=list)

    @property
    def energy_final(self) -> float:
        return self.energy_initial + self.energy_injected_A - self.energy_extracted_B


def _qet2_branches(rho, ops, omegas):
    branches, post, final = [], np.zeros_like(rho), np.zeros_like(rho)
    for M, om in zip(ops, omegas):
        KA = np.kron(M, IDENTITY2)
        measured = KA @ rho @ KA.conj().T
        UB = np.kron(IDENTITY2, bob_unitary(om))
        rotated = UB @ measured @ UB.conj().T
        prob = float(np.real(np.trace(measured)))
        post += measured
        final += rotated
        branches.append((prob, rotated / prob if prob >= BRANCH_CUTOFF else rotated))
    return branches, post, final


def qet2_final_state(rho: np.ndarray, ops, omegas) -> np.ndarray:
    """Average post-protocol state ``sum_mu U_B M_A rho M_A^dag U_B^dag``."""
    final = np.zeros_like(rho)
    for M, om in zip(ops, omegas):
        K = np.kron(M, bob_unitary(om))
        final += K @ rho @ K.conj().T
    return final


def run_qet2(rho: np.ndarray, model: TwoQubitModel, p: PovmX, b: BobRotation) -> ProtocolOutcome:
    """POVM on A, classical message, conditional rotation on B."""
    if num_qubits(rho) != 2:
        raise BadIndex("QET-2 acts on a two-qubit state")
    ops = povm_operators(p)
    H = hamiltonian_2q(model)
    branches, post, final = _qet2_branches(rho, ops, b.omegas)
    e0, e_post, e_final = (expected_energy(r, H) for r in (rho, post, final))
    rho_B0 = partial_trace(rho, [1])
    rho_B = partial_trace(final, [1])
    return ProtocolOutcome(
        rho_final=final,
        purity_B=purity(rho_B),
        polarization_B=polarization(rho_B),
        energy_initial=e0,
        energy_injected_A=e_post - e0,
        energy_extracted_B=e_post - e_final,
        purity_B_initial=purity(rho_B0),
        polarization_B_initial=polarization(rho_B0),
        per_branch=branches,
    )


def qet2_closed_forms(model: TwoQubitModel, p: PovmX, b: BobRotation) -> tuple[float, float]:
    """Analytic final (purity, polarization) of B for ground-state QET-2.

    Valid for ``alpha = 0``.  The formulas are written in terms of the
    ``mu = -1`` branch parameters ``(m_1, l_1)`` and the angles
    ``Omega_0 = omega_plus``, ``Omega_1 = omega_minus``.  The polarization
    expression in this form evaluates ``Tr(SIGMA_Z rho_B)``; it is negated
    here to the ground-bias sign used by :func:`qetcool.qcore.polarization`.
    """
    if any(abs(a) > 1e-12 for a in p.alpha):
        raise ValueError("closed forms require alpha_mu = 0")
    h, k = model.h, model.k
    m1, l1 = p.m[1], p.l[1]
    o0, o1 = b.omega_plus, b.omega_minus
    r1 = l1 * l1 + m1 * m1
    d = o0 - o1
    pur = (2 / (h * h + k * k)) * (
        h * h / 2
        + k * k / 4
        - h * k * l1 * m1 * np.sin(2 * d)
        + (4 * k * k * l1 * l1 * m1 * m1 + h * h * (r1 - 1) * r1) * np.sin(d) ** 2
    )
    sz = (
        -h * np.cos(2 * o0)
        + 2 * k * l1 * m1 * (np.sin(2 * o0) - np.sin(2 * o1))
        + h * r1 * (np.cos(2 * o0) - np.cos(2 * o1))
    ) / np.hypot(h, k)
    return float(pur), float(-sz)


def probe_generator(c: np.ndarray) -> np.ndarray:
    """Two-qubit generator ``sum_ij c[i,j] sigma_i (x) sigma_j``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (3, 3):
        raise ValueError(f"coupling matrix must be 3x3, got {c.shape}")
    G = np.zeros((4, 4), dtype=complex)
    for i, ai in enumerate(PAULI_AXES):
        for j, aj in enumerate(PAULI_AXES):
            if c[i, j] != 0:
                G += c[i, j] * kron(pauli(ai), pauli(aj))
    return G


def coupling_unitary(c: np.ndarray, system_qubit: int, n: int, ancilla: int) -> np.ndarray:
    """``exp(i sum_ij c[i,j] sigma_i^{system} sigma_j^{ancilla})`` on ``n`` qubits."""
    if system_qubit == ancilla or not (0 <= system_qubit < n and 0 <= ancilla < n):
        raise BadIndex(f"bad qubit pair ({system_qubit}, {ancilla}) for n={n}")
    return embed(expm_hermitian(probe_generator(c), 1j), (system_qubit, ancilla), n)


def single_entry_coupling(axes: str, value: float = 1.0) -> np.ndarray:
    """Coupling matrix with one non-zero entry, e.g. ``single_entry_coupling("yy")``."""
    c = np.zeros((3, 3))
    c[PAULI_AXES.index(axes[0]), PAULI_AXES.index(axes[1])] = value
    return c


EXAMPLE_J = single_entry_coupling("yy")
EXAMPLE_K = single_entry_coupling("xz")


def qet2a_initial_state(model: TwoQubitModel, anc: AncillaModel, beta: float) -> np.ndarray:
    """Thermal AB pair (x) thermal ancilla, both at ``beta``."""
    return np.kron(gibbs_state(hamiltonian_2q(model), beta), thermal_qubit(anc.h_an, beta))


def run_qet2a(
    model: TwoQubitModel,
    anc: AncillaModel,
    beta: float,
    J: np.ndarray,
    K: np.ndarray,
) -> ProtocolOutcome:
    """Probe coupling A-ancilla with ``J``, then B-ancilla with ``K``.

    Qubit order is A, B, ancilla.  Energies are measured with the full
    three-body Hamiltonian.
    """
    rho0 = qet2a_initial_state(model, anc, beta)
    UA = coupling_unitary(J, 0, 3, 2)
    UB = coupling_unitary(K, 1, 3, 2)
    mid = UA @ rho0 @ UA.conj().T
    final = UB @ mid @ UB.conj().T
    H = hamiltonian_with_ancilla(model, anc)
    e0, e_mid, e_final = (expected_energy(r, H) for r in (rho0, mid, final))
    rho_B0 = partial_trace(rho0, [1])
    rho_B = partial_trace(final, [1])
    return ProtocolOutcome(
        rho_final=final,
        purity_B=purity(rho_B),
        polarization_B=polarization(rho_B),
        energy_initial=e0,
        energy_injected_A=e_mid - e0,
        energy_extracted_B=e_mid - e_final,
        purity_B_initial=purity(rho_B0),
        polarization_B_initial=polarization(rho_B0),
        per_branch=[(1.0, final)],
    )


def qet2a_closed_form_purity(h_a: float, h_b: float, h_c: float, k: float, beta: float) -> float:
    """Reference analytic expression for the example-coupling QET-2A purity.

    Transcribed literally, with ``sin^4(2)`` read as ``sin(2)**4`` and
    ``h_c`` taken as the ancilla field.  It does not reproduce the matrix
    simulation (see ``qetcool verify``); :func:`run_qet2a` is authoritative.
    """
    hm = (h_a - h_b) ** 2 + k * k
    hp = (h_a + h_b) ** 2 + k * k
    hr = np.sqrt(0.5 * (hm**2 + hp**2) - 8 * h_a**2 * h_b**2)
    sp, sm = np.sinh(np.sqrt(hp * beta)), np.sinh(np.sqrt(hm * beta))
    cp, cm = np.cosh(np.sqrt(hp * beta)), np.cosh(np.sqrt(hm * beta))
    tail = k * k * np.sin(2) ** 4 * np.tanh(beta * h_c) ** 2
    den = 2 * (cm + cp) ** 2 * hm * hp
    return float(
        0.5
        + hm * sp**2 * ((h_a + h_b) ** 2 + tail) / den
        + sm**2 * (hp * ((h_a - h_b) ** 2 + tail) + 2 * h_b**2 * hr) / den
        - 2 * hr * sp * sm * (h_a**2 + tail) / den
    )

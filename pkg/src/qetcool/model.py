"""
Hamiltonians and equilibrium states of the interacting qubit systems.

Energies are in units of the local field ``h`` and inverse temperatures
``beta`` in units of ``1/h``; ``beta`` is the standard ``1/(k_B T)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Z,
    embed,
    hermitian_eig,
    ket,
    kron,
    partial_trace,
    polarization,
    projector,
)


@dataclass(frozen=True)
class TwoQubitModel:
    """Parameters of the two-qubit QET Hamiltonian."""

    h: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"h must be > 0, got {self.h}")
        if not self.k >= 0:
            raise ValueError(f"k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class ChainModel3:
    """Open three-qubit chain A-B-C with nearest-neighbour XX coupling."""

    h: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"h must be > 0, got {self.h}")
        if not self.k >= 0:
            raise ValueError(f"k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class AncillaModel:
    h_an: float = 1.0

    def __post_init__(self):
        if not self.h_an >= 0:
            raise ValueError(f"h_an must be >= 0, got {self.h_an}")


def shift_f(model: TwoQubitModel) -> float:
    """Energy shift ``h^2 / sqrt(h^2 + k^2)`` that zeroes the ground energy."""
    h, k = model.h, model.k
    return h * h / np.hypot(h, k)


def hamiltonian_2q(model: TwoQubitModel) -> np.ndarray:
    """``H_A + H_B + V`` including the constant shifts, ground energy 0."""
    h, k = model.h, model.k
    f = shift_f(model)
    H = h * kron(SIGMA_Z, IDENTITY2) + h * kron(IDENTITY2, SIGMA_Z)
    H = H + 2 * k * kron(SIGMA_X, SIGMA_X)
    return H + (2 * f + 2 * (k * k) / (h * h) * f) * np.eye(4)


def ground_vector_2q(model: TwoQubitModel) -> np.ndarray:
    """``(F_- |11> - F_+ |00>) / sqrt(2)`` with ``F_pm = sqrt(1 pm f/h)``."""
    h, k = model.h, model.k
    n = np.hypot(h, k)
    r = h / n
    # 1 - r without cancellation for small k
    f_plus, f_minus = np.sqrt(1 + r), np.sqrt(k * k / (n * (n + h)))
    return (f_minus * ket("11") - f_plus * ket("00")) / np.sqrt(2)


def ground_state_2q(model: TwoQubitModel) -> np.ndarray:
    return projector(ground_vector_2q(model))


def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    """``exp(-beta H) / Z`` computed from the spectrum shifted by its minimum."""
    if not (np.isfinite(beta) and beta >= 0):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    w, v = hermitian_eig(H)
    p = np.exp(-beta * (w - w[0]))
    p /= p.sum()
    rho = (v * p) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def thermal_qubit(h: float, beta: float) -> np.ndarray:
    """Gibbs state of the bare qubit Hamiltonian ``h * SIGMA_Z``."""
    return gibbs_state(h * SIGMA_Z, beta)


def initial_metrics_B(model: TwoQubitModel) -> tuple[float, float]:
    """Closed-form (purity, polarization) of B in the ground state."""
    h2, k2 = model.h**2, model.k**2
    return (2 * h2 + k2) / (2 * (h2 + k2)), model.h / np.sqrt(h2 + k2)


def reduced_metrics(rho: np.ndarray, qubit: int) -> tuple[float, float]:
    """Brute-force (purity, polarization) of one qubit of ``rho``."""
    r = partial_trace(rho, [qubit])
    return float(np.real(np.trace(r @ r))), polarization(r)


def hamiltonian_chain3(model: ChainModel3) -> np.ndarray:
    h, k = model.h, model.k
    H = sum(h * embed(SIGMA_Z, q, 3) for q in range(3))
    XX = kron(SIGMA_X, SIGMA_X)
    return H + k * (embed(XX, (0, 1), 3) + embed(XX, (1, 2), 3))


def hamiltonian_with_ancilla(model: TwoQubitModel, anc: AncillaModel) -> np.ndarray:
    """``H_AB (x) 1 + 1 (x) h_an SIGMA_Z`` on A, B, ancilla (in that order)."""
    return np.kron(hamiltonian_2q(model), IDENTITY2) + np.kron(np.eye(4), anc.h_an * SIGMA_Z)

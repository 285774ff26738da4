"""
Conventional heat-bath algorithmic cooling baselines.

PPA-n sorts computational-basis populations and swaps reset qubits for
fresh bath qubits.  SR-Gamma_2 flips A and then rethermalizes only the
``{|00>, |11>}`` subspace.  Neither uses coherences of the system state.

Bath models
-----------
``"gibbs"``
    The bath is a reservoir of identical interacting systems at the same
    ``beta``: fresh qubits carry the single-qubit marginal of the
    interacting Gibbs state, and the SR-Gamma_2 reset redistributes the
    ``|00>/|11>`` population in the ratio found in that Gibbs state.
``"bare"``
    Fresh qubits are free qubits of gap ``2h`` at ``beta`` and the
    SR-Gamma_2 weights use the diagonal (interaction-free) energies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import BadIndex, NoConvergence
from ..model import TwoQubitModel, gibbs_state, hamiltonian_2q
from ..qcore import (
    IDENTITY2,
    SIGMA_X,
    basis_index,
    basis_labels,
    maximally_mixed,
    num_qubits,
    partial_trace,
    polarization,
    purity,
    reorder_qubits,
)

BATH_MODELS = ("gibbs", "bare")


def bath_qubit(eps_b: float) -> np.ndarray:
    """Diagonal qubit with ground population ``(1 + eps_b)/2``."""
    return np.diag([(1 - eps_b) / 2, (1 + eps_b) / 2]).astype(complex)


def bath_polarization(model: TwoQubitModel, beta: float, bath: str = "gibbs") -> float:
    if bath == "gibbs":
        rho = gibbs_state(hamiltonian_2q(model), beta)
        return polarization(partial_trace(rho, [1]))
    if bath == "bare":
        return float(np.tanh(beta * model.h))
    raise ValueError(f"unknown bath model {bath!r}")


def target_basis_order(n: int, target: int) -> list[int]:
    """Array indices ordered target-ground block first, then lexicographic.

    Lexicographic order runs over the remaining qubits in index order with
    the physical label 0 (ground) before 1.
    """
    if not 0 <= target < n:
        raise BadIndex(f"target {target} out of range for {n} qubits")
    others = [q for q in range(n) if q != target]

    def key(idx):
        lab = basis_labels(idx, n)
        return (lab[target],) + tuple(lab[q] for q in others)

    return sorted(range(1 << n), key=key)


def sort_permutation(values: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Permutation matrix sending ``values`` in decreasing order onto ``order``.

    Ties keep their relative position in ``order`` (stable), so input that
    is already sorted along ``order`` maps to the identity.
    """
    order = np.asarray(order)
    ranked = order[np.argsort(-np.asarray(values)[order], kind="stable")]
    d = len(order)
    P = np.zeros((d, d))
    P[order, ranked] = 1.0
    return P


def ppa_compression_sort(rho: np.ndarray, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Population sort toward the target; returns ``(P, P rho P^T)``."""
    n = num_qubits(rho)
    if n not in (2, 3):
        raise ValueError(f"PPA compression supports 2 or 3 qubits, got {n}")
    P = sort_permutation(np.real(np.diag(rho)), target_basis_order(n, target))
    return P, P @ rho @ P.T


def ppa_reset(rho: np.ndarray, reset_qubits: Sequence[int], eps_b: float) -> np.ndarray:
    """Swap each reset qubit for a fresh bath qubit of polarization ``eps_b``."""
    n = num_qubits(rho)
    reset = sorted(set(reset_qubits))
    if not reset or reset[0] < 0 or reset[-1] >= n:
        raise BadIndex(f"reset qubits {reset_qubits} invalid for {n} qubits")
    keep = [q for q in range(n) if q not in reset]
    out = partial_trace(rho, keep) if keep else np.ones((1, 1), dtype=complex)
    for _ in reset:
        out = np.kron(out, bath_qubit(eps_b))
    return reorder_qubits(out, keep + reset)


@dataclass(frozen=True)
class PpaConfig:
    n_qubits: int
    bath_polarization: float
    max_rounds: int = 500
    convergence_tol: float = 1e-12
    target: int | None = None
    reset: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n_qubits not in (2, 3):
            raise ValueError("PPA is defined here for 2 or 3 qubits")
        if not 0 <= self.bath_polarization < 1:
            raise ValueError(f"bath polarization must lie in [0, 1), got {self.bath_polarization}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")

    @property
    def target_qubit(self) -> int:
        return 1 if self.target is None else self.target

    @property
    def reset_qubits(self) -> tuple[int, ...]:
        if self.reset is not None:
            return self.reset
        return (0,) if self.n_qubits == 2 else (self.n_qubits - 1,)


@dataclass
class CoolingTrace:
    """Per-round target metrics; entry 0 is the initial state."""

    polarizations: list[float] = field(default_factory=list)
    purities: list[float] = field(default_factory=list)
    converged: bool = False
    rho: np.ndarray | None = None

    @property
    def rounds(self) -> int:
        return len(self.polarizations) - 1

    @property
    def final_polarization(self) -> float:
        return self.polarizations[-1]

    @property
    def final_purity(self) -> float:
        return self.purities[-1]


def run_ppa(config: PpaConfig, initial: np.ndarray | None = None, strict: bool = False) -> CoolingTrace:
    """Iterate reset + compression to the fixed point.

    The target polarization can stall for a round while entropy moves
    between the other qubits, so convergence is declared when the whole
    state stops changing (max entry change below ``convergence_tol``).
    """
    rho = maximally_mixed(config.n_qubits) if initial is None else initial
    if num_qubits(rho) != config.n_qubits:
        raise ValueError("initial state size does not match n_qubits")
    t = config.target_qubit
    if t in config.reset_qubits:
        raise BadIndex("target qubit cannot be a reset qubit")
    trace = CoolingTrace()
    _record(trace, rho, t)
    for _ in range(config.max_rounds):
        prev = rho
        rho = ppa_reset(rho, config.reset_qubits, config.bath_polarization)
        _, rho = ppa_compression_sort(rho, t)
        _record(trace, rho, t)
        if np.max(np.abs(rho - prev)) < config.convergence_tol:
            trace.converged = True
            break
    trace.rho = rho
    if strict and not trace.converged:
        raise NoConvergence(f"PPA did not converge in {config.max_rounds} rounds", trace)
    return trace


def _record(trace, rho, qubit):
    r = partial_trace(rho, [qubit])
    trace.polarizations.append(polarization(r))
    trace.purities.append(purity(r))


def srg2_weights(H: np.ndarray, beta: float, bath: str = "gibbs") -> tuple[float, float]:
    """Normalized populations ``(w_00, w_11)`` the reset imposes on its subspace."""
    i00, i11 = basis_index((0, 0)), basis_index((1, 1))
    if bath == "gibbs":
        g = gibbs_state(H, beta)
        a, b = np.real(g[i00, i00]), np.real(g[i11, i11])
    elif bath == "bare":
        e00, e11 = np.real(H[i00, i00]), np.real(H[i11, i11])
        e0 = min(e00, e11)
        a, b = np.exp(-beta * (e00 - e0)), np.exp(-beta * (e11 - e0))
    else:
        raise ValueError(f"unknown bath model {bath!r}")
    s = a + b
    return a / s, b / s


FLIP_A = np.kron(SIGMA_X, IDENTITY2)


def srg2_round(rho: np.ndarray, beta_bath: float, H: np.ndarray, bath: str = "gibbs") -> np.ndarray:
    """Flip A, then rethermalize the ``{|00>, |11>}`` subspace.

    The reset replaces the subspace block by a diagonal state with the bath
    weights and the same total weight.  Coherences inside the block and
    between the block and ``{|01>, |10>}`` are erased, which keeps the map
    completely positive for arbitrary inputs.
    """
    if num_qubits(rho) != 2:
        raise ValueError("SR-Gamma_2 acts on two qubits")
    out = FLIP_A @ rho @ FLIP_A
    i00, i11 = basis_index((0, 0)), basis_index((1, 1))
    total = np.real(out[i00, i00] + out[i11, i11])
    w00, w11 = srg2_weights(H, beta_bath, bath)
    out = out.copy()
    out[i00, i00] = total * w00
    out[i11, i11] = total * w11
    out[i00, i11] = out[i11, i00] = 0.0
    outside = [basis_index((0, 1)), basis_index((1, 0))]
    for i in (i00, i11):
        out[i, outside] = 0.0
        out[outside, i] = 0.0
    return out


def run_srg2(
    rho: np.ndarray,
    beta_bath: float,
    H: np.ndarray,
    bath: str = "gibbs",
    max_rounds: int = 200,
    tol: float = 1e-12,
) -> CoolingTrace:
    """Iterate :func:`srg2_round` until the polarization of B settles.

    The populations of A keep alternating under the flip, so only B is
    tested; it must be stable over two consecutive rounds.
    """
    trace = CoolingTrace()
    _record(trace, rho, 1)
    for _ in range(max_rounds):
        rho = srg2_round(rho, beta_bath, H, bath)
        _record(trace, rho, 1)
        p = trace.polarizations
        if len(p) >= 3 and abs(p[-1] - p[-2]) < tol and abs(p[-2] - p[-3]) < tol:
            trace.converged = True
            break
    trace.rho = rho
    return trace

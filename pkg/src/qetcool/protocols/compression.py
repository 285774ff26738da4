"""
Entropy compression onto a target qubit.

``compress_with_correlations`` uses the full state: it rotates into the
eigenbasis of ``rho`` and routes the largest eigenvalues to the
target-ground block.  ``compress_without_correlations`` only permutes
computational-basis populations, as PPA does.
"""

from __future__ import annotations

import numpy as np

from ..qcore import hermitian_eig, num_qubits, partial_trace, purity
from .hbac import sort_permutation, target_basis_order


def target_purity(rho: np.ndarray, target: int) -> float:
    return purity(partial_trace(rho, [target]))


def compress_with_correlations(rho: np.ndarray, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(U, U rho U^dag)`` with ``U = P W^dag``; the output is diagonal."""
    n = num_qubits(rho)
    order = np.asarray(target_basis_order(n, target))
    w, W = hermitian_eig(rho)
    d = 1 << n
    # eigenvalue rank r (decreasing) goes to basis state order[r]
    P = np.zeros((d, d))
    P[order, np.arange(d)[::-1]] = 1.0
    U = P @ W.conj().T
    out = U @ rho @ U.conj().T
    # eigh tolerance leaves ~1e-17 off-diagonal residue; the target state is exactly diagonal
    out = np.diag(np.diag(out).real).astype(complex)
    return U, out


def compress_without_correlations(rho: np.ndarray, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(P, P rho P^T)`` with ``P`` sorting the diagonal of ``rho``."""
    n = num_qubits(rho)
    P = sort_permutation(np.real(np.diag(rho)), target_basis_order(n, target))
    return P.astype(complex), P @ rho @ P.T

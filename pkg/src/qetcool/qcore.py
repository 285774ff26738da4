"""
Dense linear algebra and state utilities for small qubit registers.

Operators are plain ``numpy`` complex arrays of shape ``(2**n, 2**n)``.

Basis convention
----------------
Single-qubit column vectors are ordered ``(|1>, |0>)`` so that
``SIGMA_Z = diag(1, -1)`` satisfies ``SIGMA_Z|0> = -|0>`` and
``SIGMA_Z|1> = |1>``.  ``|0>`` is the low-energy (ground) level of
``h * SIGMA_Z`` for ``h > 0``.

In a composite register qubit 0 is the most significant tensor factor.
Array bit ``b`` of a qubit encodes the physical label ``1 - b``: array
index 0 of a 2-qubit operator is ``|11>`` and index 3 is ``|00>``.
Use :func:`ket` and :func:`basis_index` rather than raw indices.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import BadIndex, DimensionMismatch, InvalidState, NotHermitian, WrongDimension

HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = -1e-10
TRACE_TOL = 1e-12

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET1 = np.array([1, 0], dtype=complex)
KET0 = np.array([0, 1], dtype=complex)


def pauli(axis: str) -> np.ndarray:
    """Return the Pauli matrix for ``axis`` in ``{'x', 'y', 'z'}``."""
    return {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[axis]


PAULI_AXES = ("x", "y", "z")


class EigDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def num_qubits(op: np.ndarray) -> int:
    dim = op.shape[0]
    if op.ndim != 2 or op.shape[1] != dim:
        raise WrongDimension(f"expected a square matrix, got shape {op.shape}")
    n = dim.bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise WrongDimension(f"matrix side {dim} is not 2**n with n >= 1")
    return n


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product, first factor most significant."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def basis_index(labels: Sequence[int]) -> int:
    """Array index of the computational basis state with physical ``labels``."""
    idx = 0
    for x in labels:
        idx = (idx << 1) | (1 - int(x))
    return idx


def basis_labels(index: int, n: int) -> tuple[int, ...]:
    """Physical labels (0 = ground) of array ``index`` in an ``n``-qubit register."""
    return tuple(1 - ((index >> (n - 1 - q)) & 1) for q in range(n))


def ket(labels: str | Sequence[int]) -> np.ndarray:
    """State vector for a physical label string, e.g. ``ket("01")`` = |0>_A |1>_B."""
    vec = np.ones(1, dtype=complex)
    for x in labels:
        vec = np.kron(vec, KET0 if int(x) == 0 else KET1)
    return vec


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def hermitian_eig(a: np.ndarray) -> EigDecomposition:
    """Eigendecomposition with ascending eigenvalues and orthonormal columns."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WrongDimension(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within 1e-10")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigDecomposition(w, v)


def expm_hermitian(a: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """``exp(scale * a)`` for Hermitian ``a`` via its eigendecomposition."""
    w, v = hermitian_eig(a)
    return (v * np.exp(scale * w)) @ v.conj().T


def embed(op: np.ndarray, position: int | Sequence[int], n: int) -> np.ndarray:
    """Place ``op`` on the qubit(s) ``position`` of an ``n``-qubit register.

    ``position`` may be a single index or a sequence of distinct indices; in
    the latter case the tensor factors of ``op`` are mapped onto those qubits
    in the given order.
    """
    positions = (position,) if np.isscalar(position) else tuple(position)
    k = len(positions)
    if op.shape != (1 << k, 1 << k):
        raise WrongDimension(f"operator of shape {op.shape} does not act on {k} qubit(s)")
    if len(set(positions)) != k or any(p < 0 or p >= n for p in positions):
        raise BadIndex(f"invalid qubit positions {positions} for n={n}")
    rest = [q for q in range(n) if q not in positions]
    full = np.kron(op, np.eye(1 << (n - k), dtype=complex))
    return reorder_qubits(full, list(positions) + rest)


def reorder_qubits(op: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Relabel tensor factors: factor ``j`` of ``op`` becomes qubit ``order[j]``."""
    n = len(order)
    if list(order) == list(range(n)):
        return op
    perm = list(np.argsort(order))
    t = op.reshape([2] * (2 * n)).transpose(perm + [n + p for p in perm])
    return t.reshape(1 << n, 1 << n)


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced state on the qubits in ``keep`` (output in ascending qubit order)."""
    n = num_qubits(rho)
    keep = sorted(set(keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise BadIndex(f"keep={keep} invalid for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    t = np.asarray(rho).reshape([2] * (2 * n))
    # move kept axes first, traced axes last, then contract the traced pairs
    t = t.transpose(keep + traced + [n + q for q in keep] + [n + q for q in traced])
    dk, dt = 1 << len(keep), 1 << len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def purity(rho: np.ndarray) -> float:
    """``Tr(rho^2)``."""
    return float(np.real(np.vdot(rho.conj().T, rho)))


def polarization(rho: np.ndarray) -> float:
    """Ground-level bias ``p(|0>) - p(|1>)`` of a single qubit.

    Equal to ``-Tr(SIGMA_Z rho)``: positive for a qubit colder than
    infinite temperature, matching the algorithmic-cooling convention.
    """
    if rho.shape != (2, 2):
        raise WrongDimension(f"polarization needs a single-qubit state, got {rho.shape}")
    return float(np.real(rho[1, 1] - rho[0, 0]))


def bloch_z(rho: np.ndarray) -> float:
    """Raw ``Tr(SIGMA_Z rho)`` of a single qubit."""
    if rho.shape != (2, 2):
        raise WrongDimension(f"expected a single-qubit state, got {rho.shape}")
    return float(np.real(rho[0, 0] - rho[1, 1]))


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    w = np.linalg.eigvalsh(0.5 * ((a - b) + (a - b).conj().T))
    return 0.5 * float(np.sum(np.abs(w)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits."""
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def expected_energy(rho: np.ndarray, H: np.ndarray) -> float:
    """``Tr(H rho)``."""
    if rho.shape != H.shape:
        raise DimensionMismatch(f"state {rho.shape} vs Hamiltonian {H.shape}")
    return float(np.real(np.vdot(H.conj().T, rho)))


def check_density_matrix(
    rho: np.ndarray,
    trace_tol: float = TRACE_TOL,
    herm_tol: float = 1e-12,
    pos_tol: float = POSITIVITY_TOL,
) -> np.ndarray:
    """Raise :class:`InvalidState` unless ``rho`` is a valid density matrix."""
    num_qubits(rho)
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise InvalidState(f"trace {tr} differs from 1")
    dev = np.max(np.abs(rho - rho.conj().T))
    if dev > herm_tol:
        raise InvalidState(f"not Hermitian (max deviation {dev:.3g})")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lam < pos_tol:
        raise InvalidState(f"negative eigenvalue {lam:.3g}")
    return rho


def is_density_matrix(rho: np.ndarray, **tols) -> bool:
    try:
        check_density_matrix(rho, **tols)
    except InvalidState:
        return False
    return True


def maximally_mixed(n: int) -> np.ndarray:
    d = 1 << n
    return np.eye(d, dtype=complex) / d


def random_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    d = 1 << n
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density_matrix(n: int, rng: np.random.Generator, n_mix: int | None = None) -> np.ndarray:
    """Random mixture of random pure states."""
    n_mix = n_mix or (1 << n)
    weights = rng.dirichlet(np.ones(n_mix))
    rho = sum(w * projector(random_pure_state(n, rng)) for w in weights)
    return 0.5 * (rho + rho.conj().T)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (a + a.conj().T)

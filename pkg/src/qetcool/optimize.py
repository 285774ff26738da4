"""
Derivative-free searches over measurement parameters, Bob's rotations,
probe couplings and general unitaries.

All searches maximize the purity of the target qubit.  Infeasible
candidates score ``-inf`` and are rejected by the simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import BadLength
from .model import AncillaModel, TwoQubitModel, gibbs_state, hamiltonian_2q, thermal_qubit
from .protocols.compression import compress_with_correlations, target_purity
from .protocols.qet import (
    EXAMPLE_J,
    EXAMPLE_K,
    PROJECTIVE_X,
    BobRotation,
    PovmX,
    ProtocolOutcome,
    hotta_bob_rotation,
    povm_operators,
    probe_generator,
    projective_x_povm,
    qet2_final_state,
    run_qet2,
    run_qet2a,
)
from .qcore import embed, expm_hermitian, num_qubits, partial_trace, purity

PROJECTIVE_ANGLES = (math.pi / 4, math.pi / 4, -math.pi / 4)
FROBENIUS_CONVENTION = "min over outcome matchings and signs of the per-operator Frobenius distance"


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 4
    max_evals_per_restart: int = 2000
    ftol: float = 1e-10
    seed: int = 0
    step: float = 0.3  # initial simplex edge
    spread: float = math.pi / 2  # half-width of restart perturbations

    def __post_init__(self):
        if self.restarts < 1 or self.max_evals_per_restart < 1:
            raise ValueError("restarts and max_evals_per_restart must be >= 1")
        if not self.ftol > 0:
            raise ValueError("ftol must be > 0")


@dataclass
class OptimizationReport:
    best_params: np.ndarray
    best_value: float
    evals_used: int
    restart_values: list[float]
    named: dict = field(default_factory=dict)
    constraint_convention: str = "none"
    outcome: ProtocolOutcome | None = None


def simplex_maximize(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    config: OptimizerConfig = OptimizerConfig(),
    starts: Sequence[Sequence[float]] = (),
    bounds: Sequence[tuple[float, float]] | None = None,
    max_start_tries: int = 200,
) -> OptimizationReport:
    """Nelder-Mead ascent from ``x0``, each of ``starts``, then random restarts.

    Random restarts are ``x0`` plus uniform perturbations drawn from
    ``default_rng(config.seed)``; infeasible draws are redrawn.  Restart
    ``i`` is reported in ``restart_values[i]``.
    """
    x0 = np.asarray(x0, dtype=float)
    rng = np.random.default_rng(config.seed)
    evals = 0

    def score(x):
        nonlocal evals
        evals += 1
        v = objective(x)
        return -v if np.isfinite(v) else np.inf

    lo = hi = None
    if bounds is not None:
        lo, hi = np.array(bounds, dtype=float).T

    def clip(x):
        return x if lo is None else np.clip(x, lo, hi)

    seeds = [x0] + [np.asarray(s, dtype=float) for s in starts]
    while len(seeds) < config.restarts:
        for _ in range(max_start_tries):
            x = clip(x0 + rng.uniform(-config.spread, config.spread, size=x0.size))
            if np.isfinite(objective(x)):
                seeds.append(x)
                break
        else:
            break

    best_x, best_v, values = x0, -np.inf, []
    for s in seeds:
        s = clip(s)
        simplex = np.vstack([s] + [s + config.step * e for e in np.eye(s.size)])
        simplex = np.array([clip(v) for v in simplex])
        with np.errstate(invalid="ignore"):
            res = minimize(
                score,
                s,
                method="Nelder-Mead",
                bounds=bounds,
                options=dict(
                    initial_simplex=simplex,
                    maxfev=config.max_evals_per_restart,
                    fatol=config.ftol,
                    xatol=1e-9,
                ),
            )
        v = -float(res.fun) if np.isfinite(res.fun) else -np.inf
        values.append(v)
        if v > best_v:
            best_x, best_v = np.array(res.x), v
    return OptimizationReport(best_params=best_x, best_value=best_v, evals_used=evals, restart_values=values)


def _nearest_solution(t: float, target: float) -> float:
    """Solution of ``sin(2 phi) = t`` closest to ``target``."""
    a = 0.5 * math.asin(max(-1.0, min(1.0, t)))
    best = None
    for base in (a, math.pi / 2 - a):
        cand = base + math.pi * round((target - base) / math.pi)
        if best is None or abs(cand - target) < abs(best - target):
            best = cand
    return best


def decode_povm(x: Sequence[float]) -> PovmX:
    """Map any ``(theta, phi0, phi1)`` to a complete ``alpha = delta = 0`` POVM.

    ``m_0 + i l_0 = cos(theta) e^{i phi0}`` and ``m_1 + i l_1 = sin(theta) e^{i phi1}``
    fix the normalization; the cross constraint ``sum m l = 0`` is enforced
    by moving ``phi1`` to the nearest admissible value, and ``phi0`` as well
    when no admissible ``phi1`` exists.
    """
    theta, phi0, phi1 = (float(v) for v in x)
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    need = c2 * math.sin(2 * phi0)
    if s2 > 0 and abs(need) <= s2:
        phi1 = _nearest_solution(-need / s2, phi1)
    else:
        phi1 = _nearest_solution(-math.copysign(1.0, need), phi1)
        phi0 = _nearest_solution(-s2 * math.sin(2 * phi1) / c2, phi0)
    ct, st = math.cos(theta), math.sin(theta)
    return PovmX(
        m=(ct * math.cos(phi0), st * math.cos(phi1)),
        l=(ct * math.sin(phi0), st * math.sin(phi1)),
    )


def povm_frobenius_distance(ops: Sequence[np.ndarray]) -> float:
    """Distance of a two-outcome POVM from the projective SIGMA_X measurement.

    Operators are compared up to sign (a global phase) and up to relabelling
    of the outcomes; the smallest per-operator distance is returned.
    """
    best = np.inf
    for perm in ((0, 1), (1, 0)):
        d = min(
            min(np.linalg.norm(ops[mu] - s * PROJECTIVE_X[perm[mu]]) for s in (1, -1))
            for mu in (0, 1)
        )
        best = min(best, d)
    return float(best)


def _qet2_gibbs_objective(rho, projective_only, min_frobenius):
    if projective_only:

        def f(x):
            return purity(partial_trace(qet2_final_state(rho, PROJECTIVE_X, x), [1]))

        return f

    def f(x):
        ops = povm_operators(decode_povm(x[:3]))
        if min_frobenius > 0 and povm_frobenius_distance(ops) < min_frobenius:
            return -np.inf
        return purity(partial_trace(qet2_final_state(rho, ops, x[3:]), [1]))

    return f


def optimize_qet2_gibbs(
    model: TwoQubitModel,
    beta: float,
    projective_only: bool = False,
    min_frobenius: float = 0.0,
    config: OptimizerConfig = OptimizerConfig(),
) -> OptimizationReport:
    """Maximize the final purity of B for QET-2 on the Gibbs state at ``beta``."""
    rho = gibbs_state(hamiltonian_2q(model), beta)
    f = _qet2_gibbs_objective(rho, projective_only, min_frobenius)
    hotta = hotta_bob_rotation(model, projective_x_povm()).omegas
    if projective_only:
        candidates = [hotta, (0.0, 0.0)]
    else:
        candidates = [PROJECTIVE_ANGLES + hotta, PROJECTIVE_ANGLES + (0.0, 0.0), (0.0,) * 5]
    feasible = [np.array(c) for c in candidates if np.isfinite(f(np.array(c)))]
    if not feasible:
        feasible = [_random_feasible(f, 5, config.seed)]
    report = simplex_maximize(f, feasible[0], config, starts=feasible[1:])
    x = report.best_params
    if projective_only:
        p, omegas = projective_x_povm(), tuple(x)
    else:
        p, omegas = decode_povm(x[:3]), tuple(x[3:])
    b = BobRotation(*omegas)
    report.outcome = run_qet2(rho, model, p, b)
    report.named = {
        "m": list(p.m),
        "l": list(p.l),
        "omega_plus": b.omega_plus,
        "omega_minus": b.omega_minus,
        "frobenius_distance": povm_frobenius_distance(povm_operators(p)),
    }
    if min_frobenius > 0:
        report.constraint_convention = f"{FROBENIUS_CONVENTION} >= {min_frobenius}"
    return report


def _random_feasible(f, size, seed, tries=10_000):
    rng = np.random.default_rng([seed, 1])
    for _ in range(tries):
        x = rng.uniform(-math.pi, math.pi, size)
        if np.isfinite(f(x)):
            return x
    raise RuntimeError("no feasible starting point found")


class _Qet2aObjective:
    """Purity of B after the two probe couplings, with cached initial state."""

    def __init__(self, model: TwoQubitModel, anc: AncillaModel, beta: float):
        self.rho0 = np.kron(gibbs_state(hamiltonian_2q(model), beta), thermal_qubit(anc.h_an, beta))

    @staticmethod
    def unpack(x):
        x = np.asarray(x, dtype=float)
        return x[:9].reshape(3, 3), x[9:].reshape(3, 3)

    def __call__(self, x):
        J, K = self.unpack(x)
        UA = embed(expm_hermitian(probe_generator(J), 1j), (0, 2), 3)
        UB = embed(expm_hermitian(probe_generator(K), 1j), (1, 2), 3)
        U = UB @ UA
        return purity(partial_trace(U @ self.rho0 @ U.conj().T, [1]))


def optimize_qet2a(
    model: TwoQubitModel,
    anc: AncillaModel,
    beta: float,
    config: OptimizerConfig = OptimizerConfig(),
) -> OptimizationReport:
    """Maximize B's purity over both 3x3 real coupling matrices (18 entries in [-pi, pi])."""
    f = _Qet2aObjective(model, anc, beta)
    x0 = np.concatenate([EXAMPLE_J.ravel(), EXAMPLE_K.ravel()])
    report = simplex_maximize(f, x0, config, starts=[np.zeros(18)], bounds=[(-math.pi, math.pi)] * 18)
    J, K = f.unpack(report.best_params)
    report.outcome = run_qet2a(model, anc, beta, J, K)
    report.named = {"J": J.tolist(), "K": K.tolist()}
    return report


def unitary_param_length(d: int) -> int:
    return d * (d - 1) // 2 + d


def parametrized_unitary(angles: Sequence[float], d: int) -> np.ndarray:
    """Real Givens rotations on every pair ``i < j`` followed by a diagonal phase layer.

    ``angles`` holds the ``d(d-1)/2`` rotation angles in lexicographic pair
    order, then ``d`` phases.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (unitary_param_length(d),):
        raise BadLength(f"expected {unitary_param_length(d)} angles for d={d}, got {angles.shape}")
    U = np.eye(d, dtype=complex)
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    for (i, j), th in zip(pairs, angles):
        c, s = math.cos(th), math.sin(th)
        ri, rj = U[i].copy(), U[j].copy()
        U[i], U[j] = c * ri - s * rj, s * ri + c * rj
    # rotations were applied to rows in sequence, so U = G_last ... G_first
    phases = np.exp(1j * angles[len(pairs):])
    return phases[:, None] * U


@dataclass
class SortCheck:
    sort_value: float
    search_value: float
    best_angles: np.ndarray
    evals_used: int

    @property
    def violation(self) -> float:
        return self.search_value - self.sort_value


def verify_sort_optimality(
    rho: np.ndarray,
    target: int,
    config: OptimizerConfig = OptimizerConfig(restarts=3, max_evals_per_restart=4000),
) -> SortCheck:
    """Compare the eigenbasis SORT with a simplex search over unitaries."""
    n = num_qubits(rho)
    if n != 3:
        raise ValueError("sort-optimality search is defined for 3 qubits")
    d = 1 << n
    _, after = compress_with_correlations(rho, target)
    sort_value = target_purity(after, target)

    def f(x):
        U = parametrized_unitary(x, d)
        return target_purity(U @ rho @ U.conj().T, target)

    report = simplex_maximize(f, np.zeros(unitary_param_length(d)), config)
    return SortCheck(sort_value, report.best_value, report.best_params, report.evals_used)

"""
Grid evaluation of the cooling protocols over ``k/h`` and ``beta``.

Every grid point produces one :class:`SweepRow`; comparisons tag rows with
a method label.  Rows are always returned in grid order (``k`` outer,
``beta`` inner) whatever the worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    AncillaModel,
    ChainModel3,
    TwoQubitModel,
    gibbs_state,
    ground_state_2q,
    hamiltonian_2q,
    hamiltonian_chain3,
    hamiltonian_with_ancilla,
    thermal_qubit,
)
from .optimize import OptimizerConfig, optimize_qet2_gibbs, optimize_qet2a
from .protocols import (
    BATH_MODELS,
    EXAMPLE_J,
    EXAMPLE_K,
    PpaConfig,
    bath_polarization,
    compress_with_correlations,
    compress_without_correlations,
    hotta_bob_rotation,
    projective_x_povm,
    run_ppa,
    run_qet2,
    run_qet2a,
    run_srg2,
)
from .qcore import expected_energy, maximally_mixed, partial_trace, polarization, purity

PROTOCOLS = ("qet2-ground", "qet2-gibbs", "qet2a", "ppa", "srg2", "compress", "compare")
COMPARE_STYLES = ("fig1", "fig3", "fig4")
FORMATS = ("csv", "json", "svg", "png")

SWEEP_FIELDS = (
    "protocol",
    "k_over_h",
    "beta",
    "purity_initial",
    "purity_final",
    "polarization_initial",
    "polarization_final",
    "energy_injected",
    "energy_extracted",
    "optimizer_evals",
    "params_json",
)


class SpecError(ValueError):
    """Invalid sweep specification (CLI exit code 2)."""


class RowInvariantError(RuntimeError):
    """A computed row violates its field ranges (CLI exit code 1)."""


@dataclass
class SweepSpec:
    protocol: str = "qet2-gibbs"
    h: float = 1.0
    k_over_h: list[float] = field(default_factory=lambda: [1.0])
    beta_min: float = 0.0
    beta_max: float = 2.0
    beta_steps: int = 9
    h_an: float = 1.0
    epsilon_b: float | None = None
    n: int = 3
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    povm_mode: str = "projective"
    min_frobenius: float = 0.5
    bath: str = "gibbs"
    couplings: str = "optimized"
    style: str = "fig1"
    output_path: str | None = None
    formats: tuple[str, ...] = ("csv",)
    jobs: int = 1

    def validate(self) -> "SweepSpec":
        if self.protocol not in PROTOCOLS:
            raise SpecError(f"unknown protocol {self.protocol!r}; choose from {', '.join(PROTOCOLS)}")
        if not self.h > 0:
            raise SpecError("h must be > 0")
        if not self.k_over_h or any(not (k >= 0 and math.isfinite(k)) for k in self.k_over_h):
            raise SpecError("k_over_h entries must be finite and >= 0")
        if self.beta_steps < 1:
            raise SpecError("beta_steps must be >= 1")
        if not (0 <= self.beta_min <= self.beta_max and math.isfinite(self.beta_max)):
            raise SpecError("need 0 <= beta_min <= beta_max < inf")
        if self.h_an < 0:
            raise SpecError("h_an must be >= 0")
        if self.epsilon_b is not None and not 0 <= self.epsilon_b < 1:
            raise SpecError("epsilon_b must lie in [0, 1)")
        if self.n not in (2, 3):
            raise SpecError("n must be 2 or 3")
        if self.povm_mode not in ("projective", "nonprojective"):
            raise SpecError("povm must be 'projective' or 'nonprojective'")
        if self.min_frobenius < 0:
            raise SpecError("min_frobenius must be >= 0")
        if self.bath not in BATH_MODELS:
            raise SpecError(f"bath must be one of {BATH_MODELS}")
        if self.couplings not in ("optimized", "example"):
            raise SpecError("couplings must be 'optimized' or 'example'")
        if self.style not in COMPARE_STYLES:
            raise SpecError(f"style must be one of {COMPARE_STYLES}")
        bad = set(self.formats) - set(FORMATS)
        if bad or not self.formats:
            raise SpecError(f"formats must be a non-empty subset of {FORMATS}")
        if self.jobs < 1:
            raise SpecError("jobs must be >= 1")
        return self

    @property
    def betas(self) -> list[float]:
        if self.beta_steps == 1:
            return [float(self.beta_min)]
        return [float(b) for b in np.linspace(self.beta_min, self.beta_max, self.beta_steps)]


def parse_beta_grid(text: str) -> tuple[float, float, int]:
    """Parse ``min:max:steps`` (inclusive endpoints) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            b = float(parts[0])
            return b, b, 1
        if len(parts) == 3:
            return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise SpecError(f"bad beta grid {text!r}: {exc}") from None
    raise SpecError(f"bad beta grid {text!r}; expected min:max:steps")


@dataclass
class SweepRow:
    protocol: str
    k_over_h: float
    beta: float | None
    purity_initial: float
    purity_final: float
    polarization_initial: float
    polarization_final: float
    energy_injected: float
    energy_extracted: float
    optimizer_evals: int
    params_json: str
    method: str = ""

    def check(self, tol: float = 1e-9) -> "SweepRow":
        for name in ("purity_initial", "purity_final"):
            v = getattr(self, name)
            if not (0.5 - tol <= v <= 1 + tol):
                raise RowInvariantError(f"{name}={v} outside [0.5, 1] ({self.protocol}, k/h={self.k_over_h}, beta={self.beta})")
        for name in ("polarization_initial", "polarization_final"):
            v = getattr(self, name)
            if not (-1 - tol <= v <= 1 + tol):
                raise RowInvariantError(f"{name}={v} outside [-1, 1]")
        for name in ("energy_injected", "energy_extracted"):
            if not math.isfinite(getattr(self, name)):
                raise RowInvariantError(f"{name} is not finite")
        return self

    def as_dict(self, with_method: bool = False) -> dict:
        d = {f: getattr(self, f) for f in SWEEP_FIELDS}
        if with_method:
            d = {"method": self.method, **d}
        return d


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _qubit_metrics(rho, q):
    r = partial_trace(rho, [q])
    return purity(r), polarization(r)


def _row_from_outcome(protocol, k, beta, outcome, evals, params):
    return SweepRow(
        protocol=protocol,
        k_over_h=k,
        beta=beta,
        purity_initial=outcome.purity_B_initial,
        purity_final=outcome.purity_B,
        polarization_initial=outcome.polarization_B_initial,
        polarization_final=outcome.polarization_B,
        energy_injected=outcome.energy_injected_A,
        energy_extracted=outcome.energy_extracted_B,
        optimizer_evals=evals,
        params_json=_dumps(params),
    )


def _cooling_row(protocol, k, beta, rho0, rho1, H, target, params):
    """Row for bath-assisted protocols: no injection step, net energy removed."""
    p0, e0 = _qubit_metrics(rho0, target)
    p1, e1 = _qubit_metrics(rho1, target)
    return SweepRow(
        protocol=protocol,
        k_over_h=k,
        beta=beta,
        purity_initial=p0,
        purity_final=p1,
        polarization_initial=e0,
        polarization_final=e1,
        energy_injected=0.0,
        energy_extracted=expected_energy(rho0, H) - expected_energy(rho1, H),
        optimizer_evals=0,
        params_json=_dumps(params),
    )


def eval_point(protocol: str, k_over_h: float, beta: float | None, spec: SweepSpec) -> SweepRow:
    """Evaluate one protocol at one grid point."""
    h = spec.h
    model = TwoQubitModel(h, k_over_h * h)
    if protocol == "qet2-ground":
        p = projective_x_povm()
        b = hotta_bob_rotation(model, p)
        out = run_qet2(ground_state_2q(model), model, p, b)
        params = {"povm": "projective", "omega_plus": b.omega_plus, "omega_minus": b.omega_minus}
        return _row_from_outcome(protocol, k_over_h, None, out, 0, params)

    if protocol == "qet2-gibbs":
        projective = spec.povm_mode == "projective"
        rep = optimize_qet2_gibbs(
            model, beta, projective_only=projective,
            min_frobenius=0.0 if projective else spec.min_frobenius,
            config=spec.optimizer,
        )
        params = dict(rep.named, povm=spec.povm_mode, constraint=rep.constraint_convention)
        return _row_from_outcome(protocol, k_over_h, beta, rep.outcome, rep.evals_used, params)

    if protocol == "qet2a":
        anc = AncillaModel(spec.h_an * h)
        if spec.couplings == "example":
            out = run_qet2a(model, anc, beta, EXAMPLE_J, EXAMPLE_K)
            return _row_from_outcome(protocol, k_over_h, beta, out, 0,
                                     {"J": EXAMPLE_J.tolist(), "K": EXAMPLE_K.tolist(), "couplings": "example"})
        rep = optimize_qet2a(model, anc, beta, spec.optimizer)
        return _row_from_outcome(protocol, k_over_h, beta, rep.outcome, rep.evals_used,
                                 dict(rep.named, couplings="optimized"))

    if protocol == "ppa":
        if spec.epsilon_b is not None:
            eps_b, rho0, source = spec.epsilon_b, maximally_mixed(spec.n), "fixed"
        else:
            # the start state follows the bath model: interacting Gibbs state or bare thermal qubits
            eps_b, source = bath_polarization(model, beta, spec.bath), spec.bath
            if spec.bath == "gibbs":
                rho0 = gibbs_state(hamiltonian_2q(model), beta)
            else:
                rho0 = np.kron(thermal_qubit(h, beta), thermal_qubit(h, beta))
            if spec.n == 3:
                rho0 = np.kron(rho0, thermal_qubit(spec.h_an * h, beta))
        H = hamiltonian_2q(model) if spec.n == 2 else hamiltonian_with_ancilla(model, AncillaModel(spec.h_an * h))
        cfg = PpaConfig(spec.n, eps_b)
        tr = run_ppa(cfg, initial=rho0)
        params = {"n": spec.n, "epsilon_b": eps_b, "bath": source, "rounds": tr.rounds,
                  "converged": tr.converged, "target": cfg.target_qubit}
        return _cooling_row(protocol, k_over_h, beta, rho0, tr.rho, H, cfg.target_qubit, params)

    if protocol == "srg2":
        H = hamiltonian_2q(model)
        rho0 = gibbs_state(H, beta)
        tr = run_srg2(rho0, beta, H, spec.bath)
        return _cooling_row(protocol, k_over_h, beta, rho0, tr.rho, H, 1,
                            {"bath": spec.bath, "rounds": tr.rounds, "converged": tr.converged})

    if protocol == "compress":
        H = hamiltonian_chain3(ChainModel3(h, k_over_h * h))
        rho0 = gibbs_state(H, beta)
        _, with_c = compress_with_correlations(rho0, 0)
        _, without_c = compress_without_correlations(rho0, 0)
        p_without, e_without = _qubit_metrics(without_c, 0)
        return _cooling_row(protocol, k_over_h, beta, rho0, with_c, H, 0,
                            {"target": 0, "purity_without_correlations": p_without,
                             "polarization_without_correlations": e_without})

    raise SpecError(f"unknown protocol {protocol!r}")


def _grid(spec):
    if spec.protocol == "qet2-ground":
        return [(k, None) for k in spec.k_over_h]
    return [(k, b) for k in spec.k_over_h for b in spec.betas]


def _eval_star(args):
    protocol, k, b, spec, method = args
    row = eval_point(protocol, k, b, spec)
    row.method = method
    return row.check()


def _run_tasks(tasks, jobs):
    if jobs == 1:
        return [_eval_star(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_eval_star, tasks))


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    spec.validate()
    if spec.protocol == "compare":
        return run_compare(spec)
    tasks = [(spec.protocol, k, b, spec, "") for k, b in _grid(spec)]
    return _run_tasks(tasks, spec.jobs)


def compare_methods(spec: SweepSpec) -> list[tuple[str, str, SweepSpec]]:
    """(method label, protocol, per-method spec) triples for a comparison style."""
    if spec.style == "fig1":
        return [
            ("qet2-projective", "qet2-gibbs", replace(spec, povm_mode="projective")),
            ("qet2-nonprojective", "qet2-gibbs", replace(spec, povm_mode="nonprojective")),
            ("srg2", "srg2", spec),
            ("rethermalization", "ppa", replace(spec, n=2, epsilon_b=None)),
        ]
    if spec.style == "fig3":
        return [
            ("qet2a", "qet2a", replace(spec, couplings="optimized")),
            ("ppa3", "ppa", replace(spec, n=3, epsilon_b=None)),
        ]
    return [("compress", "compress", spec)]


def run_compare(spec: SweepSpec) -> list[SweepRow]:
    spec.validate()
    grid = [(k, b) for k in spec.k_over_h for b in spec.betas]
    tasks = [(proto, k, b, s, label) for label, proto, s in compare_methods(spec) for k, b in grid]
    rows = _run_tasks(tasks, spec.jobs)
    if spec.style == "fig3":
        for k, b in grid:
            rows.append(_initial_ancilla_row(spec, k, b))
    if spec.style == "fig4":
        rows.extend(_without_correlations_rows(rows))
    return rows


def _initial_ancilla_row(spec, k, beta):
    r = thermal_qubit(spec.h_an * spec.h, beta)
    p, e = purity(r), polarization(r)
    row = SweepRow("qet2a", k, beta, p, p, e, e, 0.0, 0.0, 0, _dumps({"qubit": "ancilla"}), method="initial-ancilla")
    return row.check()


def _without_correlations_rows(rows):
    # the permutation-only energy change is not tracked, so it reads 0
    out = []
    for r in rows:
        params = json.loads(r.params_json)
        out.append(replace(
            r,
            method="compress-without-correlations",
            purity_final=params["purity_without_correlations"],
            polarization_final=params["polarization_without_correlations"],
            energy_extracted=0.0,
        ))
        r.method = "compress-with-correlations"
    return out

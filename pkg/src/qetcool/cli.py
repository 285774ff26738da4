"""
Command line entry point: ``qetcool sweep | compare | verify``.

Exit codes: 0 success, 1 invariant violation, 2 invalid specification,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .optimize import OptimizerConfig
from .sweeps import (
    COMPARE_STYLES,
    PROTOCOLS,
    RowInvariantError,
    SpecError,
    SweepSpec,
    parse_beta_grid,
    run_sweep,
)

EXIT_OK, EXIT_INVARIANT, EXIT_SPEC, EXIT_IO = 0, 1, 2, 3

# option dest -> default; config-file keys may use dashes or underscores
DEFAULTS = {
    "protocol": "qet2-gibbs",
    "h": 1.0,
    "k_over_h": "1",
    "beta": "0:2:9",
    "h_an": 1.0,
    "epsilon_b": None,
    "n": 3,
    "povm": "projective",
    "min_frobenius": 0.5,
    "restarts": 4,
    "max_evals": 2000,
    "seed": 0,
    "bath": "gibbs",
    "couplings": "optimized",
    "style": "fig1",
    "out": None,
    "format": "csv",
    "jobs": 1,
}


def _add_grid_options(p: argparse.ArgumentParser, with_protocol: bool) -> None:
    if with_protocol:
        p.add_argument("--protocol", choices=[x for x in PROTOCOLS if x != "compare"])
    else:
        p.add_argument("--style", choices=COMPARE_STYLES, help="fig1: QET-2 vs SR-Gamma_2 and rethermalization; "
                       "fig3: QET-2A vs PPA-3; fig4: compression with and without correlations")
    p.add_argument("--h", type=float, help="local field h (default 1)")
    p.add_argument("--k-over-h", help="comma-separated coupling ratios, e.g. 1,2,10")
    p.add_argument("--beta", help="inverse temperature grid min:max:steps (inclusive) or a single value")
    p.add_argument("--h-an", type=float, help="ancilla field in units of h")
    p.add_argument("--epsilon-b", type=float, help="fixed bath polarization for PPA (starts maximally mixed)")
    p.add_argument("--n", type=int, choices=(2, 3), help="PPA qubit count")
    p.add_argument("--povm", choices=("projective", "nonprojective"))
    p.add_argument("--min-frobenius", type=float, help="non-projectivity constraint for --povm nonprojective")
    p.add_argument("--bath", choices=("gibbs", "bare"), help="bath model for PPA and SR-Gamma_2")
    p.add_argument("--couplings", choices=("optimized", "example"), help="QET-2A probe couplings")
    p.add_argument("--restarts", type=int, help="optimizer restarts per grid point")
    p.add_argument("--max-evals", type=int, help="objective evaluations per restart")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, help="worker processes (output order is unchanged)")
    p.add_argument("--out", help="output path stem; extensions are added per format")
    p.add_argument("--format", help="comma-separated subset of csv,json,svg,png")
    p.add_argument("--config", help="JSON file of option values; command-line flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qetcool", description="Correlation-enhanced algorithmic cooling sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_grid_options(sub.add_parser("sweep", help="evaluate one protocol on a k/h x beta grid"), True)
    _add_grid_options(sub.add_parser("compare", help="evaluate a set of protocols side by side"), False)
    v = sub.add_parser("verify", help="run the invariant battery")
    v.add_argument("--corrupt-pauli", action="store_true", help=argparse.SUPPRESS)
    return parser


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise SpecError("config file must hold a JSON object")
    out = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in DEFAULTS:
            raise SpecError(f"unknown config key {key!r}")
        out[dest] = value
    return out


def _as_list(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def resolve_spec(args: argparse.Namespace, command: str) -> SweepSpec:
    """Merge defaults, the config file and explicit flags, in that order."""
    merged = dict(DEFAULTS)
    merged.update(load_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    try:
        ks = [float(x) for x in _as_list(merged["k_over_h"]).split(",") if x.strip()]
    except ValueError:
        raise SpecError(f"bad --k-over-h {merged['k_over_h']!r}") from None
    b0, b1, steps = parse_beta_grid(_as_list(merged["beta"]).replace(",", ":"))
    formats = tuple(f.strip() for f in _as_list(merged["format"]).split(",") if f.strip())
    try:
        opt = OptimizerConfig(restarts=int(merged["restarts"]), max_evals_per_restart=int(merged["max_evals"]),
                              seed=int(merged["seed"]))
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    spec = SweepSpec(
        protocol="compare" if command == "compare" else merged["protocol"],
        h=float(merged["h"]),
        k_over_h=ks,
        beta_min=b0,
        beta_max=b1,
        beta_steps=steps,
        h_an=float(merged["h_an"]),
        epsilon_b=None if merged["epsilon_b"] is None else float(merged["epsilon_b"]),
        n=int(merged["n"]),
        optimizer=opt,
        povm_mode=merged["povm"],
        min_frobenius=float(merged["min_frobenius"]),
        bath=merged["bath"],
        couplings=merged["couplings"],
        style=merged["style"],
        output_path=merged["out"],
        formats=formats,
        jobs=int(merged["jobs"]),
    )
    spec.validate()
    if spec.output_path is None and set(spec.formats) != {"csv"}:
        raise SpecError("--out is required for json, svg or png output")
    return spec


def _title(spec: SweepSpec) -> str:
    if spec.protocol == "compare":
        return f"comparison {spec.style}"
    return f"{spec.protocol} purity"


def _cmd_grid(args, command) -> int:
    from .report import rows_to_csv, write_outputs

    try:
        spec = resolve_spec(args, command)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        rows = run_sweep(spec)
    except RowInvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    if spec.output_path is None:
        sys.stdout.write(rows_to_csv(rows))
        return EXIT_OK
    try:
        for path in write_outputs(rows, spec.output_path, spec.formats, _title(spec)):
            print(path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import all_hard_pass, run_checks

    results = run_checks(corrupt_pauli=args.corrupt_pauli)
    for r in results:
        print(r.line())
    ok = all_hard_pass(results)
    n_hard = sum(r.hard for r in results)
    n_pass = sum(r.passed for r in results if r.hard)
    print(f"{n_pass}/{n_hard} hard checks passed; {'OK' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_INVARIANT


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_grid(args, args.command)


if __name__ == "__main__":
    sys.exit(main())

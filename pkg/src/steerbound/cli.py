"""Command-line front end.

Subcommands produce the certification artifacts: bound curves as CSV for
external plotting, operator-inequality sweeps, the classical-fidelity
optimum, coefficient recovery, the numerical sandwich sweep, and
assemblage realization/validation round-trips.

Exit codes: 0 success, 1 computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import selftest
from .assemblage import (
    Assemblage,
    QuantumRealization,
    ValidationError,
    chsh_reference,
    realize,
    validate,
)
from .fidelity import classical_fidelity
from .matkernel import I2, PAULI_X, PAULI_Z
from .numsearch import SearchConfig, sandwich_sweep
from .steering import BETA_QUANTUM


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".steerbound-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_assemblage(spec: str) -> Assemblage:
    if spec == "chsh":
        return chsh_reference()
    with open(spec) as handle:
        return Assemblage.from_json(handle.read())


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def cmd_bound_curve(args) -> int:
    betas = np.linspace(args.beta_min, args.beta_max, args.points)
    lines = ["beta,analytic_lower,eq8_upper,trivial_fc"]
    for beta in betas:
        lines.append(
            ",".join(
                [
                    _fmt(beta),
                    _fmt(selftest.analytic_bound(beta)),
                    _fmt(selftest.upper_bound(beta)),
                    _fmt(selftest.TRIVIAL_CLASSICAL_FIDELITY),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify_inequality(args) -> int:
    s = selftest.S_OPTIMAL if args.s == "optimal" else float(args.s)
    thetas = selftest.theta_grid(args.theta_points)
    worst = (math.inf, 0.0)
    for theta in thetas:
        theta = float(theta)
        t0, t1 = selftest.t_constraints(s, theta)
        c = selftest.dephasing_coefficient(theta, s)
        margin = selftest.inequality_margin(s, t0, t1, theta, c)
        if margin < worst[0]:
            worst = (margin, theta)
    print(f"worst margin {worst[0]:.3e} at theta = {worst[1]:.9g} (s = {_fmt(s)})")
    if worst[0] < -1e-10:
        print("operator inequality FAILED", file=sys.stderr)
        return 1
    print("operator inequality verified")
    return 0


def cmd_classical_fidelity(args) -> int:
    ref = _load_assemblage(args.assemblage)
    value, strategy = classical_fidelity(ref)
    print(f"classical fidelity: {_fmt(value)}")
    for lam in sorted(strategy.weights):
        resp = [strategy.response[(lam, x)] for x in range(ref.settings)]
        rho = strategy.hidden_states[lam]
        print(
            f"  lambda={lam} weight={_fmt(strategy.weights[lam])} "
            f"responses={resp} state_diag=({_fmt(rho[0,0].real)}, {_fmt(rho[1,1].real)})"
        )
    return 0


def cmd_coefficient_search(args) -> int:
    s_grid = np.linspace(0.0, 0.8, args.s_points)
    coeffs = selftest.coefficient_search(s_grid, args.theta_points)
    print(f"s = {_fmt(coeffs.s)}")
    print(f"t = {_fmt(coeffs.t)} (t0 = {_fmt(coeffs.t0)}, t1 = {_fmt(coeffs.t1)})")
    print(f"bound at maximal violation = {_fmt(selftest.bound_value(coeffs, BETA_QUANTUM))}")
    return 0


def cmd_sandwich(args) -> int:
    with open(args.config) as handle:
        cfg = SearchConfig.from_json(handle.read())
    env_seed = os.environ.get("STEERBOUND_SEED")
    if env_seed is not None:
        cfg = SearchConfig(
            samples=cfg.samples,
            beta_targets=cfg.beta_targets,
            channel_family=cfg.channel_family,
            seesaw_rounds=cfg.seesaw_rounds,
            rng_seed=int(env_seed),
            tolerance=cfg.tolerance,
        )
    report = sandwich_sweep(cfg)
    _atomic_write(args.out_json, report.to_json())
    if args.out_csv:
        _atomic_write(args.out_csv, report.to_csv())
    for record in report.records:
        status = "pass" if record.passes(cfg.tolerance) else "FAIL"
        print(
            f"beta={_fmt(record.beta)} numeric={_fmt(record.numeric_min)} "
            f"lower={_fmt(record.analytic_lower)} upper={_fmt(record.eq8_upper)} [{status}]"
        )
    return 0 if report.passed else 1


def _load_state(spec: str) -> np.ndarray:
    if spec == "phi+":
        phi = np.zeros(4, dtype=complex)
        phi[0] = phi[3] = 1 / math.sqrt(2)
        return np.outer(phi, phi.conj())
    with open(spec) as handle:
        raw = json.load(handle)
    return np.array(raw["re"]) + 1j * np.array(raw["im"])


def _load_measurements(spec: str) -> dict:
    if spec == "ZX":
        return {
            0: [(I2 + PAULI_Z) / 2, (I2 - PAULI_Z) / 2],
            1: [(I2 + PAULI_X) / 2, (I2 - PAULI_X) / 2],
        }
    with open(spec) as handle:
        raw = json.load(handle)
    povms = {}
    for x, elements in raw.items():
        povms[int(x)] = [np.array(e["re"]) + 1j * np.array(e["im"]) for e in elements]
    return povms


def cmd_realize(args) -> int:
    state = _load_state(args.state)
    povms = _load_measurements(args.measurements)
    asm = realize(QuantumRealization(state, povms))
    text = asm.to_json()
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text + "\n")
    return 0


def cmd_validate(args) -> int:
    asm = _load_assemblage(args.assemblage)
    report = validate(asm, args.tol)
    if report.passed:
        print("valid assemblage")
        return 0
    for failure in report.failures():
        print(failure, file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerbound",
        description="Device-independent certification of the CHSH-type steering assemblage",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound-curve", help="emit lower/upper bound curves as CSV")
    p.add_argument("--beta-min", type=float, default=2.0)
    p.add_argument("--beta-max", type=float, default=BETA_QUANTUM)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bound_curve)

    p = sub.add_parser("verify-inequality", help="sweep the operator-inequality margins")
    p.add_argument("--theta-points", type=int, default=10_000)
    p.add_argument("--s", default="optimal", help='coefficient s, or "optimal"')
    p.add_argument(
        "--t0-t1-rule",
        choices=["constraints"],
        default="constraints",
        help="shift rule (only the closed-form constraint rule is supported)",
    )
    p.set_defaults(func=cmd_verify_inequality)

    p = sub.add_parser("classical-fidelity", help="best classical fidelity with a reference")
    p.add_argument("--assemblage", default="chsh", help='assemblage JSON path or "chsh"')
    p.set_defaults(func=cmd_classical_fidelity)

    p = sub.add_parser("coefficient-search", help="recover the optimal bound coefficients")
    p.add_argument("--s-points", type=int, default=512)
    p.add_argument("--theta-points", type=int, default=10_000)
    p.set_defaults(func=cmd_coefficient_search)

    p = sub.add_parser("sandwich", help="run the numerical sandwich sweep")
    p.add_argument("--config", required=True, help="SearchConfig JSON path")
    p.add_argument("--out-json", default="sandwich_report.json")
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_sandwich)

    p = sub.add_parser("realize", help="build an assemblage from a quantum realization")
    p.add_argument("--state", default="phi+", help='state JSON path or "phi+"')
    p.add_argument("--measurements", default="ZX", help='POVM JSON path or "ZX"')
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("validate", help="check assemblage validity")
    p.add_argument("--assemblage", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

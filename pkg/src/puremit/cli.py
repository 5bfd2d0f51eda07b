"""Command line interface.

Subcommands:

* ``verify``: seeded self-checks of the core identities, one PASS/FAIL
  line each. Exit 0 when every residual is below tolerance, 1 otherwise.
* ``run``: execute one configured experiment, exact or sampled, and emit
  a JSON report.
* ``sweep``: repeat a run while varying the copy count or the noise
  strength; emits RFC 4180 CSV.
* ``resources``: print the resource accounting table for the schemes.

Exit codes: 0 success, 1 failed checks or unstable estimates, 2 usage,
configuration, or input format errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from .channels import NoiseModel, adjoint_channel, dual_state, noisy_circuit_channel
from .circuits import (
    CircuitFormatError,
    inverse_circuit,
    load_circuit,
    random_circuit,
)
from .config import ConfigError, ExperimentConfig, load_config
from .linalg import (
    DensityOperator,
    kron_power,
    random_density,
    random_hermitian,
    random_unitary,
)
from .measurement import (
    antisymmetric_product_measure,
    hadamard_test,
    product_expectation,
    symmetric_product_measure,
)
from .observables import ObservableFormatError, PauliObservable, parse_observable
from .purification import DegenerateSpectrumError
from .reports import EstimateReport
from .resources import resource_profile
from .sampling import ShotConfig, UnstableDenominatorError, scheme_shot_experiment
from .schemes import (
    VanishingDenominatorError,
    _composite_verified,
    _permutation_contraction,
    build_pipeline,
)


def _verify_checks(seed: int):
    """Yield (name, max_residual) for the identity self-checks."""
    rng = np.random.default_rng(seed)

    res = 0.0
    for _ in range(25):
        d = int(rng.integers(2, 5))
        m = int(rng.integers(2, 5))
        if d**m > 256:
            continue
        rho = random_density(rng, d).matrix
        obs = random_hermitian(rng, d)
        got = _permutation_contraction(obs, [rho] * m)
        power = np.linalg.matrix_power(rho, m)
        want = complex(np.trace(obs @ power))
        res = max(res, abs(got - want))
    yield "cyclic-contraction", res

    res = 0.0
    for _ in range(25):
        d = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        if d**m > 256:
            continue
        rho = random_density(rng, d).matrix
        z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rbar = z @ z.conj().T / d  # PSD, deliberately not normalized
        obs = random_hermitian(rng, d)
        chain = np.linalg.matrix_power(rho @ rbar, m)
        want = complex(np.trace(obs @ chain))
        got = _composite_verified(kron_power(rbar, m), obs, rho, m)
        res = max(res, abs(got - want))
    yield "verified-contraction", res

    res = 0.0
    for _ in range(25):
        n = int(rng.integers(1, 3))
        circ = random_circuit(rng, n, 4)
        d = circ.dim
        noise = NoiseModel("depolarizing-local", 0.05)
        ch = noisy_circuit_channel(circ, noise)
        adj = adjoint_channel(ch)
        a = random_hermitian(rng, d)
        b = random_hermitian(rng, d)
        lhs = np.trace(_apply(adj, a) @ b)
        rhs = np.trace(a @ _apply(ch, b))
        res = max(res, abs(complex(lhs - rhs)))
    yield "adjoint-pairing", res

    res = 0.0
    for _ in range(10):
        n = int(rng.integers(1, 3))
        circ = random_circuit(rng, n, 4)
        noise = NoiseModel("dephasing", 0.1)
        rbar = dual_state(circ, noise).matrix
        inv = inverse_circuit(circ)
        ch = adjoint_channel(noisy_circuit_channel(inv, noise))
        want = _apply(ch, DensityOperator.computational_zero(n).matrix)
        res = max(res, float(np.max(np.abs(rbar - want))))
    yield "dual-state-reconstruction", res

    res_sym = 0.0
    res_rot = 0.0
    res_prod = 0.0
    letters = "IXYZ"
    for _ in range(25):
        n = int(rng.integers(1, 3))
        d = 2**n
        string = "".join(letters[rng.integers(4)] for _ in range(n))
        g = PauliObservable.single(string)
        s = random_hermitian(rng, d)
        rho = random_density(rng, d).matrix
        gm = g.matrix()
        sym = symmetric_product_measure(s, g, rho)
        want_sym = complex(np.trace((s @ gm + gm @ s) / 2.0 @ rho))
        res_sym = max(res_sym, abs(sym - want_sym))
        anti = antisymmetric_product_measure(s, g, rho)
        want_anti = 1j * complex(np.trace((s @ gm - gm @ s) / 2.0 @ rho))
        res_rot = max(res_rot, abs(anti - want_anti))
        prod = product_expectation(s, g, rho)
        res_prod = max(res_prod, abs(prod - complex(np.trace(s @ gm @ rho))))
    yield "projective-split", res_sym
    yield "rotation-split", res_rot
    yield "product-reconstruction", res_prod

    res = 0.0
    for _ in range(25):
        d = int(2 ** rng.integers(1, 4))
        u = random_unitary(rng, d)
        s = random_hermitian(rng, d)
        rho = random_density(rng, d).matrix
        re = hadamard_test(u, s, rho, "real")
        im = hadamard_test(u, s, rho, "imag")
        res = max(res, abs(complex(re, im) - complex(np.trace(s @ u @ rho))))
    yield "hadamard-test", res


def _apply(channel, mat: np.ndarray) -> np.ndarray:
    ops = channel.ops
    return np.einsum("kij,jl,kml->im", ops, mat, ops.conj(), optimize=True)


def cmd_verify(args) -> int:
    tol = args.tolerance
    failed = 0
    for name, residual in _verify_checks(args.seed):
        ok = residual <= tol
        if not ok:
            failed += 1
        print(f"{name:<28} max residual {residual:.3e}  {'PASS' if ok else 'FAIL'}")
    print(f"{'all checks passed' if failed == 0 else f'{failed} check(s) failed'}")
    return 0 if failed == 0 else 1


def _resolve_path(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def _effective(scheme: str, copies: int):
    """Degree-1 multi-copy runs are plain raw estimation."""
    if scheme in ("multi-copy", "multi-copy-recycled") and copies < 2:
        return "raw", 1
    return scheme, copies


def _build_from_config(config: ExperimentConfig, config_dir: Path):
    circuit = load_circuit(_resolve_path(config_dir, config.circuit))
    observable = parse_observable(config.observable)
    scheme, copies = _effective(config.scheme, config.m)
    return build_pipeline(
        scheme,
        circuit,
        config.noise,
        observable,
        n_copies=copies,
        machinery_noise=config.machinery_noise,
        dual_noise=config.dual_noise,
    )


def _run_config(config: ExperimentConfig, config_dir: Path, exact: bool) -> EstimateReport:
    pipeline = _build_from_config(config, config_dir)
    if exact or config.shots is None:
        return pipeline.exact_report()
    shot_config = ShotConfig(shots=config.shots, trials=config.trials, seed=config.seed)
    return scheme_shot_experiment(pipeline, shot_config)


def _config_dict(config: ExperimentConfig) -> dict:
    out = {
        "scheme": config.scheme,
        "circuit": config.circuit,
        "observable": config.observable,
        "m": config.m,
        "shots": "exact" if config.shots is None else config.shots,
        "trials": config.trials,
        "seed": config.seed,
        "noise": {"kind": config.noise.kind, "strength": config.noise.strength},
        "machinery_noise": {
            "kind": config.machinery_noise.kind,
            "strength": config.machinery_noise.strength,
        },
    }
    if config.dual_noise is not None:
        out["dual_noise"] = {
            "kind": config.dual_noise.kind,
            "strength": config.dual_noise.strength,
        }
    return out


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    from dataclasses import replace

    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "shots", None) is not None:
        config = replace(config, shots=args.shots)
    return config


def cmd_run(args) -> int:
    config = load_config(args.config)
    config = _apply_overrides(config, args)
    started = time.perf_counter()
    report = _run_config(config, Path(args.config).parent, args.exact)
    elapsed = time.perf_counter() - started
    payload = {
        "config": _config_dict(config),
        "report": report.as_dict(),
        "wall_time_s": elapsed,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    _emit(text, args.output if args.output is not None else config.output)
    return 0


_SWEEP_COLUMNS = [
    "parameter",
    "value",
    "scheme",
    "degree",
    "registers",
    "ctrl_register_swaps",
    "ctrl_qubit_swaps",
    "depth_factor",
    "ancillas",
    "ratio",
    "ratio_stderr",
    "exact_ratio",
    "ideal_value",
    "exact_bias",
    "shots_used",
]


def cmd_sweep(args) -> int:
    from dataclasses import replace

    config = load_config(args.config)
    config = _apply_overrides(config, args)
    values_text = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values_text:
        raise ConfigError("sweep needs at least one value")
    config_dir = Path(args.config).parent
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(_SWEEP_COLUMNS)
    for text in values_text:
        if args.parameter == "M":
            try:
                value = int(text)
            except ValueError:
                raise ConfigError(f"sweep value {text!r} is not an integer") from None
            point = replace(config, m=value)
        else:
            try:
                value = float(text)
            except ValueError:
                raise ConfigError(f"sweep value {text!r} is not a number") from None
            point = replace(config, noise=NoiseModel(config.noise.kind, value))
        pipeline = _build_from_config(point, config_dir)
        exact = pipeline.exact_report()
        if args.exact or point.shots is None:
            report = exact
        else:
            shot_config = ShotConfig(
                shots=point.shots, trials=point.trials, seed=point.seed
            )
            report = scheme_shot_experiment(pipeline, shot_config)
        bias = (
            abs(exact.ratio - exact.ideal_value)
            if exact.ideal_value is not None
            else ""
        )
        prof = report.resources
        writer.writerow(
            [
                args.parameter,
                value,
                report.kind,
                prof.degree,
                prof.registers,
                prof.control_register_swaps,
                prof.qubit_level_control_swaps,
                prof.depth_factor,
                prof.ancillas,
                repr(report.ratio),
                repr(report.ratio_stderr),
                repr(exact.ratio),
                repr(exact.ideal_value) if exact.ideal_value is not None else "",
                repr(bias) if bias != "" else "",
                report.shots_used,
            ]
        )
    _emit(buf.getvalue(), args.output if args.output is not None else config.output)
    return 0


def cmd_resources(args) -> int:
    if args.max_degree < 1:
        raise ConfigError(f"max degree must be >= 1, got {args.max_degree}")
    rows = [resource_profile("raw", 1, args.qubits)]
    for degree in range(2, args.max_degree + 1):
        rows.append(resource_profile("multi-copy", degree, args.qubits))
        rows.append(resource_profile("multi-copy-recycled", degree, args.qubits))
        if degree == 2:
            rows.append(resource_profile("state-verification", 2, args.qubits))
        if degree % 2 == 0:
            rows.append(resource_profile("combined", degree, args.qubits))
    header = [
        "kind",
        "degree",
        "registers",
        "ctrl_register_swaps",
        "ctrl_qubit_swaps",
        "depth_factor",
        "ancillas",
    ]
    if args.output is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        for r in rows:
            writer.writerow(
                [
                    r.kind,
                    r.degree,
                    r.registers,
                    r.control_register_swaps,
                    r.qubit_level_control_swaps,
                    r.depth_factor,
                    r.ancillas,
                ]
            )
        _emit(buf.getvalue(), args.output)
        return 0
    widths = [22, 7, 10, 20, 17, 13, 9]
    line = "".join(h.ljust(w) for h, w in zip(header, widths))
    print(line.rstrip())
    for r in rows:
        cells = [
            r.kind,
            str(r.degree),
            str(r.registers),
            str(r.control_register_swaps),
            str(r.qubit_level_control_swaps),
            str(r.depth_factor),
            str(r.ancillas),
        ]
        print("".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="puremit",
        description="Density-matrix simulation of purification-based error mitigation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the built-in identity self-checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run one configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--shots", type=int, default=None, help="override the shot budget")
    p.add_argument("--exact", action="store_true", help="force exact evaluation")
    p.add_argument("--output", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep the copy count or the noise strength")
    p.add_argument("--config", required=True)
    p.add_argument(
        "--parameter",
        choices=("M", "noise.strength"),
        default="M",
    )
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--shots", type=int, default=None, help="override the shot budget")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--output", default=None, help="write the CSV table here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("resources", help="print the scheme resource table")
    p.add_argument("--qubits", type=int, default=1, help="register width")
    p.add_argument("--max-degree", type=int, default=4, help="largest degree to list")
    p.add_argument("--seed", type=int, default=None, help="accepted for uniformity")
    p.add_argument("--output", default=None, help="write CSV instead of a table")
    p.set_defaults(func=cmd_resources)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DegenerateSpectrumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, CircuitFormatError, ObservableFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UnstableDenominatorError, VanishingDenominatorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

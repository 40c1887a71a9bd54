"""Command-line entry point: `run` (Monte-Carlo sweep to CSV), `demo`
(single reconstruction trial), `slope` (decay-rate fit from a CSV), and
`bench` (packed vs dense adjoint-multiply timing).

Exit codes: 0 success, 1 runtime/IO error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import bitkernel, experiments, operators, recon
from .experiments import Cell, ConfigError, ExperimentConfig
from .recon import SchemeKind

_CONFIG_KEYS = {"dim_n", "sparsities", "log2_ratios", "schemes", "matrix",
                "trials", "base_seed", "threads"}


def load_config(path: str, seed_override=None, threads_override=None
                ) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("dim_n", "sparsities", "log2_ratios", "schemes"):
        if key not in raw:
            raise ConfigError(f"missing required config key: {key}")
    try:
        schemes = tuple(SchemeKind(s) for s in raw["schemes"])
    except ValueError:
        raise ConfigError(
            f"schemes must be drawn from "
            f"{[k.value for k in SchemeKind]}, got {raw['schemes']}")
    if seed_override is not None:
        raw["base_seed"] = seed_override
    if threads_override is not None:
        raw["threads"] = threads_override
    return ExperimentConfig(
        dim_n=raw["dim_n"],
        sparsities=tuple(raw["sparsities"]),
        log2_ratios=tuple(float(r) for r in raw["log2_ratios"]),
        schemes=schemes,
        matrix=raw.get("matrix", "fourier"),
        trials=raw.get("trials", 100),
        base_seed=raw.get("base_seed", 0),
        threads=raw.get("threads"),
    )


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config, args.seed, args.threads)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rows = experiments.run_experiment(cfg)
    try:
        experiments.write_csv(rows, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_demo(args) -> int:
    try:
        scheme = SchemeKind(args.scheme)
    except ValueError:
        print(f"unknown scheme {args.scheme!r}; choose from "
              f"{[k.value for k in SchemeKind]}", file=sys.stderr)
        return 2
    try:
        cell = Cell(scheme=scheme, matrix=args.matrix, n=args.n, s=args.s,
                    log2_ratio=args.ratio)
        ExperimentConfig(dim_n=args.n, sparsities=(args.s,),
                         log2_ratios=(args.ratio,), schemes=(scheme,),
                         matrix=args.matrix, trials=1, base_seed=args.seed)
    except ConfigError as exc:
        print(f"invalid combination: {exc}", file=sys.stderr)
        return 2
    op_seed, sig_seed, meas_seed, mat_seed = experiments._trial_seeds(
        args.seed, cell, 0)
    op = experiments._make_operator(args.matrix, args.n, cell.m, op_seed)
    x = recon.gen_sparse_signal(args.n, args.s, sig_seed)
    result = recon.reconstruct(scheme, op, x, args.s, meas_seed, mat_seed)
    supp = " ".join(str(i) for i in result.support)
    print(f"scheme={scheme.value} matrix={args.matrix} n={args.n} s={args.s} "
          f"m={cell.m} error_db={result.error_db:.4f} support=[{supp}]")
    return 0


def cmd_slope(args) -> int:
    try:
        rows = experiments.read_csv(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        scheme = SchemeKind(args.scheme)
    except ValueError:
        print(f"unknown scheme {args.scheme!r}", file=sys.stderr)
        return 2
    sel = [r for r in rows if r.scheme is scheme and r.s == args.s]
    try:
        slope = experiments.fit_decay_slope(sel, args.min_ratio)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"slope_db_per_octave={slope:.4f}")
    return 0


def cmd_bench(args) -> int:
    rng = np.random.default_rng(0)
    signs = rng.integers(0, 2, size=(args.m, args.n)) * 2 - 1
    isign = rng.integers(0, 2, size=(args.m, args.n)) * 2 - 1
    psi = (signs + 1j * isign).astype(complex)
    zs = rng.integers(0, 2, size=args.m) * 2 - 1
    zi = rng.integers(0, 2, size=args.m) * 2 - 1
    z = (zs + 1j * zi).astype(complex)

    packed_mat = bitkernel.pack_matrix(psi, 1.0)
    packed_vec = bitkernel.pack_vector(z, 1.0)
    psi_h = np.conj(psi.T).copy()

    t0 = time.perf_counter()
    for _ in range(args.reps):
        packed = bitkernel.binary_adjoint_multiply(packed_mat, packed_vec)
    t_packed = (time.perf_counter() - t0) / args.reps

    t0 = time.perf_counter()
    for _ in range(args.reps):
        dense = psi_h @ z
    t_dense = (time.perf_counter() - t0) / args.reps

    exact = bool(np.array_equal(packed, dense))
    print(f"m={args.m} n={args.n} reps={args.reps} "
          f"packed_s={t_packed:.6e} dense_s={t_dense:.6e} "
          f"ratio={t_dense / t_packed:.3f} exact={exact}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="onebitcs",
        description="1-bit compressive sensing experiments and kernels")
    sub = p.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="run a Monte-Carlo sweep to CSV")
    run.add_argument("--config", required=True, help="JSON config file")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--seed", type=int, default=None,
                     help="override base_seed from the config")
    run.set_defaults(func=cmd_run)

    demo = sub.add_parser("demo", help="run a single reconstruction trial")
    demo.add_argument("--matrix", required=True,
                      choices=list(experiments.MATRIX_KINDS))
    demo.add_argument("--n", required=True, type=int)
    demo.add_argument("--s", required=True, type=int)
    demo.add_argument("--ratio", required=True, type=float,
                      help="log2(m/N)")
    demo.add_argument("--scheme", required=True)
    demo.add_argument("--seed", type=int, default=0)
    demo.set_defaults(func=cmd_demo)

    slope = sub.add_parser("slope", help="fit the decay slope from a CSV")
    slope.add_argument("--in", dest="input", required=True)
    slope.add_argument("--scheme", required=True)
    slope.add_argument("--s", required=True, type=int)
    slope.add_argument("--min-ratio", type=float, default=0.0)
    slope.set_defaults(func=cmd_slope)

    bench = sub.add_parser("bench", help="time packed vs dense adjoint multiply")
    bench.add_argument("--m", required=True, type=int)
    bench.add_argument("--n", required=True, type=int)
    bench.add_argument("--reps", type=int, default=10)
    bench.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (experiments.ConfigError, operators.DimensionError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

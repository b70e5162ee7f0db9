"""Command-line front end.

Subcommands: gen-matrices, gen-signal, compress, reconstruct, validate,
bench. stdout carries machine-parseable JSON or CSV only; human messages
and per-run metadata go to stderr. Exit codes: 0 ok, 1 failed validation,
2 usage, 3 input parse, 4 input semantics, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import solve_triangular

from .approx import gen_sine_mix, gen_whitenoise, mse, reconstruct_real
from .checks import default_check_suite
from .discretize import FIXED, INDEX_BASED, TIMESTAMPED, SchemeSpec, run_stream
from .errors import SignalFormatError, SingularSolveError, TimestampOrderError
from .families import ChebT, FourT, Fru, LagT, LegS, LegT, family_name
from .fastlegs import LegsFactors, legs_stream
from .operators import build_generator, build_legs, generator_to_json
from .signals import (
    Signal,
    read_signal_csv,
    read_trajectory_csv,
    write_reconstruction_csv,
    write_signal_csv,
    write_trajectory_csv,
)

_FAMILY_NAMES = ("legt", "lagt", "legs", "fourt", "fru", "chebt")
_CHECK_NAMES = ("equivariance", "gradient_norm", "discretization_order")
_MIN_BENCH_STEPS = 10_000


def _resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("HIPPO_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"HIPPO_SEED must be an integer, got {env!r}") from None
    return 0


def _parse_freqs(text: str) -> tuple:
    try:
        freqs = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(
            f"bad --freqs {text!r}: want comma-separated numbers"
        ) from None
    return freqs


def _parse_dims(text: str) -> tuple:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"bad --n {text!r}: want comma-separated integers") from None
    if any(n < 1 for n in dims):
        raise ValueError(f"dimensions must be positive, got {text!r}")
    return dims


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad --grid {text!r}: want start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"bad --grid {text!r}: want start:stop:count") from None
    if count < 2 or stop <= start:
        raise ValueError(f"bad --grid {text!r}: need stop > start and count >= 2")
    return np.linspace(start, stop, count)


def _add_family_flags(parser, lagt_flags=("--lagt-alpha", "--lagt-beta")) -> None:
    parser.add_argument("--family", required=True, choices=_FAMILY_NAMES)
    parser.add_argument(
        "--theta", type=float, default=1.0,
        help="window length for the windowed families (default 1)",
    )
    parser.add_argument(
        "--scaling", choices=("orthonormal", "lmu"), default="orthonormal",
        help="LegT basis normalization (default orthonormal)",
    )
    parser.add_argument(
        lagt_flags[0], dest="lagt_alpha", type=float, default=0.0,
        help="LagT tilt exponent in (-1, 1) (default 0)",
    )
    parser.add_argument(
        lagt_flags[1], dest="lagt_beta", type=float, default=1.0,
        help="LagT decay rate, positive (default 1)",
    )
    parser.add_argument(
        "--freqs", default="0",
        help="comma-separated FRU frequencies (default '0')",
    )


def _family_from_args(args):
    name = args.family
    if name == "legt":
        return LegT(theta=args.theta, scaling=args.scaling)
    if name == "lagt":
        return LagT(alpha=args.lagt_alpha, beta=args.lagt_beta)
    if name == "legs":
        return LegS()
    if name == "fourt":
        return FourT(theta=args.theta)
    if name == "fru":
        return Fru(theta=args.theta, freqs=_parse_freqs(args.freqs))
    if name == "chebt":
        return ChebT(theta=args.theta)
    raise ValueError(f"unknown family {name!r}")


def _dim(args, family) -> int:
    if args.n is not None:
        return args.n
    if isinstance(family, Fru):
        return len(family.freqs)
    raise ValueError("--n is required for this family")


def _out(dest):
    return sys.stdout if dest == "-" else dest


def _emit_json(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _meta(doc: dict) -> None:
    print(json.dumps(doc), file=sys.stderr)


def _read_samples(args) -> tuple[Signal, str]:
    """Load the input file and bind it to the step policy flags."""
    times, values = read_signal_csv(args.input)
    if args.timestamped:
        if times is None:
            raise ValueError(
                "--timestamped requires a 't,value' input file; "
                f"{args.input} has no timestamp column"
            )
        return Signal.timestamped(times, values), TIMESTAMPED
    if times is not None:
        raise ValueError(
            f"{args.input} carries timestamps; pass --timestamped"
        )
    if args.dt is not None:
        return Signal.uniform(values, args.dt), FIXED
    return Signal.uniform(values, 1.0), INDEX_BASED


def _cmd_gen_matrices(args) -> int:
    seed = _resolve_seed(args.seed)
    family = _family_from_args(args)
    gen = build_generator(family, _dim(args, family))
    doc = generator_to_json(gen)
    doc["seed"] = seed
    _emit_json(doc)
    return 0


def _cmd_gen_signal(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.kind == "whitenoise":
        if args.dt is None or args.band is None:
            raise ValueError("whitenoise generation needs --dt and --band")
        signal = gen_whitenoise(args.length, args.dt, args.band, seed)
    else:
        signal = gen_sine_mix(args.length, args.x_max)
    write_signal_csv(_out(args.output), signal)
    _meta({"seed": seed, "kind": args.kind, "length": len(signal), "dt": signal.dt})
    return 0


def _cmd_compress(args) -> int:
    seed = _resolve_seed(args.seed)
    family = _family_from_args(args)
    n = _dim(args, family)
    signal, policy = _read_samples(args)
    scheme = SchemeSpec(
        method=args.scheme, alpha=args.alpha, policy=policy, dt=args.dt
    )
    gen = build_generator(family, n)
    start = time.perf_counter()
    result = run_stream(gen, scheme, signal, record=args.record)
    wall = time.perf_counter() - start
    states = result if args.record == "all" else [result]
    write_trajectory_csv(_out(args.output), states)
    _meta(
        {
            "seed": seed,
            "family": family_name(family),
            "n": n,
            "steps": len(signal),
            "wall_seconds": wall,
            "steps_per_second": len(signal) / wall if wall > 0 else None,
        }
    )
    return 0


def _cmd_reconstruct(args) -> int:
    seed = _resolve_seed(args.seed)
    family = _family_from_args(args)
    _, ts, coefs = read_trajectory_csv(args.coeffs)
    c = coefs[-1]
    t_eval = float(ts[-1])
    times, values = read_signal_csv(args.input)
    if args.timestamped:
        if times is None:
            raise ValueError(
                "--timestamped requires a 't,value' input file; "
                f"{args.input} has no timestamp column"
            )
        sample_times = times
    else:
        if times is not None:
            raise ValueError(f"{args.input} carries timestamps; pass --timestamped")
        dt = args.dt if args.dt is not None else 1.0
        sample_times = (np.arange(len(values)) + 1.0) * dt
    if args.grid is not None:
        xs = _parse_grid(args.grid)
        truth = np.interp(xs, sample_times, values)
    else:
        xs = sample_times
        truth = values
    approx = reconstruct_real(family, c, t_eval, xs)
    write_reconstruction_csv(_out(args.output), xs, truth, approx)
    _meta({"seed": seed, "t": t_eval, "mse": mse(truth, approx)})
    return 0


def _cmd_validate(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.jobs < 1:
        raise ValueError(f"--jobs must be positive, got {args.jobs}")
    suite = default_check_suite()
    if args.check and not args.all:
        wanted = set(args.check)
        suite = tuple(pair for pair in suite if pair[0] in wanted)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(lambda pair: pair[1](), suite))
    else:
        reports = [thunk() for _, thunk in suite]
    doc = {
        "seed": seed,
        "checks": [r.to_dict() for r in reports],
        "pass": all(r.passed for r in reports),
    }
    _emit_json(doc)
    return 0 if doc["pass"] else 1


def bench_fast(n: int, steps: int, alpha: float, seed: int) -> float:
    """Seconds for one linear-time scaled-stream run (after JIT warmup)."""
    factors = LegsFactors.from_dim(n)
    b = build_legs(n).g_vec
    values = np.random.default_rng(seed).standard_normal(steps)
    legs_stream(factors, b, alpha, values[: min(steps, 1024)].copy())
    start = time.perf_counter()
    legs_stream(factors, b, alpha, values, c=np.zeros(n))
    return time.perf_counter() - start


def bench_dense(n: int, steps: int, alpha: float, seed: int) -> float:
    """Seconds for the quadratic-time baseline: per-step matrix assembly,
    dense matvec, and a BLAS triangular solve."""
    gen = build_legs(n)
    a = -gen.f_mat
    b = gen.g_vec
    values = np.random.default_rng(seed).standard_normal(steps)
    eye = np.eye(n)

    def run(count: int) -> np.ndarray:
        c = np.zeros(n)
        for k in range(count):
            f = values[k]
            if k == 0:
                rhs = b * f
            else:
                rhs = c - ((1.0 - alpha) / k) * (a @ c) + (f / k) * b
            if alpha != 0.0:
                m = eye + (alpha / (k + 1)) * a
                c = solve_triangular(m, rhs, lower=True)
            else:
                c = rhs
        return c

    run(min(steps, 64))
    start = time.perf_counter()
    run(steps)
    return time.perf_counter() - start


def _cmd_bench(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.steps < _MIN_BENCH_STEPS:
        raise ValueError(
            f"--steps must be at least {_MIN_BENCH_STEPS} for stable timing, "
            f"got {args.steps}"
        )
    if args.jobs < 1:
        raise ValueError(f"--jobs must be positive, got {args.jobs}")
    dims = _parse_dims(args.n)
    impls = ("fast", "dense") if args.impl == "both" else (args.impl,)
    configs = [(n, impl) for n in dims for impl in impls]

    def run(config):
        n, impl = config
        timer = bench_fast if impl == "fast" else bench_dense
        seconds = timer(n, args.steps, args.alpha, seed)
        return {
            "n": n,
            "impl": impl,
            "seconds": seconds,
            "steps_per_second": args.steps / seconds,
        }

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run, configs))
    else:
        results = [run(config) for config in configs]
    _emit_json(
        {"seed": seed, "steps": args.steps, "alpha": args.alpha, "results": results}
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hippo",
        description="Streaming function compression onto orthogonal bases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-matrices", help="export generator matrices as JSON")
    _add_family_flags(p, lagt_flags=("--alpha", "--beta"))
    p.add_argument("--n", type=int, help="state dimension")
    p.add_argument("--seed", type=int, help="recorded in output metadata")
    p.set_defaults(func=_cmd_gen_matrices)

    p = sub.add_parser("gen-signal", help="write a test signal CSV")
    p.add_argument("--kind", choices=("whitenoise", "sinemix"), required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--dt", type=float, help="sample spacing (whitenoise)")
    p.add_argument("--band", type=float, help="band limit in Hz (whitenoise)")
    p.add_argument(
        "--x-max", type=float, default=100.0, help="domain end (sinemix)"
    )
    p.add_argument("--output", required=True, help="output path, or - for stdout")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_gen_signal)

    p = sub.add_parser("compress", help="stream a signal into coefficients")
    _add_family_flags(p)
    p.add_argument("--n", type=int, help="state dimension")
    p.add_argument("--scheme", choices=("gbt", "zoh"), default="gbt")
    p.add_argument(
        "--alpha", type=float, default=0.5,
        help="GBT mixing weight in [0, 1]: 0 forward Euler, 0.5 bilinear, "
        "1 backward Euler (default 0.5)",
    )
    steps = p.add_mutually_exclusive_group(required=True)
    steps.add_argument("--dt", type=float, help="fixed step size")
    steps.add_argument(
        "--timestamped", action="store_true",
        help="adaptive steps from the input's timestamp column",
    )
    steps.add_argument(
        "--indexed", action="store_true",
        help="unit steps in sample index (scaled-window family only)",
    )
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output path, or - for stdout")
    p.add_argument("--record", choices=("final", "all"), default="final")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("reconstruct", help="evaluate coefficients against a signal")
    _add_family_flags(p)
    p.add_argument("--coeffs", required=True, help="trajectory CSV from compress")
    p.add_argument("--input", required=True, help="signal CSV for ground truth")
    steps = p.add_mutually_exclusive_group(required=True)
    steps.add_argument("--dt", type=float, help="fixed step size used at compress time")
    steps.add_argument("--timestamped", action="store_true")
    steps.add_argument("--indexed", action="store_true")
    p.add_argument(
        "--grid", help="explicit query grid start:stop:count (default: sample times)"
    )
    p.add_argument("--output", required=True, help="output path, or - for stdout")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("validate", help="run the property checks")
    p.add_argument("--all", action="store_true", help="run every check (default)")
    p.add_argument(
        "--check", action="append", choices=_CHECK_NAMES,
        help="run one named check (repeatable)",
    )
    p.add_argument("--jobs", type=int, default=1, help="checks run concurrently")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", help="time the stepper implementations")
    p.add_argument("--n", default="256", help="comma-separated state dimensions")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--impl", choices=("fast", "dense", "both"), default="both")
    p.add_argument("--alpha", type=float, default=0.5, help="GBT mixing weight")
    p.add_argument(
        "--jobs", type=int, default=1,
        help="configs run concurrently (timings contend; keep 1 for reports)",
    )
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_bench)

    return parser


def _fail(exc: BaseException, code: int) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except SignalFormatError as exc:
        return _fail(exc, 3)
    except TimestampOrderError as exc:
        return _fail(exc, 4)
    except (SingularSolveError, np.linalg.LinAlgError) as exc:
        return _fail(exc, 5)
    except ValueError as exc:
        return _fail(exc, 2)
    except OSError as exc:
        return _fail(exc, 3)


if __name__ == "__main__":
    sys.exit(main())

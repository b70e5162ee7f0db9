"""Executable validation of the streaming properties.

Three checks: timescale equivariance of the scaled stream under
subsampling, decay of the unrolled state-to-state gradient norm, and the
accuracy ordering of the discretization schemes. Each returns a
CheckReport whose pass flag is a pure function of the measurements and
the stated threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approx import compress_and_score, gen_sine_mix
from .discretize import GBT, INDEX_BASED, SchemeSpec, run_stream
from .families import LegS
from .operators import build_generator, build_legs
from .signals import Signal

__all__ = [
    "CheckReport",
    "check_equivariance",
    "check_gradient_norm",
    "compare_discretizations",
    "fit_loglog",
    "default_check_suite",
    "default_checks",
]

# lengths below this are reported but not gated by the 5% bound
_EQUIVARIANCE_GATE_LENGTH = 4096


@dataclass(frozen=True)
class CheckReport:
    name: str
    measurements: tuple[tuple[str, float], ...]
    fitted: dict | None
    passed: bool
    threshold: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "measurements": [
                {"parameter": p, "value": v} for p, v in self.measurements
            ],
            "fitted": self.fitted,
            "pass": self.passed,
            "threshold": self.threshold,
            "note": self.note,
        }


def fit_loglog(xs, ys) -> tuple[float, float]:
    """Least-squares slope and intercept of log y against log x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError(f"mismatched point arrays: {xs.shape} vs {ys.shape}")
    if len(xs) < 4:
        raise ValueError(f"log-log fit needs at least 4 points, got {len(xs)}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs strictly positive points")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(intercept)


def check_equivariance(signal: Signal, factor: int = 2, n: int = 16) -> CheckReport:
    """Compare final coefficients of a stream and its factor-subsampling.

    The scaled-window stream is timescale equivariant, so running on
    h_k = f_{factor k} should land on (nearly) the same state as running
    on f itself. Deviation is measured at half and full length; the 5%
    bound applies to lengths of at least 4096 and the full-length
    deviation must shrink below the half-length one.
    """
    if signal.times is not None:
        raise ValueError("equivariance check requires a uniform signal")
    if factor < 1:
        raise ValueError(f"factor must be at least 1, got {factor}")
    length = len(signal)
    half = length // 2
    if length % factor or half % factor or half < factor:
        raise ValueError(
            f"signal length {length} and its half must be divisible by "
            f"factor {factor}"
        )

    gen = build_generator(LegS(), n)
    scheme = SchemeSpec(method=GBT, alpha=0.5, policy=INDEX_BASED)

    def final_c(values: np.ndarray) -> np.ndarray:
        sig = Signal.uniform(np.ascontiguousarray(values), signal.dt)
        return run_stream(gen, scheme, sig, record="final").c

    def deviation(ell: int) -> float:
        prefix = signal.values[:ell]
        full = final_c(prefix)
        sub = final_c(prefix[::factor])
        num = float(np.linalg.norm(sub - full))
        den = float(np.linalg.norm(full))
        if den == 0.0:
            return 0.0 if num == 0.0 else float("inf")
        return num / den

    d_half = deviation(half)
    d_full = deviation(length)
    ok_half = d_half <= 0.05 or half < _EQUIVARIANCE_GATE_LENGTH
    ok_full = d_full <= 0.05 or length < _EQUIVARIANCE_GATE_LENGTH
    shrinks = d_full < d_half or (d_full == 0.0 and d_half == 0.0)
    return CheckReport(
        name="equivariance",
        measurements=(
            (f"deviation_at_{half}", d_half),
            (f"deviation_at_{length}", d_full),
        ),
        fitted=None,
        passed=ok_half and ok_full and shrinks,
        threshold=(
            "relative deviation <= 5% at lengths >= 4096 and shrinking "
            "as length doubles"
        ),
        note=f"factor {factor}, N {n}",
    )


def check_gradient_norm(n: int, k0: int, ells) -> CheckReport:
    """Fit the decay exponent of the unrolled gradient norm.

    J(ell) = (I - A/ell) ... (I - A/(k0+1)) B / k0, computed as a
    sequential matrix-vector chain. The norm should decay like 1/ell.
    """
    ells = sorted(int(e) for e in ells)
    if k0 < 2:
        raise ValueError(f"k0 must be at least 2, got {k0}")
    if not ells or ells[0] <= k0:
        raise ValueError(f"every ell must exceed k0 = {k0}")
    gen = build_legs(n)
    a = -gen.f_mat
    v = gen.g_vec / k0
    targets = set(ells)
    norms = []
    for i in range(k0 + 1, ells[-1] + 1):
        v = v - (a @ v) / i
        if i in targets:
            norms.append(float(np.linalg.norm(v)))
    slope, intercept = fit_loglog(ells, norms)
    return CheckReport(
        name="gradient_norm",
        measurements=tuple(
            (f"norm_at_{ell}", value) for ell, value in zip(ells, norms)
        ),
        fitted={"slope": slope, "intercept": intercept},
        passed=-1.2 <= slope <= -0.8,
        threshold="log-log slope in [-1.2, -0.8]",
        note=f"N {n}, k0 {k0}",
    )


def compare_discretizations(signal: Signal, n: int = 64) -> CheckReport:
    """Score forward Euler, backward Euler, and bilinear on one signal.

    Bilinear should win strictly. A constant input is degenerate (all
    schemes converge to the same state), so the ordering is not gated
    there and the report says so.
    """
    if signal.times is not None:
        raise ValueError("discretization comparison requires a uniform signal")
    values = signal.values
    degenerate = float(np.ptp(values)) < 1e-12 * max(1.0, abs(float(values.mean())))
    schemes = (("forward_euler", 0.0), ("backward_euler", 1.0), ("bilinear", 0.5))
    errs = {}
    for name, alpha in schemes:
        spec = SchemeSpec(method=GBT, alpha=alpha, policy=INDEX_BASED)
        errs[name] = compress_and_score(LegS(), spec, signal, n)["mse"]
    if degenerate:
        passed = True
        note = "degenerate input (constant); scheme ordering not gated"
    else:
        passed = (
            errs["bilinear"] < errs["forward_euler"]
            and errs["bilinear"] < errs["backward_euler"]
        )
        note = f"N {n}"
    return CheckReport(
        name="discretization_order",
        measurements=tuple((f"mse_{name}", errs[name]) for name, _ in schemes),
        fitted=None,
        passed=passed,
        threshold="bilinear mse strictly below forward and backward Euler",
        note=note,
    )


def default_check_suite() -> tuple:
    """Named thunks for the standard validation set, independent of each
    other so a caller may run them concurrently."""
    return (
        ("equivariance", lambda: check_equivariance(gen_sine_mix(8192, 100.0), 2, 16)),
        # Indices start at 300: the product is non-normal and its transient
        # growth near k0 masks the asymptotic exponent at ell = 100.
        (
            "gradient_norm",
            lambda: check_gradient_norm(32, 50, (300, 1000, 3000, 10000)),
        ),
        (
            "discretization_order",
            lambda: compare_discretizations(gen_sine_mix(1000, 100.0), 64),
        ),
    )


def default_checks(seed: int = 0) -> dict:
    """Run the standard validation set and aggregate into one document."""
    reports = [thunk() for _, thunk in default_check_suite()]
    return {
        "seed": seed,
        "checks": [r.to_dict() for r in reports],
        "pass": all(r.passed for r in reports),
    }

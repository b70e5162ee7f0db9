"""Discrete-time stepping of the coefficient dynamics.

Turns a Generator into a streaming recurrence c_{k+1} = Abar c_k + Bbar f_k
under a weighted-endpoint scheme (alpha in [0, 1]: 0 forward Euler, 1
backward Euler, 0.5 bilinear) or zero-order hold, with fixed, timestamp-
derived, or index-based step sizes. The index-based policy is the
scaled-Legendre recurrence whose weights contain no step size at all; fixed
step sizes reduce to it exactly because every dt cancels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSolveError, TimestampOrderError
from .fastlegs import LegsFactors, legs_matvec, legs_solve, legs_stream
from .operators import Generator
from .signals import Signal

__all__ = [
    "GBT",
    "ZOH",
    "FIXED",
    "TIMESTAMPED",
    "INDEX_BASED",
    "SchemeSpec",
    "CoefState",
    "gbt_step",
    "zoh_step",
    "matrix_exp",
    "legs_step",
    "run_stream",
]

GBT = "gbt"
ZOH = "zoh"
FIXED = "fixed"
TIMESTAMPED = "timestamped"
INDEX_BASED = "indexed"


@dataclass(frozen=True)
class SchemeSpec:
    """Discretization method plus step-size policy.

    dt is required by (and only by) the fixed policy; alpha is ignored under
    zero-order hold.
    """

    method: str = GBT
    alpha: float = 0.5
    policy: str = FIXED
    dt: float | None = None

    def __post_init__(self):
        if self.method not in (GBT, ZOH):
            raise ValueError(f"unknown method {self.method!r}")
        if self.policy not in (FIXED, TIMESTAMPED, INDEX_BASED):
            raise ValueError(f"unknown step policy {self.policy!r}")
        if self.method == GBT and not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.policy == FIXED:
            if self.dt is None or self.dt <= 0:
                raise ValueError(f"fixed policy needs dt > 0, got {self.dt}")
        elif self.dt is not None:
            raise ValueError(f"dt is only meaningful for the fixed policy")


@dataclass(frozen=True)
class CoefState:
    """Coefficient vector plus its step count and accumulated time."""

    c: np.ndarray
    k: int
    t: float


def matrix_exp(m: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated series.

    The argument is halved until its 1-norm is below 1/2, the series is
    summed until the next term falls below tol relative to the running sum,
    and the result is squared back up.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    norm = np.linalg.norm(m, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    scaled = m / (2.0**squarings)
    n = m.shape[0]
    acc = np.eye(n, dtype=scaled.dtype)
    term = np.eye(n, dtype=scaled.dtype)
    j = 0
    while True:
        j += 1
        term = term @ scaled / j
        acc = acc + term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(acc, 1) or j > 60:
            break
    for _ in range(squarings):
        acc = acc @ acc
    return acc


def _require_constant(gen: Generator, op: str) -> None:
    if gen.scaled_by_inv_t or gen.g_rule is not None:
        raise ValueError(f"{op} requires a time-invariant generator")


def gbt_step(gen: Generator, alpha: float, dt: float, state: CoefState, f: float) -> CoefState:
    """One weighted-endpoint step of a time-invariant generator.

    c' = (I - dt*alpha*F)^{-1} ((I + dt*(1-alpha)*F) c + dt*G*f). The alpha=0
    case skips the solve so the forward-Euler closed form is reproduced
    exactly, not just to solver accuracy.
    """
    _require_constant(gen, "gbt_step")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    f_mat, g_vec = gen.f_mat, gen.g_vec
    rhs = state.c + (dt * (1.0 - alpha)) * (f_mat @ state.c) + (dt * f) * g_vec
    if alpha == 0.0:
        c_new = rhs
    else:
        m = np.eye(gen.n, dtype=f_mat.dtype) - (dt * alpha) * f_mat
        try:
            c_new = np.linalg.solve(m, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSolveError(
                f"(I - dt*alpha*F) is singular at dt={dt}, alpha={alpha}"
            ) from exc
    return CoefState(c_new, state.k + 1, state.t + dt)


def _zoh_matrices(gen: Generator, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Hold matrices (Phi, Psi) with c' = Phi c + Psi f.

    Psi integrates the state transition against a held input; when F is
    singular the integral comes from the augmented exponential
    exp(dt*[[F, I], [0, 0]]), which is total.
    """
    f_mat, g_vec = gen.f_mat, gen.g_vec
    n = gen.n
    phi = matrix_exp(dt * f_mat)
    try:
        integral = np.linalg.solve(f_mat, phi - np.eye(n, dtype=phi.dtype))
    except np.linalg.LinAlgError:
        aug = np.zeros((2 * n, 2 * n), dtype=f_mat.dtype)
        aug[:n, :n] = f_mat
        aug[:n, n:] = np.eye(n, dtype=f_mat.dtype)
        integral = matrix_exp(dt * aug)[:n, n:]
    return phi, integral @ g_vec


def zoh_step(gen: Generator, dt: float, state: CoefState, f: float) -> CoefState:
    """One zero-order-hold step: exact for a constant generator and held input."""
    _require_constant(gen, "zoh_step")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    phi, psi = _zoh_matrices(gen, dt)
    return CoefState(phi @ state.c + psi * f, state.k + 1, state.t + dt)


def legs_step(a_mat: np.ndarray, b_vec: np.ndarray, alpha: float, state: CoefState, f: float) -> CoefState:
    """One step of the scaled-Legendre index recurrence (dense path).

    c' = (I + alpha/(k+1)*A)^{-1} ((I - (1-alpha)/k*A) c + (1/k)*B*f) for
    step count k >= 1; the k = 0 step is the pure injection
    c' = (I + alpha*A)^{-1} B f. There is deliberately no dt parameter:
    the weights depend only on the step count.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    a_mat = np.asarray(a_mat, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float)
    n = b_vec.shape[0]
    k = state.k
    if k == 0:
        rhs = b_vec * float(f)
    else:
        rhs = state.c - ((1.0 - alpha) / k) * (a_mat @ state.c) + (f / k) * b_vec
    if alpha == 0.0:
        c_new = rhs
    else:
        m = np.eye(n) + (alpha / (k + 1.0)) * a_mat
        try:
            c_new = np.linalg.solve(m, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSolveError(
                f"(I + alpha/(k+1)*A) is singular at k={k}, alpha={alpha}"
            ) from exc
    return CoefState(c_new, k + 1, state.t + 1.0)


def _legs_weights(alpha: float, t_prev: float, dt: float) -> tuple[float, float, float]:
    """Endpoint weights (delta_solve, w_prev, w_in) for a scaled-measure step.

    Generalizes the index recurrence to arbitrary step sizes; at t_prev = 0
    the limit is a pure injection. For t_prev = k*dt the dt cancels and the
    triple reduces to (alpha/(k+1), (1-alpha)/k, 1/k).
    """
    if t_prev == 0.0:
        return alpha, 0.0, 1.0
    return alpha * dt / (t_prev + dt), (1.0 - alpha) * dt / t_prev, dt / t_prev


def _run_legs_timestamped(gen: Generator, scheme: SchemeSpec, signal: Signal, record_all: bool):
    factors = LegsFactors(gen.n)
    b_vec = gen.g_vec
    alpha = scheme.alpha
    c = np.zeros(gen.n)
    t_prev = 0.0
    states = []
    work = np.empty(gen.n)
    for j, (t_j, f_j) in enumerate(zip(signal.times, signal.values)):
        dt = t_j - t_prev
        if dt < 0 or (dt == 0 and j > 0):
            raise TimestampOrderError(
                f"timestamps must increase strictly: sample {j} at t={t_j} "
                f"after t={t_prev}"
            )
        if dt > 0:
            delta_solve, w_prev, w_in = _legs_weights(alpha, t_prev, dt)
            if w_prev != 0.0:
                legs_matvec(factors, c, out=work)
                c = c - w_prev * work + (w_in * f_j) * b_vec
            else:
                c = (w_in * f_j) * b_vec
            if alpha != 0.0:
                c = legs_solve(factors, -delta_solve, c)
        t_prev = t_j
        if record_all:
            states.append(CoefState(c.copy(), j + 1, t_j))
    if record_all:
        return states
    return CoefState(c, len(signal.values), t_prev)


def _run_legs_uniform(gen: Generator, scheme: SchemeSpec, signal: Signal, record_all: bool):
    dt = 1.0 if scheme.policy == INDEX_BASED else scheme.dt
    factors = LegsFactors(gen.n)
    values = signal.values
    traj = np.empty((len(values), gen.n)) if record_all else None
    c = legs_stream(factors, gen.g_vec, scheme.alpha, values, k0=0, traj=traj)
    if record_all:
        return [CoefState(traj[j], j + 1, (j + 1) * dt) for j in range(len(values))]
    return CoefState(c, len(values), len(values) * dt)


def _run_fru(gen: Generator, scheme: SchemeSpec, signal: Signal, record_all: bool):
    # decoupled modes: forward Euler with the input map frozen at the
    # left endpoint of each hold interval
    c = np.zeros(gen.n, dtype=complex)
    t_prev = 0.0
    states = []
    for j, f_j in enumerate(signal.values):
        if signal.times is not None:
            t_j = signal.times[j]
            dt = t_j - t_prev
            if dt < 0 or (dt == 0 and j > 0):
                raise TimestampOrderError(
                    f"timestamps must increase strictly: sample {j} at t={t_j} "
                    f"after t={t_prev}"
                )
        else:
            dt = signal.dt
            t_j = t_prev + dt
        if dt > 0:
            c = c + dt * gen.g_rule(t_prev) * f_j
        t_prev = t_j
        if record_all:
            states.append(CoefState(c.copy(), j + 1, t_j))
    if record_all:
        return states
    return CoefState(c, len(signal.values), t_prev)


def _run_constant(gen: Generator, scheme: SchemeSpec, signal: Signal, record_all: bool):
    dtype = gen.f_mat.dtype
    c = np.zeros(gen.n, dtype=dtype)
    states = []
    if scheme.policy == FIXED:
        dt = scheme.dt
        if scheme.method == ZOH:
            abar, bbar = _zoh_matrices(gen, dt)
        else:
            alpha = scheme.alpha
            eye = np.eye(gen.n, dtype=dtype)
            right = eye + (dt * (1.0 - alpha)) * gen.f_mat
            if alpha == 0.0:
                abar, bbar = right, dt * gen.g_vec
            else:
                m = eye - (dt * alpha) * gen.f_mat
                try:
                    abar = np.linalg.solve(m, right)
                    bbar = dt * np.linalg.solve(m, gen.g_vec)
                except np.linalg.LinAlgError as exc:
                    raise SingularSolveError(
                        f"(I - dt*alpha*F) is singular at dt={dt}, alpha={alpha}"
                    ) from exc
        for j, f_j in enumerate(signal.values):
            c = abar @ c + bbar * f_j
            if record_all:
                states.append(CoefState(c, j + 1, (j + 1) * dt))
        if record_all:
            return states
        return CoefState(c, len(signal.values), len(signal.values) * dt)

    # timestamped: rebuild the step map at every (varying) dt
    state = CoefState(c, 0, 0.0)
    t_prev = 0.0
    for j, f_j in enumerate(signal.values):
        t_j = signal.times[j]
        dt = t_j - t_prev
        if dt < 0 or (dt == 0 and j > 0):
            raise TimestampOrderError(
                f"timestamps must increase strictly: sample {j} at t={t_j} "
                f"after t={t_prev}"
            )
        if dt == 0:
            state = CoefState(state.c, state.k + 1, t_j)
        elif scheme.method == ZOH:
            state = zoh_step(gen, dt, state, f_j)
        else:
            state = gbt_step(gen, scheme.alpha, dt, state, f_j)
        t_prev = t_j
        if record_all:
            states.append(state)
    if record_all:
        return states
    return state


def run_stream(gen: Generator, scheme: SchemeSpec, signal: Signal, record: str = "final"):
    """Fold the discretized update over a signal.

    Args:
        gen: dynamics generator.
        scheme: discretization method and step policy.
        signal: input samples; the timestamped policy requires timestamps.
        record: "final" for the last state, "all" for one state per sample.

    Returns:
        CoefState, or a list of CoefState when record="all".
    """
    if record not in ("final", "all"):
        raise ValueError(f"record must be 'final' or 'all', got {record!r}")
    if len(signal.values) == 0:
        raise ValueError("signal is empty")
    if scheme.policy == TIMESTAMPED and signal.times is None:
        raise ValueError("timestamped policy requires a timestamped signal")
    if scheme.policy != TIMESTAMPED and signal.times is not None:
        raise ValueError("timestamped signal requires the timestamped policy")
    if scheme.policy == INDEX_BASED and not gen.scaled_by_inv_t:
        raise ValueError("index-based stepping applies only to the scaled-measure family")
    record_all = record == "all"

    if gen.scaled_by_inv_t:
        if scheme.method == ZOH:
            raise ValueError("zero-order hold requires a time-invariant generator")
        if scheme.policy == TIMESTAMPED:
            return _run_legs_timestamped(gen, scheme, signal, record_all)
        return _run_legs_uniform(gen, scheme, signal, record_all)
    if gen.g_rule is not None:
        if scheme.method == ZOH:
            raise ValueError("zero-order hold requires a time-invariant generator")
        return _run_fru(gen, scheme, signal, record_all)
    return _run_constant(gen, scheme, signal, record_all)

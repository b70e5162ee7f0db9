"""O(N) kernels for the scaled-Legendre recurrence.

The scaled-Legendre state matrix factors as A = D1 (L + D0) D2 with L the
all-ones lower triangular matrix and D* diagonal, so multiplying by A is one
prefix sum plus three diagonal scalings, and solving (I - delta*A) x = y
reduces to a first-order scalar recurrence. Both run in O(N) with no
allocation when the caller supplies buffers.

The solve walks the prefix sums p_k of the transformed unknowns:

    p_k = (den_k * z_k - (delta*k + 1) * p_{k-1}) / num_k

with num_k = delta*(k+1) - 1 and den_k = delta*(2k+1). A cumulative-product
closed form of the same recurrence exists (see legs_solve_cumulative) but its
running products underflow for large N, so the sequential form is the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularSolveError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency
    def njit(*args, **kwargs):
        def decorate(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return decorate

__all__ = [
    "LegsFactors",
    "legs_matvec",
    "legs_solve",
    "legs_solve_cumulative",
    "legs_gbt_fast",
    "legs_stream",
]


@dataclass(frozen=True)
class LegsFactors:
    """Diagonal factors of the scaled-Legendre matrix A = D1 (L + D0) D2.

    d1 and d2 hold (2n+1)^{1/2}; d0 holds (n+1)/(2n+1) - 1 so the composite
    diagonal comes out as n+1. The remaining vectors are precomputed
    reciprocals and integer ramps the kernels need, derived in __post_init__.
    """

    n: int
    d0: np.ndarray = field(init=False)
    d1: np.ndarray = field(init=False)
    d2: np.ndarray = field(init=False)
    inv_d1: np.ndarray = field(init=False)
    inv_d2: np.ndarray = field(init=False)
    idx: np.ndarray = field(init=False)
    odd: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be at least 1, got {self.n}")
        k = np.arange(self.n, dtype=float)
        root = np.sqrt(2 * k + 1)
        for name, val in [
            ("d0", (k + 1) / (2 * k + 1) - 1.0),
            ("d1", root),
            ("d2", root.copy()),
            ("inv_d1", 1.0 / root),
            ("inv_d2", 1.0 / root),
            ("idx", k + 1),
            ("odd", 2 * k + 1),
        ]:
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def from_dim(cls, n: int) -> "LegsFactors":
        return cls(n)

    def dense(self) -> np.ndarray:
        """Reassemble the dense A (validation and dense-path baselines)."""
        low = np.tril(np.ones((self.n, self.n)))
        return (self.d1[:, None] * (low + np.diag(self.d0))) * self.d2[None, :]


@njit(cache=True)
def _matvec_kernel(d0, d1, d2, v, out):
    run = 0.0
    for i in range(v.shape[0]):
        w = v[i] * d2[i]
        run += w
        out[i] = d1[i] * (run + d0[i] * w)


@njit(cache=True)
def _solve_kernel(inv_d1, inv_d2, idx, odd, delta, y, out):
    if delta == 0.0:
        for i in range(y.shape[0]):
            out[i] = y[i]
        return
    scale = -1.0 / delta
    p_prev = 0.0
    for i in range(y.shape[0]):
        num = delta * idx[i] - 1.0
        den = delta * odd[i]
        z = y[i] * inv_d1[i]
        p = (den * z - (delta * i + 1.0) * p_prev) / num
        out[i] = (p - p_prev) * scale * inv_d2[i]
        p_prev = p


@njit(cache=True)
def _stream_kernel(d0, d1, d2, inv_d1, inv_d2, idx, odd, b, alpha, values, k0, c, traj):
    n = c.shape[0]
    record = traj.shape[0] > 0
    for j in range(values.shape[0]):
        k = k0 + j
        f = values[j]
        if k == 0:
            # first sample: pure injection, no state carry-over
            for i in range(n):
                c[i] = b[i] * f
        else:
            w_prev = (1.0 - alpha) / k
            w_in = f / k
            run = 0.0
            for i in range(n):
                w = c[i] * d2[i]
                run += w
                av = d1[i] * (run + d0[i] * w)
                c[i] = c[i] - w_prev * av + w_in * b[i]
        if alpha != 0.0:
            delta = -alpha / (k + 1.0)
            scale = -1.0 / delta
            p_prev = 0.0
            for i in range(n):
                num = delta * idx[i] - 1.0
                den = delta * odd[i]
                z = c[i] * inv_d1[i]
                p = (den * z - (delta * i + 1.0) * p_prev) / num
                c[i] = (p - p_prev) * scale * inv_d2[i]
                p_prev = p
        if record:
            for i in range(n):
                traj[j, i] = c[i]


def _as_vec(v, n: int, name: str) -> np.ndarray:
    out = np.ascontiguousarray(v, dtype=float)
    if out.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {out.shape}")
    return out


def legs_matvec(factors: LegsFactors, v, out: np.ndarray | None = None) -> np.ndarray:
    """Multiply the scaled-Legendre A by v in O(N)."""
    v = _as_vec(v, factors.n, "v")
    if out is None:
        out = np.empty(factors.n)
    _matvec_kernel(factors.d0, factors.d1, factors.d2, v, out)
    return out


def _check_solvable(factors: LegsFactors, delta: float) -> None:
    bad = np.nonzero(delta * factors.idx == 1.0)[0]
    if bad.size:
        raise SingularSolveError(
            f"(I - delta*A) has a zero diagonal at index {bad[0]}: "
            f"delta*(n+1) == 1 for n = {bad[0]}"
        )


def legs_solve(factors: LegsFactors, delta: float, y, out: np.ndarray | None = None) -> np.ndarray:
    """Solve (I - delta*A) x = y in O(N) via the sequential prefix recurrence."""
    y = _as_vec(y, factors.n, "y")
    _check_solvable(factors, delta)
    if out is None:
        out = np.empty(factors.n)
    _solve_kernel(factors.inv_d1, factors.inv_d2, factors.idx, factors.odd, delta, y, out)
    return out


def legs_solve_cumulative(factors: LegsFactors, delta: float, y) -> np.ndarray:
    """Closed-form variant of legs_solve using cumulative sums and products.

    Mathematically identical to the sequential recurrence, but the running
    product underflows to zero for large N, so this is kept only as a
    cross-check for moderate sizes (tests use N <= 128). Not valid when some
    delta*k == -1 (the scan ratio has a removable pole there).
    """
    y = _as_vec(y, factors.n, "y")
    _check_solvable(factors, delta)
    if delta == 0.0:
        return y.copy()
    num = delta * factors.idx - 1.0
    den = delta * factors.odd
    z = y * factors.inv_d1
    ratio = (num - den) / num
    prod = np.cumprod(ratio)
    p = prod * np.cumsum((den / num) * z / prod)
    x = np.diff(p, prepend=0.0) * (-1.0 / delta) * factors.inv_d2
    return x


def legs_gbt_fast(
    factors: LegsFactors,
    b_vec,
    alpha: float,
    k: int,
    c,
    f: float,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """One weighted-endpoint update of the index recurrence in O(N).

    Matches the dense legs_step contract: from state c at step count k,
    consuming sample f yields the state at k+1. k = 0 performs the pure
    injection that replaces the undefined 1/k weights.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if k < 0:
        raise ValueError(f"step index must be nonnegative, got {k}")
    b_vec = _as_vec(b_vec, factors.n, "b_vec")
    c = _as_vec(c, factors.n, "c")
    if out is None:
        out = np.empty(factors.n)
    if out is not c:
        out[:] = c
    _stream_kernel(
        factors.d0,
        factors.d1,
        factors.d2,
        factors.inv_d1,
        factors.inv_d2,
        factors.idx,
        factors.odd,
        b_vec,
        float(alpha),
        np.array([float(f)]),
        k,
        out,
        _EMPTY_TRAJ,
    )
    return out


_EMPTY_TRAJ = np.empty((0, 0))


def legs_stream(
    factors: LegsFactors,
    b_vec,
    alpha: float,
    values,
    k0: int = 0,
    c: np.ndarray | None = None,
    traj: np.ndarray | None = None,
) -> np.ndarray:
    """Fold legs_gbt_fast over a whole sample array in one compiled loop.

    Args:
        factors: matrix factors of dimension N.
        b_vec: input vector of length N.
        alpha: endpoint weight in [0, 1].
        values: samples, consumed at step counts k0, k0+1, ...
        k0: step count of the first sample (0 starts a fresh stream).
        c: state carried in place; zeros when omitted.
        traj: optional (len(values), N) array filled with the state after
            each sample.

    Returns:
        The final state (the same array as c when given).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if k0 < 0:
        raise ValueError(f"step index must be nonnegative, got {k0}")
    values = np.ascontiguousarray(values, dtype=float)
    b_vec = _as_vec(b_vec, factors.n, "b_vec")
    if c is None:
        c = np.zeros(factors.n)
    else:
        c = _as_vec(c, factors.n, "c")
    if traj is None:
        traj = _EMPTY_TRAJ
    elif traj.shape != (values.shape[0], factors.n):
        raise ValueError(
            f"traj must have shape ({values.shape[0]}, {factors.n}), got {traj.shape}"
        )
    _stream_kernel(
        factors.d0,
        factors.d1,
        factors.d2,
        factors.inv_d1,
        factors.inv_d2,
        factors.idx,
        factors.odd,
        b_vec,
        float(alpha),
        values,
        int(k0),
        c,
        traj,
    )
    return c

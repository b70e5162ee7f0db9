"""Dynamics generators for coefficient evolution, one per family.

Every builder returns the signed pair (F, G) of the linear update

    dc/dt = F(t) c(t) + G(t) f(t)

with any leading minus sign already folded into F, so discretizers never
branch on family. LegS is the one family whose generator carries an explicit
1/t factor; its matrix is stored unscaled together with a flag, because the
fast solver and the index-stepped recurrence need the bare triangular matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .families import (
    LMU,
    ChebT,
    Family,
    FourT,
    Fru,
    LagT,
    LegS,
    LegT,
    family_name,
    family_params,
)
from .polys import gamma_fn

__all__ = [
    "Generator",
    "FruInputRule",
    "build_legt",
    "build_lagt",
    "build_legs",
    "build_fourier_translated",
    "build_fru",
    "build_chebyshev",
    "build_generator",
    "generator_to_json",
]


@dataclass(frozen=True)
class FruInputRule:
    """Time-varying input map G(t)_n = exp(2*pi*i*freqs[n]*t/theta)/theta."""

    freqs: tuple[int, ...]
    theta: float

    def __call__(self, t: float) -> np.ndarray:
        k = np.asarray(self.freqs, dtype=float)
        return np.exp(2j * np.pi * k * t / self.theta) / self.theta


@dataclass(frozen=True)
class Generator:
    """Immutable (F, G) pair plus the metadata discretizers need.

    Attributes:
        family: the family this generator was built for.
        n: state dimension.
        f_mat: N x N state matrix F.
        g_vec: length-N input vector G, or None when g_rule applies.
        scaled_by_inv_t: when True the semantics are
            dc/dt = (1/t) (F c + G f) and f_mat stays unscaled.
        g_rule: time-varying input map (FRU only).
    """

    family: Family
    n: int
    f_mat: np.ndarray
    g_vec: np.ndarray | None
    scaled_by_inv_t: bool = False
    g_rule: FruInputRule | None = None

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.f_mat)

    def f_at(self, t: float | None = None) -> np.ndarray:
        """Instantaneous state matrix of dc/dt = F(t) c + G(t) f."""
        if not self.scaled_by_inv_t:
            return self.f_mat
        if t is None or t <= 0:
            raise ValueError(f"time-scaled generator needs t > 0, got {t}")
        return self.f_mat / t

    def g_at(self, t: float | None = None) -> np.ndarray:
        """Instantaneous input vector of dc/dt = F(t) c + G(t) f."""
        if self.g_rule is not None:
            if t is None:
                raise ValueError("time-varying input rule needs t")
            return self.g_rule(t)
        if not self.scaled_by_inv_t:
            return self.g_vec
        if t is None or t <= 0:
            raise ValueError(f"time-scaled generator needs t > 0, got {t}")
        return self.g_vec / t


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _require_dim(n: int) -> None:
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")


def build_legt(n: int, theta: float = 1.0, scaling: str = "orthonormal") -> Generator:
    """Sliding-window Legendre generator, orthonormal or lmu scaling."""
    _require_dim(n)
    family = LegT(theta=theta, scaling=scaling)
    row = np.arange(n, dtype=float)[:, None]
    col = np.arange(n, dtype=float)[None, :]
    if scaling == LMU:
        a = np.where(row >= col, (-1.0) ** (row - col) * (2 * row + 1), 2 * row + 1)
        b = (2 * row[:, 0] + 1) * (-1.0) ** row[:, 0]
    else:
        sign = np.where(col <= row, 1.0, (-1.0) ** (row - col))
        a = np.sqrt((2 * row + 1) * (2 * col + 1)) * sign
        b = np.sqrt(2 * row[:, 0] + 1)
    return Generator(family, n, _frozen(-a / theta), _frozen(b / theta))


def build_lagt(n: int, alpha: float = 0.0, beta: float = 1.0) -> Generator:
    """Tilted Laguerre generator.

    Assembled from the cumulative products p_j = prod_{i<=j} i/(i+alpha)
    so that the scaling-matrix conjugation never forms large gamma ratios:
    the strictly lower entries are -sqrt(p_n/p_k) and the input vector is
    beta^{(1-alpha)/2} / sqrt(Gamma(1-alpha) Gamma(1+alpha) p_n). At
    alpha=0, beta=1 every entry is exactly +-1.
    """
    _require_dim(n)
    family = LagT(alpha=alpha, beta=beta)
    p = np.ones(n)
    for j in range(1, n):
        p[j] = p[j - 1] * j / (j + alpha)
    f = np.zeros((n, n))
    for r in range(n):
        f[r, :r] = -np.sqrt(p[r] / p[:r])
        f[r, r] = -(1.0 + beta) / 2.0
    g = beta ** ((1.0 - alpha) / 2.0) / np.sqrt(
        gamma_fn(1.0 - alpha) * gamma_fn(1.0 + alpha) * p
    )
    return Generator(family, n, _frozen(f), _frozen(g))


def build_legs(n: int) -> Generator:
    """Scaled-measure Legendre generator, dc/dt = (1/t)(F c + G f)."""
    _require_dim(n)
    row = np.arange(n, dtype=float)[:, None]
    col = np.arange(n, dtype=float)[None, :]
    a = np.where(row > col, np.sqrt((2 * row + 1) * (2 * col + 1)), 0.0)
    np.fill_diagonal(a, np.arange(1, n + 1, dtype=float))
    b = np.sqrt(2 * row[:, 0] + 1)
    return Generator(LegS(), n, _frozen(-a), _frozen(b), scaled_by_inv_t=True)


def build_fourier_translated(n: int, theta: float = 1.0) -> Generator:
    """Sliding-window Fourier generator over modes 0..N-1."""
    _require_dim(n)
    f = np.full((n, n), -1.0 / theta, dtype=complex)
    f[np.diag_indices(n)] += 2j * np.pi * np.arange(n) / theta
    g = np.full(n, 1.0 / theta, dtype=complex)
    return Generator(FourT(theta=theta), n, _frozen(f), _frozen(g))


def build_fru(freqs, theta: float = 1.0) -> Generator:
    """Decoupled Fourier-mode integrators with a time-varying input map."""
    family = Fru(theta=theta, freqs=tuple(freqs))
    n = len(family.freqs)
    f = np.zeros((n, n), dtype=complex)
    return Generator(family, n, _frozen(f), None, g_rule=FruInputRule(family.freqs, theta))


def build_chebyshev(n: int, theta: float = 1.0) -> Generator:
    """Sliding-window Chebyshev generator.

    The staircase matrix comes from the Chebyshev derivative expansion
    T_m' = 2m (T_{m-1} + T_{m-3} + ...), where the final T_0 term of odd
    rows is halved and picks up 2^{-1/2} from the unscaled zeroth basis
    member. Rows are generated from those parity cases rather than typed in.
    """
    _require_dim(n)
    m = np.zeros((n, n))
    for r in range(1, n):
        if r % 2 == 0:
            m[r, 1:r:2] = r
        else:
            m[r, 2:r:2] = r
            m[r, 0] = r * 2.0 ** -0.5
    g = np.full(n, math.sqrt(2.0))
    g[0] = 1.0
    g *= 2.0 ** 1.5 / math.pi
    return Generator(ChebT(theta=theta), n, _frozen(-4.0 * m / theta), _frozen(g / theta))


def build_generator(family: Family, n: int) -> Generator:
    """Build the generator for any family descriptor."""
    if isinstance(family, LegT):
        return build_legt(n, family.theta, family.scaling)
    if isinstance(family, LagT):
        return build_lagt(n, family.alpha, family.beta)
    if isinstance(family, LegS):
        return build_legs(n)
    if isinstance(family, FourT):
        return build_fourier_translated(n, family.theta)
    if isinstance(family, Fru):
        if n != len(family.freqs):
            raise ValueError(
                f"dimension {n} does not match {len(family.freqs)} frequencies"
            )
        return build_fru(family.freqs, family.theta)
    if isinstance(family, ChebT):
        return build_chebyshev(n, family.theta)
    raise TypeError(f"not a family: {family!r}")


def _matrix_rows(mat: np.ndarray) -> list:
    if np.iscomplexobj(mat):
        return [[[float(v.real), float(v.imag)] for v in row] for row in mat]
    return [[float(v) for v in row] for row in mat]


def _vector_entries(vec: np.ndarray) -> list:
    if np.iscomplexobj(vec):
        return [[float(v.real), float(v.imag)] for v in vec]
    return [float(v) for v in vec]


def generator_to_json(gen: Generator) -> dict:
    """JSON document with both the signed (F, G) and the unsigned (A, B).

    Complex entries serialize as [re, im] pairs; the time-varying FRU input
    serializes as a rule object instead of a vector.
    """
    if gen.g_rule is not None:
        g_doc = {
            "time_varying": True,
            "freqs": list(gen.g_rule.freqs),
            "theta": gen.g_rule.theta,
        }
    else:
        g_doc = _vector_entries(gen.g_vec)
    return {
        "family": family_name(gen.family),
        "N": gen.n,
        "params": family_params(gen.family),
        "scaled_by_inv_t": gen.scaled_by_inv_t,
        "F": _matrix_rows(gen.f_mat),
        "G": g_doc,
        "A": _matrix_rows(-gen.f_mat),
        "B": g_doc,
    }

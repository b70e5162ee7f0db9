"""Descriptors for the measure/basis families.

Each family fixes a time-varying weight over the past, an orthogonal basis,
and an optional tilting; together these determine the coefficient dynamics
built in :mod:`hippo.operators`.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "LegT",
    "LagT",
    "LegS",
    "FourT",
    "Fru",
    "ChebT",
    "Family",
    "LMU",
    "ORTHONORMAL",
    "family_name",
    "family_params",
    "family_from_params",
]

#: LegT basis scalings: plain orthonormal, or the alternating-sign scaling
#: lambda_n = (2n+1)^{1/2} (-1)^n used by the Legendre Memory Unit.
ORTHONORMAL = "orthonormal"
LMU = "lmu"


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class LegT:
    """Sliding uniform window of length theta, Legendre basis."""

    theta: float = 1.0
    scaling: str = ORTHONORMAL

    def __post_init__(self) -> None:
        _require(self.theta > 0, f"theta must be positive, got {self.theta}")
        _require(
            self.scaling in (ORTHONORMAL, LMU),
            f"scaling must be '{ORTHONORMAL}' or '{LMU}', got {self.scaling!r}",
        )


@dataclass(frozen=True)
class LagT:
    """Exponentially decaying past, generalized Laguerre basis.

    alpha shapes the weight near the window head, beta the decay rate.
    alpha is restricted to (-1, 1): below -1 the measure is not integrable,
    at and above 1 the tilting normalization constant diverges.
    """

    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        _require(-1.0 < self.alpha < 1.0, f"alpha must lie in (-1, 1), got {self.alpha}")
        _require(self.beta > 0, f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class LegS:
    """Uniform weight over the whole history [0, t], scaled Legendre basis."""


@dataclass(frozen=True)
class FourT:
    """Sliding window of length theta, complex Fourier basis."""

    theta: float = 1.0

    def __post_init__(self) -> None:
        _require(self.theta > 0, f"theta must be positive, got {self.theta}")


@dataclass(frozen=True)
class Fru:
    """Decoupled per-frequency recurrence over a sliding window.

    The basis modes are fixed in absolute time (not translated with the
    window), so the recurrences are independent and any subset of
    frequencies may be used.
    """

    theta: float = 1.0
    freqs: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        _require(self.theta > 0, f"theta must be positive, got {self.theta}")
        _require(len(self.freqs) > 0, "freqs must be nonempty")
        _require(all(f >= 0 for f in self.freqs), f"freqs must be nonnegative, got {self.freqs}")
        _require(len(set(self.freqs)) == len(self.freqs), f"freqs must be distinct, got {self.freqs}")
        object.__setattr__(self, "freqs", tuple(int(f) for f in self.freqs))


@dataclass(frozen=True)
class ChebT:
    """Sliding window of length theta, Chebyshev basis with inverse-weight tilt."""

    theta: float = 1.0

    def __post_init__(self) -> None:
        _require(self.theta > 0, f"theta must be positive, got {self.theta}")


Family = LegT | LagT | LegS | FourT | Fru | ChebT

_NAMES: dict[type, str] = {
    LegT: "legt",
    LagT: "lagt",
    LegS: "legs",
    FourT: "fourt",
    Fru: "fru",
    ChebT: "chebt",
}


def family_name(family: Family) -> str:
    """Short lowercase identifier used in CLI flags and JSON documents."""
    return _NAMES[type(family)]


def family_params(family: Family) -> dict:
    """Family parameters as a plain dict (JSON-ready)."""
    if isinstance(family, LegT):
        return {"theta": family.theta, "scaling": family.scaling}
    if isinstance(family, LagT):
        return {"alpha": family.alpha, "beta": family.beta}
    if isinstance(family, LegS):
        return {}
    if isinstance(family, FourT):
        return {"theta": family.theta}
    if isinstance(family, Fru):
        return {"theta": family.theta, "freqs": list(family.freqs)}
    if isinstance(family, ChebT):
        return {"theta": family.theta}
    raise TypeError(f"not a family: {family!r}")


def family_from_params(name: str, **params) -> Family:
    """Build a family descriptor from its identifier and parameters."""
    builders = {
        "legt": LegT,
        "lagt": LagT,
        "legs": LegS,
        "fourt": FourT,
        "fru": Fru,
        "chebt": ChebT,
    }
    if name not in builders:
        raise ValueError(f"unknown family {name!r}, expected one of {sorted(builders)}")
    if name == "fru" and "freqs" in params:
        params = dict(params, freqs=tuple(params["freqs"]))
    return builders[name](**params)

"""Streaming compression of functions onto orthogonal bases.

The state of a small linear ODE, stepped once per incoming sample, holds
the coefficients of the best projection of everything seen so far onto a
family-specific basis; the signal history can then be reconstructed from
the final state alone.
"""

from .approx import (
    compress_and_score,
    gen_sine_mix,
    gen_whitenoise,
    mse,
    project,
    reconstruct,
    reconstruct_real,
    sine_mix_value,
    support_mask,
)
from .checks import (
    CheckReport,
    check_equivariance,
    check_gradient_norm,
    compare_discretizations,
    default_checks,
    fit_loglog,
)
from .discretize import (
    FIXED,
    GBT,
    INDEX_BASED,
    TIMESTAMPED,
    ZOH,
    CoefState,
    SchemeSpec,
    gbt_step,
    legs_step,
    matrix_exp,
    run_stream,
    zoh_step,
)
from .errors import SignalFormatError, SingularSolveError, TimestampOrderError
from .families import (
    LMU,
    ORTHONORMAL,
    ChebT,
    FourT,
    Fru,
    LagT,
    LegS,
    LegT,
    family_from_params,
    family_name,
    family_params,
)
from .fastlegs import (
    LegsFactors,
    legs_gbt_fast,
    legs_matvec,
    legs_solve,
    legs_stream,
)
from .operators import (
    Generator,
    build_chebyshev,
    build_fourier_translated,
    build_fru,
    build_generator,
    build_lagt,
    build_legs,
    build_legt,
    generator_to_json,
)
from .polys import (
    basis_eval,
    chebyshev_eval,
    family_lambda,
    family_zeta,
    gamma_fn,
    laguerre_eval,
    legendre_eval,
)
from .signals import (
    Signal,
    read_signal_csv,
    read_trajectory_csv,
    write_reconstruction_csv,
    write_signal_csv,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ChebT",
    "CheckReport",
    "CoefState",
    "FIXED",
    "FourT",
    "Fru",
    "GBT",
    "Generator",
    "INDEX_BASED",
    "LMU",
    "LagT",
    "LegS",
    "LegT",
    "LegsFactors",
    "ORTHONORMAL",
    "SchemeSpec",
    "Signal",
    "SignalFormatError",
    "SingularSolveError",
    "TIMESTAMPED",
    "TimestampOrderError",
    "ZOH",
    "basis_eval",
    "build_chebyshev",
    "build_fourier_translated",
    "build_fru",
    "build_generator",
    "build_lagt",
    "build_legs",
    "build_legt",
    "chebyshev_eval",
    "check_equivariance",
    "check_gradient_norm",
    "compare_discretizations",
    "compress_and_score",
    "default_checks",
    "family_from_params",
    "family_lambda",
    "family_name",
    "family_params",
    "family_zeta",
    "fit_loglog",
    "gamma_fn",
    "gbt_step",
    "gen_sine_mix",
    "gen_whitenoise",
    "generator_to_json",
    "laguerre_eval",
    "legendre_eval",
    "legs_gbt_fast",
    "legs_matvec",
    "legs_solve",
    "legs_step",
    "legs_stream",
    "matrix_exp",
    "mse",
    "project",
    "read_signal_csv",
    "read_trajectory_csv",
    "reconstruct",
    "reconstruct_real",
    "run_stream",
    "sine_mix_value",
    "support_mask",
    "write_reconstruction_csv",
    "write_signal_csv",
    "write_trajectory_csv",
    "zoh_step",
]

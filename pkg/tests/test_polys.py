"""Recurrence evaluators, the gamma function, and the tilted bases."""

import math

import numpy as np
import pytest
from scipy.special import eval_chebyt, eval_genlaguerre, eval_legendre

import oracles
from hippo.families import ChebT, FourT, Fru, LagT, LegS, LegT
from hippo.polys import (
    basis_eval,
    chebyshev_eval,
    family_lambda,
    family_zeta,
    gamma_fn,
    laguerre_eval,
    legendre_eval,
)

FAMILY_CONFIGS = [
    LegT(theta=3.0),
    LegT(theta=3.0, scaling="lmu"),
    LagT(),
    LagT(alpha=0.5, beta=2.0),
    LagT(alpha=-0.5, beta=1.5),
    LegS(),
    FourT(theta=3.0),
    Fru(theta=5.0, freqs=(0, 1, 4, 9)),
    ChebT(theta=3.0),
]


def family_dim(family, default=8):
    return len(family.freqs) if isinstance(family, Fru) else default


@pytest.mark.parametrize("n", range(25))
def test_legendre_matches_scipy(n):
    x = np.linspace(-2.0, 2.0, 161)
    np.testing.assert_allclose(
        legendre_eval(n, x), eval_legendre(n, x), rtol=1e-12, atol=1e-13
    )


def test_legendre_closed_forms_exact():
    # the recurrence arithmetic is exact at dyadic rationals
    assert legendre_eval(0, np.array([0.25]))[0] == 1.0
    assert legendre_eval(1, np.array([0.25]))[0] == 0.25
    assert legendre_eval(2, np.array([0.5]))[0] == -0.125


@pytest.mark.parametrize("n", range(25))
def test_chebyshev_matches_scipy(n):
    x = np.linspace(-1.0, 1.0, 161)
    np.testing.assert_allclose(
        chebyshev_eval(n, x), eval_chebyt(n, x), rtol=1e-12, atol=1e-13
    )


def test_chebyshev_closed_form_exact():
    # T_3(x) = 4x^3 - 3x
    assert chebyshev_eval(3, np.array([0.25]))[0] == 4 * 0.25**3 - 3 * 0.25


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.5, 2.0])
@pytest.mark.parametrize("n", [0, 1, 2, 5, 12, 20])
def test_laguerre_matches_scipy(n, alpha):
    x = np.linspace(0.0, 60.0, 121)
    np.testing.assert_allclose(
        laguerre_eval(n, alpha, x),
        eval_genlaguerre(n, alpha, x),
        rtol=1e-10,
        atol=1e-10,
    )


def test_laguerre_alpha_guard():
    with pytest.raises(ValueError):
        laguerre_eval(2, -1.0, np.array([1.0]))
    with pytest.raises(ValueError):
        laguerre_eval(2, -1.5, np.array([1.0]))


def test_negative_degree_rejected():
    for fn in (
        lambda: legendre_eval(-1, np.array([0.0])),
        lambda: chebyshev_eval(-1, np.array([0.0])),
        lambda: laguerre_eval(-1, 0.0, np.array([0.0])),
    ):
        with pytest.raises(ValueError):
            fn()


def test_gamma_integers_exact():
    for n in range(1, 21):
        assert gamma_fn(float(n)) == float(math.factorial(n - 1))


def test_gamma_matches_math():
    for x in np.arange(0.1, 30.0, 0.35):
        assert abs(gamma_fn(x) - math.gamma(x)) <= 1e-13 * math.gamma(x)
    assert abs(gamma_fn(0.5) - math.sqrt(math.pi)) <= 1e-13 * math.sqrt(math.pi)


def test_gamma_guard():
    for bad in (0.0, -1.0, -0.5):
        with pytest.raises(ValueError):
            gamma_fn(bad)


def test_family_lambda():
    lmu = LegT(scaling="lmu")
    for n in range(10):
        assert family_lambda(lmu, n) == math.sqrt(2 * n + 1) * (-1.0) ** n
    for fam in (LegT(), LagT(), LegS(), FourT(), Fru(freqs=(0, 3)), ChebT()):
        assert family_lambda(fam, 4) == 1.0


def test_family_zeta():
    assert family_zeta(LagT()) == 1.0
    want = math.gamma(0.5) * 2.0**-0.5
    assert abs(family_zeta(LagT(alpha=0.5, beta=2.0)) - want) <= 1e-13 * want
    assert family_zeta(LegS()) == 1.0
    assert family_zeta(ChebT()) == 1.0


@pytest.mark.parametrize("family", FAMILY_CONFIGS, ids=str)
def test_basis_matches_oracle(family):
    t = 5.0
    rng = np.random.default_rng(11)
    # interior points, points outside the support, and both sides of edges
    xs = np.concatenate(
        [
            rng.uniform(2.2, 4.8, 40),
            rng.uniform(-2.0, 0.0, 5),
            rng.uniform(5.2, 7.0, 5),
        ]
    )
    for n in range(family_dim(family, 6)):
        got = basis_eval(family, t, n, xs)
        want = oracles.oracle_basis(family, t, n, xs)
        scale = max(1.0, np.max(np.abs(want)))
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-10 * scale)


def test_basis_masks_where_tilt_is_undefined():
    t = 5.0
    # the LagT tilt has no value ahead of t, the ChebT tilt none at or
    # beyond the open window edges; the other families extend naturally
    # and rely on support_mask for clipping
    assert basis_eval(LagT(), t, 3, np.array([5.5]))[0] == 0.0
    th = ChebT(theta=2.0)
    assert basis_eval(th, t, 2, np.array([3.0, 5.0])).tolist() == [0.0, 0.0]
    assert basis_eval(th, t, 2, np.array([2.9, 5.1])).tolist() == [0.0, 0.0]


def test_basis_guards():
    with pytest.raises(ValueError):
        basis_eval(LegS(), 0.0, 0, np.array([0.0]))
    with pytest.raises(ValueError):
        basis_eval(Fru(freqs=(0, 1)), 1.0, 2, np.array([0.5]))
    with pytest.raises(ValueError):
        basis_eval(LegS(), 1.0, -1, np.array([0.5]))


@pytest.mark.parametrize("family", FAMILY_CONFIGS, ids=str)
def test_basis_orthonormal_under_family_measure(family):
    """Quadrature Gram of basis_eval against the measure is diag(lambda^2)."""
    n_max = family_dim(family)
    gram = oracles.oracle_gram(family, 5.0, n_max, basis=basis_eval)
    lam2 = np.diag([family_lambda(family, i) ** 2 for i in range(n_max)])
    assert np.max(np.abs(gram - lam2)) <= 1e-10

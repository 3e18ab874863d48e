import math

import numpy as np
import pytest
from scipy import special

from fracpoin.specfun import (DomainError, FracParams, ReductionParams, beta_fn, c_ns,
                              directional_weight, gamma_fn, log_gamma, reduction_residual,
                              sphere_measure, strip_normalisation, tail_constant, theta_mn,
                              theta_mn_quadrature)


@pytest.mark.parametrize("x", [1e-3, 0.1, 0.3, 0.5, 0.75, 1.0, 1.5, 2.5, 7.3, 20.0, 100.5])
def test_gamma_matches_math(x):
    # exp of the log amplifies rounding by about |log Gamma(x)|
    rel = 1e-13 * max(1.0, abs(math.lgamma(x)) / 30)
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=rel)
    assert log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("x,y", [(0.5, 0.5), (0.25, 3.0), (2.0, 7.5), (10.0, 0.1)])
def test_beta_matches_scipy(x, y):
    assert beta_fn(x, y) == pytest.approx(special.beta(x, y), rel=1e-13)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, float("nan")])
def test_gamma_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        gamma_fn(bad)
    with pytest.raises(DomainError):
        beta_fn(bad, 1.0)


def test_sphere_measure_values():
    assert sphere_measure(1) == pytest.approx(2.0)
    assert sphere_measure(2) == pytest.approx(2 * math.pi)
    assert sphere_measure(3) == pytest.approx(4 * math.pi)
    assert tail_constant(2, 0.25) == pytest.approx(4 * math.pi)


def test_c_ns_known_values():
    # C_{1,1/2} = 1/pi and C_{2,1/2} = 1/(2 pi)
    assert c_ns(FracParams(1, 0.5)) == pytest.approx(1 / math.pi, rel=1e-14)
    assert c_ns(FracParams(2, 0.5)) == pytest.approx(1 / (2 * math.pi), rel=1e-14)


def test_c_ns_matches_fourier_symbol():
    # int (1 - cos y_1) |y|^{-1-2s} dy = 1/C_{1,s} in one dimension
    for s in (0.2, 0.35, 0.8):
        val = -2 * special.gamma(-2 * s) * math.cos(math.pi * s)
        assert 1 / c_ns(FracParams(1, s)) == pytest.approx(val, rel=1e-12)


@pytest.mark.parametrize("n,s", [(0, 0.5), (1.5, 0.5), (2, 0.0), (2, 1.0), (2, -0.1)])
def test_frac_params_domain(n, s):
    with pytest.raises(DomainError):
        FracParams(n, s)


def test_reduction_params_domain():
    with pytest.raises(DomainError):
        ReductionParams(2, 2, 0.5)
    with pytest.raises(DomainError):
        ReductionParams(0, 3, 0.5)


@pytest.mark.parametrize("m,n,s", [(1, 2, 0.1), (1, 3, 0.5), (2, 5, 0.9), (3, 4, 0.33)])
def test_theta_closed_form_vs_quadrature(m, n, s):
    p = ReductionParams(m, n, s)
    assert theta_mn(p) == pytest.approx(theta_mn_quadrature(p), rel=1e-11)
    assert reduction_residual(m, n, s) < 1e-12


def test_directional_weight_against_quadrature():
    # on S^1: int_0^{2 pi} |cos t|^{2s} dt
    from scipy import integrate
    s = 0.35
    ref = integrate.quad(lambda t: abs(math.cos(t)) ** (2 * s), 0, 2 * math.pi,
                         points=[math.pi / 2, 3 * math.pi / 2], limit=200)[0]
    assert directional_weight(2, s) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(DomainError):
        directional_weight(1, s)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
@pytest.mark.parametrize("s", np.linspace(0.05, 0.95, 7).tolist())
def test_strip_normalisation_is_one(n, s):
    assert abs(strip_normalisation(n, s) - 1) < 1e-12

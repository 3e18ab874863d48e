"""Special functions and the kernel normalisation constants.

Everything here is plain double precision and stateless.  The Gamma
function uses a Lanczos sum (g = 7) with reflection below 1/2; the
remaining constants are closed forms built on top of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

# Lanczos coefficients for g = 7 (Godfrey's 9-term set).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """Argument outside the domain of a special function or constant."""


@dataclass(frozen=True)
class FracParams:
    """Ambient dimension ``n`` and fractional order ``s`` in (0, 1)."""

    n: int
    s: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n!r}")
        if not (0.0 < self.s < 1.0):
            raise DomainError(f"s must lie in the open interval (0, 1), got {self.s!r}")


@dataclass(frozen=True)
class ReductionParams:
    m: int
    n: int
    s: float

    def __post_init__(self):
        if not (1 <= self.m < self.n):
            raise DomainError(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        FracParams(self.n, self.s)


def _lanczos_log_gamma(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return math.log(_SQRT_2PI) + (x + 0.5) * math.log(t) - t + math.log(acc)


def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.log(math.pi / math.sin(math.pi * x)) - _lanczos_log_gamma(1.0 - x)
    return _lanczos_log_gamma(x)


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x!r}")
    if x == int(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    return math.exp(_lanczos_log_gamma(x))


def beta_fn(x: float, y: float) -> float:
    """Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y)."""
    if not (x > 0 and y > 0):
        raise DomainError(f"beta_fn needs positive arguments, got ({x!r}, {y!r})")
    a, b = (x, y) if x <= y else (y, x)
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def sphere_measure(n: int) -> float:
    """Surface measure of the unit sphere in R^n (2 for the two points of S^0)."""
    if int(n) != n or n < 1:
        raise DomainError(f"sphere_measure needs a positive integer, got {n!r}")
    return 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)


def c_ns(p: FracParams) -> float:
    """Normalisation constant of the fractional Laplacian in R^n."""
    n, s = p.n, p.s
    return s * 4.0 ** s * gamma_fn((n + 2.0 * s) / 2.0) / (math.pi ** (n / 2.0) * gamma_fn(1.0 - s))


def theta_mn(p: ReductionParams) -> float:
    """Dimension-reduction constant relating c_ns in dimensions n and n - m.

    Closed form: (1/2) B(m/2, (n-m+2s)/2) |S^{m-1}|.
    """
    m, n, s = p.m, p.n, p.s
    return 0.5 * beta_fn(m / 2.0, (n - m + 2.0 * s) / 2.0) * sphere_measure(m)


def theta_mn_quadrature(p: ReductionParams) -> float:
    """Same constant by adaptive quadrature of the radial integral."""
    m, n, s = p.m, p.n, p.s
    expo = (n + 2.0 * s) / 2.0

    def f(t):
        return t ** (m - 1) * (1.0 + t * t) ** (-expo)

    head, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    # t -> 1/u on the tail keeps the integrand bounded
    tail, _ = integrate.quad(
        lambda u: u ** (2.0 * expo - m - 1) * (1.0 + u * u) ** (-expo),
        0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return sphere_measure(m) * (head + tail)


def directional_weight(n: int, s: float) -> float:
    """Integral of |w_1|^{2s} over the unit sphere S^{n-1}."""
    if int(n) != n or n < 2:
        raise DomainError(f"directional_weight needs n >= 2, got {n!r}")
    if not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    return sphere_measure(n - 1) * beta_fn((n - 1) / 2.0, (2.0 * s + 1.0) / 2.0)


def tail_constant(n: int, s: float) -> float:
    """Integral of |y|^{-n-2s} over |y| > 1, i.e. |S^{n-1}| / (2s)."""
    return sphere_measure(n) / (2.0 * s)


def reduction_residual(m: int, n: int, s: float) -> float:
    """Relative residual of c_ns(n) * theta(m, n) = c_ns(n - m)."""
    lhs = c_ns(FracParams(n, s)) * theta_mn(ReductionParams(m, n, s))
    rhs = c_ns(FracParams(n - m, s))
    return abs(lhs - rhs) / rhs


def strip_normalisation(n: int, s: float) -> float:
    """(C_{n,s}/C_{1,s}) pi^{(n-1)/2}/Gamma((n-1)/2) B((n-1)/2, s+1/2); equals one."""
    ratio = c_ns(FracParams(n, s)) / c_ns(FracParams(1, s))
    return ratio * 0.5 * directional_weight(n, s)

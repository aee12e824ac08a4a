"""Self-contained special-function kernel.

Error functions and their inverses, the regularized incomplete beta
function and its symmetric-parameter inverse CDF, and the standard
normal quantile.  Everything downstream (bit-error rates, confidence
bounds, worst-case covariance estimators) is built on these scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "erf",
    "erfc",
    "erfc_inv",
    "normal_quantile",
    "normal_cdf",
    "beta_reg",
    "beta_inv_cdf_symmetric",
    "beta_quantile",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
_CF_TINY = 1e-300


@dataclass(frozen=True)
class Tolerance:
    """Explicit convergence budget for iterative routines."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


DEFAULT_TOLERANCE = Tolerance()


def _require_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def erf(x: float) -> float:
    """Error function."""
    return math.erf(_require_finite("x", x))


def erfc(x: float) -> float:
    """Complementary error function, exact reflection erfc(x) + erfc(-x) = 2."""
    return math.erfc(_require_finite("x", x))


# Rational initial estimate for the normal quantile (Acklam's coefficients),
# refined below to machine precision with Halley steps on erfc.
_NQ_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_NQ_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
_NQ_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_NQ_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)
_NQ_P_LOW = 0.02425


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc."""
    return 0.5 * math.erfc(-_require_finite("x", x) / _SQRT2)


def _normal_quantile_estimate(p: float) -> float:
    # valid for 0 < p <= 0.5; relative error ~1e-9 before refinement
    if p < _NQ_P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_NQ_C[0] * q + _NQ_C[1]) * q + _NQ_C[2]) * q + _NQ_C[3]) * q
                 + _NQ_C[4]) * q + _NQ_C[5]) / \
               ((((_NQ_D[0] * q + _NQ_D[1]) * q + _NQ_D[2]) * q + _NQ_D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((_NQ_A[0] * r + _NQ_A[1]) * r + _NQ_A[2]) * r + _NQ_A[3]) * r
             + _NQ_A[4]) * r + _NQ_A[5]) * q / \
           (((((_NQ_B[0] * r + _NQ_B[1]) * r + _NQ_B[2]) * r + _NQ_B[3]) * r
             + _NQ_B[4]) * r + 1.0)


def _normal_quantile_half(p: float) -> float:
    # p in (0, 0.5]; two Halley refinements pin the residual to ~1 ulp
    x = _normal_quantile_estimate(p)
    for _ in range(2):
        err = 0.5 * math.erfc(-x / _SQRT2) - p
        density = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if density <= 0.0:
            break
        u = err / density
        x -= u / (1.0 + 0.5 * x * u)
    return x


def normal_quantile(z: float) -> float:
    """Inverse of the standard normal CDF; odd about z = 1/2."""
    z = _require_finite("z", z)
    if not 0.0 < z < 1.0:
        raise DomainError(f"normal_quantile requires 0 < z < 1, got {z}")
    if z == 0.5:
        return 0.0
    if z > 0.5:
        return -_normal_quantile_half(1.0 - z)
    return _normal_quantile_half(z)


def _erfc_inv_positive(y: float) -> float:
    # y in (0, 1): erfc_inv(y) >= 0; Newton polish on erfc itself
    t = -normal_quantile(0.5 * y) / _SQRT2
    for _ in range(2):
        tt = t * t
        if tt > 700.0:  # derivative underflows; estimate already exact to ~1e-9 rel
            break
        t += (math.erfc(t) - y) * (_SQRT_PI / 2.0) * math.exp(tt)
    return t


def erfc_inv(y: float) -> float:
    """Inverse complementary error function on (0, 2)."""
    y = _require_finite("y", y)
    if not 0.0 < y < 2.0:
        raise DomainError(f"erfc_inv requires 0 < y < 2, got {y}")
    if y == 1.0:
        return 0.0
    if y > 1.0:
        return -_erfc_inv_positive(2.0 - y)
    return _erfc_inv_positive(y)


def _beta_cont_frac(x: float, a: float, b: float, max_iter: int) -> float:
    """Modified-Lentz continued fraction for the incomplete beta integral."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + num / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + num / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < 1e-15:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction stalled at a={a:g}, b={b:g}, x={x:g}",
        residual=abs(step - 1.0),
    )


def beta_reg(x: float, a: float, b: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Continued-fraction evaluation with the log-beta prefactor; the
    reflection I_x(a,b) = 1 - I_{1-x}(b,a) keeps the fraction in its
    fast-converging region.
    """
    x = _require_finite("x", x)
    a = _require_finite("a", a)
    b = _require_finite("b", b)
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta_reg requires a, b > 0, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise DomainError(f"beta_reg requires 0 <= x <= 1, got x={x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_pre = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
              + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(ln_pre) * _beta_cont_frac(x, a, b, tol.max_iter) / a
    return 1.0 - math.exp(ln_pre) * _beta_cont_frac(1.0 - x, b, a, tol.max_iter) / b


# Forward evaluations inside the inverses need a deeper iteration budget than
# the public default: near x = 1/2 the fraction needs ~sqrt(a) terms.
_CF_DEEP = Tolerance(max_iter=20_000)


def _bisect_beta(z: float, a: float, b: float, lo: float, hi: float,
                 tol: Tolerance) -> float:
    """Solve I_x(a, b) = z for x in [lo, hi] by bisection.

    Converges on interval collapse; a relative residual below
    ``tol.rel_tol`` exits early.  An absolute criterion would be
    meaningless for deep-tail quantiles where z itself is tiny.
    """
    flo = beta_reg(lo, a, b, _CF_DEEP) - z
    fhi = beta_reg(hi, a, b, _CF_DEEP) - z
    if flo > 0.0 or fhi < 0.0:
        raise ConvergenceError(
            f"beta inverse bracket does not straddle z={z:g} for a={a:g}, b={b:g}",
            residual=min(abs(flo), abs(fhi)),
        )
    mid = 0.5 * (lo + hi)
    resid = math.inf
    scale = min(z, 1.0 - z)  # the informative tail mass near either endpoint
    for _ in range(max(tol.max_iter, 100)):
        mid = 0.5 * (lo + hi)
        resid = beta_reg(mid, a, b, _CF_DEEP) - z
        if resid < 0.0:
            lo = mid
        else:
            hi = mid
        if abs(resid) <= tol.rel_tol * scale or (hi - lo) < 2e-16 * max(mid, 1e-10):
            return mid
    raise ConvergenceError(
        f"beta inverse bisection stalled for a={a:g}, b={b:g}", residual=abs(resid)
    )


def beta_quantile(z: float, a: float, b: float,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Quantile of the Beta(a, b) distribution: x with I_x(a, b) = z."""
    z = _require_finite("z", z)
    if not 0.0 < z < 1.0:
        raise DomainError(f"beta_quantile requires 0 < z < 1, got {z}")
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta_quantile requires a, b > 0, got a={a}, b={b}")
    return _bisect_beta(z, a, b, 0.0, 1.0, tol)


def beta_inv_cdf_symmetric(z: float, half_n: float,
                           tol: Tolerance = DEFAULT_TOLERANCE,
                           normal_threshold: float = 1e6) -> float:
    """Inverse CDF of Beta(half_n, half_n).

    Below ``normal_threshold`` the quantile is found by bisection on
    :func:`beta_reg`; above it the distribution is indistinguishable
    from Normal(1/2, 1/(8*half_n + 4)) at double precision and the
    closed-form quantile is used instead.
    """
    z = _require_finite("z", z)
    half_n = _require_finite("half_n", half_n)
    if not 0.0 < z < 1.0:
        raise DomainError(f"beta_inv_cdf_symmetric requires 0 < z < 1, got {z}")
    if half_n < 0.5:
        raise DomainError(f"half_n must be >= 0.5, got {half_n}")
    if z == 0.5:
        return 0.5
    if half_n > normal_threshold:
        return 0.5 + normal_quantile(z) / math.sqrt(8.0 * half_n + 4.0)
    if z > 0.5:
        return 1.0 - _bisect_beta(1.0 - z, half_n, half_n, 0.0, 0.5, tol)
    return _bisect_beta(z, half_n, half_n, 0.0, 0.5, tol)

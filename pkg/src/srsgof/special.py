"""Chi-square survival and standard normal CDF/quantile."""

from __future__ import annotations

import math

_EPS = 1e-16
_TINY = 1e-300


def _gamma_series_lower(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x) by its power series (x < s + 1)."""
    term = 1.0 / s
    total = term
    a = s
    for _ in range(10_000):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _gamma_cf_upper(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x) by modified Lentz (x >= s + 1)."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + s * math.log(x) - math.lgamma(s))


def gamma_q(s: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(s, x)."""
    if not s > 0 or x < 0 or math.isnan(x):
        raise ValueError(f"gamma_q needs s > 0 and x >= 0, got s={s}, x={x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return 1.0 - _gamma_series_lower(s, x)
    return _gamma_cf_upper(s, x)


def chisq_survival(x: float, df: int) -> float:
    """Upper tail ``Pr{chi2_df > x}``."""
    if int(df) != df or df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    if x < 0 or math.isnan(x):
        raise ValueError(f"chi-square statistic must be >= 0, got {x}")
    return gamma_q(df / 2.0, x / 2.0)


def normal_cdf(z: float) -> float:
    if math.isnan(z):
        raise ValueError("normal_cdf of NaN")
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


# rational approximation used only as a starting point (relative error ~1e-9)
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def _quantile_start(p: float) -> float:
    if p < 0.02425:
        t = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]
        return num / ((((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0)
    t = p - 0.5
    r = t * t
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * t
    return num / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF on the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"normal_quantile needs 0 < p < 1, got {p}")
    if p > 0.5:
        # work in the lower tail to keep relative precision
        return -normal_quantile(1.0 - p)
    z = _quantile_start(p)
    for _ in range(3):
        err = normal_cdf(z) - p
        pdf = _normal_pdf(z)
        if pdf == 0.0:
            break
        step = err / pdf
        # Halley correction
        z -= step / (1.0 + 0.5 * z * step)
    return z

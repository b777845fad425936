"""Special functions used by the risk model and the likelihood fitter.

Scalar functions raise :class:`DomainError` outside their domain instead of
returning NaN. ``digamma`` and ``trigamma`` also accept numpy arrays, which
the likelihood fitter relies on for speed.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DomainError",
    "log_gamma",
    "digamma",
    "trigamma",
    "log_beta",
    "reg_inc_beta",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli-number coefficients B_2k / (2k (2k-1)) of the Stirling series.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# B_2k / (2k) for the digamma asymptotic series, k = 1..7.
_PSI_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# B_2k for the trigamma asymptotic series, k = 1..7.
_BERN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)

_SHIFT = 6.0
_STIRLING_MIN = 10.0
_CF_TINY = 1e-300
_CF_EPS = 1e-16


class DomainError(ValueError):
    """Raised when an argument is outside a function's domain."""


def _check_positive(name: str, value: float) -> None:
    if not (value > 0.0) or math.isinf(value):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


def _check_positive_array(name: str, z: np.ndarray) -> None:
    if not np.all(z > 0.0) or not np.all(np.isfinite(z)):
        raise DomainError(f"{name} must be finite and positive")


def log_gamma(z: float) -> float:
    """Natural log of the Gamma function for ``z > 0``.

    Backed by ``math.lgamma`` (correctly rounded to a few ulp on this range).
    """
    z = float(z)
    _check_positive("z", z)
    return math.lgamma(z)


def _stirling_correction(x: float) -> float:
    """``log_gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)]`` for ``x >= 10``."""
    r = 1.0 / x
    r2 = r * r
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * r2 + c
    return acc * r


def digamma(z):
    """Digamma function, ``d/dz ln Gamma(z)``.

    Shifts the argument up to ``z >= 6`` with ``psi(z) = psi(z+1) - 1/z`` and
    then sums the asymptotic series. Works elementwise on arrays.
    """
    if np.ndim(z) == 0:
        z = float(z)
        _check_positive("z", z)
        # the -1/z term dominates for tiny z; add it last
        lead = 0.0
        if z < _SHIFT:
            lead = -1.0 / z
            z += 1.0
        acc = 0.0
        while z < _SHIFT:
            acc -= 1.0 / z
            z += 1.0
        r2 = 1.0 / (z * z)
        series = 0.0
        for c in reversed(_PSI_COEF):
            series = series * r2 + c
        return (acc + math.log(z) - 0.5 / z - series * r2) + lead

    z = np.array(z, dtype=float)
    _check_positive_array("z", z)
    lead = np.zeros_like(z)
    low = z < _SHIFT
    lead[low] = -1.0 / z[low]
    z[low] += 1.0
    acc = np.zeros_like(z)
    while True:
        low = z < _SHIFT
        if not low.any():
            break
        acc[low] -= 1.0 / z[low]
        z[low] += 1.0
    r2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for c in reversed(_PSI_COEF):
        series = series * r2 + c
    return (acc + np.log(z) - 0.5 / z - series * r2) + lead


def trigamma(z):
    """Trigamma function, the derivative of :func:`digamma`. Elementwise on arrays."""
    if np.ndim(z) == 0:
        z = float(z)
        _check_positive("z", z)
        acc = 0.0
        while z < _SHIFT:
            acc += 1.0 / (z * z)
            z += 1.0
        r = 1.0 / z
        r2 = r * r
        # psi'(z) ~ 1/z + 1/(2 z^2) + sum_k B_2k / z^(2k+1)
        series = 0.0
        for c in reversed(_BERN):
            series = series * r2 + c
        return acc + r + 0.5 * r2 + series * r2 * r

    z = np.array(z, dtype=float)
    _check_positive_array("z", z)
    acc = np.zeros_like(z)
    while True:
        low = z < _SHIFT
        if not low.any():
            break
        acc[low] += 1.0 / (z[low] * z[low])
        z[low] += 1.0
    r = 1.0 / z
    r2 = r * r
    series = np.zeros_like(z)
    for c in reversed(_BERN):
        series = series * r2 + c
    return acc + r + 0.5 * r2 + series * r2 * r


def log_beta(a: float, b: float) -> float:
    """``ln B(a, b)``.

    For large arguments the Gamma terms nearly cancel, so the Stirling form is
    rearranged around ``log1p`` to keep the absolute error near machine
    precision even for ``b`` in the millions.
    """
    a = float(a)
    b = float(b)
    _check_positive("a", a)
    _check_positive("b", b)
    if a > b:
        a, b = b, a
    if b < _STIRLING_MIN:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    s = a + b
    if a < _STIRLING_MIN:
        # lgamma(b) - lgamma(a + b) with the leading terms cancelled analytically
        tail = (
            -a * math.log(b)
            - (s - 0.5) * math.log1p(a / b)
            + a
            + _stirling_correction(b)
            - _stirling_correction(s)
        )
        return math.lgamma(a) + tail
    return (
        _HALF_LOG_2PI
        + (a - 0.5) * math.log(a / s)
        + (b - 0.5) * math.log1p(-a / s)
        - 0.5 * math.log(s)
        + _stirling_correction(a)
        + _stirling_correction(b)
        - _stirling_correction(s)
    )


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz. Assumes x < (a+1)/(a+b+2)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    max_iter = 1000 + int(20.0 * math.sqrt(max(a, b)))
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})"
    )


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete Beta function ``I_x(a, b)``."""
    x = float(x)
    a = float(a)
    b = float(b)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    _check_positive("a", a)
    _check_positive("b", b)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        value = math.exp(log_front) * _beta_cf(x, a, b) / a
    else:
        value = 1.0 - math.exp(log_front) * _beta_cf(1.0 - x, b, a) / b
    return min(1.0, max(0.0, value))

"""Sine and cosine integrals Si(x), Ci(x) in double precision.

Si(x) = int_0^x sin(t)/t dt
Ci(x) = gamma + ln(x) + int_0^x (cos(t) - 1)/t dt

Power series below x = 4, Lentz continued fraction for the auxiliary
functions above. Absolute error is below 1e-13 on (0, 1e4), comfortably
inside the 1e-10 budget needed for the impedance formulas.
"""

import cmath
import math

EULER_GAMMA = 0.5772156649015329

_SERIES_CUTOFF = 4.0
_CF_EPS = 1e-16
_CF_MAX_ITER = 400
_CF_TINY = 1e-290


def sine_integral(x: float) -> float:
    """Si(x) for x >= 0."""
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"sine_integral requires finite x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if x <= _SERIES_CUTOFF:
        return _si_series(x)
    ci, si = _ci_si_continued_fraction(x)
    return si


def cosine_integral(x: float) -> float:
    """Ci(x) for x > 0 (diverges to -inf at 0)."""
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"cosine_integral requires finite x > 0, got {x!r}")
    if x <= _SERIES_CUTOFF:
        return EULER_GAMMA + math.log(x) - _cin_series(x)
    ci, si = _ci_si_continued_fraction(x)
    return ci


def _si_series(x: float) -> float:
    # sum_{k>=0} (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    term = x
    total = x
    k = 1
    while True:
        term *= -x * x / ((2 * k) * (2 * k + 1))
        total += term / (2 * k + 1)
        if abs(term) < 1e-18 * abs(total):
            return total
        k += 1


def _cin_series(x: float) -> float:
    # Cin(x) = sum_{k>=1} (-1)^(k+1) x^(2k) / ((2k)(2k)!)
    term = x * x / 2.0
    total = term / 2.0
    k = 2
    while True:
        term *= -x * x / ((2 * k - 1) * (2 * k))
        total += term / (2 * k)
        if abs(term) < 1e-18:
            return total
        k += 1


def _ci_si_continued_fraction(x: float) -> tuple[float, float]:
    # Modified Lentz evaluation of the complex continued fraction for
    # E1(ix); gives the auxiliary f/g combination and hence Ci and Si.
    b = complex(1.0, x)
    c = complex(1.0 / _CF_TINY)
    d = 1.0 / b
    h = d
    for i in range(2, _CF_MAX_ITER):
        a = -((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _CF_EPS:
            break
    else:
        raise RuntimeError(f"continued fraction failed to converge at x={x}")
    h *= cmath.exp(complex(0.0, -x))
    return -h.real, h.imag + math.pi / 2.0

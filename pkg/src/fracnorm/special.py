"""Gamma, log-gamma, Beta and the volume of the unit ball.

Lanczos approximation with g = 7 and nine coefficients; below 1/2 the
reflection formula is applied so that arguments near zero keep full
relative accuracy.
"""

import math

from .errors import DomainError

__all__ = ["gamma", "log_gamma", "beta", "ball_volume"]

_G = 7.0
_LANCZOS = (
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
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z):
    # z = x - 1
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    return acc


def _is_pole(x):
    return x <= 0.0 and x == math.floor(x)


def gamma(x):
    """Gamma function for real ``x`` that is not a non-positive integer."""
    x = float(x)
    if math.isnan(x) or _is_pole(x):
        raise DomainError(f"gamma has a pole at x={x!r}")
    if x < 0.5:
        s = math.sin(math.pi * x)
        return math.pi / (s * gamma(1.0 - x))
    if x == math.floor(x) and x <= 23:
        return float(math.factorial(int(x) - 1))
    z = x - 1.0
    t = z + _G + 0.5
    # split the power to stay finite up to x ~ 171
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * _lanczos_sum(z)


def log_gamma(x):
    """Natural logarithm of Gamma for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x), all terms positive here
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    if x < 15.0:
        return math.log(gamma(x))
    z = x - 1.0
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def beta(a, b):
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta requires positive arguments, got ({a!r}, {b!r})")
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def ball_volume(d):
    """Volume of the Euclidean unit ball in ``d`` dimensions."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    return math.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)

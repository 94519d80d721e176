"""Digamma and low-order polygamma functions on the positive real axis.

Evaluation shifts the argument upward with the recurrence
``psi^(k)(x + 1) = psi^(k)(x) + (-1)^k k! / x^(k+1)`` until ``x >= 12`` and then
sums eight terms of the asymptotic (Stirling-type) expansion.
"""

from __future__ import annotations

import math

from .errors import DomainError

__all__ = ["digamma", "polygamma"]

_SHIFT_TO = 12.0

# B_2, B_4, ..., B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)


def _check(x: float) -> float:
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"argument must be positive and finite, got {x!r}")
    return x


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for ``x > 0``."""
    x = _check(x)
    shift = 0.0
    while x < _SHIFT_TO:
        shift += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for j, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * j) * power
        power *= inv2
    return math.log(x) - 0.5 / x - series - shift


def polygamma(k: int, x: float) -> float:
    """``k``-th derivative of the digamma function, ``k`` in 0..3, ``x > 0``.

    ``polygamma(0, x)`` is the digamma function.
    """
    if k == 0:
        return digamma(x)
    if k not in (1, 2, 3):
        raise DomainError(f"polygamma order must be in 0..3, got {k!r}")
    x = _check(x)
    kfact = math.factorial(k)
    sign = -1.0 if k % 2 else 1.0  # (-1)^k
    shift = 0.0
    while x < _SHIFT_TO:
        shift += x ** (-k - 1)
        x += 1.0
    # psi^(k)(x) = (-1)^(k+1) [ (k-1)!/x^k + k!/(2 x^(k+1))
    #              + sum_j B_2j (2j+k-1)! / ((2j)! x^(2j+k)) ]
    total = math.factorial(k - 1) / x**k + kfact / (2.0 * x ** (k + 1))
    for j, b in enumerate(_BERNOULLI, start=1):
        total += b * math.factorial(2 * j + k - 1) / math.factorial(2 * j) / x ** (2 * j + k)
    asym = -sign * total
    # psi^(k)(x0) = psi^(k)(x0 + N) - (-1)^k k! sum_{j<N} (x0 + j)^(-k-1)
    return asym - sign * kfact * shift

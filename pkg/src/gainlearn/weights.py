"""Product weights of the learning recursion and their theta-derivatives.

With ``c = 1 - beta`` the weights are

    Phi_{t,n+1}(theta, beta) = prod_{j=t+1}^{n} (1 - c*theta/j)
    g_{t,n}(theta, beta)     = (theta/t) * Phi_{t,n+1}(theta, beta)

so that a learning state started at ``a`` satisfies
``a_n - alpha = (a - alpha) Phi_{0,n+1} + sum_t g_{t,n} (y_t - alpha)`` (with
``beta = 0`` for a candidate filter run on observed ``y``).

Derivatives are taken in theta at ``beta = 0`` unless a ``beta`` argument is
given. Three evaluation routes are provided for a single weight: a sum form
built from power sums ``sum_i (theta - i)^(-k)``, a polygamma form of the same
power sums, and a product (Leibniz) form that stays finite when a factor of the
product vanishes. Batch routines run the product form backwards in ``t`` so a
whole column ``{g_{t,n}}_{t=1..n}`` costs O(n * m).
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

from .errors import DomainError
from .special import polygamma

__all__ = [
    "phi",
    "g_weight",
    "g_weights",
    "g_derivative",
    "g_derivative_sum",
    "g_derivative_polygamma",
    "g_derivative_product",
    "g_derivatives",
    "phi_prefix",
    "f_surrogate",
]

_MAX_ORDER = 4
# Relative distance to an integer below which the sum form is abandoned.
_POLE_TOL = 1e-8


def _check_tn(t: int, n: int, t_min: int = 0) -> tuple[int, int]:
    t, n = int(t), int(n)
    if t < t_min:
        raise DomainError(f"t must be >= {t_min}, got {t}")
    if t > n:
        raise DomainError(f"t must not exceed n, got t={t}, n={n}")
    return t, n


def _check_order(m: int, low: int = 1) -> int:
    m = int(m)
    if not low <= m <= _MAX_ORDER:
        raise DomainError(f"derivative order must be in {low}..{_MAX_ORDER}, got {m}")
    return m


def phi(t: int, n: int, theta: float, beta: float = 0.0) -> float:
    """Signed product ``prod_{j=t+1}^n (1 - (1-beta) theta / j)``; 1 when ``t == n``."""
    t, n = _check_tn(t, n)
    c = 1.0 - beta
    out = 1.0
    for j in range(t + 1, n + 1):
        out *= 1.0 - c * theta / j
    return out


def g_weight(t: int, n: int, theta: float, beta: float = 0.0) -> float:
    """Weight ``g_{t,n}(theta, beta) = (theta / t) Phi_{t,n+1}(theta, beta)``."""
    t, n = _check_tn(t, n, t_min=1)
    return theta / t * phi(t, n, theta, beta)


@nb.njit(cache=True, nogil=True)
def _suffix_weights(n, theta, c, max_order):
    # phis[k, t] holds the k-th theta-derivative of Phi_{t,n+1}; t = 0..n.
    phis = np.zeros((max_order + 1, n + 1))
    phis[0, n] = 1.0
    for t in range(n, 0, -1):
        f = 1.0 - c * theta / t
        for k in range(max_order, 0, -1):
            phis[k, t - 1] = phis[k, t] * f - k * c * phis[k - 1, t] / t
        phis[0, t - 1] = phis[0, t] * f
    g = np.empty((max_order + 1, n))
    for t in range(1, n + 1):
        g[0, t - 1] = theta * phis[0, t] / t
        for k in range(1, max_order + 1):
            g[k, t - 1] = (theta * phis[k, t] + k * phis[k - 1, t]) / t
    return g


def g_weights(n: int, theta: float, beta: float = 0.0) -> np.ndarray:
    """All weights ``g_{t,n}(theta, beta)`` for ``t = 1..n`` in O(n)."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return _suffix_weights(n, float(theta), 1.0 - float(beta), 0)[0]


def g_derivatives(n: int, theta: float, max_order: int, beta: float = 0.0) -> np.ndarray:
    """Weights and theta-derivatives for ``t = 1..n``.

    Returns
    -------
    ndarray, shape (max_order + 1, n)
        Row ``k`` holds ``d^k/dtheta^k g_{t,n}(theta, beta)``; row 0 is the
        weight itself.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    max_order = _check_order(max_order, low=0)
    return _suffix_weights(n, float(theta), 1.0 - float(beta), max_order)


def phi_prefix(n: int, theta: float, beta: float = 0.0) -> np.ndarray:
    """Forward products ``Phi_{0,t+1}(theta, beta)`` for ``t = 0..n``.

    Entry ``t`` is ``prod_{j=1}^t (1 - (1-beta) theta / j)``, the factor that
    carries the initial value into ``a_t``.
    """
    n = int(n)
    c = 1.0 - beta
    factors = 1.0 - c * theta / np.arange(1, n + 1)
    return np.concatenate(([1.0], np.cumprod(factors)))


def _bell(kappa: list[float], m: int) -> float:
    # Complete Bell polynomial in the cumulants kappa[1..m].
    k1 = kappa[1]
    if m == 1:
        return k1
    k2 = kappa[2]
    if m == 2:
        return k1 * k1 + k2
    k3 = kappa[3]
    if m == 3:
        return k1**3 + 3.0 * k1 * k2 + k3
    k4 = kappa[4]
    return k1**4 + 6.0 * k1 * k1 * k2 + 4.0 * k1 * k3 + 3.0 * k2 * k2 + k4


def _from_power_sums(g: float, theta: float, sums: list[float], m: int) -> float:
    # d^{k-1}/dtheta^{k-1} [1/theta + sum_i 1/(theta - i)]
    #   = (-1)^{k-1} (k-1)! [theta^{-k} + S_k]
    kappa = [0.0] * (m + 1)
    for k in range(1, m + 1):
        kappa[k] = (-1.0) ** (k - 1) * math.factorial(k - 1) * (theta ** (-k) + sums[k])
    return g * _bell(kappa, m)


def _has_pole(t: int, n: int, theta: float) -> bool:
    j = round(theta)
    return t < j <= n and abs(theta - j) <= _POLE_TOL * max(1.0, abs(theta))


def g_derivative_sum(t: int, n: int, theta: float, m: int) -> float:
    """Sum form ``g * Bell(kappa_1..kappa_m)`` with ``S_k = sum_{i=t+1}^n (theta-i)^{-k}``.

    For ``m = 1`` this is ``g [sum_i 1/(theta - i) + 1/theta]`` and for ``m = 2``
    ``g ([...]^2 - sum_i (theta-i)^{-2} - theta^{-2})``.
    """
    t, n = _check_tn(t, n, t_min=1)
    m = _check_order(m)
    if _has_pole(t, n, theta):
        raise DomainError(f"sum form has a pole at theta={theta} for t={t}, n={n}")
    d = theta - np.arange(t + 1, n + 1, dtype=float)
    sums = [0.0] + [float(np.sum(d ** (-k))) for k in range(1, m + 1)]
    return _from_power_sums(g_weight(t, n, theta), theta, sums, m)


def g_derivative_polygamma(t: int, n: int, theta: float, m: int) -> float:
    """Polygamma form of the power sums; requires ``t + 1 - theta > 0``.

    Uses ``S_k = [psi^(k-1)(t+1-theta) - psi^(k-1)(n+1-theta)] / (k-1)!``, so
    for ``m = 1`` the bracket is ``psi(t+1-theta) - psi(n+1-theta) + 1/theta``.
    """
    t, n = _check_tn(t, n, t_min=1)
    m = _check_order(m)
    z = t + 1.0 - theta
    if not z > 0.0:
        raise DomainError(f"polygamma form needs t + 1 - theta > 0, got {z}")
    sums = [0.0]
    for k in range(1, m + 1):
        diff = polygamma(k - 1, z) - polygamma(k - 1, z + (n - t))
        sums.append(diff / math.factorial(k - 1))
    return _from_power_sums(g_weight(t, n, theta), theta, sums, m)


def g_derivative_product(t: int, n: int, theta: float, m: int) -> float:
    """Product (Leibniz) form, finite everywhere including pole configurations."""
    t, n = _check_tn(t, n, t_min=1)
    m = _check_order(m)
    # Taylor coefficients of prod_j (1 - theta/j) expanded one factor at a time.
    coef = np.zeros(m + 1)
    coef[0] = 1.0
    for j in range(t + 1, n + 1):
        f = 1.0 - theta / j
        for k in range(m, 0, -1):
            coef[k] = coef[k] * f - k * coef[k - 1] / j
        coef[0] *= f
    return (theta * coef[m] + m * coef[m - 1]) / t


def g_derivative(t: int, n: int, theta: float, m: int) -> float:
    """``m``-th theta-derivative of ``g_{t,n}(theta)`` (``beta = 0``), ``m`` in 1..4.

    The sum form is used away from poles. When ``theta`` is (numerically) an
    integer in ``(t, n]`` the weight vanishes and the product form supplies the
    finite limit.
    """
    t, n = _check_tn(t, n, t_min=1)
    m = _check_order(m)
    if _has_pole(t, n, theta):
        return g_derivative_product(t, n, theta, m)
    return g_derivative_sum(t, n, theta, m)


def f_surrogate(t, n, theta: float, m: int = 0):
    """Power-law surrogate ``f_{t,n} = theta t^(theta-1) n^(-theta)`` and its derivatives.

    For ``m >= 1`` returns ``f log^(m-1)(t/n) (log(t/n) + m/theta)``. ``t`` may be
    an array.
    """
    m = int(m)
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 1) or np.any(t_arr > n):
        raise DomainError("t must satisfy 1 <= t <= n")
    ratio = t_arr / n
    f = theta / t_arr * ratio**theta
    if m == 0:
        out = f
    else:
        lg = np.log(ratio)
        out = f * lg ** (m - 1) * (lg + m / theta)
    return float(out) if out.ndim == 0 else out

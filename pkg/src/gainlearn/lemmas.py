"""Numerical checks of the auxiliary limit results behind the asymptotics.

Deterministic checks evaluate weighted sums of the product weights at finite
``n`` and compare them with their closed-form limits. Stochastic checks
simulate the model and compare scaled sample moments with their limits. For
the sample-moment checks an exact finite-``n`` expectation is also available:
the filtered states are linear in the Gaussian innovations, so their second
moments follow from a small covariance recursion.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numba as nb
import numpy as np

from .asymptotics import (
    a_star_cross_limit,
    a_star_sq_limit,
    D1_limit,
    sigma_a_adot,
    sigma_adot_sq,
)
from .errors import DomainError
from .model import ModelParams, NoiseSource, simulate_path
from .parallel import map_ordered
from .weights import g_derivatives, g_weights, phi_prefix

__all__ = [
    "A5_ITEMS",
    "A2_ITEMS",
    "LemmaCheckResult",
    "a5_limit",
    "lemma_a5_sum",
    "double_sum",
    "double_sum_bruteforce",
    "check_a5",
    "A2Result",
    "a2_limit",
    "lemma_a2_mc",
    "lemma_a2_exact",
    "exact_state_moments",
    "d2n_mc",
    "d2n_exact",
    "lemma_a3_rate",
    "a4_gaps",
    "a4_bounds",
    "lemma_a4_gap",
    "a1_statistics",
    "lemma_a1_bounds",
    "run_lemma_suite",
]

A5_ITEMS = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix")
A2_ITEMS = ("i", "ii", "iii", "iv")
_DOUBLE = ("v", "vi", "viii", "ix")


@dataclass
class LemmaCheckResult:
    lemma_id: str
    n_values: np.ndarray
    finite_n_values: np.ndarray
    limit_value: float
    abs_errors: np.ndarray
    passed: bool
    detail: str = ""
    extra: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[str, int, float, float, float, bool]]:
        return [
            (self.lemma_id, int(n), float(v), float(self.limit_value), float(e), self.passed)
            for n, v, e in zip(self.n_values, self.finite_n_values, self.abs_errors)
        ]


# ---------------------------------------------------------------------------
# Weighted-sum limits
# ---------------------------------------------------------------------------


def _g_closed(theta: float, r: int, m: int) -> float:
    return (
        r ** (-2 * m + 1)
        * (2.0 * theta / r - 1.0) ** (-2 * m - 1)
        * m
        * (m + (2.0 / r) * (theta / r - 1.0) * theta)
        * math.gamma(2 * m - 1)
    )


def a5_limit(item: str, theta: float, theta0: float, beta0: float, m: int = 1, r: int = 1) -> float:
    """Closed-form limit of a weighted-sum item.

    Items ``i`` and ``ii`` involve the ``m``-th derivative of ``g_{t,n}(theta)``
    (``i`` also the power ``r``); ``iii``-``vi`` mix weights at ``theta`` with the
    true weights ``g_{t,n}(theta0, beta0)``; ``vii``-``ix`` involve only the true
    parameters.
    """
    c0 = 1.0 - beta0
    th, t0 = theta, theta0
    if item == "i":
        if r not in (1, 2):
            raise DomainError("r must be 1 or 2")
        return _g_closed(th, r, m)
    if item == "ii":
        return math.gamma(m + 1) / ((0.5 - th) ** m * (2.0 * th - 1.0))
    if item == "iii":
        return th**2 / (2.0 * th - 1.0)
    if item == "iv":
        return th * t0 / (c0 * t0 + th - 1.0)
    if item == "v":
        return th**2 * t0 / ((2.0 * th - 1.0) * (c0 * t0 + th - 1.0))
    if item == "vi":
        return th * t0**2 / ((2.0 * c0 * t0 - 1.0) * (c0 * t0 + th - 1.0))
    if item == "vii":
        return t0 * (c0 * t0 - 1.0) / (t0 * (1.0 + c0) - 1.0) ** 2
    if item == "viii":
        return t0**2 * (c0 * t0 - 1.0) / ((2.0 * c0 * t0 - 1.0) * (t0 * (1.0 + c0) - 1.0) ** 2)
    if item == "ix":
        num = t0 * (t0 * (2.0 * c0 * (t0 - 1.0) * t0 + c0 - t0 + 2.0) - 1.0)
        return num / ((2.0 * t0 - 1.0) ** 3 * ((1.0 + c0) * t0 - 1.0) ** 2)
    raise DomainError(f"unknown item {item!r}")


@nb.njit(cache=True, nogil=True)
def _double_sum_scan(x, y, theta0, c0):
    # h_{t} = sum_{j<=t} y_j g_{j,t}; then inner_t = h_{t-1}(1 - c0 theta0 / t).
    h = 0.0
    s = 0.0
    for t in range(1, x.size + 1):
        inner = h * (1.0 - c0 * theta0 / t)
        s += x[t - 1] * inner
        h = inner + y[t - 1] * theta0 / t
    return s


def double_sum(x, y, theta0: float, beta0: float) -> float:
    """``sum_{t=2}^n sum_{j<t} x_t y_j g_{j,t}(theta0, beta0)`` in O(n).

    Uses the running sum ``h_t = sum_{j<=t} y_j g_{j,t}``, which obeys
    ``h_t = h_{t-1}(1 - c0 theta0/t) + y_t theta0/t``.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if x.shape != y.shape:
        raise DomainError("x and y must have the same shape")
    return _double_sum_scan(x, y, float(theta0), 1.0 - float(beta0))


def double_sum_bruteforce(x, y, theta0: float, beta0: float) -> float:
    """O(n^2) reference for :func:`double_sum` using explicit products."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    c0 = 1.0 - beta0
    total = 0.0
    idx = np.arange(1, n + 1, dtype=float)
    for j in range(1, n):
        # g_{j,t} for t = j+1..n: (theta0/j) prod_{i=j+1}^t (1 - c0 theta0 / i)
        g_jt = theta0 / j * np.cumprod(1.0 - c0 * theta0 / idx[j:])
        total += y[j - 1] * float(x[j:] @ g_jt)
    return total


def lemma_a5_sum(item: str, n: int, theta: float, theta0: float, beta0: float,
                 m: int = 1, r: int = 1) -> float:
    """Finite-``n`` value of a weighted-sum item, scaled as in its limit."""
    n = int(n)
    if n < 2:
        raise DomainError("n must be >= 2")
    t = np.arange(1, n + 1, dtype=float)
    if item in ("i", "ii"):
        gm = g_derivatives(n, theta, m)[m]
        if item == "i":
            return float(n**r * np.sum(gm**2 / t ** (r - 1)))
        return float(math.sqrt(n) * np.sum(gm / np.sqrt(t)))
    g_true = g_weights(n, theta0, beta0)
    if item in ("iii", "iv", "v", "vi"):
        g_th = g_weights(n, theta, 0.0)
        if item == "iii":
            return float(n * g_th @ g_th)
        if item == "iv":
            return float(n * g_th @ g_true)
        if item == "v":
            return n * double_sum(g_th, g_th, theta0, beta0)
        return n * double_sum(g_th, g_true, theta0, beta0)
    gdot = g_derivatives(n, theta0, 1)[1]
    if item == "vii":
        return float(n * gdot @ g_true)
    if item == "viii":
        return n * double_sum(gdot, g_true, theta0, beta0)
    if item == "ix":
        return n * double_sum(gdot, gdot, theta0, beta0)
    raise DomainError(f"unknown item {item!r}")


def check_a5(item: str, n_values: Sequence[int] = (10**3, 10**4, 10**5), theta: float = 1.6,
             theta0: float = 2.0, beta0: float = 0.25, m: int = 1, r: int = 1,
             rel_tol: float = 0.05, small_limit: float = 0.02, abs_tol: float = 1e-3) -> LemmaCheckResult:
    """Compare a weighted-sum item with its limit over an increasing ``n`` grid.

    Passes when the absolute error strictly decreases along ``n_values`` and the
    error at the largest ``n`` is within ``rel_tol`` relative (``abs_tol``
    absolute when the limit is smaller than ``small_limit`` in magnitude).
    """
    ns = np.asarray(n_values, dtype=np.int64)
    vals = np.array([lemma_a5_sum(item, int(n), theta, theta0, beta0, m, r) for n in ns])
    lim = a5_limit(item, theta, theta0, beta0, m, r)
    err = np.abs(vals - lim)
    decreasing = bool(np.all(np.diff(err) < 0))
    if abs(lim) < small_limit:
        end_ok = bool(err[-1] <= abs_tol)
    else:
        end_ok = bool(err[-1] <= rel_tol * abs(lim))
    suffix = f"(m={m},r={r})" if item == "i" else f"(m={m})" if item == "ii" else ""
    return LemmaCheckResult(f"A5_{item}{suffix}", ns, vals, lim, err, decreasing and end_ok,
                            f"decreasing={decreasing} endpoint_ok={end_ok}")


# ---------------------------------------------------------------------------
# Sample-moment limits
# ---------------------------------------------------------------------------


class A2Result(NamedTuple):
    mc_mean: float
    mc_se: float
    limit: float


def a2_limit(item: str, theta: float, params: ModelParams) -> float:
    th0, b0, se = params.theta0, params.beta0, params.sigma_eps
    if item == "i":
        return a_star_sq_limit(theta, th0, b0, se)
    if item == "ii":
        return a_star_cross_limit(theta, th0, b0, se)
    if item == "iii":
        return sigma_adot_sq(th0, b0, se)
    if item == "iv":
        return sigma_a_adot(th0, b0, se)
    raise DomainError(f"unknown item {item!r}")


@nb.njit(cache=True, nogil=True)
def _a2_sums(theta, theta0, alpha0, y, a_true):
    # Sums over t = 1..n of a*_t(theta)^2, a*_t a*_t(theta), adot_t^2, a*_t adot_t.
    s = np.zeros(4)
    ath = 0.0
    ad0 = 0.0
    dot = 0.0
    for t in range(1, y.size + 1):
        ys = y[t - 1] - alpha0
        dot = dot * (1.0 - theta0 / t) + (ys - ad0) / t
        ad0 += theta0 / t * (ys - ad0)
        ath += theta / t * (ys - ath)
        at = a_true[t] - alpha0
        s[0] += ath * ath
        s[1] += at * ath
        s[2] += dot * dot
        s[3] += at * dot
    return s


def _a2_rep(params: ModelParams, theta: float, n: int, seed: int):
    def one(r: int) -> np.ndarray:
        path = simulate_path(params, n, NoiseSource(seed, r))
        return _a2_sums(theta, params.theta0, params.alpha0, path.y, path.a) / math.log(n)
    return one


def lemma_a2_mc(item: str, theta: float, params: ModelParams, n: int, reps: int,
                master_seed: int = 0, threads: int = 1) -> A2Result:
    """Monte Carlo mean and standard error of a scaled sample moment.

    Items: ``i`` ``log^-1 n sum a*_t(theta)^2``, ``ii`` ``log^-1 n sum a*_t a*_t(theta)``,
    ``iii`` ``log^-1 n sum adot_t^2`` and ``iv`` ``log^-1 n sum a*_t adot_t``, where
    ``a*`` are deviations from ``alpha0`` and ``adot`` is the theta-derivative of
    the filter at ``theta0``.
    """
    k = A2_ITEMS.index(item)
    vals = np.array(map_ordered(_a2_rep(params, theta, n, master_seed), range(reps), threads))[:, k]
    se = float(vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else math.nan
    return A2Result(float(vals.mean()), se, a2_limit(item, theta, params))


@nb.njit(cache=True, nogil=True)
def _state_moments(theta, theta0, beta0, sigma, m0, n):
    # State x_t = (a*_t, a*_t(theta), a*dag_t(theta0), adot_t(theta0)),
    # x_t = F_t x_{t-1} + h_t eps_t. Returns sums of E[x_t x_t'] over t = 1..n
    # and over t = 0..n-1.
    c0 = 1.0 - beta0
    P = np.zeros((4, 4))
    mu = np.zeros(4)
    mu[0] = m0
    acc = np.zeros((4, 4))
    acc_lag = np.zeros((4, 4))
    F = np.zeros((4, 4))
    h = np.zeros(4)
    for t in range(1, n + 1):
        for i in range(4):
            for j in range(4):
                acc_lag[i, j] += P[i, j] + mu[i] * mu[j]
        F[:, :] = 0.0
        F[0, 0] = 1.0 - c0 * theta0 / t
        F[1, 1] = 1.0 - theta / t
        F[1, 0] = theta / t * beta0
        F[2, 2] = 1.0 - theta0 / t
        F[2, 0] = theta0 / t * beta0
        F[3, 3] = 1.0 - theta0 / t
        F[3, 0] = beta0 / t
        F[3, 2] = -1.0 / t
        h[0] = theta0 / t
        h[1] = theta / t
        h[2] = theta0 / t
        h[3] = 1.0 / t
        P = F @ P @ F.T
        for i in range(4):
            for j in range(4):
                P[i, j] += sigma * sigma * h[i] * h[j]
        mu = F @ mu
        for i in range(4):
            for j in range(4):
                acc[i, j] += P[i, j] + mu[i] * mu[j]
    return acc, acc_lag


def exact_state_moments(theta: float, params: ModelParams, n: int, lagged: bool = False) -> np.ndarray:
    """Exact ``E[sum_t x_t x_t']`` for Gaussian innovations and a fixed initial state.

    ``x_t = (a*_t, a*_t(theta), a*dag_t(theta0), adot_t(theta0))`` collects the
    true state deviation, the filter deviation at ``theta`` and at ``theta0``
    (started at ``alpha0``) and the filter's theta-derivative at ``theta0``.
    Sums run over ``t = 1..n``, or ``t = 0..n-1`` when ``lagged``.
    """
    if params.a_init_sd > 0.0:
        raise DomainError("exact moments assume a deterministic initial state")
    acc, acc_lag = _state_moments(float(theta), params.theta0, params.beta0, params.sigma_eps,
                                  params.a_init - params.alpha0, int(n))
    return acc_lag if lagged else acc


def lemma_a2_exact(item: str, theta: float, params: ModelParams, n: int) -> float:
    """Exact finite-``n`` expectation of the scaled moment that :func:`lemma_a2_mc` simulates."""
    E = exact_state_moments(theta, params, n) / math.log(n)
    return float({"i": E[1, 1], "ii": E[0, 1], "iii": E[3, 3], "iv": E[0, 3]}[item])


@nb.njit(cache=True, nogil=True)
def _d2n(beta, theta, beta0, theta0, alpha0, y):
    # Q_2n(kappa) - Q_2n(kappa0) with both predictors started at alpha0.
    a = 0.0
    a0 = 0.0
    d = 0.0
    for t in range(1, y.size + 1):
        ys = y[t - 1] - alpha0
        r1 = ys - beta * a
        r0 = ys - beta0 * a0
        d += r1 * r1 - r0 * r0
        a += theta / t * (ys - a)
        a0 += theta0 / t * (ys - a0)
    return d


def d2n_mc(beta: float, theta: float, params: ModelParams, n: int, reps: int,
           master_seed: int = 0, threads: int = 1) -> A2Result:
    """MC mean and standard error of ``log^-1 n [Q_2n(kappa) - Q_2n(kappa0)]`` with the D1 limit."""
    def one(r: int) -> float:
        path = simulate_path(params, n, NoiseSource(master_seed, r))
        return _d2n(beta, theta, params.beta0, params.theta0, params.alpha0, path.y) / math.log(n)

    vals = np.array(map_ordered(one, range(reps), threads))
    se = float(vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else math.nan
    return A2Result(float(vals.mean()), se,
                    D1_limit(beta, theta, params.theta0, params.beta0, params.sigma_eps))


def d2n_exact(beta: float, theta: float, params: ModelParams, n: int) -> float:
    """Exact expectation of ``log^-1 n [Q_2n(kappa) - Q_2n(kappa0)]``.

    The cross term with ``eps_t`` has mean zero, leaving
    ``E sum_t (beta0 a*_{t-1}(theta0) - beta a*_{t-1}(theta))^2``.
    """
    E = exact_state_moments(theta, params, n, lagged=True)
    w = np.array([0.0, -beta, params.beta0, 0.0])
    return float(w @ E @ w) / math.log(n)


# ---------------------------------------------------------------------------
# Moment decay of the derivative filters
# ---------------------------------------------------------------------------


def lemma_a3_rate(m: int, r: int, params: ModelParams, n_grid: Sequence[int], reps: int,
                  master_seed: int = 0, threads: int = 1) -> LemmaCheckResult:
    """Fit the decay exponent of ``E^{1/r} |a^(m)_n(theta0)|^r`` in ``n``.

    Each replication simulates one path of the largest length and reads the
    derivative filter at every ``n`` in the grid. The returned ``limit_value``
    is the fitted slope of log-moment on log ``n``, to be compared with -1/2.
    """
    ns = np.asarray(sorted(n_grid), dtype=np.int64)
    if r not in (2, 4):
        raise DomainError("r must be 2 or 4")
    from .model import filter_derivatives

    def one(rep: int) -> np.ndarray:
        path = simulate_path(params, int(ns[-1]), NoiseSource(master_seed, rep))
        d = filter_derivatives(params.theta0, params.alpha0, path.y, m)[m - 1]
        return np.abs(d[ns]) ** r

    draws = np.array(map_ordered(one, range(reps), threads))
    root = draws.mean(axis=0) ** (1.0 / r)
    slope = float(np.polyfit(np.log(ns), np.log(root), 1)[0])
    return LemmaCheckResult(f"A3(m={m},r={r})", ns, root, slope, np.full(ns.size, abs(slope + 0.5)),
                            abs(slope + 0.5) <= 0.1, f"slope={slope:.4f}")


# ---------------------------------------------------------------------------
# Initial-value effect
# ---------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _q_start(theta, a_start, y, z):
    a = a_start
    q = 0.0
    for t in range(1, y.size + 1):
        r = z[t - 1] - a
        q += r * r
        a += theta / t * (y[t - 1] - a)
    return q


def a4_gaps(theta_grid, a_grid, y, z, alpha0: float, a0: float) -> np.ndarray:
    """``|Q_n(theta, a) - Q_n^dag(theta)|`` on a ``(theta, a)`` grid.

    ``Q_n^dag`` uses the filter started at ``alpha0`` except for the first
    predictor, which is the data's initial state ``a0``.
    """
    y = np.ascontiguousarray(y, dtype=float)
    z = np.ascontiguousarray(z, dtype=float)
    out = np.empty((len(theta_grid), len(a_grid)))
    for i, th in enumerate(theta_grid):
        # Same recursion from alpha0, with the t = 1 residual using a0.
        q_dag = _q_start(th, alpha0, y, z) - (z[0] - alpha0) ** 2 + (z[0] - a0) ** 2
        for j, a in enumerate(a_grid):
            out[i, j] = abs(_q_start(th, a, y, z) - q_dag)
    return out


def a4_bounds(theta: float, a: float, a0: float, y, z) -> tuple[float, float]:
    """Pathwise check of the initial-value decomposition.

    Returns ``(lhs, bound)`` with ``lhs = |Q_n(theta, a) - Q_n(theta, a0)|`` and
    ``bound = (a - a0)^2 sum Phi_{t-1}^2 + 2 |a - a0| sum |Phi_{t-1}| |z_t - a_{t-1}(theta, a0)|``,
    where ``Phi_{t-1} = prod_{j<t} (1 - theta/j)``. At ``theta = theta0`` the
    residual ``z_t - a_{t-1}(theta0, a0)`` is ``u_t``.
    """
    from .model import filter_candidate

    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    n = y.size
    ph = phi_prefix(n - 1, theta)
    path0 = filter_candidate(theta, a0, y)
    lhs = abs(_q_start(theta, a, y, z) - _q_start(theta, a0, y, z))
    resid = z - path0[:-1]
    bound = (a - a0) ** 2 * float(ph @ ph) + 2.0 * abs(a - a0) * float(np.abs(ph) @ np.abs(resid))
    return lhs, bound


def lemma_a4_gap(params: ModelParams, theta_grid, a_grid, n_grid: Sequence[int], reps: int,
                 master_seed: int = 0, threads: int = 1) -> np.ndarray:
    """Mean over replications of the sup-gap ``max_{theta, a} |Q_n(theta, a) - Q_n^dag(theta)|``.

    The ``a`` supremum is taken over the supplied finite grid. Paths are nested
    across ``n``. Returns one value per ``n``.
    """
    ns = sorted(int(n) for n in n_grid)

    def one(rep: int) -> np.ndarray:
        path = simulate_path(params, ns[-1], NoiseSource(master_seed, rep))
        return np.array([
            a4_gaps(theta_grid, a_grid, path.y[:n], path.z[:n], params.alpha0, path.a[0]).max()
            for n in ns
        ])

    return np.array(map_ordered(one, range(reps), threads)).mean(axis=0)


# ---------------------------------------------------------------------------
# Uniform bounds on derivative-weighted sums
# ---------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _a1_kernel(thetas, alpha0, y, v, m):
    k = thetas.size
    out = np.zeros((3, k))
    for i in range(k):
        th = thetas[i]
        d = np.zeros(m + 1)
        for t in range(1, y.size + 1):
            dm = d[m]
            out[0, i] += dm * dm
            out[1, i] += dm * dm * v[t - 1] * v[t - 1]
            out[2, i] += dm * v[t - 1]
            f = 1.0 - th / t
            ys = y[t - 1] - alpha0
            for j in range(m, 1, -1):
                d[j] = d[j] * f - j / t * d[j - 1]
            if m >= 1:
                d[1] = d[1] * f + (ys - d[0]) / t
            d[0] += th / t * (ys - d[0])
    return out


def a1_statistics(theta_grid, alpha0: float, y, v, m: int) -> np.ndarray:
    """Sums ``sum (a^(m)_{t-1})^2``, ``sum (a^(m)_{t-1})^2 v_t^2`` and ``sum a^(m)_{t-1} v_t``.

    ``a^(m)`` is the ``m``-th theta-derivative of the filter (on deviations from
    ``alpha0``; order 0 is the filter deviation itself). Returns shape
    ``(3, len(theta_grid))``.
    """
    if not 0 <= m <= 4:
        raise DomainError("m must be in 0..4")
    return _a1_kernel(np.ascontiguousarray(theta_grid, dtype=float), float(alpha0),
                      np.ascontiguousarray(y, dtype=float), np.ascontiguousarray(v, dtype=float), m)


def lemma_a1_bounds(m: int, params: ModelParams, n_grid: Sequence[int], reps: int,
                    theta_grid=None, master_seed: int = 0, threads: int = 1) -> list[LemmaCheckResult]:
    """Sup over a theta grid of the three sums, divided by ``log n``, averaged over reps.

    The weighting sequence is ``u_t``. Each item passes when its values across
    ``n_grid`` stay within a factor 2 of one another.
    """
    ns = sorted(int(n) for n in n_grid)
    grid = np.linspace(params.theta_lo, params.theta_hi, 16) if theta_grid is None else np.asarray(theta_grid)

    def one(rep: int) -> np.ndarray:
        path = simulate_path(params, ns[-1], NoiseSource(master_seed, rep))
        res = np.empty((3, len(ns)))
        for k, n in enumerate(ns):
            s = a1_statistics(grid, params.alpha0, path.y[:n], path.u[:n], m)
            res[:, k] = np.abs(s).max(axis=1) / math.log(n)
        return res

    means = np.array(map_ordered(one, range(reps), threads)).mean(axis=0)
    out = []
    for k, tag in enumerate(("i", "ii", "iii")):
        vals = means[k]
        spread = float(vals.max() / vals.min()) if vals.min() > 0 else math.inf
        out.append(LemmaCheckResult(f"A1_{tag}(m={m})", np.asarray(ns), vals, math.nan,
                                    np.full(len(ns), math.nan), spread < 2.0, f"spread={spread:.3f}"))
    return out


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def run_lemma_suite(params: ModelParams, theta: float = 1.6, reps: int = 200,
                    a2_n: int = 10**4, n_grid: Sequence[int] = (10**3, 10**4, 10**5),
                    master_seed: int = 0, threads: int = 1) -> list[LemmaCheckResult]:
    """Run every check at ``params`` and return the results in a fixed order."""
    th0, b0 = params.theta0, params.beta0
    res: list[LemmaCheckResult] = []
    for item in A5_ITEMS:
        res.append(check_a5(item, n_grid, theta, th0, b0))
    for item in A2_ITEMS:
        mc = lemma_a2_mc(item, theta, params, a2_n, reps, master_seed, threads)
        z = abs(mc.mc_mean - mc.limit) / mc.mc_se
        res.append(LemmaCheckResult(
            f"A2_{item}", np.array([a2_n]), np.array([mc.mc_mean]), mc.limit,
            np.array([abs(mc.mc_mean - mc.limit)]), bool(z <= 3.0),
            f"se={mc.mc_se:.4g} z={z:.2f} exact_finite_n={lemma_a2_exact(item, theta, params, a2_n):.6g}",
        ))
    for m in (1, 2):
        res.append(lemma_a3_rate(m, 2, params, n_grid, reps, master_seed, threads))
    gaps = lemma_a4_gap(params, np.linspace(params.theta_lo, params.theta_hi, 8), [params.a_init],
                        n_grid, max(reps // 4, 1), master_seed, threads)
    res.append(LemmaCheckResult("A4", np.asarray(sorted(n_grid)), gaps, math.nan,
                                np.full(len(gaps), math.nan), bool(gaps[-1] <= 1.1 * gaps[0] + 1e-12)))
    res.extend(lemma_a1_bounds(1, params, n_grid, max(reps // 4, 1), master_seed=master_seed,
                               threads=threads))
    return res

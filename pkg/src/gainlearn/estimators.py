"""Gain, regression, and joint profile estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numba as nb
import numpy as np

from .errors import (
    CollinearityError,
    DegenerateRegressorError,
    DomainError,
    EstimationError,
)
from .model import filter_candidate

__all__ = [
    "ThetaFit",
    "LambdaFit",
    "KappaFit",
    "EstimateSet",
    "FlatnessDiagnostic",
    "nls_objective",
    "nls_theta",
    "ols_lambda",
    "two_step",
    "alpha_hat",
    "profile_curve",
    "joint_kappa",
    "flatness_diagnostic",
    "estimate_all",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ThetaFit:
    theta_hat: float
    q_min: float
    n_grid: int
    refine_iters: int
    at_boundary: bool


@dataclass(frozen=True)
class LambdaFit:
    delta_hat: float
    beta_hat: float
    gram: np.ndarray
    det_gram: float


@dataclass(frozen=True)
class KappaFit:
    beta_hat: float
    theta_hat: float
    delta_hat_implied: float
    alpha_used: float
    q_min: float
    at_boundary: bool
    beta_clipped: bool


@dataclass(frozen=True)
class FlatnessDiagnostic:
    """Sup-LM test of ``beta = 0`` over the theta grid.

    ``flat`` is True when the largest score statistic stays below the
    Bonferroni chi-square(1) critical value, i.e. the data carry no evidence
    that the profiled objective depends on theta.
    """

    sup_lm: float
    critical_value: float
    profile_range: float
    flat: bool


@dataclass(frozen=True)
class EstimateSet:
    theta: ThetaFit
    lam: LambdaFit
    lam_infeasible: LambdaFit | None
    kappa: KappaFit | None
    alpha_hat: float
    sigma_u_hat: float
    sigma_eps_hat: float


def _series(z, y, n_min: int) -> tuple[np.ndarray, np.ndarray]:
    z = np.ascontiguousarray(z, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if z.ndim != 1 or z.shape != y.shape:
        raise DomainError("z and y must be 1-d arrays of equal length")
    if z.size < n_min:
        raise DomainError(f"need at least {n_min} observations, got {z.size}")
    return z, y


def _check_bounds(bounds: tuple[float, float]) -> tuple[float, float]:
    lo, hi = float(bounds[0]), float(bounds[1])
    if not 1.0 < lo < hi < math.inf:
        raise DomainError(f"need 1 < theta_lo < theta_hi < inf, got {bounds}")
    return lo, hi


# The objective kernels run on deviations from the start value so results are
# invariant to adding a common constant to y, z and a_start.
@nb.njit(cache=True, nogil=True)
def _q_grid(thetas, ys, zs):
    m = thetas.size
    a = np.zeros(m)
    q = np.zeros(m)
    for t in range(1, ys.size + 1):
        inv = 1.0 / t
        zt = zs[t - 1]
        yt = ys[t - 1]
        for k in range(m):
            r = zt - a[k]
            q[k] += r * r
            a[k] += thetas[k] * inv * (yt - a[k])
    return q


@nb.njit(cache=True, nogil=True)
def _q_one(theta, ys, zs):
    a = 0.0
    q = 0.0
    for t in range(1, ys.size + 1):
        r = zs[t - 1] - a
        q += r * r
        a += theta / t * (ys[t - 1] - a)
    return q


def nls_objective(theta, z, y, a_start: float | None = None) -> np.ndarray:
    """``Q_n(theta) = sum_t (z_t - a_{t-1}(theta, a_start))^2`` for each theta given."""
    z, y = _series(z, y, 1)
    a_start = z[0] if a_start is None else float(a_start)
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    return _q_grid(np.ascontiguousarray(thetas), y - a_start, z - a_start)


def _golden(f, a: float, b: float, tol: float) -> tuple[float, float, int]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    iters = 0
    while b - a > tol:
        iters += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return float(x), float(f(x)), iters


def _grid_then_golden(f_grid, f_one, lo, hi, grid_size, tol):
    grid = np.linspace(lo, hi, grid_size)
    q = f_grid(grid)
    if not np.all(np.isfinite(q)):
        raise EstimationError("objective is not finite on the coarse grid")
    k = int(np.argmin(q))  # first minimum: ties go to the smaller theta
    x, fx, iters = _golden(f_one, grid[max(k - 1, 0)], grid[min(k + 1, grid_size - 1)], tol)
    if not math.isfinite(fx):
        raise EstimationError("objective is not finite during refinement")
    if not fx < q[k]:
        x, fx = float(grid[k]), float(q[k])
    return float(x), float(fx), iters, k in (0, grid_size - 1)


def nls_theta(z, y, bounds: tuple[float, float], a_start: float | None = None,
              grid_size: int = 64, tol: float = 1e-7) -> ThetaFit:
    """Nonlinear least squares estimate of the gain.

    Minimizes ``Q_n(theta)`` on a uniform ``grid_size``-point grid over
    ``bounds`` and refines by golden-section search on the bracket around the
    grid minimum down to width ``tol``. The candidate filter starts at
    ``a_start``, by default ``z[0]``.
    """
    z, y = _series(z, y, 2)
    lo, hi = _check_bounds(bounds)
    if grid_size < 3:
        raise DomainError("grid_size must be at least 3")
    a_start = z[0] if a_start is None else float(a_start)
    ys, zs = y - a_start, z - a_start
    x, fx, iters, edge = _grid_then_golden(
        lambda g: _q_grid(g, ys, zs), lambda th: _q_one(th, ys, zs), lo, hi, grid_size, tol
    )
    return ThetaFit(x, fx, grid_size, iters, edge)


def ols_lambda(y, a_path, det_tol: float = 1e-12) -> LambdaFit:
    """OLS of ``y_t`` on ``(1, a_{t-1})``.

    The 2x2 normal equations are solved with the adjugate in centred
    coordinates, ``det = n * sum (a - mean a)^2``, which is the Gram determinant
    without the cancellation of ``n sum a^2 - (sum a)^2``.
    """
    y = np.ascontiguousarray(y, dtype=float)
    a_path = np.ascontiguousarray(a_path, dtype=float)
    n = y.size
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    if a_path.shape != (n + 1,):
        raise DomainError("a_path must have length n + 1")
    x = a_path[:-1]
    sx = float(x.sum())
    gram = np.array([[n, sx], [sx, float(x @ x)]])
    xm = sx / n
    ym = float(y.mean())
    xc = x - xm
    sxx = float(xc @ xc)
    det = n * sxx
    scale = n * gram[1, 1]
    if not det > det_tol * max(scale, np.finfo(float).tiny):
        raise CollinearityError(f"Gram determinant {det:.3g} too small (scale {scale:.3g})")
    beta = float(xc @ (y - ym)) / sxx
    delta = ym - beta * xm
    if not (math.isfinite(beta) and math.isfinite(delta)):
        raise EstimationError("non-finite OLS estimate")
    return LambdaFit(delta, beta, gram, det)


def two_step(z, y, bounds: tuple[float, float], a_start: float | None = None,
             grid_size: int = 64, tol: float = 1e-7) -> tuple[ThetaFit, LambdaFit]:
    """NLS for theta, then OLS on the candidate filter evaluated at the estimate."""
    z, y = _series(z, y, 3)
    a_start = z[0] if a_start is None else float(a_start)
    fit = nls_theta(z, y, bounds, a_start, grid_size, tol)
    path = filter_candidate(fit.theta_hat, a_start, y)
    return fit, ols_lambda(y, path)


def alpha_hat(y) -> float:
    """Sample mean of ``y``, a root-n consistent estimate of ``alpha0``."""
    y = np.asarray(y, dtype=float)
    if y.size < 1:
        raise DomainError("y must be nonempty")
    return float(y.mean())


@nb.njit(cache=True, nogil=True)
def _profile_moments(thetas, ys):
    m = thetas.size
    a = np.zeros(m)
    sxy = np.zeros(m)
    sxx = np.zeros(m)
    syy = 0.0
    for t in range(1, ys.size + 1):
        yt = ys[t - 1]
        syy += yt * yt
        inv = 1.0 / t
        for k in range(m):
            sxy[k] += yt * a[k]
            sxx[k] += a[k] * a[k]
            a[k] += thetas[k] * inv * (yt - a[k])
    return sxy, sxx, syy


def _profile(thetas, ys, beta_bounds):
    sxy, sxx, syy = _profile_moments(np.ascontiguousarray(thetas, dtype=float), ys)
    if np.any(sxx <= 0.0):
        raise DegenerateRegressorError("sum of squared regressors is zero")
    b_free = sxy / sxx
    b = np.clip(b_free, beta_bounds[0], beta_bounds[1])
    q = syy - 2.0 * b * sxy + b * b * sxx
    return q, b, b != b_free


def profile_curve(y, alpha: float, thetas, beta_bounds=(-0.95, 0.95)):
    """Profiled joint objective and inner ``beta*(theta)`` at each theta.

    Returns ``(q, beta)`` where ``q[k] = min_beta Q_2n(beta, thetas[k])`` over
    the clipped beta interval.
    """
    y = np.ascontiguousarray(y, dtype=float)
    q, b, _ = _profile(np.atleast_1d(thetas), y - alpha, beta_bounds)
    return q, b


def joint_kappa(y, alpha: float, bounds: tuple[float, float],
                beta_bounds: tuple[float, float] = (-0.95, 0.95),
                grid_size: int = 64, tol: float = 1e-7) -> KappaFit:
    """Joint least squares for ``(beta, theta)`` with ``alpha`` plugged in.

    Minimizes ``sum_t (y*_t - beta a*_{t-1}(theta))^2`` with ``y* = y - alpha``
    and ``a*`` the candidate filter on ``y*`` started at 0. ``beta`` is
    concentrated out in closed form (and clipped to ``beta_bounds``); theta is
    found by grid plus golden section as in :func:`nls_theta`.
    """
    y = np.ascontiguousarray(y, dtype=float)
    if y.size < 3:
        raise DomainError(f"need n >= 3, got {y.size}")
    lo, hi = _check_bounds(bounds)
    blo, bhi = float(beta_bounds[0]), float(beta_bounds[1])
    if not -math.inf < blo < bhi < 1.0:
        raise DomainError(f"need -inf < beta_lo < beta_hi < 1, got {beta_bounds}")
    ys = y - alpha
    x, fx, _, edge = _grid_then_golden(
        lambda g: _profile(g, ys, (blo, bhi))[0],
        lambda th: float(_profile(np.array([th]), ys, (blo, bhi))[0][0]),
        lo, hi, grid_size, tol,
    )
    _, b, clipped = _profile(np.array([x]), ys, (blo, bhi))
    beta = float(b[0])
    return KappaFit(beta, x, alpha * (1.0 - beta), float(alpha), fx, edge, bool(clipped[0]))


def flatness_diagnostic(y, alpha: float, bounds: tuple[float, float],
                        grid_size: int = 64, level: float = 0.05) -> FlatnessDiagnostic:
    """Check whether the profiled joint objective is flat in theta.

    For each grid theta the score statistic for ``beta = 0`` is
    ``(sum y* a*)^2 / (s^2 sum a*^2)`` with ``s^2 = sum y*^2 / n``; the profile
    varies with theta only through this term. Flatness is declared when the
    supremum over the grid is below the ``1 - level / grid_size`` quantile of
    chi-square(1).
    """
    y = np.ascontiguousarray(y, dtype=float)
    lo, hi = _check_bounds(bounds)
    ys = y - alpha
    grid = np.linspace(lo, hi, grid_size)
    sxy, sxx, syy = _profile_moments(grid, ys)
    if np.any(sxx <= 0.0):
        raise DegenerateRegressorError("sum of squared regressors is zero")
    s2 = syy / y.size
    lm = sxy**2 / (s2 * sxx)
    # chi-square(1) quantile as a squared two-sided normal quantile
    crit = NormalDist().inv_cdf(1.0 - 0.5 * level / grid_size) ** 2
    prof = syy - sxy**2 / sxx
    sup = float(lm.max())
    return FlatnessDiagnostic(sup, crit, float(prof.max() - prof.min()), sup < crit)


def estimate_all(z, y, bounds: tuple[float, float], theta0: float | None = None,
                 a_start: float | None = None, alpha: float | None = None,
                 beta_bounds: tuple[float, float] = (-0.95, 0.95),
                 grid_size: int = 64, tol: float = 1e-7) -> EstimateSet:
    """Run every estimator on one sample.

    The infeasible OLS (filter at the true gain) is included when ``theta0`` is
    given; ``alpha`` defaults to the sample mean of ``y``.
    """
    z, y = _series(z, y, 3)
    a_start = z[0] if a_start is None else float(a_start)
    fit, lam = two_step(z, y, bounds, a_start, grid_size, tol)
    lam_inf = None
    if theta0 is not None:
        lam_inf = ols_lambda(y, filter_candidate(theta0, a_start, y))
    alpha_used = alpha_hat(y) if alpha is None else float(alpha)
    try:
        kappa = joint_kappa(y, alpha_used, bounds, beta_bounds, grid_size, tol)
    except EstimationError:
        kappa = None
    path = filter_candidate(fit.theta_hat, a_start, y)
    resid = y - lam.delta_hat - lam.beta_hat * path[:-1]
    return EstimateSet(
        fit, lam, lam_inf, kappa, alpha_used,
        math.sqrt(fit.q_min / y.size), math.sqrt(float(resid @ resid) / y.size),
    )

"""Closed-form limits of the gain and regression estimators.

All functions take explicit noise scales and use ``c0 = 1 - beta0``. They
raise :class:`AssumptionError` when a denominator is not positive, which is the
region where the limits are not defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssumptionError, IdentificationError
from .model import ModelParams

__all__ = [
    "LimitValues",
    "sigma_a_sq",
    "d_func",
    "D_limit",
    "sigma_adot_sq",
    "sigma_a_adot",
    "B_factor",
    "V0_matrix",
    "lambda_cov",
    "K_and_V2",
    "kappa_theta_var",
    "a_star_sq_limit",
    "a_star_cross_limit",
    "D1_limit",
    "limit_values",
]


def _positive(value: float, what: str) -> float:
    if not value > 0.0:
        raise AssumptionError(f"{what} must be positive, got {value}")
    return value


def sigma_a_sq(theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """``sigma_eps^2 theta0^2 / (2 c0 theta0 - 1)``."""
    den = _positive(2.0 * (1.0 - beta0) * theta0 - 1.0, "2(1-beta0)theta0 - 1")
    return sigma_eps**2 * theta0**2 / den


def d_func(theta: float, theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Curvature factor ``d(theta, theta0)`` of the NLS limit objective."""
    c0 = 1.0 - beta0
    s = sigma_a_sq(theta0, beta0, sigma_eps) / theta0**2
    den = _positive((2.0 * theta - 1.0), "2 theta - 1") * _positive(
        c0 * theta0 + theta - 1.0, "c0 theta0 + theta - 1"
    )
    return s * ((2.0 * c0 * theta0 - 1.0) * theta - (c0 * theta0 - 1.0)) / den


def D_limit(theta: float, theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Limit of ``log^-1(n) [Q_n(theta) - Q_n(theta0)]``: ``(theta - theta0)^2 d``."""
    return (theta - theta0) ** 2 * d_func(theta, theta0, beta0, sigma_eps)


def sigma_adot_sq(theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Limit variance of the filter's theta-derivative, written in its expanded form."""
    c0 = 1.0 - beta0
    s = sigma_a_sq(theta0, beta0, sigma_eps) / theta0**2
    num = theta0 * (2.0 - beta0) - 2.0 * theta0**2 * c0 - 1.0
    den = (2.0 * theta0 - 1.0) * (1.0 - theta0 * (2.0 - beta0))
    if den == 0.0:
        raise AssumptionError("zero denominator in sigma_adot_sq")
    return s * num / den


def sigma_a_adot(theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Limit covariance of the learning state and its theta-derivative."""
    c0 = 1.0 - beta0
    s = sigma_a_sq(theta0, beta0, sigma_eps) / theta0**2
    den = 1.0 - theta0 * (2.0 - beta0)
    if den == 0.0:
        raise AssumptionError("zero denominator in sigma_a_adot")
    return s * theta0 * (1.0 - c0 * theta0) / den


def B_factor(theta0: float, beta0: float, sigma_u: float = 1.0, sigma_eps: float = 1.0) -> float:
    """Variance inflation from using the estimated gain in the second step."""
    if not sigma_eps > 0.0:
        raise AssumptionError("sigma_eps must be positive")
    c0 = 1.0 - beta0
    num = beta0**2 * (2.0 * theta0 - 1.0) * (c0 * theta0 - 1.0) ** 2
    den = ((2.0 - beta0) * theta0 - 1.0) * (1.0 + theta0 * (c0 * (2.0 * theta0 - 1.0) - 1.0))
    if den == 0.0:
        raise AssumptionError("zero denominator in B_factor")
    return num / den * (sigma_u / sigma_eps) ** 2


def V0_matrix(theta0: float, beta0: float, alpha0: float) -> np.ndarray:
    """Rank-one limit covariance of the infeasible OLS estimator of ``(delta, beta)``."""
    scale = (2.0 * (1.0 - beta0) * theta0 - 1.0) / theta0**2
    v = np.array([alpha0, -1.0])
    return scale * np.outer(v, v)


def lambda_cov(theta0: float, beta0: float, alpha0: float, sigma_u: float = 1.0,
               sigma_eps: float = 1.0) -> np.ndarray:
    """Limit covariance of the feasible two-step estimator, ``(1 + B) V0``."""
    return (1.0 + B_factor(theta0, beta0, sigma_u, sigma_eps)) * V0_matrix(theta0, beta0, alpha0)


def kappa_theta_var(theta0: float, beta0: float) -> float:
    """Limit variance of the joint estimator's gain coordinate (closed form)."""
    if beta0 == 0.0:
        raise IdentificationError("the gain is not identified by the joint estimator at beta0 = 0")
    return (2.0 * theta0 - 1.0) * (theta0 * (2.0 - beta0) - 1.0) ** 2 / (beta0 * theta0) ** 2


def K_and_V2(theta0: float, beta0: float, sigma_eps: float = 1.0) -> tuple[np.ndarray, np.ndarray, float]:
    """Hessian limit ``K`` of the joint objective, ``V2 = sigma_eps^2 K^-1`` and the theta variance.

    ``K`` is indexed ``(beta, theta)``.
    """
    sa2 = sigma_a_sq(theta0, beta0, sigma_eps)
    sad = sigma_a_adot(theta0, beta0, sigma_eps)
    sd2 = sigma_adot_sq(theta0, beta0, sigma_eps)
    K = np.array([[sa2, beta0 * sad], [beta0 * sad, beta0**2 * sd2]])
    if beta0 == 0.0:
        raise IdentificationError("K is singular at beta0 = 0")
    det = K[0, 0] * K[1, 1] - K[0, 1] ** 2
    adj = np.array([[K[1, 1], -K[0, 1]], [-K[1, 0], K[0, 0]]])
    V2 = sigma_eps**2 * adj / det
    return K, V2, kappa_theta_var(theta0, beta0)


def a_star_sq_limit(theta: float, theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Limit of ``log^-1(n) sum_t a*_t(theta)^2`` for the filter deviation at ``theta``."""
    c0 = 1.0 - beta0
    den = _positive(2.0 * c0 * theta0 - 1.0, "2 c0 theta0 - 1") * _positive(
        c0 * theta0 + theta - 1.0, "c0 theta0 + theta - 1"
    )
    bracket = 1.0 + 2.0 * theta0 * (1.0 - c0) * (theta0 * (1.0 + c0) - 1.0) / den
    return sigma_eps**2 * theta**2 / _positive(2.0 * theta - 1.0, "2 theta - 1") * bracket


def a_star_cross_limit(theta: float, theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Limit of ``log^-1(n) sum_t a*_t a*_t(theta)``, true state times filter at ``theta``."""
    c0 = 1.0 - beta0
    den = _positive(c0 * theta0 + theta - 1.0, "c0 theta0 + theta - 1") * _positive(
        2.0 * c0 * theta0 - 1.0, "2 c0 theta0 - 1"
    )
    return sigma_eps**2 * theta * theta0 * ((1.0 + c0) * theta0 - 1.0) / den


def D1_limit(beta: float, theta: float, theta0: float, beta0: float, sigma_eps: float = 1.0) -> float:
    """Limit of ``log^-1(n) [Q_2n(kappa) - Q_2n(kappa0)]`` for the joint objective.

    Assembled as ``beta0^2 sigma_a^2 + beta^2 S11(theta) - 2 beta beta0 S01(theta)``
    from the moment limits of the filtered states.
    """
    s00 = sigma_a_sq(theta0, beta0, sigma_eps)
    s11 = a_star_sq_limit(theta, theta0, beta0, sigma_eps)
    s01 = a_star_cross_limit(theta, theta0, beta0, sigma_eps)
    return beta0**2 * s00 + beta**2 * s11 - 2.0 * beta * beta0 * s01


@dataclass(frozen=True)
class LimitValues:
    sigma_a_sq: float
    sigma_adot_sq: float
    sigma_a_adot: float
    theta_asvar: float
    B: float
    V0: np.ndarray
    lambda_cov: np.ndarray
    K: np.ndarray | None
    V2: np.ndarray | None
    kappa_theta_var: float | None

    def rows(self) -> list[tuple[str, float]]:
        """Flat ``(name, value)`` pairs for printing."""
        out = [
            ("sigma_a_sq", self.sigma_a_sq),
            ("sigma_adot_sq", self.sigma_adot_sq),
            ("sigma_a_adot", self.sigma_a_adot),
            ("theta_asvar", self.theta_asvar),
            ("B", self.B),
        ]
        for name, mat in (("V0", self.V0), ("lambda_cov", self.lambda_cov), ("K", self.K), ("V2", self.V2)):
            for (i, j), v in np.ndenumerate(mat if mat is not None else np.full((2, 2), np.nan)):
                out.append((f"{name}[{i},{j}]", float(v)))
        out.append(("kappa_theta_var", np.nan if self.kappa_theta_var is None else self.kappa_theta_var))
        return out


def limit_values(params: ModelParams) -> LimitValues:
    """Evaluate every limit at the true parameters. ``K``/``V2`` are None when ``beta0 = 0``."""
    th, b, se, su = params.theta0, params.beta0, params.sigma_eps, params.sigma_u
    sd2 = sigma_adot_sq(th, b, se)
    if b != 0.0:
        K, V2, kv = K_and_V2(th, b, se)
    else:
        K = V2 = kv = None
    return LimitValues(
        sigma_a_sq=sigma_a_sq(th, b, se),
        sigma_adot_sq=sd2,
        sigma_a_adot=sigma_a_adot(th, b, se),
        theta_asvar=su**2 / sd2,
        B=B_factor(th, b, su, se),
        V0=V0_matrix(th, b, params.alpha0),
        lambda_cov=lambda_cov(th, b, params.alpha0, su, se),
        K=K,
        V2=V2,
        kappa_theta_var=kv,
    )
